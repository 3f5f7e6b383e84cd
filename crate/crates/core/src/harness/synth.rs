//! Per-event-type corpus statistics and a seeded synthetic corpus generator
//! driven by them.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Geometric, Poisson};

use crate::alphabet::{Alphabet, Color, Sequence};
use crate::error::{Error, Result};
use crate::events::{diff_against_reference, extract_events, EventList};
use crate::harness::corpus::{Corpus, Record};
use crate::scoring::lcs_score;

/// Mean and standard deviation of one event count.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub sd: f64,
}

impl Moments {
    /// Mean and population standard deviation.
    pub fn of(values: impl IntoIterator<Item = f64>) -> Self {
        let values: Vec<f64> = values.into_iter().collect();
        if values.is_empty() {
            return Moments::default();
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        Moments {
            mean,
            sd: var.sqrt(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CorpusStats {
    pub substitutions: Moments,
    pub deletions: Moments,
    pub insertions: Moments,
}

impl FromStr for CorpusStats {
    type Err = Error;

    /// Parses `subs=MEAN:SD,del=MEAN:SD,ins=MEAN:SD`; omitted kinds are zero.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: String| Error::Parse {
            path: "stats".into(),
            line: 1,
            message: msg,
        };
        let mut stats = CorpusStats::default();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| bad(format!("expected KEY=MEAN:SD, found {part:?}")))?;
            let (mean, sd) = value
                .split_once(':')
                .ok_or_else(|| bad(format!("expected MEAN:SD, found {value:?}")))?;
            let number = |t: &str| -> Result<f64> {
                t.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite() && *v >= 0.0)
                    .ok_or_else(|| {
                        bad(format!(
                            "expected a finite non-negative number, found {t:?}"
                        ))
                    })
            };
            let m = Moments {
                mean: number(mean)?,
                sd: number(sd)?,
            };
            match key.trim() {
                "subs" | "sub" => stats.substitutions = m,
                "del" | "dels" => stats.deletions = m,
                "ins" => stats.insertions = m,
                other => return Err(bad(format!("unknown event kind {other:?}"))),
            }
        }
        Ok(stats)
    }
}

impl fmt::Display for CorpusStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "subs={:.2}:{:.2},del={:.2}:{:.2},ins={:.2}:{:.2}",
            self.substitutions.mean,
            self.substitutions.sd,
            self.deletions.mean,
            self.deletions.sd,
            self.insertions.mean,
            self.insertions.sd
        )
    }
}

/// Event counts of one sequence against the reference.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EventCounts {
    pub substitutions: usize,
    pub deletions: usize,
    pub insertions: usize,
    /// Total length of the insertions (substitutions not included).
    pub inserted_len: usize,
}

impl EventCounts {
    pub fn total(&self) -> usize {
        self.substitutions + self.deletions + self.insertions
    }

    /// Counts observed through the optimal alignment.
    pub fn observed(reference: &[Color], q: &[Color]) -> Self {
        let d = diff_against_reference(reference, q);
        EventCounts {
            substitutions: d.substitutions.len(),
            deletions: d.deletions.len(),
            insertions: d.insertion_runs,
            inserted_len: d.events.inserted_len() - d.substitutions.len(),
        }
    }
}

/// Mean and population sd of each event count over the corpus.
pub fn corpus_stats(corpus: &Corpus, reference: &Sequence) -> Result<CorpusStats> {
    if corpus.is_empty() {
        return Err(Error::InvalidModel("statistics of an empty corpus".into()));
    }
    let counts: Vec<EventCounts> = corpus
        .records()
        .iter()
        .map(|r| EventCounts::observed(reference, &r.sequence))
        .collect();
    Ok(stats_of(&counts))
}

pub fn stats_of(counts: &[EventCounts]) -> CorpusStats {
    CorpusStats {
        substitutions: Moments::of(counts.iter().map(|c| c.substitutions as f64)),
        deletions: Moments::of(counts.iter().map(|c| c.deletions as f64)),
        insertions: Moments::of(counts.iter().map(|c| c.insertions as f64)),
    }
}

/// Redraws allowed per sequence before placement is declared infeasible.
const PLACEMENT_ATTEMPTS: usize = 64;

/// Mean inserted length per insertion event.
pub const MEAN_INSERTION_LEN: f64 = 1.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SynthConfig {
    /// Number of variable sites shared by the whole corpus; `None` uses one
    /// site per ten reference positions.
    pub site_pool: Option<usize>,
    /// Minimum distance between two pool sites.
    pub min_spacing: usize,
}

impl SynthConfig {
    pub const DEFAULT: SynthConfig = SynthConfig {
        site_pool: None,
        min_spacing: 6,
    };

    fn pool_size(&self, reference_len: usize) -> usize {
        self.site_pool.unwrap_or(reference_len / 10)
    }
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self::DEFAULT
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticCorpus {
    pub corpus: Corpus,
    /// Event counts planted in each record, in corpus order.
    pub planted: Vec<EventCounts>,
    /// The planted events themselves; substitutions appear as a deletion
    /// plus a one-character insertion at the same site.
    pub planted_events: Vec<EventList>,
    /// The shared variable sites, ascending.
    pub sites: Vec<usize>,
}

/// [`generate_synthetic_corpus_with`] using the default configuration.
pub fn generate_synthetic_corpus(
    reference: &Sequence,
    alphabet: &Alphabet,
    count: usize,
    stats: &CorpusStats,
    seed: u64,
) -> Result<SyntheticCorpus> {
    generate_synthetic_corpus_with(
        reference,
        alphabet,
        count,
        stats,
        seed,
        SynthConfig::DEFAULT,
    )
}

/// Builds a seeded corpus of variants of `reference`.
///
/// A pool of variable sites is drawn once: interior positions outside
/// homopolymer runs, at least `min_spacing` apart, so events never touch,
/// every candidate gap keeps unchanged neighbors, and neighboring events are
/// separated by a buffer of unchanged characters that makes it unlikely for
/// an alignment to trade one event for another. Each sequence draws its event
/// counts from a negative binomial matched to the mean/sd (Poisson when the
/// sd does not exceed the Poisson spread), takes distinct pool sites for
/// them, and applies them. Substitutions avoid the colors of both
/// neighbors; insertions go into the gap before their site, have length
/// `1 + Geometric` (mean [`MEAN_INSERTION_LEN`]), and use only colors
/// absent from both flanks so no part of them can shift to another gap.
/// A placement whose optimal alignment does not report exactly the planted
/// events (neighboring events can trade places at equal cost) is redrawn.
pub fn generate_synthetic_corpus_with(
    reference: &Sequence,
    alphabet: &Alphabet,
    count: usize,
    stats: &CorpusStats,
    seed: u64,
    config: SynthConfig,
) -> Result<SyntheticCorpus> {
    alphabet.check(reference)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let subs = CountSampler::new(stats.substitutions)?;
    let dels = CountSampler::new(stats.deletions)?;
    let ins = CountSampler::new(stats.insertions)?;
    let planter = EventPlanter::new(reference, alphabet, config, &mut rng)?;
    let width = (count.max(1) - 1).to_string().len().max(4);

    let mut records = Vec::with_capacity(count);
    let mut planted = Vec::with_capacity(count);
    let mut planted_events = Vec::with_capacity(count);
    for index in 0..count {
        let counts = EventCounts {
            substitutions: subs.draw(&mut rng),
            deletions: dels.draw(&mut rng),
            insertions: ins.draw(&mut rng),
            inserted_len: 0,
        };
        let plant = planter.plant(counts, &mut rng).map_err(|e| match e {
            Error::Infeasible(msg) => Error::Infeasible(format!("sequence {index}: {msg}")),
            other => other,
        })?;
        records.push(Record {
            id: format!("syn{index:0width$}"),
            sequence: plant.sequence,
        });
        planted.push(plant.counts);
        planted_events.push(plant.events);
    }
    Ok(SyntheticCorpus {
        corpus: Corpus::new(alphabet.clone(), records)?,
        planted,
        planted_events,
        sites: planter.sites,
    })
}

/// Up to `target` random interior sites whose character differs from both
/// neighbors, pairwise at least `spacing` apart. With three colors the two
/// neighbors must also agree, leaving a substitute that matches neither.
fn site_pool<R: Rng + ?Sized>(
    reference: &[Color],
    k: usize,
    target: usize,
    spacing: usize,
    rng: &mut R,
) -> Vec<usize> {
    let n = reference.len();
    let mut eligible: Vec<usize> = (1..n.saturating_sub(1))
        .filter(|&p| {
            let (before, here, after) = (reference[p - 1], reference[p], reference[p + 1]);
            before != here && after != here && (k != 3 || before == after)
        })
        .collect();
    eligible.shuffle(rng);
    let mut chosen = std::collections::BTreeSet::new();
    for p in eligible {
        if chosen.len() == target {
            break;
        }
        let near = chosen
            .range(p.saturating_sub(spacing - 1)..p + spacing)
            .next()
            .is_some();
        if !near {
            chosen.insert(p);
        }
    }
    chosen.into_iter().collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Planted {
    Substitution,
    Deletion,
    Insertion,
}

/// One planted variant of the reference.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlantedSequence {
    pub sequence: Sequence,
    /// Requested counts, with `inserted_len` filled in.
    pub counts: EventCounts,
    pub events: EventList,
}

/// Plants non-interfering events at a fixed pool of reference sites (see
/// [`generate_synthetic_corpus_with`] for the rules).
#[derive(Clone, Debug)]
pub struct EventPlanter {
    reference: Sequence,
    k: usize,
    sites: Vec<usize>,
    extra_len: Geometric,
}

impl EventPlanter {
    /// Draws the site pool.
    pub fn new<R: Rng + ?Sized>(
        reference: &Sequence,
        alphabet: &Alphabet,
        config: SynthConfig,
        rng: &mut R,
    ) -> Result<Self> {
        alphabet.check(reference)?;
        let sites = site_pool(
            reference,
            alphabet.size(),
            config.pool_size(reference.len()),
            config.min_spacing.max(2),
            rng,
        );
        let extra_len = Geometric::new(1.0 / MEAN_INSERTION_LEN)
            .map_err(|e| Error::Infeasible(e.to_string()))?;
        Ok(EventPlanter {
            reference: reference.clone(),
            k: alphabet.size(),
            sites,
            extra_len,
        })
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    /// Draws sites and contents until the optimal edit alignment of the
    /// result against the reference reports exactly the planted events, and
    /// every longest common subsequence leaves the same characters of either
    /// side unmatched.
    pub fn plant<R: Rng + ?Sized>(
        &self,
        counts: EventCounts,
        rng: &mut R,
    ) -> Result<PlantedSequence> {
        if counts.substitutions > 0 && self.k < 2 {
            return Err(Error::Infeasible(
                "substitutions need at least two colors".into(),
            ));
        }
        let total = counts.total();
        if total > self.sites.len() {
            return Err(Error::Infeasible(format!(
                "{total} events do not fit in a pool of {} sites",
                self.sites.len()
            )));
        }
        for _ in 0..PLACEMENT_ATTEMPTS {
            let (events, inserted_len) = self.draw(counts, rng);
            let q = events.apply(&self.reference)?;
            if extract_events(&self.reference, &q) == events
                && lcs_is_rigid(&self.reference, &q, events.deletion_count())
            {
                return Ok(PlantedSequence {
                    sequence: q,
                    counts: EventCounts {
                        inserted_len,
                        ..counts
                    },
                    events,
                });
            }
        }
        Err(Error::Infeasible(format!(
            "no unambiguous placement of {total} events in {PLACEMENT_ATTEMPTS} draws"
        )))
    }

    /// One placement; returns the events and the planted insertion length.
    fn draw<R: Rng + ?Sized>(&self, counts: EventCounts, rng: &mut R) -> (EventList, usize) {
        let reference = &self.reference;
        let total = counts.total();
        let mut kinds = Vec::with_capacity(total);
        kinds.extend(std::iter::repeat_n(
            Planted::Substitution,
            counts.substitutions,
        ));
        kinds.extend(std::iter::repeat_n(Planted::Deletion, counts.deletions));
        kinds.extend(std::iter::repeat_n(Planted::Insertion, counts.insertions));
        kinds.shuffle(rng);
        let picked: Vec<usize> = sample(rng, self.sites.len(), total)
            .into_iter()
            .map(|i| self.sites[i])
            .collect();

        let mut events = EventList::default();
        let mut inserted_len = 0;
        for (site, kind) in picked.into_iter().zip(kinds) {
            let (before, here) = (reference[site - 1], reference[site]);
            match kind {
                Planted::Substitution => {
                    let after = reference[site + 1];
                    let color = self
                        .pick(rng, &[here, before, after])
                        .or_else(|| self.pick(rng, &[here]))
                        .unwrap_or(here);
                    events.deletions.insert(site);
                    events.insertions.insert(site, vec![color]);
                }
                Planted::Deletion => {
                    events.deletions.insert(site);
                }
                Planted::Insertion => {
                    let len = 1 + self.extra_len.sample(rng) as usize;
                    inserted_len += len;
                    let content = (0..len)
                        .map(|_| {
                            self.pick(rng, &[before, here])
                                .unwrap_or_else(|| rng.random_range(0..self.k) as Color)
                        })
                        .collect();
                    events.insertions.insert(site, content);
                }
            }
        }
        (events, inserted_len)
    }

    /// A uniform color outside `avoid`, if one exists.
    fn pick<R: Rng + ?Sized>(&self, rng: &mut R, avoid: &[Color]) -> Option<Color> {
        let allowed: Vec<Color> = (0..self.k as Color)
            .filter(|c| !avoid.contains(c))
            .collect();
        allowed.choose(rng).copied()
    }
}

/// Whether `reference` and `q` have an LCS leaving exactly `deletions`
/// reference characters unmatched, and all their longest common
/// subsequences leave the same characters of each side unmatched.
fn lcs_is_rigid(reference: &[Color], q: &[Color], deletions: usize) -> bool {
    let (n, m) = (reference.len(), q.len());
    let a = lcs_score(reference, q).0 as i32;
    if n - a as usize != deletions {
        return false;
    }
    let width = (n - a as usize) + (m - a as usize) + 1;
    let forward = LcsBand::fill(reference.iter(), q.iter(), n, m, width);
    let backward = LcsBand::fill(reference.iter().rev(), q.iter().rev(), n, m, width);
    // A reference character can go unmatched iff some split point j of `q`
    // pairs its prefix and suffix LCS values up to the full length.
    let optional_r = (0..n)
        .filter(|&i| {
            let lo = i.saturating_sub(width);
            (lo..=(i + width).min(m)).any(|j| forward.at(i, j) + backward.at(n - i - 1, m - j) == a)
        })
        .count();
    let optional_q = (0..m)
        .filter(|&j| {
            let lo = j.saturating_sub(width);
            (lo..=(j + width).min(n)).any(|i| forward.at(i, j) + backward.at(n - i, m - j - 1) == a)
        })
        .count();
    optional_r == n - a as usize && optional_q == m - a as usize
}

/// Prefix LCS table restricted to `|i - j| <= width`; cells outside read as
/// a large negative value.
struct LcsBand {
    width: usize,
    stride: usize,
    value: Vec<i32>,
}

impl LcsBand {
    const OUTSIDE: i32 = i32::MIN / 4;

    fn fill<'a>(
        r: impl Iterator<Item = &'a Color> + Clone,
        q: impl Iterator<Item = &'a Color> + Clone,
        n: usize,
        m: usize,
        width: usize,
    ) -> Self {
        let r: Vec<Color> = r.copied().collect();
        let q: Vec<Color> = q.copied().collect();
        let width = width.min(n.max(m));
        let stride = 2 * width + 1;
        let mut band = LcsBand {
            width,
            stride,
            value: vec![Self::OUTSIDE; (n + 1) * stride],
        };
        for i in 0..=n {
            for j in i.saturating_sub(width)..=(i + width).min(m) {
                let v = if i == 0 || j == 0 {
                    0
                } else {
                    let diag = band.at(i - 1, j - 1) + i32::from(r[i - 1] == q[j - 1]);
                    diag.max(band.at(i - 1, j)).max(band.at(i, j - 1))
                };
                band.value[i * stride + j + width - i] = v;
            }
        }
        band
    }

    fn at(&self, i: usize, j: usize) -> i32 {
        if i.abs_diff(j) > self.width || i * self.stride >= self.value.len() {
            Self::OUTSIDE
        } else {
            self.value[i * self.stride + j + self.width - i]
        }
    }
}

/// Non-negative integer sampler matched to a mean and sd.
enum CountSampler {
    Zero,
    Poisson(Poisson<f64>),
    /// Gamma–Poisson mixture, i.e. a negative binomial.
    Mixed(Gamma<f64>),
}

impl CountSampler {
    fn new(m: Moments) -> Result<Self> {
        let err = |e: String| Error::Infeasible(format!("event distribution {m:?}: {e}"));
        if !(m.mean.is_finite() && m.sd.is_finite()) || m.mean < 0.0 || m.sd < 0.0 {
            return Err(err("mean and sd must be finite and non-negative".into()));
        }
        if m.mean == 0.0 {
            return Ok(CountSampler::Zero);
        }
        let var = m.sd * m.sd;
        if var <= m.mean {
            return Poisson::new(m.mean)
                .map(CountSampler::Poisson)
                .map_err(|e| err(e.to_string()));
        }
        let shape = m.mean * m.mean / (var - m.mean);
        let scale = (var - m.mean) / m.mean;
        Gamma::new(shape, scale)
            .map(CountSampler::Mixed)
            .map_err(|e| err(e.to_string()))
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        match self {
            CountSampler::Zero => 0,
            CountSampler::Poisson(p) => p.sample(rng) as usize,
            CountSampler::Mixed(g) => {
                let rate = g.sample(rng);
                if rate <= 0.0 {
                    return 0;
                }
                Poisson::new(rate)
                    .map(|p| p.sample(rng) as usize)
                    .unwrap_or(0)
            }
        }
    }
}
