//! LCS attack for secrets that differ from a reference by disjoint singleton
//! deletions and arbitrary-length insertions at known candidate sites.
//!
//! Phase 1 queries the reference once and then binary-searches the deletion
//! candidates: removing a candidate set `S` from the reference lowers the
//! score by exactly the number of non-deleted characters in `S`. Phase 2 works
//! against the reduced reference `R′` (reference minus the found deletions).
//! For each color it inserts that color at every open candidate gap and
//! binary-searches the gaps that raise the score. The content of each located
//! site is recovered by a per-color census of repeated-color probes followed
//! by the general attack's interleaving, run against a local oracle. The
//! secret length is known, so the total inserted length is known too, and
//! phase 2 stops as soon as all of it is accounted for.

use std::collections::BTreeSet;

use crate::alphabet::Color;
use crate::attack::general::{interleave, ColorCensus};
use crate::attack::{ceil_log2, AttackResult};
use crate::error::{Error, Result};
use crate::events::EventList;
use crate::model::VariationModel;
use crate::oracle::Oracle;
use crate::scoring::Score;

/// Real deletions among `tested` candidates removed from the reference, given
/// the probe score and the reference score `base`.
pub fn deletions_in_test(score: Score, base: Score, tested: usize) -> Result<usize> {
    let count = (score.0 + tested).checked_sub(base.0);
    match count {
        Some(c) if c <= tested => Ok(c),
        _ => Err(Error::Inconsistent(format!(
            "score {} with {tested} candidates removed from a reference scoring {}",
            score.0, base.0
        ))),
    }
}

/// `(d + e)·⌈log₂ M⌉ + (ε + 2)·K + 1`, with `M` the larger candidate set.
pub fn indel_bound(
    deletions: usize,
    insertions: usize,
    inserted_len: usize,
    m_del: usize,
    m_ins: usize,
    k: usize,
) -> usize {
    (deletions + insertions) * ceil_log2(m_del.max(m_ins)) + (inserted_len + 2) * k + 1
}

/// A contiguous block of deletion candidates with a known deletion count.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DeletionSearchNode {
    pub lo: usize,
    pub hi: usize,
    pub count: usize,
}

impl DeletionSearchNode {
    pub fn len(&self) -> usize {
        self.hi - self.lo + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeletionSearch {
    pub deletions: BTreeSet<usize>,
    /// `a(Q, R)`.
    pub base: usize,
    pub queries: usize,
}

pub fn phase1_find_deletions(
    oracle: &mut Oracle,
    model: &VariationModel,
) -> Result<DeletionSearch> {
    let reference = model.reference();
    let candidates = model.sub_positions();
    let base = oracle.query_lcs(reference);
    let mut queries = 1;
    let d = reference.len() - base.0;
    if d > candidates.len() {
        return Err(Error::ModelViolation(format!(
            "{d} reference characters are missing but only {} are deletion candidates",
            candidates.len()
        )));
    }
    let mut found = BTreeSet::new();
    let mut stack = Vec::new();
    if d > 0 {
        stack.push(DeletionSearchNode {
            lo: 0,
            hi: candidates.len() - 1,
            count: d,
        });
    }
    while let Some(node) = stack.pop() {
        if node.count == 0 {
            continue;
        }
        if node.count == node.len() {
            found.extend(&candidates[node.lo..=node.hi]);
            continue;
        }
        let mid = (node.lo + node.hi) / 2;
        let tested = &candidates[node.lo..=mid];
        let probe: Vec<Color> = reference
            .iter()
            .enumerate()
            .filter(|(i, _)| !found.contains(i) && tested.binary_search(i).is_err())
            .map(|(_, &c)| c)
            .collect();
        let score = oracle.query_lcs(&probe);
        queries += 1;
        let left = deletions_in_test(score, base, tested.len())?;
        let right_len = node.hi - mid;
        if left > node.count || node.count - left > right_len {
            return Err(Error::Inconsistent(format!(
                "{left} of {} deletions placed in candidates {}..={}",
                node.count, candidates[node.lo], candidates[mid]
            )));
        }
        stack.push(DeletionSearchNode {
            lo: mid + 1,
            hi: node.hi,
            count: node.count - left,
        });
        stack.push(DeletionSearchNode {
            lo: node.lo,
            hi: mid,
            count: left,
        });
    }
    Ok(DeletionSearch {
        deletions: found,
        base: base.0,
        queries,
    })
}

/// The reference with found deletions applied, and the candidate insertion
/// gaps mapped onto it. Gaps that collapse onto the same slot are merged,
/// keeping the smallest reference gap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedReference {
    seq: Vec<Color>,
    /// Gaps in the reduced sequence, strictly increasing.
    sites: Vec<usize>,
    /// Reference gap for each entry of `sites`.
    origins: Vec<usize>,
}

impl ReducedReference {
    pub fn new(
        reference: &[Color],
        deletions: &BTreeSet<usize>,
        insertion_sites: &[usize],
    ) -> Self {
        let seq = reference
            .iter()
            .enumerate()
            .filter(|(i, _)| !deletions.contains(i))
            .map(|(_, &c)| c)
            .collect();
        let mut sites: Vec<usize> = Vec::new();
        let mut origins = Vec::new();
        for &g in insertion_sites {
            let reduced = g - deletions.range(..g).count();
            if sites.last() != Some(&reduced) {
                sites.push(reduced);
                origins.push(g);
            }
        }
        ReducedReference {
            seq,
            sites,
            origins,
        }
    }

    pub fn sequence(&self) -> &[Color] {
        &self.seq
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    /// Reference gap of site `index`.
    pub fn origin(&self, index: usize) -> usize {
        self.origins[index]
    }

    /// The reduced sequence with `content` inserted at each listed site index.
    fn with_insertions<'a, I>(&self, insertions: I) -> Vec<Color>
    where
        I: IntoIterator<Item = (usize, &'a [Color])>,
    {
        let mut out = Vec::with_capacity(self.seq.len() + 8);
        let mut next = 0;
        for (index, content) in insertions {
            let gap = self.sites[index];
            out.extend_from_slice(&self.seq[next..gap]);
            out.extend_from_slice(content);
            next = gap;
        }
        out.extend_from_slice(&self.seq[next..]);
        out
    }
}

/// A located insertion site with the color that revealed it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InsertionSite {
    /// Index into [`ReducedReference::sites`].
    pub index: usize,
    pub first_color: Color,
}

/// Drives LCS queries against the reduced reference and meters them.
struct InsertionProber<'a> {
    oracle: &'a mut Oracle,
    reduced: &'a ReducedReference,
    search_queries: usize,
    extension_queries: usize,
}

impl InsertionProber<'_> {
    fn gain(&mut self, probe: &[Color]) -> Result<usize> {
        let score = self.oracle.query_lcs(probe).0;
        score.checked_sub(self.reduced.seq.len()).ok_or_else(|| {
            Error::Inconsistent(format!(
                "score {score} below the reduced reference length {}",
                self.reduced.seq.len()
            ))
        })
    }

    /// Gain from inserting one `color` at each listed site index.
    fn color_gain(&mut self, color: Color, indices: &[usize]) -> Result<usize> {
        let one = [color];
        let probe = self
            .reduced
            .with_insertions(indices.iter().map(|&i| (i, &one[..])));
        self.search_queries += 1;
        self.gain(&probe)
    }

    /// Sites among `open` whose insertion contains `color`.
    fn locate(&mut self, color: Color, open: &[usize]) -> Result<Vec<usize>> {
        if open.is_empty() {
            return Ok(Vec::new());
        }
        let total = self.color_gain(color, open)?;
        if total > open.len() {
            return Err(Error::Inconsistent(format!(
                "color {color} gains {total} over {} open sites",
                open.len()
            )));
        }
        let mut found: Vec<usize> = Vec::new();
        let mut stack = Vec::new();
        if total > 0 {
            stack.push((0, open.len() - 1, total));
        }
        while let Some((lo, hi, count)) = stack.pop() {
            if count == 0 {
                continue;
            }
            if count == hi - lo + 1 {
                found.extend(&open[lo..=hi]);
                continue;
            }
            let mid = (lo + hi) / 2;
            let mut probe_sites: Vec<usize> =
                found.iter().chain(&open[lo..=mid]).copied().collect();
            probe_sites.sort_unstable();
            let left = self
                .color_gain(color, &probe_sites)?
                .checked_sub(found.len())
                .filter(|&l| l <= count && count - l <= hi - mid)
                .ok_or_else(|| {
                    Error::Inconsistent(format!(
                        "color {color}: bad split of {count} sites over gaps {}..={}",
                        self.reduced.origins[open[lo]], self.reduced.origins[open[hi]]
                    ))
                })?;
            stack.push((mid + 1, hi, count - left));
            stack.push((lo, mid, left));
        }
        found.sort_unstable();
        Ok(found)
    }

    /// Score gain of inserting `w` at a single site.
    fn site_gain(&mut self, index: usize, w: &[Color]) -> Result<usize> {
        let probe = self.reduced.with_insertions([(index, w)]);
        self.extension_queries += 1;
        self.gain(&probe)
    }

    /// Largest `n ≤ cap` with `color^n` fully matching at the site, probing
    /// lengths `start, start + 1, …` (with `start − 1` already known to match).
    fn run_length(
        &mut self,
        index: usize,
        color: Color,
        start: usize,
        cap: usize,
    ) -> Result<usize> {
        let mut n = start - 1;
        while n < cap {
            let gain = self.site_gain(index, &vec![color; n + 1])?;
            if gain == n + 1 {
                n += 1;
            } else if gain == n {
                break;
            } else {
                return Err(Error::Inconsistent(format!(
                    "run of {} × color {color} at gap {} gained {gain}",
                    n + 1,
                    self.reduced.origins[index]
                )));
            }
        }
        Ok(n)
    }

    /// Recovers the content at a site whose insertion holds `site.first_color`
    /// and no smaller color, with at most `cap` characters.
    fn extend(&mut self, site: InsertionSite, k: usize, cap: usize) -> Result<Vec<Color>> {
        let mut counts = vec![0usize; k];
        let first = site.first_color as usize;
        counts[first] = self.run_length(site.index, site.first_color, 2, cap)?;
        let mut total = counts[first];
        for (color, count) in counts.iter_mut().enumerate().skip(first + 1) {
            if total == cap {
                break;
            }
            *count = self.run_length(site.index, color as Color, 1, cap - total)?;
            total += *count;
        }
        let census = ColorCensus::from_counts(counts);
        let index = site.index;
        let (content, _) = interleave(&census.ascending(), |w| self.site_gain(index, w), |_| {})?;
        Ok(content)
    }
}

/// Locates every insertion site, trying colors in alphabet order and
/// excluding sites already found by an earlier color.
pub fn phase2_find_insertions(
    oracle: &mut Oracle,
    reduced: &ReducedReference,
) -> Result<(Vec<InsertionSite>, usize)> {
    let k = oracle.alphabet().size();
    let mut prober = InsertionProber {
        oracle,
        reduced,
        search_queries: 0,
        extension_queries: 0,
    };
    let mut open: Vec<usize> = (0..reduced.sites.len()).collect();
    let mut sites = Vec::new();
    for color in 0..k as Color {
        let found = prober.locate(color, &open)?;
        open.retain(|i| found.binary_search(i).is_err());
        sites.extend(found.into_iter().map(|index| InsertionSite {
            index,
            first_color: color,
        }));
    }
    sites.sort_by_key(|s| s.index);
    Ok((sites, prober.search_queries))
}

/// Recovers the inserted content at located sites. `inserted_len` is the total
/// number of inserted characters. Returns the events (keyed by reference gap)
/// and the queries spent.
pub fn phase2_extend_insertions(
    oracle: &mut Oracle,
    reduced: &ReducedReference,
    sites: &[InsertionSite],
    inserted_len: usize,
) -> Result<(EventList, usize)> {
    let k = oracle.alphabet().size();
    let mut prober = InsertionProber {
        oracle,
        reduced,
        search_queries: 0,
        extension_queries: 0,
    };
    let mut events = EventList::default();
    let mut remaining = inserted_len;
    for (n, &site) in sites.iter().enumerate() {
        let pending = sites.len() - n - 1;
        let cap = remaining
            .checked_sub(pending)
            .filter(|&c| c > 0)
            .ok_or_else(|| {
                Error::Inconsistent(format!(
                    "{} sites but {inserted_len} inserted characters",
                    sites.len()
                ))
            })?;
        let content = prober.extend(site, k, cap)?;
        remaining -= content.len();
        events
            .insertions
            .insert(reduced.origin(site.index), content);
    }
    if remaining != 0 {
        return Err(Error::ModelViolation(format!(
            "{remaining} inserted characters were not found at any candidate gap"
        )));
    }
    Ok((events, prober.extension_queries))
}

/// Queries spent in each part of the attack.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PhaseCounts {
    /// Phase 1, including the reference query.
    pub deletion_search: usize,
    pub insertion_search: usize,
    pub extension: usize,
}

impl PhaseCounts {
    pub fn total(&self) -> usize {
        self.deletion_search + self.insertion_search + self.extension
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndelRun {
    pub result: AttackResult,
    pub events: EventList,
    pub phases: PhaseCounts,
}

pub fn run_indel_attack(oracle: &mut Oracle, model: &VariationModel) -> Result<AttackResult> {
    run_indel_attack_detailed(oracle, model).map(|run| run.result)
}

/// Runs both phases, also returning the recovered events and per-phase costs.
pub fn run_indel_attack_detailed(oracle: &mut Oracle, model: &VariationModel) -> Result<IndelRun> {
    let k = oracle.alphabet().size();
    let reference = model.reference();
    oracle.alphabet().check(reference)?;
    let n = oracle.secret_len();

    let phase1 = phase1_find_deletions(oracle, model)?;
    let mut phases = PhaseCounts {
        deletion_search: phase1.queries,
        ..PhaseCounts::default()
    };
    let reduced = ReducedReference::new(reference, &phase1.deletions, model.insertion_sites());
    let inserted_len = n.checked_sub(phase1.base).ok_or_else(|| {
        Error::Inconsistent(format!(
            "secret length {n} below its reference score {}",
            phase1.base
        ))
    })?;

    let mut events = EventList {
        deletions: phase1.deletions,
        ..EventList::default()
    };
    let mut prober = InsertionProber {
        oracle,
        reduced: &reduced,
        search_queries: 0,
        extension_queries: 0,
    };
    let mut open: Vec<usize> = (0..reduced.sites.len()).collect();
    let mut remaining = inserted_len;
    for color in 0..k as Color {
        if remaining == 0 {
            break;
        }
        let found = prober.locate(color, &open)?;
        open.retain(|i| found.binary_search(i).is_err());
        for (j, &index) in found.iter().enumerate() {
            let pending = found.len() - j - 1;
            let cap = remaining
                .checked_sub(pending)
                .filter(|&c| c > 0)
                .ok_or_else(|| {
                    Error::Inconsistent(format!(
                        "more sites than the {inserted_len} inserted characters"
                    ))
                })?;
            let site = InsertionSite {
                index,
                first_color: color,
            };
            let content = prober.extend(site, k, cap)?;
            remaining -= content.len();
            events.insertions.insert(reduced.origin(index), content);
        }
    }
    if remaining != 0 {
        return Err(Error::ModelViolation(format!(
            "{remaining} inserted characters were not found at any candidate gap"
        )));
    }
    phases.insertion_search = prober.search_queries;
    phases.extension = prober.extension_queries;

    let recovered = events.apply(reference)?;
    if recovered.len() != n {
        return Err(Error::Inconsistent(format!(
            "recovered {} characters for a secret of length {n}",
            recovered.len()
        )));
    }
    let bound = indel_bound(
        events.deletion_count(),
        events.insertion_count(),
        events.inserted_len(),
        model.m(),
        model.insertion_sites().len(),
        k,
    );
    let transcript = oracle.transcript();
    Ok(IndelRun {
        result: AttackResult {
            recovered,
            guesses_used: phases.total(),
            bound,
            transcript,
        },
        events,
        phases,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Alphabet;
    use crate::scoring::lcs_score;
    use std::collections::BTreeMap;

    #[test]
    fn deletion_count_formula() {
        assert_eq!(deletions_in_test(Score(9), Score(10), 2).unwrap(), 1);
        assert_eq!(deletions_in_test(Score(10), Score(10), 2).unwrap(), 2);
        assert_eq!(deletions_in_test(Score(8), Score(10), 2).unwrap(), 0);
        assert!(deletions_in_test(Score(7), Score(10), 2).is_err());
        assert!(deletions_in_test(Score(11), Score(10), 2).is_err());
    }

    #[test]
    fn deletion_count_on_real_strings() {
        let dna = Alphabet::dna();
        let r = dna.parse("ACGTTGCAAC").unwrap();
        // Delete reference positions 2 (G) and 6 (C).
        let q = dna.parse("ACTTGAAC").unwrap();
        let base = lcs_score(&q, &r);
        assert_eq!(base, Score(8));
        let without = |drop: &[usize]| -> Vec<Color> {
            r.iter()
                .enumerate()
                .filter(|(i, _)| !drop.contains(i))
                .map(|(_, &c)| c)
                .collect()
        };
        for (tested, expected) in [(&[2, 4][..], 1), (&[2, 6][..], 2), (&[0, 9][..], 0)] {
            let score = lcs_score(&q, &without(tested));
            assert_eq!(
                deletions_in_test(score, base, tested.len()).unwrap(),
                expected
            );
        }
    }

    #[test]
    fn reduced_reference_merges_collapsed_gaps() {
        let r: Vec<Color> = vec![0, 1, 2, 3, 0, 1];
        let reduced = ReducedReference::new(&r, &BTreeSet::from([2]), &[0, 2, 3, 6]);
        assert_eq!(reduced.sequence(), [0, 1, 3, 0, 1]);
        assert_eq!(reduced.sites(), [0, 2, 5]);
        assert_eq!((reduced.origin(1), reduced.origin(2)), (2, 6));
        let probe = reduced.with_insertions([(0, &[2][..]), (1, &[2, 2][..])]);
        assert_eq!(probe, [2, 0, 1, 2, 2, 3, 0, 1]);
    }

    fn dna_model(reference: &str, subs: Vec<usize>, gaps: Vec<usize>) -> VariationModel {
        VariationModel::new(Alphabet::dna().parse(reference).unwrap(), subs, gaps).unwrap()
    }

    #[test]
    fn unchanged_secret() {
        let model = dna_model(
            "ACGTACGTACGTACGT",
            (0..16).step_by(2).collect(),
            (1..16).step_by(3).collect(),
        );
        let mut o = Oracle::new(Alphabet::dna(), model.reference().clone()).unwrap();
        let run = run_indel_attack_detailed(&mut o, &model).unwrap();
        assert_eq!(run.result.recovered, *model.reference());
        assert!(run.events.is_empty());
        assert!(run.result.guesses_used <= 4 + 2);
        assert_eq!(run.result.guesses_used, 1);
    }

    #[test]
    fn single_deletion_among_eight() {
        let dna = Alphabet::dna();
        let model = dna_model("ACGTTGCAACGTACGT", vec![0, 2, 4, 6, 8, 10, 12, 14], vec![]);
        let q = dna.parse("ACGTTGCAACGTCGT").unwrap();
        let mut o = Oracle::new(dna, q).unwrap();
        let phase1 = phase1_find_deletions(&mut o, &model).unwrap();
        assert_eq!(phase1.deletions, BTreeSet::from([12]));
        assert!(phase1.queries <= 1 + 3);
    }

    #[test]
    fn substitution_as_deletion_plus_insertion() {
        let dna = Alphabet::dna();
        let model = dna_model("ACGTTGCAACGTACGT", vec![5, 9], vec![5, 9]);
        // G at 5 becomes A.
        let q = dna.parse("ACGTTACAACGTACGT").unwrap();
        let mut o = Oracle::new(dna.clone(), q.clone()).unwrap();
        let run = run_indel_attack_detailed(&mut o, &model).unwrap();
        assert_eq!(run.result.recovered, q);
        assert_eq!(run.events.deletions, BTreeSet::from([5]));
        assert_eq!(run.events.insertions, BTreeMap::from([(5, vec![0])]));
    }

    #[test]
    fn multi_character_insertion() {
        let dna = Alphabet::dna();
        let model = dna_model("TTTTTTTTTTTTTTTT", vec![], (0..=16).collect());
        let q = dna.parse("TTTTTACGTTTTTTTTTTT").unwrap();
        let mut o = Oracle::new(dna.clone(), q.clone()).unwrap();
        let run = run_indel_attack_detailed(&mut o, &model).unwrap();
        assert_eq!(run.result.recovered, q);
        assert_eq!(run.events.insertion_count(), 1);
        assert!(
            run.result.within_bound(),
            "{} > {}",
            run.result.guesses_used,
            run.result.bound
        );
    }

    #[test]
    fn insertion_outside_the_model_is_reported() {
        let dna = Alphabet::dna();
        let model = dna_model("ACGTACGTACGT", vec![1], vec![3, 7]);
        let q = dna.parse("ACGTACGTACGGT").unwrap();
        let mut o = Oracle::new(dna, q).unwrap();
        assert!(run_indel_attack(&mut o, &model).is_err());
    }
}
