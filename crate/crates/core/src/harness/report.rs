//! Batch attack simulation over a corpus, with per-sequence rows, aggregate
//! statistics, fixed-width histograms and CSV output.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::alphabet::{Color, Sequence};
use crate::attack::general::{general_bound, run_general_attack};
use crate::attack::indel::{indel_bound, run_indel_attack};
use crate::attack::substitution::{run_substitution_attack, substitution_bound};
use crate::attack::AttackResult;
use crate::error::{Error, Result};
use crate::events::diff_against_reference;
use crate::harness::corpus::Corpus;
use crate::model::VariationModel;
use crate::oracle::Oracle;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AttackKind {
    General,
    Substitution,
    Indel,
}

impl fmt::Display for AttackKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AttackKind::General => "general",
            AttackKind::Substitution => "sub",
            AttackKind::Indel => "indel",
        })
    }
}

impl FromStr for AttackKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "general" => Ok(AttackKind::General),
            "sub" | "substitution" => Ok(AttackKind::Substitution),
            "indel" => Ok(AttackKind::Indel),
            other => Err(Error::Parse {
                path: "kind".into(),
                line: 1,
                message: format!("unknown attack kind {other:?}"),
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportRow {
    pub id: String,
    pub kind: AttackKind,
    pub guesses: usize,
    /// Guess bound for this sequence, from its alignment against the
    /// reference (or its length and alphabet for the general attack).
    pub bound: usize,
    pub ok: bool,
    /// Substitution, deletion and insertion events seen in the alignment.
    pub events: usize,
}

impl ReportRow {
    pub fn within_bound(&self) -> bool {
        self.guesses <= self.bound
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Aggregates {
    pub count: usize,
    pub mean: f64,
    /// Population standard deviation.
    pub sd: f64,
    /// Nearest-rank 90th percentile.
    pub p90: usize,
    pub min: usize,
    pub max: usize,
    pub over_bound: usize,
    /// Rank correlation between event count and guesses, when defined.
    pub spearman: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AttackReport {
    pub kind: AttackKind,
    pub rows: Vec<ReportRow>,
    /// Records not eligible for this attack kind.
    pub skipped: usize,
}

/// Runs one attack per eligible record, each against its own oracle.
///
/// Substitution attacks only see records whose alignment against the
/// reference is substitution-only. Any inexact recovery, attack error, or
/// disagreement between the attack's guess count and the oracle's metering
/// aborts with the offending record named.
pub fn simulate_attacks(
    corpus: &Corpus,
    model: &VariationModel,
    kind: AttackKind,
) -> Result<AttackReport> {
    simulate_attacks_observed(corpus, model, kind, |_, _| {})
}

/// Like [`simulate_attacks`], calling `observe` with each row and the full
/// attack result before moving on.
pub fn simulate_attacks_observed<F: FnMut(&ReportRow, &AttackResult)>(
    corpus: &Corpus,
    model: &VariationModel,
    kind: AttackKind,
    mut observe: F,
) -> Result<AttackReport> {
    let alphabet = corpus.alphabet();
    let k = alphabet.size();
    let reference = model.reference();
    alphabet.check(reference)?;
    let mut rows = Vec::with_capacity(corpus.len());
    let mut skipped = 0;
    for record in corpus.records() {
        let q = &record.sequence;
        let fail = |message: String| Error::Recovery {
            id: record.id.clone(),
            message,
        };
        let (bound, events) = match kind {
            AttackKind::General => (general_bound(q.len(), k), event_total(reference, q)),
            AttackKind::Substitution => {
                let diff = diff_against_reference(reference, q);
                if q.len() != reference.len() || !diff.is_substitution_only() {
                    skipped += 1;
                    continue;
                }
                let s = diff.substitutions.len();
                (substitution_bound(s, model.m(), k), s)
            }
            AttackKind::Indel => {
                let diff = diff_against_reference(reference, q);
                let ev = &diff.events;
                let bound = indel_bound(
                    ev.deletion_count(),
                    ev.insertion_count(),
                    ev.inserted_len(),
                    model.m(),
                    model.insertion_sites().len(),
                    k,
                );
                let total = diff.substitutions.len() + diff.deletions.len() + diff.insertion_runs;
                (bound, total)
            }
        };
        let mut oracle =
            Oracle::new(alphabet.clone(), q.clone()).map_err(|e| fail(e.to_string()))?;
        let result = match kind {
            AttackKind::General => run_general_attack(&mut oracle, q.len(), k),
            AttackKind::Substitution => run_substitution_attack(&mut oracle, model),
            AttackKind::Indel => run_indel_attack(&mut oracle, model),
        }
        .map_err(|e| fail(format!("{kind} attack failed: {e}")))?;
        let metered = oracle.queries_answered();
        if metered != result.guesses_used || result.transcript.total() != metered {
            return Err(fail(format!(
                "attack reported {} guesses but the oracle answered {metered}",
                result.guesses_used
            )));
        }
        if &result.recovered != q {
            return Err(fail(format!(
                "{kind} attack recovered {} instead of the secret",
                alphabet.render(&result.recovered)
            )));
        }
        let row = ReportRow {
            id: record.id.clone(),
            kind,
            guesses: result.guesses_used,
            bound,
            ok: true,
            events,
        };
        observe(&row, &result);
        rows.push(row);
    }
    Ok(AttackReport {
        kind,
        rows,
        skipped,
    })
}

fn event_total(reference: &[Color], q: &Sequence) -> usize {
    let d = diff_against_reference(reference, q);
    d.substitutions.len() + d.deletions.len() + d.insertion_runs
}

impl AttackReport {
    pub fn guesses(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.guesses).collect()
    }

    /// `None` for an empty report.
    pub fn aggregates(&self) -> Option<Aggregates> {
        let guesses = self.guesses();
        if guesses.is_empty() {
            return None;
        }
        let n = guesses.len() as f64;
        let mean = guesses.iter().sum::<usize>() as f64 / n;
        let var = guesses
            .iter()
            .map(|&g| (g as f64 - mean).powi(2))
            .sum::<f64>()
            / n;
        let events: Vec<f64> = self.rows.iter().map(|r| r.events as f64).collect();
        let as_f64: Vec<f64> = guesses.iter().map(|&g| g as f64).collect();
        Some(Aggregates {
            count: guesses.len(),
            mean,
            sd: var.sqrt(),
            p90: nearest_rank(&guesses, 0.9)?,
            min: *guesses.iter().min()?,
            max: *guesses.iter().max()?,
            over_bound: self.rows.iter().filter(|r| !r.within_bound()).count(),
            spearman: spearman(&events, &as_f64),
        })
    }

    pub fn histogram(&self, width: usize) -> Vec<Bin> {
        histogram(&self.guesses(), width)
    }

    /// CSV with header `id,kind,guesses,bound,ok`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("id,kind,guesses,bound,ok\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.id, r.kind, r.guesses, r.bound, r.ok
            );
        }
        out
    }
}

impl Aggregates {
    /// `key=value` lines.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "count={}", self.count);
        let _ = writeln!(out, "mean={:.2}", self.mean);
        let _ = writeln!(out, "sd={:.2}", self.sd);
        let _ = writeln!(out, "p90={}", self.p90);
        let _ = writeln!(out, "min={}", self.min);
        let _ = writeln!(out, "max={}", self.max);
        let _ = writeln!(out, "over_bound={}", self.over_bound);
        match self.spearman {
            Some(rho) => {
                let _ = writeln!(out, "spearman={rho:.4}");
            }
            None => out.push_str("spearman=NA\n"),
        }
        out
    }
}

/// Half-open histogram bin `[lo, hi)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bin {
    pub lo: usize,
    pub hi: usize,
    pub count: usize,
}

/// Fixed-width bins from 0 through the bin holding the largest value;
/// empty input gives no bins.
pub fn histogram(values: &[usize], width: usize) -> Vec<Bin> {
    let width = width.max(1);
    let Some(&max) = values.iter().max() else {
        return Vec::new();
    };
    let mut bins: Vec<Bin> = (0..=max / width)
        .map(|i| Bin {
            lo: i * width,
            hi: (i + 1) * width,
            count: 0,
        })
        .collect();
    for &v in values {
        bins[v / width].count += 1;
    }
    bins
}

/// CSV with header `bin_lo,bin_hi,count`.
pub fn histogram_csv(bins: &[Bin]) -> String {
    let mut out = String::from("bin_lo,bin_hi,count\n");
    for b in bins {
        let _ = writeln!(out, "{},{},{}", b.lo, b.hi, b.count);
    }
    out
}

/// Smallest value with at least `fraction` of the data at or below it.
pub fn nearest_rank(values: &[usize], fraction: f64) -> Option<usize> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    let rank = (fraction * sorted.len() as f64).ceil().max(1.0) as usize;
    sorted.get(rank.min(sorted.len()) - 1).copied()
}

/// Spearman rank correlation with average ranks for ties; `None` when either
/// side is constant or the lengths differ.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    pearson(&ranks(xs), &ranks(ys))
}

fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &o in &order[i..=j] {
            out[o] = rank;
        }
        i = j + 1;
    }
    out
}

fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx).powi(2);
        syy += (y - my).powi(2);
    }
    (sxx > 0.0 && syy > 0.0).then(|| sxy / (sxx * syy).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Alphabet;
    use crate::harness::corpus::Record;

    #[test]
    fn singleton_reference_corpus_costs_one_query() {
        let ab = Alphabet::dna();
        let r = ab.parse("ACGTTGCAAC").unwrap();
        let corpus = Corpus::new(
            ab,
            vec![Record {
                id: "r".into(),
                sequence: r.clone(),
            }],
        )
        .unwrap();
        let model = VariationModel::substitution_only(r, vec![]).unwrap();
        let report = simulate_attacks(&corpus, &model, AttackKind::Substitution).unwrap();
        assert_eq!(report.guesses(), [1]);
        assert!(report.rows[0].ok && report.rows[0].within_bound());
    }

    #[test]
    fn substitution_suite_skips_indel_records() {
        let ab = Alphabet::dna();
        let r = ab.parse("ACGTTGCAAC").unwrap();
        let corpus = Corpus::new(
            ab.clone(),
            vec![
                Record {
                    id: "s".into(),
                    sequence: ab.parse("ACGATGCAAC").unwrap(),
                },
                Record {
                    id: "d".into(),
                    sequence: ab.parse("ACGTGCAAC").unwrap(),
                },
            ],
        )
        .unwrap();
        let model = VariationModel::new(r, vec![3, 4], vec![3]).unwrap();
        let report = simulate_attacks(&corpus, &model, AttackKind::Substitution).unwrap();
        assert_eq!((report.rows.len(), report.skipped), (1, 1));
        let report = simulate_attacks(&corpus, &model, AttackKind::Indel).unwrap();
        assert_eq!(report.rows.len(), 2);
        assert!(report.rows.iter().all(ReportRow::within_bound));
    }

    #[test]
    fn out_of_model_secret_aborts_naming_it() {
        let ab = Alphabet::dna();
        let r = ab.parse("ACGTTGCAAC").unwrap();
        let corpus = Corpus::new(
            ab.clone(),
            vec![Record {
                id: "stray".into(),
                sequence: ab.parse("TCGTTGCAAC").unwrap(),
            }],
        )
        .unwrap();
        let model = VariationModel::substitution_only(r, vec![5]).unwrap();
        let err = simulate_attacks(&corpus, &model, AttackKind::Substitution).unwrap_err();
        assert!(
            matches!(err, Error::Recovery { ref id, .. } if id == "stray"),
            "{err}"
        );
    }

    #[test]
    fn csv_layouts() {
        let report = AttackReport {
            kind: AttackKind::Indel,
            rows: vec![ReportRow {
                id: "a".into(),
                kind: AttackKind::Indel,
                guesses: 12,
                bound: 30,
                ok: true,
                events: 1,
            }],
            skipped: 0,
        };
        assert_eq!(
            report.to_csv(),
            "id,kind,guesses,bound,ok\na,indel,12,30,true\n"
        );
        assert_eq!(
            histogram_csv(&report.histogram(50)),
            "bin_lo,bin_hi,count\n0,50,1\n"
        );
    }

    #[test]
    fn histogram_counts_everything() {
        let bins = histogram(&[0, 49, 50, 120, 7], 50);
        let counts: Vec<usize> = bins.iter().map(|b| b.count).collect();
        assert_eq!(counts, [3, 1, 1]);
        assert_eq!(
            bins[2],
            Bin {
                lo: 100,
                hi: 150,
                count: 1
            }
        );
        assert!(histogram(&[], 50).is_empty());
    }

    #[test]
    fn percentile_and_rank_correlation() {
        let v: Vec<usize> = (1..=10).collect();
        assert_eq!(nearest_rank(&v, 0.9), Some(9));
        assert_eq!(nearest_rank(&[5], 0.9), Some(5));
        assert_eq!(nearest_rank(&[], 0.9), None);
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(spearman(&xs, &[10.0, 20.0, 35.0, 100.0]), Some(1.0));
        assert_eq!(spearman(&xs, &[4.0, 3.0, 2.0, 1.0]), Some(-1.0));
        assert_eq!(spearman(&xs, &[1.0; 4]), None);
        // Ties get average ranks: ranks of ys are 1.5, 1.5, 3, 4.
        let rho = spearman(&xs, &[5.0, 5.0, 6.0, 7.0]).unwrap();
        let expected = 4.5 / (5.0f64 * 4.5).sqrt();
        assert!((rho - expected).abs() < 1e-12);
    }
}
