//! Distribution-free LCS attack.
//!
//! One monochromatic query per color gives the color census. The least
//! frequent color seeds a working string `W`; every other color, in
//! ascending frequency order, is then threaded into `W` one trial insertion at
//! a time, keeping an insertion only when `a(Q, W) = |W|`. The total is at most
//! `(N + 1)·K` queries.

use crate::alphabet::{Color, Sequence};
use crate::attack::AttackResult;
use crate::error::{Error, Result};
use crate::oracle::Oracle;

/// Per-color cardinalities of the secret.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColorCensus {
    counts: Vec<usize>,
}

impl ColorCensus {
    pub fn from_counts(counts: Vec<usize>) -> Self {
        ColorCensus { counts }
    }

    pub fn count(&self, color: Color) -> usize {
        self.counts.get(color as usize).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Present colors in nondecreasing count order, ties by color index.
    pub fn ascending(&self) -> Vec<(Color, usize)> {
        let mut present: Vec<(Color, usize)> = self
            .counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (i as Color, c))
            .collect();
        present.sort_by_key(|&(color, count)| (count, color));
        present
    }

    /// `K + Σ i·d_i` with `d_1 ≥ d_2 ≥ …` the counts in nonincreasing order.
    pub fn sharper_bound(&self) -> usize {
        let mut desc = self.counts.clone();
        desc.sort_unstable_by(|a, b| b.cmp(a));
        self.counts.len()
            + desc
                .iter()
                .enumerate()
                .map(|(i, d)| (i + 1) * d)
                .sum::<usize>()
    }
}

pub fn general_bound(n: usize, k: usize) -> usize {
    (n + 1) * k
}

/// Issues `k` monochromatic length-`n` LCS queries.
pub fn census(oracle: &mut Oracle, n: usize, k: usize) -> Result<ColorCensus> {
    if n == 0 {
        return Ok(ColorCensus::from_counts(vec![0; k]));
    }
    let counts: Vec<usize> = (0..k)
        .map(|c| oracle.query_lcs(&Sequence::monochromatic(c as Color, n)).0)
        .collect();
    let census = ColorCensus::from_counts(counts);
    if census.total() != n {
        return Err(Error::Inconsistent(format!(
            "color counts sum to {} for a secret of length {n}",
            census.total()
        )));
    }
    Ok(census)
}

/// Threads colors into a working string in the given order, using `ask` as
/// the LCS oracle for `W`. Returns the final string and the number of
/// queries spent. `observe` sees `W` after every trial insertion.
pub(crate) fn interleave<F, O>(
    ascending: &[(Color, usize)],
    mut ask: F,
    mut observe: O,
) -> Result<(Vec<Color>, usize)>
where
    F: FnMut(&[Color]) -> Result<usize>,
    O: FnMut(&[Color]),
{
    let Some((&(seed, seed_count), rest)) = ascending.split_first() else {
        return Ok((Vec::new(), 0));
    };
    let mut w = vec![seed; seed_count];
    let mut queries = 0;
    for &(color, count) in rest {
        let mut i = 0;
        let mut placed = 0;
        while placed < count {
            if i > w.len() {
                return Err(Error::Inconsistent(format!(
                    "no position accepts color {color} ({placed} of {count} placed)"
                )));
            }
            w.insert(i, color);
            let score = ask(&w)?;
            queries += 1;
            if score == w.len() {
                placed += 1;
            } else if score + 1 == w.len() {
                w.remove(i);
            } else {
                return Err(Error::Inconsistent(format!(
                    "score {score} for a working string of length {}",
                    w.len()
                )));
            }
            i += 1;
            observe(&w);
        }
    }
    Ok((w, queries))
}

pub fn run_general_attack(oracle: &mut Oracle, n: usize, k: usize) -> Result<AttackResult> {
    run_general_attack_observed(oracle, n, k, |_| {})
}

/// Like [`run_general_attack`], calling `observe` with the working string after
/// every iteration of the insertion loop.
pub fn run_general_attack_observed<O: FnMut(&[Color])>(
    oracle: &mut Oracle,
    n: usize,
    k: usize,
    observe: O,
) -> Result<AttackResult> {
    let bound = general_bound(n, k);
    if n == 0 {
        return Ok(AttackResult {
            recovered: Sequence::empty(),
            guesses_used: 0,
            bound,
            transcript: oracle.transcript(),
        });
    }
    if k == 0 {
        return Err(Error::Inconsistent(format!(
            "a secret of length {n} cannot use an empty alphabet"
        )));
    }
    let counts = census(oracle, n, k)?;
    let (w, probes) = interleave(&counts.ascending(), |w| Ok(oracle.query_lcs(w).0), observe)?;
    Ok(AttackResult {
        recovered: Sequence::new(w),
        guesses_used: k + probes,
        bound,
        transcript: oracle.transcript(),
    })
}

/// `H_{n,s} = Σ_{i=1..n} i^{-s}`.
pub fn harmonic_number(n: usize, s: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::EmptyHarmonic(s));
    }
    Ok((1..=n).map(|i| (i as f64).powf(-s)).sum())
}

/// Guess bound `K + K·N / H_{N,s}` for Zipf-distributed color frequencies.
pub fn zipf_bound(n: usize, k: usize, s: f64) -> Result<f64> {
    Ok(k as f64 + (k * n) as f64 / harmonic_number(n, s)?)
}
