//! Black-peg attack for secrets that differ from a known reference only by
//! substitutions at known candidate positions.
//!
//! Each candidate position carries an offset color: the number of cyclic
//! alphabet steps from the reference character to the secret character, so
//! offset 0 means "unchanged". One query of the reference counts the
//! substitutions, `K − 1` offset queries count each offset color, and a
//! divide-and-conquer over the candidate range then splits those counts
//! between halves until every range is a single color.

use crate::alphabet::{Alphabet, Color, Sequence};
use crate::attack::{ceil_log2, AttackResult};
use crate::error::{Error, Result};
use crate::model::VariationModel;
use crate::oracle::Oracle;

/// `s(Q) = N − b(Q, R)`, using one black-peg query.
pub fn count_substitutions(oracle: &mut Oracle, reference: &[Color]) -> Result<usize> {
    let b = oracle.query_black(reference)?;
    Ok(reference.len() - b.0)
}

/// Cyclic steps from `base` to `observed`.
pub fn offset_color(alphabet: &Alphabet, base: char, observed: char) -> Result<usize> {
    let lookup = |symbol| {
        alphabet.color(symbol).ok_or_else(|| Error::UnknownSymbol {
            symbol,
            alphabet: alphabet.to_string(),
        })
    };
    Ok(alphabet.offset(lookup(base)?, lookup(observed)?))
}

/// Offset colors at the candidate positions of a model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OffsetVector(pub Vec<usize>);

impl OffsetVector {
    /// Offsets of `secret` relative to the model reference. Fails if the
    /// secret differs from the reference outside the candidate positions.
    pub fn from_secret(
        alphabet: &Alphabet,
        model: &VariationModel,
        secret: &[Color],
    ) -> Result<Self> {
        let reference = model.reference();
        if secret.len() != reference.len() {
            return Err(Error::LengthMismatch {
                left: reference.len(),
                right: secret.len(),
            });
        }
        let mut candidates = model.sub_positions().iter().peekable();
        let mut offsets = Vec::with_capacity(model.m());
        for (i, (&r, &q)) in reference.iter().zip(secret).enumerate() {
            if candidates.next_if_eq(&&i).is_some() {
                offsets.push(alphabet.offset(r, q));
            } else if r != q {
                return Err(Error::ModelViolation(format!(
                    "position {i} differs from the reference but is not a candidate"
                )));
            }
        }
        Ok(OffsetVector(offsets))
    }

    pub fn apply(&self, alphabet: &Alphabet, model: &VariationModel) -> Sequence {
        let mut out = model.reference().clone();
        for (&p, &o) in model.sub_positions().iter().zip(&self.0) {
            out[p] = alphabet.shift(out[p], o);
        }
        out
    }

    /// Number of nonzero offsets.
    pub fn substitutions(&self) -> usize {
        self.0.iter().filter(|&&o| o != 0).count()
    }
}

/// An inclusive range of compressed candidate indices whose per-color counts
/// are known.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RangeState {
    pub lo: usize,
    pub hi: usize,
    /// `counts[i]`: positions in the range with offset color `i`.
    pub counts: Vec<usize>,
    /// Color-0 candidate positions outside the range.
    pub zero_outside: usize,
}

impl RangeState {
    pub fn len(&self) -> usize {
        self.hi - self.lo + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn mid(&self) -> usize {
        (self.lo + self.hi) / 2
    }

    /// The single color filling the range, if there is one.
    pub fn forced_color(&self) -> Option<usize> {
        let mut present = self.counts.iter().enumerate().filter(|(_, &c)| c > 0);
        match (present.next(), present.next()) {
            (Some((color, _)), None) => Some(color),
            _ => None,
        }
    }

    /// Colors to probe when splitting this range. Color 0 is never probed;
    /// when color 0 is absent, the last present color is deduced from the
    /// half's size instead.
    pub fn probe_colors(&self) -> Vec<usize> {
        let mut present: Vec<usize> = (0..self.counts.len())
            .filter(|&i| self.counts[i] > 0)
            .collect();
        if present.len() < 2 {
            return Vec::new();
        }
        if present[0] == 0 {
            present.remove(0);
        } else {
            present.pop();
        }
        present
    }
}

/// Splits a range at its midpoint given the compressed probe responses
/// `(color, b)`, where each `b` counts color matches over candidate positions
/// when the left half is set to `color` and everything else to offset 0.
pub fn split_counts(
    state: &RangeState,
    responses: &[(usize, usize)],
) -> Result<(RangeState, RangeState)> {
    let k = state.counts.len();
    let size_left = state.mid() - state.lo + 1;
    let d = state.zero_outside;
    let bad = |what: String| {
        Error::Inconsistent(format!(
            "splitting candidates {}..={}: {what}",
            state.lo, state.hi
        ))
    };
    let mut adjusted = Vec::with_capacity(responses.len());
    for &(color, b) in responses {
        if color == 0 || color >= k {
            return Err(bad(format!("probe color {color} out of range")));
        }
        adjusted.push((
            color,
            b.checked_sub(d)
                .ok_or_else(|| bad(format!("response {b} below {d}")))?,
        ));
    }
    let c0 = state.counts.first().copied().unwrap_or(0);
    let y0 = if c0 > 0 {
        let total = c0 + adjusted.iter().map(|&(_, b)| b).sum::<usize>();
        let num = total
            .checked_sub(size_left)
            .ok_or_else(|| bad("negative color-0 count".into()))?;
        let p = adjusted.len() + 1;
        if num % p != 0 {
            return Err(bad(format!("color-0 count {num}/{p} is not an integer")));
        }
        num / p
    } else {
        0
    };
    if y0 > c0 {
        return Err(bad(format!(
            "right half holds {y0} of {c0} color-0 positions"
        )));
    }

    let mut left = vec![0usize; k];
    left[0] = c0 - y0;
    let mut known = vec![false; k];
    known[0] = true;
    for &(color, b) in &adjusted {
        left[color] = b
            .checked_sub(y0)
            .ok_or_else(|| bad(format!("negative count for color {color}")))?;
        known[color] = true;
    }
    let unknown: Vec<usize> = (1..k)
        .filter(|&i| !known[i] && state.counts[i] > 0)
        .collect();
    let placed: usize = left.iter().sum();
    match unknown.as_slice() {
        [] => {
            if placed != size_left {
                return Err(bad(format!(
                    "left half counts sum to {placed}, not {size_left}"
                )));
            }
        }
        [color] => {
            left[*color] = size_left
                .checked_sub(placed)
                .ok_or_else(|| bad(format!("left half counts exceed {size_left}")))?;
        }
        _ => return Err(bad("more than one color left undetermined".into())),
    }
    let mut right = vec![0usize; k];
    for i in 0..k {
        right[i] = state.counts[i]
            .checked_sub(left[i])
            .ok_or_else(|| bad(format!("left half holds more of color {i} than the range")))?;
    }
    let x0 = left[0];
    Ok((
        RangeState {
            lo: state.lo,
            hi: state.mid(),
            counts: left,
            zero_outside: d + y0,
        },
        RangeState {
            lo: state.mid() + 1,
            hi: state.hi,
            counts: right,
            zero_outside: d + x0,
        },
    ))
}

/// `s·⌈log₂ M⌉ + K`.
pub fn substitution_bound(substitutions: usize, m: usize, k: usize) -> usize {
    substitutions * ceil_log2(m) + k
}

/// Builds a guess equal to the reference except for the compressed candidate
/// range `lo..=hi`, which is shifted by `offset`.
struct ProbeBuilder<'a> {
    alphabet: &'a Alphabet,
    reference: &'a [Color],
    positions: &'a [usize],
    outside: usize,
}

impl ProbeBuilder<'_> {
    fn guess(&self, lo: usize, hi: usize, offset: usize) -> Vec<Color> {
        let mut g = self.reference.to_vec();
        for &p in &self.positions[lo..=hi] {
            g[p] = self.alphabet.shift(g[p], offset);
        }
        g
    }

    fn ask(&self, oracle: &mut Oracle, lo: usize, hi: usize, offset: usize) -> Result<usize> {
        let b = oracle.query_black(&self.guess(lo, hi, offset))?.0;
        b.checked_sub(self.outside).ok_or_else(|| {
            Error::ModelViolation(format!(
                "score {b} is below the {} non-candidate positions",
                self.outside
            ))
        })
    }
}

/// `K − 1` queries, each shifting every candidate by the same offset.
/// Returns the count of each offset color over the candidates.
pub fn initial_offset_census(oracle: &mut Oracle, model: &VariationModel) -> Result<Vec<usize>> {
    let alphabet = oracle.alphabet().clone();
    let k = alphabet.size();
    let m = model.m();
    let probe = ProbeBuilder {
        alphabet: &alphabet,
        reference: model.reference(),
        positions: model.sub_positions(),
        outside: model.reference().len() - m,
    };
    let mut counts = vec![0usize; k];
    if m == 0 {
        return Ok(counts);
    }
    for (offset, slot) in counts.iter_mut().enumerate().skip(1) {
        *slot = probe.ask(oracle, 0, m - 1, offset)?;
    }
    let shifted: usize = counts.iter().sum();
    counts[0] = m.checked_sub(shifted).ok_or_else(|| {
        Error::ModelViolation(format!(
            "offset counts sum to {shifted}, more than the {m} candidates"
        ))
    })?;
    Ok(counts)
}

pub fn run_substitution_attack(
    oracle: &mut Oracle,
    model: &VariationModel,
) -> Result<AttackResult> {
    let alphabet = oracle.alphabet().clone();
    let k = alphabet.size();
    let m = model.m();
    let reference = model.reference();
    alphabet.check(reference)?;
    let s = count_substitutions(oracle, reference)?;
    let mut guesses = 1;
    let bound = substitution_bound(s, m, k);
    if s == 0 {
        return Ok(AttackResult {
            recovered: reference.clone(),
            guesses_used: guesses,
            bound,
            transcript: oracle.transcript(),
        });
    }
    if s > m {
        return Err(Error::ModelViolation(format!(
            "{s} substitutions but only {m} candidate positions"
        )));
    }

    let counts = initial_offset_census(oracle, model)?;
    guesses += k - 1;
    if counts[0] != m - s {
        return Err(Error::ModelViolation(format!(
            "{} candidates changed but the reference query implies {s} substitutions",
            m - counts[0]
        )));
    }

    let probe = ProbeBuilder {
        alphabet: &alphabet,
        reference,
        positions: model.sub_positions(),
        outside: reference.len() - m,
    };
    let mut offsets = vec![0usize; m];
    let mut stack = vec![RangeState {
        lo: 0,
        hi: m - 1,
        counts,
        zero_outside: 0,
    }];
    while let Some(state) = stack.pop() {
        if let Some(color) = state.forced_color() {
            offsets[state.lo..=state.hi].fill(color);
            continue;
        }
        if state.len() < 2 {
            return Err(Error::Inconsistent(format!(
                "candidate {} has no consistent color",
                state.lo
            )));
        }
        let mid = state.mid();
        let mut responses = Vec::new();
        for color in state.probe_colors() {
            responses.push((color, probe.ask(oracle, state.lo, mid, color)?));
            guesses += 1;
        }
        let (left, right) = split_counts(&state, &responses).map_err(|e| match e {
            Error::Inconsistent(msg) => Error::ModelViolation(format!(
                "{msg} (candidate positions {}..={})",
                model.sub_positions()[state.lo],
                model.sub_positions()[state.hi]
            )),
            other => other,
        })?;
        stack.push(right);
        stack.push(left);
    }

    Ok(AttackResult {
        recovered: OffsetVector(offsets).apply(&alphabet, model),
        guesses_used: guesses,
        bound,
        transcript: oracle.transcript(),
    })
}
