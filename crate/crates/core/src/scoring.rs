//! Score functions between two sequences and the identities that convert
//! between score families.
//!
//! All scores are exact integer counts. Position-wise scores (black pegs,
//! Hamming distance) require equal lengths and report a mismatch as an error
//! instead of truncating.

use std::fmt;

use crate::alphabet::Color;
use crate::error::{Error, Result};

/// A non-negative count returned by a comparison.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Score(pub usize);

impl Score {
    pub fn value(self) -> usize {
        self.0
    }
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<Score> for usize {
    fn from(s: Score) -> usize {
        s.0
    }
}

fn same_length(q: &[Color], v: &[Color]) -> Result<()> {
    if q.len() == v.len() {
        Ok(())
    } else {
        Err(Error::LengthMismatch {
            left: q.len(),
            right: v.len(),
        })
    }
}

/// Number of positions where `q` and `v` agree.
pub fn black_peg_score(q: &[Color], v: &[Color]) -> Result<Score> {
    same_length(q, v)?;
    Ok(Score(q.iter().zip(v).filter(|(a, b)| a == b).count()))
}

/// Value-only matches left over after the black pegs are taken out.
pub fn white_peg_score(q: &[Color], v: &[Color]) -> Result<Score> {
    let black = black_peg_score(q, v)?.0;
    let width = q
        .iter()
        .chain(v)
        .map(|&c| c as usize + 1)
        .max()
        .unwrap_or(0);
    let mut in_q = vec![0usize; width];
    let mut in_v = vec![0usize; width];
    q.iter().for_each(|&c| in_q[c as usize] += 1);
    v.iter().for_each(|&c| in_v[c as usize] += 1);
    let common: usize = in_q.iter().zip(&in_v).map(|(a, b)| *a.min(b)).sum();
    Ok(Score(common - black))
}

pub fn hamming_distance(q: &[Color], v: &[Color]) -> Result<Score> {
    same_length(q, v)?;
    Ok(Score(q.iter().zip(v).filter(|(a, b)| a != b).count()))
}

/// Length of a longest common subsequence.
///
/// Plain O(|q|·|v|) dynamic programming over a single row sized by the
/// shorter input. [`LcsIndex`] answers the same question faster when one
/// side is fixed.
pub fn lcs_score(q: &[Color], v: &[Color]) -> Score {
    let (long, short) = if q.len() >= v.len() { (q, v) } else { (v, q) };
    let mut row = vec![0usize; short.len() + 1];
    for &a in long {
        let mut diag = 0;
        for (j, &b) in short.iter().enumerate() {
            let up = row[j + 1];
            row[j + 1] = if a == b { diag + 1 } else { up.max(row[j]) };
            diag = up;
        }
    }
    Score(row[short.len()])
}

/// Unit-cost edit distance with insertions, deletions and substitutions.
pub fn levenshtein_distance(q: &[Color], v: &[Color]) -> Score {
    let (long, short) = if q.len() >= v.len() { (q, v) } else { (v, q) };
    let mut row: Vec<usize> = (0..=short.len()).collect();
    for (i, &a) in long.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, &b) in short.iter().enumerate() {
            let up = row[j + 1];
            let sub = diag + usize::from(a != b);
            row[j + 1] = sub.min(up + 1).min(row[j] + 1);
            diag = up;
        }
    }
    Score(row[short.len()])
}

/// Edit distance when only insertions and deletions are allowed. This is the
/// distance for which `lcs = (|q| + |v| - d) / 2` holds exactly.
pub fn indel_distance(q: &[Color], v: &[Color]) -> Score {
    Score(q.len() + v.len() - 2 * lcs_score(q, v).0)
}

/// Black-peg score recovered from a Hamming distance: `|Q| - H`.
pub fn b_from_hamming(q_len: usize, h: Score) -> Result<Score> {
    q_len.checked_sub(h.0).map(Score).ok_or(Error::OutOfRange {
        what: "hamming distance",
        value: h.0,
        limit: q_len,
    })
}

/// Alignment score recovered from an edit distance: `(|Q| + |V| - L) / 2`.
///
/// Exact when `l` is the insertion/deletion distance. A substitution-inclusive
/// distance can produce an odd difference, which is rejected.
pub fn a_from_levenshtein(q_len: usize, v_len: usize, l: Score) -> Result<Score> {
    let total = q_len + v_len;
    match total.checked_sub(l.0) {
        Some(diff) if diff % 2 == 0 => Ok(Score(diff / 2)),
        _ => Err(Error::ParityViolation {
            q_len,
            v_len,
            distance: l.0,
        }),
    }
}

/// Bit-parallel LCS against a fixed sequence.
///
/// Precomputes one match mask per color for the fixed side, then processes
/// any query in `O(|v| · ⌈|fixed| / 64⌉)` word operations.
#[derive(Clone, Debug)]
pub struct LcsIndex {
    len: usize,
    words: usize,
    masks: Vec<Vec<u64>>,
}

impl LcsIndex {
    pub fn new(fixed: &[Color]) -> Self {
        let words = fixed.len().div_ceil(64).max(1);
        let colors = fixed.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
        let mut masks = vec![vec![0u64; words]; colors];
        for (i, &c) in fixed.iter().enumerate() {
            masks[c as usize][i / 64] |= 1u64 << (i % 64);
        }
        LcsIndex {
            len: fixed.len(),
            words,
            masks,
        }
    }

    /// Builds an index from per-color position masks: bit `i` of `masks[c]`
    /// is set when position `i` of the fixed side may match color `c`. A
    /// position may match several colors, which yields an upper bound on the
    /// LCS of any concrete sequence consistent with the masks.
    pub(crate) fn from_masks(len: usize, masks: Vec<Vec<u64>>) -> Self {
        let words = len.div_ceil(64).max(1);
        debug_assert!(masks.iter().all(|m| m.len() == words));
        LcsIndex { len, words, masks }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn lcs(&self, other: &[Color]) -> usize {
        let mut v = vec![u64::MAX; self.words];
        for &c in other {
            let Some(mask) = self.masks.get(c as usize) else {
                continue;
            };
            let mut carry = 0u64;
            for (w, m) in v.iter_mut().zip(mask) {
                let u = *w & m;
                let (s1, c1) = w.overflowing_add(u);
                let (s2, c2) = s1.overflowing_add(carry);
                carry = u64::from(c1 | c2);
                *w = s2 | (*w & !m);
            }
        }
        let mut ones = 0usize;
        for (i, w) in v.iter().enumerate() {
            let valid = (self.len - i * 64).min(64);
            let mask = if valid == 64 {
                u64::MAX
            } else {
                (1u64 << valid) - 1
            };
            ones += (w & mask).count_ones() as usize;
        }
        self.len - ones
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Alphabet;
    use proptest::prelude::*;
    use std::collections::{HashSet, VecDeque};

    fn dna(s: &str) -> Vec<Color> {
        Alphabet::dna().parse(s).unwrap().into_inner()
    }

    fn seq(s: &str) -> Vec<Color> {
        s.bytes().map(|b| b as Color).collect()
    }

    // Test oracles, independent of the implementations above.

    fn lcs_by_enumeration(q: &[Color], v: &[Color]) -> usize {
        let (short, long) = if q.len() <= v.len() { (q, v) } else { (v, q) };
        let is_subseq = |sub: &[Color]| {
            let mut it = long.iter();
            sub.iter().all(|c| it.any(|d| d == c))
        };
        (0u32..1 << short.len())
            .filter_map(|mask| {
                let sub: Vec<Color> = (0..short.len())
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| short[i])
                    .collect();
                is_subseq(&sub).then_some(sub.len())
            })
            .max()
            .unwrap_or(0)
    }

    fn permutations(items: &[Color]) -> Vec<Vec<Color>> {
        if items.len() <= 1 {
            return vec![items.to_vec()];
        }
        let mut out = Vec::new();
        for i in 0..items.len() {
            let mut rest = items.to_vec();
            let head = rest.remove(i);
            for mut p in permutations(&rest) {
                p.insert(0, head);
                out.push(p);
            }
        }
        out
    }

    fn white_by_permutations(q: &[Color], v: &[Color]) -> usize {
        let best = permutations(v)
            .iter()
            .map(|p| q.iter().zip(p).filter(|(a, b)| a == b).count())
            .max()
            .unwrap();
        best - q.iter().zip(v).filter(|(a, b)| a == b).count()
    }

    fn edit_distance_by_search(from: &[Color], to: &[Color], cap: usize) -> usize {
        let symbols: HashSet<Color> = from.iter().chain(to).copied().collect();
        let mut seen = HashSet::from([from.to_vec()]);
        let mut queue = VecDeque::from([(from.to_vec(), 0usize)]);
        while let Some((cur, dist)) = queue.pop_front() {
            if cur == to {
                return dist;
            }
            if dist == cap {
                continue;
            }
            let mut next = Vec::new();
            for i in 0..=cur.len() {
                for &s in &symbols {
                    let mut ins = cur.clone();
                    ins.insert(i, s);
                    next.push(ins);
                    if i < cur.len() && cur[i] != s {
                        let mut sub = cur.clone();
                        sub[i] = s;
                        next.push(sub);
                    }
                }
                if i < cur.len() {
                    let mut del = cur.clone();
                    del.remove(i);
                    next.push(del);
                }
            }
            for n in next {
                if seen.insert(n.clone()) {
                    queue.push_back((n, dist + 1));
                }
            }
        }
        usize::MAX
    }

    #[test]
    fn black_peg_examples() {
        let q = dna("GATTACA");
        assert_eq!(black_peg_score(&q, &q).unwrap(), Score(7));
        assert_eq!(
            black_peg_score(&dna("AAAA"), &dna("CCCC")).unwrap(),
            Score(0)
        );
        assert_eq!(
            black_peg_score(&dna("ACGT"), &dna("AGCT")).unwrap(),
            Score(2)
        );
        assert_eq!(
            black_peg_score(&dna("ACG"), &dna("ACGT")),
            Err(Error::LengthMismatch { left: 3, right: 4 })
        );
    }

    #[test]
    fn white_peg_examples() {
        let q = dna("GATTACA");
        assert_eq!(white_peg_score(&q, &q).unwrap(), Score(0));
        assert_eq!(white_by_permutations(&dna("ACGT"), &dna("TGCA")), 4);
        assert_eq!(
            white_peg_score(&dna("ACGT"), &dna("TGCA")).unwrap(),
            Score(4)
        );
        // Brute force over permutations gives 0 here: both A/A and B/B
        // positional matches are already black.
        assert_eq!(white_by_permutations(&seq("AAB"), &seq("ABB")), 0);
        assert_eq!(white_peg_score(&seq("AAB"), &seq("ABB")).unwrap(), Score(0));
        assert!(white_peg_score(&seq("AB"), &seq("A")).is_err());
    }

    #[test]
    fn lcs_examples() {
        let q = dna("GATTACA");
        assert_eq!(lcs_score(&q, &q), Score(7));
        assert_eq!(lcs_score(&seq("ABC"), &[]), Score(0));
        assert_eq!(lcs_by_enumeration(&dna("AGCAT"), &dna("GAC")), 2);
        assert_eq!(lcs_score(&dna("AGCAT"), &dna("GAC")), Score(2));
    }

    #[test]
    fn hamming_examples() {
        let q = dna("GATTACA");
        assert_eq!(hamming_distance(&q, &q).unwrap(), Score(0));
        assert_eq!(
            hamming_distance(&dna("ACGT"), &dna("ACGA")).unwrap(),
            Score(1)
        );
        assert_eq!(
            hamming_distance(&dna("AAAA"), &dna("CCCC")).unwrap(),
            Score(4)
        );
        assert!(hamming_distance(&dna("A"), &dna("AC")).is_err());
    }

    #[test]
    fn levenshtein_examples() {
        let q = dna("GATTACA");
        assert_eq!(levenshtein_distance(&q, &q), Score(0));
        assert_eq!(levenshtein_distance(&[], &seq("ABC")), Score(3));
        let kitten = seq("kitten");
        let sitting = seq("sitting");
        assert_eq!(edit_distance_by_search(&kitten, &sitting, 3), 3);
        assert_eq!(levenshtein_distance(&kitten, &sitting), Score(3));
    }

    #[test]
    fn conversions() {
        assert_eq!(b_from_hamming(4, Score(1)).unwrap(), Score(3));
        assert_eq!(b_from_hamming(4, Score(0)).unwrap(), Score(4));
        assert_eq!(b_from_hamming(16568, Score(28)).unwrap(), Score(16540));
        assert!(b_from_hamming(3, Score(4)).is_err());

        assert_eq!(a_from_levenshtein(3, 3, Score(0)).unwrap(), Score(3));
        assert_eq!(a_from_levenshtein(3, 0, Score(3)).unwrap(), Score(0));
        let (q, v) = (dna("AGCAT"), dna("GAC"));
        assert_eq!(indel_distance(&q, &v), Score(4));
        assert_eq!(
            a_from_levenshtein(5, 3, Score(4)).unwrap(),
            lcs_score(&q, &v)
        );
        assert!(matches!(
            a_from_levenshtein(1, 1, Score(1)),
            Err(Error::ParityViolation { .. })
        ));
    }

    #[test]
    fn substitution_levenshtein_breaks_the_lcs_identity() {
        let (a, c) = (dna("A"), dna("C"));
        assert_eq!(levenshtein_distance(&a, &c), Score(1));
        assert!(a_from_levenshtein(1, 1, levenshtein_distance(&a, &c)).is_err());
        assert_eq!(
            a_from_levenshtein(1, 1, indel_distance(&a, &c)).unwrap(),
            Score(0)
        );
    }

    #[test]
    fn lcs_index_spans_word_boundaries() {
        let q: Vec<Color> = (0..200).map(|i| (i * 7 % 4) as Color).collect();
        let v: Vec<Color> = (0..150).map(|i| (i * 5 % 4) as Color).collect();
        assert_eq!(LcsIndex::new(&q).lcs(&v), lcs_score(&q, &v).0);
        assert_eq!(LcsIndex::new(&v).lcs(&q), lcs_score(&q, &v).0);
        assert_eq!(LcsIndex::new(&[]).lcs(&v), 0);
        assert_eq!(LcsIndex::new(&q).lcs(&[]), 0);
    }

    fn small_seq(max_len: usize, k: Color) -> impl Strategy<Value = Vec<Color>> {
        prop::collection::vec(0..k, 0..=max_len)
    }

    proptest! {
        #[test]
        fn lcs_matches_enumeration(q in small_seq(8, 4), v in small_seq(8, 4)) {
            prop_assert_eq!(lcs_score(&q, &v).0, lcs_by_enumeration(&q, &v));
        }

        #[test]
        fn white_matches_permutations(
            (q, v) in (0usize..=6).prop_flat_map(|n| {
                (prop::collection::vec(0..4 as Color, n), prop::collection::vec(0..4 as Color, n))
            })
        ) {
            prop_assert_eq!(white_peg_score(&q, &v).unwrap().0, white_by_permutations(&q, &v));
        }

        #[test]
        fn levenshtein_matches_search(q in small_seq(4, 3), v in small_seq(4, 3)) {
            prop_assert_eq!(levenshtein_distance(&q, &v).0, edit_distance_by_search(&q, &v, 4));
        }

        #[test]
        fn identities_hold(
            (q, v) in (0usize..=40).prop_flat_map(|n| {
                (prop::collection::vec(0..4 as Color, n), prop::collection::vec(0..4 as Color, n))
            }),
            w in small_seq(40, 4),
        ) {
            let b = black_peg_score(&q, &v).unwrap();
            let h = hamming_distance(&q, &v).unwrap();
            prop_assert_eq!(b, b_from_hamming(q.len(), h).unwrap());
            prop_assert!(b.0 + white_peg_score(&q, &v).unwrap().0 <= q.len());
            prop_assert_eq!(b, black_peg_score(&v, &q).unwrap());
            prop_assert_eq!(h, hamming_distance(&v, &q).unwrap());

            let a = lcs_score(&q, &w);
            prop_assert_eq!(a, a_from_levenshtein(q.len(), w.len(), indel_distance(&q, &w)).unwrap());
            prop_assert_eq!(a, lcs_score(&w, &q));
            prop_assert!(a.0 <= q.len().min(w.len()));
            prop_assert_eq!(levenshtein_distance(&q, &w), levenshtein_distance(&w, &q));
            prop_assert!(levenshtein_distance(&q, &w).0 <= indel_distance(&q, &w).0);
            prop_assert_eq!(LcsIndex::new(&q).lcs(&w), a.0);
        }

        #[test]
        fn monochromatic_lcs_counts_color(q in small_seq(30, 4), c in 0..4 as Color, extra in 0usize..5) {
            let mono = vec![c; q.len() + extra];
            let count = q.iter().filter(|&&x| x == c).count();
            prop_assert_eq!(lcs_score(&q, &mono).0, count);
        }
    }
}
