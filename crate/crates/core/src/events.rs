//! Edit events relative to a reference, and extraction of those events from
//! an optimal alignment.
//!
//! Events are singleton deletions of reference characters and insertions at
//! gaps. A substitution is represented as the deletion of the reference
//! character plus an insertion in the same slot. Insertions that land in the
//! same slot of the reduced reference (only deleted characters between them)
//! are merged and keyed by the smallest such gap.

use std::collections::{BTreeMap, BTreeSet};

use crate::alphabet::{Color, Sequence};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EventList {
    pub deletions: BTreeSet<usize>,
    pub insertions: BTreeMap<usize, Vec<Color>>,
}

impl EventList {
    pub fn is_empty(&self) -> bool {
        self.deletions.is_empty() && self.insertions.is_empty()
    }

    /// `d(Q)`: number of singleton deletions.
    pub fn deletion_count(&self) -> usize {
        self.deletions.len()
    }

    /// `e(Q)`: number of insertion events.
    pub fn insertion_count(&self) -> usize {
        self.insertions.len()
    }

    /// `ε(Q)`: total inserted length.
    pub fn inserted_len(&self) -> usize {
        self.insertions.values().map(Vec::len).sum()
    }

    pub fn apply(&self, reference: &[Color]) -> Result<Sequence> {
        let n = reference.len();
        if let Some(&i) = self.deletions.range(n..).next() {
            return Err(Error::OutOfRange {
                what: "deletion index",
                value: i,
                limit: n,
            });
        }
        if let Some((&g, _)) = self.insertions.range(n + 1..).next() {
            return Err(Error::OutOfRange {
                what: "insertion gap",
                value: g,
                limit: n,
            });
        }
        let mut out = Vec::with_capacity(n + self.inserted_len());
        for (i, &c) in reference.iter().enumerate() {
            if let Some(content) = self.insertions.get(&i) {
                out.extend_from_slice(content);
            }
            if !self.deletions.contains(&i) {
                out.push(c);
            }
        }
        if let Some(content) = self.insertions.get(&n) {
            out.extend_from_slice(content);
        }
        Ok(Sequence::new(out))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum AlignOp {
    Match,
    Substitute(Color),
    Delete,
    Insert(Color),
}

/// Classified differences between a reference and a sequence.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReferenceDiff {
    pub events: EventList,
    /// Reference indices of substituted characters.
    pub substitutions: Vec<usize>,
    /// Reference indices of purely deleted characters.
    pub deletions: Vec<usize>,
    /// Number of maximal runs of purely inserted characters.
    pub insertion_runs: usize,
}

impl ReferenceDiff {
    pub fn is_substitution_only(&self) -> bool {
        self.deletions.is_empty() && self.insertion_runs == 0
    }
}

/// Events that turn `reference` into `q`, from a unit-cost optimal alignment.
pub fn extract_events(reference: &[Color], q: &[Color]) -> EventList {
    diff_against_reference(reference, q).events
}

/// Aligns `q` to `reference` and classifies every difference.
///
/// Among optimal alignments the traceback prefers matches, then
/// substitutions, then deletions, then insertions; walking back from the end
/// this pushes gaps to the leftmost equivalent position.
pub fn diff_against_reference(reference: &[Color], q: &[Color]) -> ReferenceDiff {
    let ops = align(reference, q);
    let mut diff = ReferenceDiff::default();
    let mut i = 0;
    let mut slot = 0;
    let mut pending: Vec<Color> = Vec::new();
    let mut in_run = false;
    let flush = |pending: &mut Vec<Color>, slot: usize, events: &mut EventList| {
        if !pending.is_empty() {
            events.insertions.insert(slot, std::mem::take(pending));
        }
    };
    for op in ops {
        match op {
            AlignOp::Match => {
                flush(&mut pending, slot, &mut diff.events);
                i += 1;
                slot = i;
                in_run = false;
            }
            AlignOp::Substitute(c) => {
                diff.events.deletions.insert(i);
                diff.substitutions.push(i);
                pending.push(c);
                i += 1;
                in_run = false;
            }
            AlignOp::Delete => {
                diff.events.deletions.insert(i);
                diff.deletions.push(i);
                i += 1;
                in_run = false;
            }
            AlignOp::Insert(c) => {
                pending.push(c);
                if !in_run {
                    diff.insertion_runs += 1;
                }
                in_run = true;
            }
        }
    }
    flush(&mut pending, slot, &mut diff.events);
    diff
}

fn align(r: &[Color], q: &[Color]) -> Vec<AlignOp> {
    // Any path of cost c stays within c diagonals of the main one, so once a
    // band of half-width w yields cost ≤ w every cell the traceback compares
    // holds its exact value and the result matches the unbanded alignment.
    let (n, m) = (r.len(), q.len());
    let mut width = n.abs_diff(m).max(16);
    loop {
        let band = Band::fill(r, q, width);
        if band.at(n, m) as usize <= width || width >= n.max(m) {
            return band.traceback(r, q);
        }
        width *= 2;
    }
}

/// Unit-cost edit matrix restricted to `|i - j| <= width`.
struct Band {
    width: usize,
    stride: usize,
    cost: Vec<u32>,
}

const FAR: u32 = u32::MAX / 2;

impl Band {
    fn fill(r: &[Color], q: &[Color], width: usize) -> Self {
        let (n, m) = (r.len(), q.len());
        let stride = 2 * width + 1;
        let mut band = Band {
            width,
            stride,
            cost: vec![FAR; (n + 1) * stride],
        };
        for i in 0..=n {
            for j in i.saturating_sub(width)..=(i + width).min(m) {
                let value = if i == 0 {
                    j as u32
                } else if j == 0 {
                    i as u32
                } else {
                    let diag = band.at(i - 1, j - 1) + u32::from(r[i - 1] != q[j - 1]);
                    diag.min(band.at(i - 1, j) + 1).min(band.at(i, j - 1) + 1)
                };
                let k = band.slot(i, j);
                band.cost[k] = value;
            }
        }
        band
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        i * self.stride + (j + self.width - i)
    }

    fn at(&self, i: usize, j: usize) -> u32 {
        if i.abs_diff(j) > self.width {
            FAR
        } else {
            self.cost[self.slot(i, j)]
        }
    }

    fn traceback(&self, r: &[Color], q: &[Color]) -> Vec<AlignOp> {
        let (mut i, mut j) = (r.len(), q.len());
        let mut ops = Vec::with_capacity(i.max(j));
        while i > 0 || j > 0 {
            let here = self.at(i, j);
            if i > 0 && j > 0 && r[i - 1] == q[j - 1] && self.at(i - 1, j - 1) == here {
                ops.push(AlignOp::Match);
                i -= 1;
                j -= 1;
            } else if i > 0 && j > 0 && r[i - 1] != q[j - 1] && self.at(i - 1, j - 1) + 1 == here {
                ops.push(AlignOp::Substitute(q[j - 1]));
                i -= 1;
                j -= 1;
            } else if i > 0 && self.at(i - 1, j) + 1 == here {
                ops.push(AlignOp::Delete);
                i -= 1;
            } else {
                ops.push(AlignOp::Insert(q[j - 1]));
                j -= 1;
            }
        }
        ops.reverse();
        ops
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Alphabet;
    use crate::scoring::levenshtein_distance;
    use proptest::prelude::*;

    fn dna(s: &str) -> Vec<Color> {
        Alphabet::dna().parse(s).unwrap().into_inner()
    }

    #[test]
    fn identical_sequences_have_no_events() {
        let r = dna("ACGTTGCA");
        assert!(extract_events(&r, &r).is_empty());
    }

    #[test]
    fn single_deletion() {
        // Removing the C of ACGT: 0-based index 1.
        let ev = extract_events(&dna("ACGT"), &dna("AGT"));
        assert_eq!(ev.deletions, BTreeSet::from([1]));
        assert!(ev.insertions.is_empty());
    }

    #[test]
    fn single_insertion() {
        let ab = Alphabet::new("ACGTX").unwrap();
        let r = ab.parse("ACGT").unwrap();
        let q = ab.parse("ACXGT").unwrap();
        let ev = extract_events(&r, &q);
        assert!(ev.deletions.is_empty());
        // Between C (index 1) and G (index 2).
        assert_eq!(
            ev.insertions,
            BTreeMap::from([(2, ab.parse("X").unwrap().into_inner())])
        );
    }

    #[test]
    fn homopolymer_deletion_is_leftmost() {
        let d = diff_against_reference(&dna("CAAAG"), &dna("CAAG"));
        assert_eq!(d.deletions, [1]);
    }

    #[test]
    fn substitution_run_becomes_deletions_plus_one_insertion() {
        let r = dna("AACCGGTT");
        let q = dna("AAGGGGTT");
        let d = diff_against_reference(&r, &q);
        assert_eq!(d.substitutions, [2, 3]);
        assert!(d.is_substitution_only());
        assert_eq!(d.events.deletions, BTreeSet::from([2, 3]));
        assert_eq!(d.events.insertions, BTreeMap::from([(2, dna("GG"))]));
        assert_eq!(d.events.apply(&r).unwrap().into_inner(), q);
    }

    #[test]
    fn apply_rejects_out_of_range_events() {
        let r = dna("ACGT");
        let ev = EventList {
            deletions: BTreeSet::from([4]),
            ..Default::default()
        };
        assert!(ev.apply(&r).is_err());
        let ev = EventList {
            insertions: BTreeMap::from([(5, dna("A"))]),
            ..Default::default()
        };
        assert!(ev.apply(&r).is_err());
    }

    #[test]
    fn counts() {
        let ev = EventList {
            deletions: BTreeSet::from([1, 5]),
            insertions: BTreeMap::from([(0, dna("AC")), (7, dna("G"))]),
        };
        assert_eq!(
            (ev.deletion_count(), ev.insertion_count(), ev.inserted_len()),
            (2, 2, 3)
        );
    }

    /// Full-matrix alignment with the same tie-breaking, as a reference.
    fn align_unbanded(r: &[Color], q: &[Color]) -> Vec<AlignOp> {
        Band::fill(r, q, r.len().max(q.len())).traceback(r, q)
    }

    proptest! {
        #[test]
        fn banding_does_not_change_the_alignment(
            r in prop::collection::vec(0u16..3, 0..120),
            edits in prop::collection::vec((0usize..120, 0u16..4), 0..40),
        ) {
            let mut q = r.clone();
            for (at, c) in edits {
                match c {
                    3 if !q.is_empty() => { q.remove(at % q.len()); }
                    _ => q.insert(at % (q.len() + 1), c % 3),
                }
            }
            prop_assert_eq!(align(&r, &q), align_unbanded(&r, &q));
        }

        #[test]
        fn extraction_round_trips(
            r in prop::collection::vec(0u16..4, 0..60),
            q in prop::collection::vec(0u16..4, 0..60),
        ) {
            let d = diff_against_reference(&r, &q);
            prop_assert_eq!(d.events.apply(&r).unwrap().into_inner(), q.clone());
            let edits = d.substitutions.len() + d.deletions.len()
                + (d.events.inserted_len() - d.substitutions.len());
            prop_assert_eq!(edits, levenshtein_distance(&r, &q).0);
        }
    }
}
