//! Reference sequence plus the candidate sites where secrets may differ
//! from it, and the plain-text model file format.
//!
//! Model file layout (UTF-8):
//!
//! ```text
//! M
//! <M substitution/deletion indices, one per line>
//! <blank line>
//! <insertion gap indices, one per line>
//! ```
//!
//! Indices are 0-based. Gap `g` is the slot just before `reference[g]`; gap
//! `reference.len()` is the end.

use std::fmt::Write as _;

use crate::alphabet::Sequence;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariationModel {
    reference: Sequence,
    sub_positions: Vec<usize>,
    insertion_sites: Vec<usize>,
}

impl VariationModel {
    pub fn new(
        reference: Sequence,
        sub_positions: Vec<usize>,
        insertion_sites: Vec<usize>,
    ) -> Result<Self> {
        let n = reference.len();
        check_sites("substitution position", &sub_positions, n)?;
        check_sites("insertion site", &insertion_sites, n + 1)?;
        Ok(VariationModel {
            reference,
            sub_positions,
            insertion_sites,
        })
    }

    /// A model with substitution candidates only.
    pub fn substitution_only(reference: Sequence, sub_positions: Vec<usize>) -> Result<Self> {
        Self::new(reference, sub_positions, Vec::new())
    }

    pub fn reference(&self) -> &Sequence {
        &self.reference
    }

    pub fn sub_positions(&self) -> &[usize] {
        &self.sub_positions
    }

    pub fn insertion_sites(&self) -> &[usize] {
        &self.insertion_sites
    }

    /// `M`, the number of substitution/deletion candidates.
    pub fn m(&self) -> usize {
        self.sub_positions.len()
    }

    /// Insertion gaps whose two flanking reference characters are both
    /// deletion candidates, so a secret could leave the gap without a
    /// surviving neighbor.
    pub fn separator_violations(&self) -> Vec<usize> {
        let candidate = |i: usize| self.sub_positions.binary_search(&i).is_ok();
        self.insertion_sites
            .iter()
            .copied()
            .filter(|&g| g > 0 && g < self.reference.len() && candidate(g - 1) && candidate(g))
            .collect()
    }

    /// Parses the model file format for a given reference.
    pub fn parse(text: &str, reference: Sequence, source: &str) -> Result<Self> {
        let err = |line: usize, message: String| Error::Parse {
            path: source.to_string(),
            line,
            message,
        };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
        let (first_no, first) = lines
            .next()
            .ok_or_else(|| err(1, "empty model file".into()))?;
        let m: usize = first
            .parse()
            .map_err(|_| err(first_no, format!("expected a count, found {first:?}")))?;
        let mut subs = Vec::with_capacity(m);
        for _ in 0..m {
            let (no, line) = lines
                .next()
                .ok_or_else(|| err(first_no, format!("expected {m} substitution indices")))?;
            subs.push(
                line.parse()
                    .map_err(|_| err(no, format!("expected an index, found {line:?}")))?,
            );
        }
        match lines.next() {
            None => {}
            Some((_, "")) => {}
            Some((no, line)) => {
                return Err(err(
                    no,
                    format!("expected a blank separator, found {line:?}"),
                ))
            }
        }
        let mut gaps = Vec::new();
        for (no, line) in lines {
            if line.is_empty() {
                continue;
            }
            gaps.push(
                line.parse()
                    .map_err(|_| err(no, format!("expected a gap index, found {line:?}")))?,
            );
        }
        Self::new(reference, subs, gaps).map_err(|e| err(first_no, e.to_string()))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.sub_positions.len());
        for p in &self.sub_positions {
            let _ = writeln!(out, "{p}");
        }
        out.push('\n');
        for g in &self.insertion_sites {
            let _ = writeln!(out, "{g}");
        }
        out
    }
}

fn check_sites(what: &'static str, sites: &[usize], limit: usize) -> Result<()> {
    if let Some(w) = sites.windows(2).find(|w| w[0] >= w[1]) {
        return Err(Error::InvalidModel(format!(
            "{what}s must be strictly increasing ({} then {})",
            w[0], w[1]
        )));
    }
    if let Some(&last) = sites.last() {
        if last >= limit {
            return Err(Error::InvalidModel(format!(
                "{what} {last} is out of range (< {limit})"
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Alphabet;

    fn reference() -> Sequence {
        Alphabet::dna().parse("ACGTACGTAC").unwrap()
    }

    #[test]
    fn validates_positions() {
        assert!(VariationModel::new(reference(), vec![3, 2], vec![]).is_err());
        assert!(VariationModel::new(reference(), vec![10], vec![]).is_err());
        assert!(VariationModel::new(reference(), vec![9], vec![10]).is_ok());
        assert!(VariationModel::new(reference(), vec![], vec![11]).is_err());
    }

    #[test]
    fn text_round_trip() {
        let m = VariationModel::new(reference(), vec![1, 4, 7], vec![0, 5, 10]).unwrap();
        let text = m.to_text();
        assert_eq!(text, "3\n1\n4\n7\n\n0\n5\n10\n");
        assert_eq!(VariationModel::parse(&text, reference(), "m").unwrap(), m);
    }

    #[test]
    fn parses_model_without_insertions() {
        let m = VariationModel::parse("2\n3\n5\n", reference(), "m").unwrap();
        assert_eq!(m.sub_positions(), [3, 5]);
        assert!(m.insertion_sites().is_empty());
        let m = VariationModel::parse("0\n\n4\n", reference(), "m").unwrap();
        assert_eq!(m.m(), 0);
        assert_eq!(m.insertion_sites(), [4]);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = VariationModel::parse("2\n3\nx\n", reference(), "model.txt").unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                path: "model.txt".into(),
                line: 3,
                message: "expected an index, found \"x\"".into()
            }
        );
        assert!(VariationModel::parse("2\n3\n", reference(), "m").is_err());
        assert!(VariationModel::parse("1\n3\n4\n", reference(), "m").is_err());
    }

    #[test]
    fn flags_gaps_between_deletion_candidates() {
        let m = VariationModel::new(reference(), vec![3, 4, 8], vec![4, 8, 9]).unwrap();
        assert_eq!(m.separator_violations(), [4]);
    }
}
