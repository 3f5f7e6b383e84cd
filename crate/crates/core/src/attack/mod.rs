//! Adaptive attacks that recover a secret sequence from score-only queries.

pub mod general;
pub mod indel;
pub mod substitution;

use crate::alphabet::Sequence;
use crate::oracle::QueryTranscript;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttackResult {
    pub recovered: Sequence,
    /// Queries issued by the attack, counted independently of the oracle.
    pub guesses_used: usize,
    /// The guess bound that applies to this run.
    pub bound: usize,
    pub transcript: QueryTranscript,
}

impl AttackResult {
    pub fn within_bound(&self) -> bool {
        self.guesses_used <= self.bound
    }
}

/// `⌈log₂ m⌉`, with `m ≤ 1` mapping to 0.
pub fn ceil_log2(m: usize) -> usize {
    if m <= 1 {
        0
    } else {
        (usize::BITS - (m - 1).leading_zeros()) as usize
    }
}
