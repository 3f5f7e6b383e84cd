//! The secret holder. Answers score queries against a hidden sequence and
//! meters every answered query.

use std::fmt;

use crate::alphabet::{Alphabet, Color, Sequence};
use crate::error::Result;
use crate::scoring::{black_peg_score, LcsIndex, Score};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QueryMode {
    BlackPeg,
    Lcs,
}

impl fmt::Display for QueryMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QueryMode::BlackPeg => "black",
            QueryMode::Lcs => "lcs",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryRecord {
    pub mode: QueryMode,
    pub guess_len: usize,
    pub score: Score,
    /// The guess itself, kept only when the oracle records guesses.
    pub guess: Option<Sequence>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QueryTranscript {
    entries: Vec<QueryRecord>,
    black: usize,
    lcs: usize,
}

impl QueryTranscript {
    pub fn entries(&self) -> &[QueryRecord] {
        &self.entries
    }

    pub fn black_total(&self) -> usize {
        self.black
    }

    pub fn lcs_total(&self) -> usize {
        self.lcs
    }

    pub fn total(&self) -> usize {
        self.black + self.lcs
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn push(&mut self, record: QueryRecord) {
        match record.mode {
            QueryMode::BlackPeg => self.black += 1,
            QueryMode::Lcs => self.lcs += 1,
        }
        self.entries.push(record);
    }
}

/// Holds the secret `Q`. There is deliberately no accessor for the secret;
/// callers that planted it already know it.
#[derive(Clone, Debug)]
pub struct Oracle {
    alphabet: Alphabet,
    secret: Sequence,
    index: LcsIndex,
    transcript: QueryTranscript,
    keep_guesses: bool,
}

impl Oracle {
    pub fn new(alphabet: Alphabet, secret: Sequence) -> Result<Self> {
        alphabet.check(&secret)?;
        let index = LcsIndex::new(&secret);
        Ok(Oracle {
            alphabet,
            secret,
            index,
            transcript: QueryTranscript::default(),
            keep_guesses: false,
        })
    }

    /// Keep a copy of every answered guess in the transcript.
    pub fn recording_guesses(mut self) -> Self {
        self.keep_guesses = true;
        self
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// Length of the secret, which every attack is allowed to know.
    pub fn secret_len(&self) -> usize {
        self.secret.len()
    }

    pub fn query_black(&mut self, guess: &[Color]) -> Result<Score> {
        let score = black_peg_score(&self.secret, guess)?;
        self.record(QueryMode::BlackPeg, guess, score);
        Ok(score)
    }

    pub fn query_lcs(&mut self, guess: &[Color]) -> Score {
        let score = Score(self.index.lcs(guess));
        self.record(QueryMode::Lcs, guess, score);
        score
    }

    pub fn transcript(&self) -> QueryTranscript {
        self.transcript.clone()
    }

    pub fn queries_answered(&self) -> usize {
        self.transcript.total()
    }

    fn record(&mut self, mode: QueryMode, guess: &[Color], score: Score) {
        self.transcript.push(QueryRecord {
            mode,
            guess_len: guess.len(),
            score,
            guess: self.keep_guesses.then(|| Sequence::from(guess)),
        });
    }
}
