//! Colors, alphabets and sequences.
//!
//! A [`Sequence`] is a list of color indices. The [`Alphabet`] maps those
//! indices to printable symbols and fixes the cyclic order used for offset
//! encoding (`successor(last) == first`).

use std::collections::HashMap;
use std::fmt;
use std::ops::{Deref, DerefMut};

use crate::error::{Error, Result};

/// Index of a symbol within its alphabet.
pub type Color = u16;

/// Symbols used when an alphabet is built from a bare color count.
const CANONICAL_SYMBOLS: &str = "0123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<char>,
    lookup: HashMap<char, Color>,
}

impl Alphabet {
    pub fn new(symbols: &str) -> Result<Self> {
        Self::from_symbols(symbols.chars())
    }

    pub fn from_symbols(symbols: impl IntoIterator<Item = char>) -> Result<Self> {
        let symbols: Vec<char> = symbols.into_iter().collect();
        if symbols.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        if symbols.len() > Color::MAX as usize {
            return Err(Error::OutOfRange {
                what: "alphabet size",
                value: symbols.len(),
                limit: Color::MAX as usize,
            });
        }
        let mut lookup = HashMap::with_capacity(symbols.len());
        for (i, &c) in symbols.iter().enumerate() {
            if lookup.insert(c, i as Color).is_some() {
                return Err(Error::DuplicateSymbol(c));
            }
        }
        Ok(Alphabet { symbols, lookup })
    }

    /// The nucleotide alphabet with cyclic order A, C, G, T.
    pub fn dna() -> Self {
        Self::new("ACGT").expect("static alphabet")
    }

    /// An alphabet of `k` colors printed as `0-9a-zA-Z`, continuing into
    /// Latin Extended code points past 62 colors.
    pub fn canonical(k: usize) -> Result<Self> {
        Self::from_symbols((0..k).map(canonical_symbol))
    }

    pub fn size(&self) -> usize {
        self.symbols.len()
    }

    pub fn symbols(&self) -> &[char] {
        &self.symbols
    }

    pub fn symbol(&self, color: Color) -> Option<char> {
        self.symbols.get(color as usize).copied()
    }

    pub fn color(&self, symbol: char) -> Option<Color> {
        self.lookup.get(&symbol).copied()
    }

    /// Looks a symbol up exactly, then with its case folded.
    pub fn color_folded(&self, symbol: char) -> Option<Color> {
        self.color(symbol)
            .or_else(|| symbol.to_uppercase().next().and_then(|c| self.color(c)))
            .or_else(|| symbol.to_lowercase().next().and_then(|c| self.color(c)))
    }

    pub fn contains(&self, color: Color) -> bool {
        (color as usize) < self.symbols.len()
    }

    pub fn parse(&self, text: &str) -> Result<Sequence> {
        text.chars()
            .map(|c| {
                self.color(c).ok_or_else(|| Error::UnknownSymbol {
                    symbol: c,
                    alphabet: self.to_string(),
                })
            })
            .collect()
    }

    pub fn render(&self, seq: &[Color]) -> String {
        seq.iter().map(|&c| self.symbol(c).unwrap_or('?')).collect()
    }

    pub fn check(&self, seq: &[Color]) -> Result<()> {
        match seq.iter().find(|&&c| !self.contains(c)) {
            Some(&c) => Err(Error::ColorOutOfRange {
                color: c as usize,
                size: self.size(),
            }),
            None => Ok(()),
        }
    }

    pub fn successor(&self, color: Color) -> Color {
        ((color as usize + 1) % self.size()) as Color
    }

    /// Number of cyclic successor steps from `base` to `observed`.
    pub fn offset(&self, base: Color, observed: Color) -> usize {
        let k = self.size();
        (observed as usize + k - base as usize % k) % k
    }

    /// The color `offset` cyclic steps after `base`.
    pub fn shift(&self, base: Color, offset: usize) -> Color {
        ((base as usize + offset) % self.size()) as Color
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.symbols.iter().try_for_each(|c| write!(f, "{c}"))
    }
}

pub(crate) fn canonical_symbol(color: usize) -> char {
    CANONICAL_SYMBOLS
        .chars()
        .nth(color)
        .unwrap_or_else(|| char::from_u32(0x100 + (color - 62) as u32).unwrap_or('?'))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sequence(Vec<Color>);

impl Sequence {
    pub fn new(colors: Vec<Color>) -> Self {
        Sequence(colors)
    }

    pub fn empty() -> Self {
        Sequence(Vec::new())
    }

    pub fn monochromatic(color: Color, len: usize) -> Self {
        Sequence(vec![color; len])
    }

    pub fn into_inner(self) -> Vec<Color> {
        self.0
    }
}

impl Deref for Sequence {
    type Target = Vec<Color>;

    fn deref(&self) -> &Vec<Color> {
        &self.0
    }
}

impl DerefMut for Sequence {
    fn deref_mut(&mut self) -> &mut Vec<Color> {
        &mut self.0
    }
}

impl From<Vec<Color>> for Sequence {
    fn from(colors: Vec<Color>) -> Self {
        Sequence(colors)
    }
}

impl From<&[Color]> for Sequence {
    fn from(colors: &[Color]) -> Self {
        Sequence(colors.to_vec())
    }
}

impl FromIterator<Color> for Sequence {
    fn from_iter<I: IntoIterator<Item = Color>>(iter: I) -> Self {
        Sequence(iter.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_empty() {
        assert_eq!(Alphabet::new("ACGA"), Err(Error::DuplicateSymbol('A')));
        assert_eq!(Alphabet::new(""), Err(Error::EmptyAlphabet));
    }

    #[test]
    fn cyclic_successor_wraps() {
        let dna = Alphabet::dna();
        let t = dna.color('T').unwrap();
        assert_eq!(dna.successor(t), dna.color('A').unwrap());
        assert_eq!(dna.shift(t, 2), dna.color('C').unwrap());
    }

    #[test]
    fn parse_and_render_round_trip() {
        let dna = Alphabet::dna();
        let seq = dna.parse("GATTACA").unwrap();
        assert_eq!(seq.len(), 7);
        assert_eq!(dna.render(&seq), "GATTACA");
        assert!(matches!(
            dna.parse("GANTC"),
            Err(Error::UnknownSymbol { symbol: 'N', .. })
        ));
    }

    #[test]
    fn folded_lookup() {
        let dna = Alphabet::dna();
        assert_eq!(dna.color_folded('g'), dna.color('G'));
        assert_eq!(dna.color_folded('n'), None);
    }

    #[test]
    fn canonical_alphabet_is_distinct_past_62() {
        let a = Alphabet::canonical(100).unwrap();
        assert_eq!(a.size(), 100);
        assert_eq!(a.symbol(0), Some('0'));
        assert_eq!(a.symbol(10), Some('a'));
        assert!(!a.symbol(70).unwrap().is_whitespace());
    }
}
