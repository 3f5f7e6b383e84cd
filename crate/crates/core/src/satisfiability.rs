//! Reduction from 3-dimensional matching to LCS-Mastermind satisfiability,
//! plus exhaustive solvers for both sides at desk scale.
//!
//! The secret layout is four blocks: `X`, `Y`, `Z` of length `2n` each and a
//! triple block `T` of length `2m − 1`. Every second position is the
//! separator color `μ`; the null color `φ` appears nowhere. Triple `s` owns
//! one color; a chosen triple writes that color into its `X`, `Y` and `Z`
//! slots and marks its `T` slot with "one", an unchosen triple marks "zero".
//!
//! Concrete numbering for `K = m + 2` colors (0-based): triple `s` (1-based)
//! is color `s − 1`, `φ` is color `m`, `μ` is color `m + 1`. "One" is color 0.
//! "Zero" is color 1 when `m ≥ 2`. With a single triple there is no spare
//! color and "zero" is `φ`, which is consistent because that lone triple must
//! be chosen whenever the instance is solvable.
//!
//! The construction is not sound for LCS scoring as it stands. A chooser
//! query can reach `h + 1` through an alignment shifted by two positions: the
//! shift gives up one separator but gains two matches at neighboring slots.
//! So some unsolvable 3DM instances reduce to satisfiable ones (see the
//! tests). The reduction is still emitted exactly as constructed; the
//! desk-scale solvers exist to measure that gap.
//!
//! Instance text format: a line `N K`, then one line per query holding the
//! guess (one canonical symbol per color) and the claimed response.

use std::fmt::Write as _;

use crate::alphabet::{Alphabet, Color, Sequence};
use crate::error::{Error, Result};
use crate::scoring::{lcs_score, LcsIndex};

/// A 3-dimensional matching instance; triple indices are 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThreeDmInstance {
    n: usize,
    triples: Vec<(usize, usize, usize)>,
}

impl ThreeDmInstance {
    pub fn new(n: usize, triples: Vec<(usize, usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInstance("n must be at least 1".into()));
        }
        if triples.is_empty() {
            return Err(Error::InvalidInstance(
                "at least one triple is required".into(),
            ));
        }
        for (s, &(i, j, k)) in triples.iter().enumerate() {
            if [i, j, k].iter().any(|&x| x == 0 || x > n) {
                return Err(Error::InvalidInstance(format!(
                    "triple {} = ({i}, {j}, {k}) has an index outside 1..={n}",
                    s + 1
                )));
            }
        }
        Ok(ThreeDmInstance { n, triples })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.triples.len()
    }

    pub fn triples(&self) -> &[(usize, usize, usize)] {
        &self.triples
    }

    /// Parses `n m` followed by `m` lines `i j k`.
    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let err = |line: usize, message: String| Error::Parse {
            path: source.to_string(),
            line,
            message,
        };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (no, header) = lines
            .next()
            .ok_or_else(|| err(1, "empty instance".into()))?;
        let header = parse_numbers(header).map_err(|m| err(no, m))?;
        let [n, m] = header[..] else {
            return Err(err(no, "expected `n m`".into()));
        };
        let mut triples = Vec::with_capacity(m);
        for (no, line) in lines {
            let nums = parse_numbers(line).map_err(|m| err(no, m))?;
            let [i, j, k] = nums[..] else {
                return Err(err(no, "expected a triple `i j k`".into()));
            };
            triples.push((i, j, k));
        }
        if triples.len() != m {
            return Err(err(
                no,
                format!("header promises {m} triples, found {}", triples.len()),
            ));
        }
        Self::new(n, triples)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.m());
        for (i, j, k) in &self.triples {
            let _ = writeln!(out, "{i} {j} {k}");
        }
        out
    }
}

fn parse_numbers(line: &str) -> std::result::Result<Vec<usize>, String> {
    line.split_whitespace()
        .map(|t| {
            t.parse()
                .map_err(|_| format!("expected a number, found {t:?}"))
        })
        .collect()
}

/// Position and color arithmetic for the reduction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReductionLayout {
    pub n: usize,
    pub m: usize,
}

impl ReductionLayout {
    pub fn new(n: usize, m: usize) -> Self {
        ReductionLayout { n, m }
    }

    /// Recognizes a layout from a secret length and color count.
    pub fn from_shape(len: usize, colors: usize) -> Option<Self> {
        let m = colors.checked_sub(2).filter(|&m| m >= 1)?;
        let rest = (len + 1).checked_sub(2 * m)?;
        (rest % 6 == 0 && rest > 0).then(|| ReductionLayout::new(rest / 6, m))
    }

    /// `N = 6n + 2m − 1`.
    pub fn len(&self) -> usize {
        6 * self.n + 2 * self.m - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `h = 3n + m − 1`, the number of separator positions.
    pub fn separators(&self) -> usize {
        3 * self.n + self.m - 1
    }

    /// `K = m + 2`.
    pub fn colors(&self) -> usize {
        self.m + 2
    }

    /// 0-based position of the `i`-th (1-based) odd slot of the `X` block.
    pub fn x(&self, i: usize) -> usize {
        2 * (i - 1)
    }

    pub fn y(&self, j: usize) -> usize {
        2 * self.n + 2 * (j - 1)
    }

    pub fn z(&self, k: usize) -> usize {
        4 * self.n + 2 * (k - 1)
    }

    /// Slot of triple `s` (1-based) in the `T` block.
    pub fn t(&self, s: usize) -> usize {
        6 * self.n + 2 * (s - 1)
    }

    pub fn is_separator(&self, position: usize) -> bool {
        position % 2 == 1
    }

    pub fn triple_color(&self, s: usize) -> Color {
        (s - 1) as Color
    }

    pub fn null(&self) -> Color {
        self.m as Color
    }

    pub fn separator(&self) -> Color {
        (self.m + 1) as Color
    }

    pub fn one(&self) -> Color {
        0
    }

    pub fn zero(&self) -> Color {
        if self.m >= 2 {
            1
        } else {
            self.null()
        }
    }

    /// Odd positions `φ`, even positions `μ`.
    fn base_pattern(&self) -> Vec<Color> {
        (0..self.len())
            .map(|p| {
                if self.is_separator(p) {
                    self.separator()
                } else {
                    self.null()
                }
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MastermindInstance {
    len: usize,
    colors: usize,
    queries: Vec<(Sequence, usize)>,
}

impl MastermindInstance {
    pub fn new(len: usize, colors: usize, queries: Vec<(Sequence, usize)>) -> Result<Self> {
        if colors == 0 {
            return Err(Error::EmptyAlphabet);
        }
        for (guess, _) in &queries {
            if guess.len() != len {
                return Err(Error::LengthMismatch {
                    left: len,
                    right: guess.len(),
                });
            }
            if let Some(&c) = guess.iter().find(|&&c| c as usize >= colors) {
                return Err(Error::ColorOutOfRange {
                    color: c as usize,
                    size: colors,
                });
            }
        }
        Ok(MastermindInstance {
            len,
            colors,
            queries,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn colors(&self) -> usize {
        self.colors
    }

    pub fn queries(&self) -> &[(Sequence, usize)] {
        &self.queries
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet::canonical(self.colors).expect("nonzero color count")
    }

    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let err = |line: usize, message: String| Error::Parse {
            path: source.to_string(),
            line,
            message,
        };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (no, header) = lines
            .next()
            .ok_or_else(|| err(1, "empty instance".into()))?;
        let header = parse_numbers(header).map_err(|m| err(no, m))?;
        let [len, colors] = header[..] else {
            return Err(err(no, "expected `N K`".into()));
        };
        let alphabet = Alphabet::canonical(colors).map_err(|e| err(no, e.to_string()))?;
        let mut queries = Vec::new();
        for (no, line) in lines {
            let mut parts = line.split_whitespace();
            let (Some(guess), Some(response), None) = (parts.next(), parts.next(), parts.next())
            else {
                return Err(err(no, "expected `guess response`".into()));
            };
            let guess = alphabet.parse(guess).map_err(|e| err(no, e.to_string()))?;
            let response = response
                .parse()
                .map_err(|_| err(no, format!("expected a response, found {response:?}")))?;
            queries.push((guess, response));
        }
        Self::new(len, colors, queries).map_err(|e| err(no, e.to_string()))
    }

    pub fn to_text(&self) -> String {
        let alphabet = self.alphabet();
        let mut out = format!("{} {}\n", self.len, self.colors);
        for (guess, response) in &self.queries {
            let _ = writeln!(out, "{} {response}", alphabet.render(guess));
        }
        out
    }

    /// The reduction layout, when the instance has the reduction's shape:
    /// matching length and color count, an all-`φ` query answered 0 and an
    /// all-`μ` query answered `h`.
    pub fn reduction_layout(&self) -> Option<ReductionLayout> {
        let layout = ReductionLayout::from_shape(self.len, self.colors)?;
        let mono = |color: Color, response: usize| {
            self.queries
                .iter()
                .any(|(g, r)| *r == response && g.iter().all(|&c| c == color))
        };
        (mono(layout.null(), 0) && mono(layout.separator(), layout.separators())).then_some(layout)
    }
}

/// Builds the satisfiability instance for a 3DM instance.
pub fn reduce_3dm(inst: &ThreeDmInstance) -> MastermindInstance {
    let layout = ReductionLayout::new(inst.n(), inst.m());
    let h = layout.separators();
    let n = inst.n();
    let m = inst.m();
    let len = layout.len();
    let mut queries = Vec::with_capacity(4 + 3 * m);
    queries.push((Sequence::monochromatic(layout.null(), len), 0));
    queries.push((Sequence::monochromatic(layout.separator(), len), h));
    // `h + m − n` never underflows since `h ≥ n`.
    for (one, response) in [(true, h + n), (false, h + m - n)] {
        let mut v = layout.base_pattern();
        for s in 1..=m {
            v[layout.t(s)] = if one { layout.one() } else { layout.zero() };
        }
        queries.push((Sequence::new(v), response));
    }
    for (s, &(i, j, k)) in inst.triples().iter().enumerate() {
        let s = s + 1;
        for slot in [layout.x(i), layout.y(j), layout.z(k)] {
            let mut v = layout.base_pattern();
            v[slot] = layout.triple_color(s);
            v[layout.t(s)] = layout.zero();
            queries.push((Sequence::new(v), h + 1));
        }
    }
    MastermindInstance {
        len,
        colors: layout.colors(),
        queries,
    }
}

/// True iff `q` reproduces every claimed response.
pub fn verify_witness(q: &[Color], inst: &MastermindInstance) -> Result<bool> {
    if q.len() != inst.len() {
        return Err(Error::LengthMismatch {
            left: inst.len(),
            right: q.len(),
        });
    }
    let index = LcsIndex::new(q);
    Ok(inst.queries().iter().all(|(g, r)| index.lcs(g) == *r))
}

/// The secret encoding a matching, given as 0-based indices of chosen triples.
pub fn construct_from_matching(inst: &ThreeDmInstance, chosen: &[usize]) -> Result<Sequence> {
    let layout = ReductionLayout::new(inst.n(), inst.m());
    let mut q = vec![None; layout.len()];
    for p in (1..layout.len()).step_by(2) {
        q[p] = Some(layout.separator());
    }
    for s in 1..=inst.m() {
        q[layout.t(s)] = Some(layout.zero());
    }
    for &t in chosen {
        let &(i, j, k) = inst
            .triples()
            .get(t)
            .ok_or_else(|| Error::InvalidInstance(format!("triple index {t} out of range")))?;
        let s = t + 1;
        if q[layout.t(s)] == Some(layout.one()) {
            return Err(Error::InvalidInstance(format!("triple {s} chosen twice")));
        }
        q[layout.t(s)] = Some(layout.one());
        for slot in [layout.x(i), layout.y(j), layout.z(k)] {
            if q[slot].is_some() {
                return Err(Error::InvalidInstance(format!(
                    "triple {s} reuses an element already covered"
                )));
            }
            q[slot] = Some(layout.triple_color(s));
        }
    }
    q.into_iter()
        .collect::<Option<Sequence>>()
        .ok_or_else(|| Error::InvalidInstance("chosen triples do not cover every element".into()))
}

/// Some `n`-subset of triples covering every element exactly once, as 0-based
/// triple indices in increasing order.
pub fn solve_3dm_bruteforce(inst: &ThreeDmInstance, limit: u128) -> Result<Option<Vec<usize>>> {
    let (n, m) = (inst.n(), inst.m());
    if n > m {
        return Ok(None);
    }
    let space = binomial(m, n);
    if space > limit {
        return Err(Error::SearchTooLarge { space, limit });
    }
    let mut chosen = Vec::with_capacity(n);
    let mut used = [vec![false; n + 1], vec![false; n + 1], vec![false; n + 1]];
    fn go(
        next: usize,
        inst: &ThreeDmInstance,
        chosen: &mut Vec<usize>,
        used: &mut [Vec<bool>; 3],
    ) -> bool {
        if chosen.len() == inst.n() {
            return true;
        }
        for t in next..inst.m() {
            if inst.m() - t < inst.n() - chosen.len() {
                break;
            }
            let (i, j, k) = inst.triples()[t];
            if used[0][i] || used[1][j] || used[2][k] {
                continue;
            }
            used[0][i] = true;
            used[1][j] = true;
            used[2][k] = true;
            chosen.push(t);
            if go(t + 1, inst, chosen, used) {
                return true;
            }
            chosen.pop();
            used[0][i] = false;
            used[1][j] = false;
            used[2][k] = false;
        }
        false
    }
    Ok(go(0, inst, &mut chosen, &mut used).then_some(chosen))
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k.min(n - k)).fold(1u128, |acc, i| acc * (n - i) as u128 / (i as u128 + 1))
}

/// How the exhaustive search restricts candidate secrets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchPlan {
    /// Use the reduction layout when the instance has its shape: separator at
    /// every even position, any other non-null color at odd positions, and
    /// triple slots assigned before element slots.
    Auto,
    /// Every position ranges over every color not excluded by an all-one-color
    /// query answered 0; positions are assigned left to right.
    Unstructured,
}

/// Some secret satisfying every query, or `None` when there is none.
///
/// Depth-first search with per-query pruning: at each node every query's LCS
/// is bounded below (open positions match nothing) and above (open positions
/// match any color still in their domain). `limit` caps the product of domain
/// sizes over open positions; larger searches are refused.
pub fn brute_force_satisfiable(inst: &MastermindInstance, limit: u128) -> Result<Option<Sequence>> {
    brute_force_with_plan(inst, limit, SearchPlan::Auto)
}

pub fn brute_force_with_plan(
    inst: &MastermindInstance,
    limit: u128,
    plan: SearchPlan,
) -> Result<Option<Sequence>> {
    let n = inst.len();
    let k = inst.colors();
    let absent: Vec<bool> = (0..k as Color)
        .map(|c| {
            n > 0
                && inst
                    .queries()
                    .iter()
                    .any(|(g, r)| *r == 0 && g.iter().all(|&x| x == c))
        })
        .collect();
    let free: Vec<Color> = (0..k as Color).filter(|&c| !absent[c as usize]).collect();
    let mut domains: Vec<Vec<Color>> = vec![free.clone(); n];
    let mut order: Vec<usize> = (0..n).collect();
    if let (SearchPlan::Auto, Some(layout)) = (plan, inst.reduction_layout()) {
        let sep = layout.separator();
        for (p, d) in domains.iter_mut().enumerate() {
            if layout.is_separator(p) {
                *d = vec![sep];
            } else {
                d.retain(|&c| c != sep);
            }
        }
        let t_slots = (1..=layout.m).map(|s| layout.t(s));
        let element_slots = (0..6 * layout.n).step_by(2);
        order = t_slots.chain(element_slots).collect();
        order.extend((1..n).step_by(2));
    }
    let space = domains
        .iter()
        .map(|d| d.len() as u128)
        .try_fold(1u128, |acc, d| acc.checked_mul(d))
        .unwrap_or(u128::MAX);
    if space > limit {
        return Err(Error::SearchTooLarge { space, limit });
    }
    if domains.iter().any(Vec::is_empty) {
        return Ok(None);
    }
    let mut search = Search {
        inst,
        domains,
        order,
        assigned: vec![None; n],
        words: n.div_ceil(64).max(1),
    };
    Ok(search.run(0).then(|| {
        search
            .assigned
            .iter()
            .map(|c| c.expect("complete"))
            .collect()
    }))
}

struct Search<'a> {
    inst: &'a MastermindInstance,
    domains: Vec<Vec<Color>>,
    order: Vec<usize>,
    assigned: Vec<Option<Color>>,
    words: usize,
}

impl Search<'_> {
    fn index(&self, optimistic: bool) -> LcsIndex {
        let mut masks = vec![vec![0u64; self.words]; self.inst.colors()];
        for (p, a) in self.assigned.iter().enumerate() {
            let bit = 1u64 << (p % 64);
            match a {
                Some(c) => masks[*c as usize][p / 64] |= bit,
                None if optimistic => {
                    for &c in &self.domains[p] {
                        masks[c as usize][p / 64] |= bit;
                    }
                }
                None => {}
            }
        }
        LcsIndex::from_masks(self.inst.len(), masks)
    }

    fn feasible(&self) -> bool {
        let low = self.index(false);
        let high = self.index(true);
        self.inst
            .queries()
            .iter()
            .all(|(g, r)| low.lcs(g) <= *r && *r <= high.lcs(g))
    }

    fn run(&mut self, depth: usize) -> bool {
        if !self.feasible() {
            return false;
        }
        if depth == self.order.len() {
            return true;
        }
        let p = self.order[depth];
        for ci in 0..self.domains[p].len() {
            self.assigned[p] = Some(self.domains[p][ci]);
            if self.run(depth + 1) {
                return true;
            }
        }
        self.assigned[p] = None;
        false
    }
}

/// Direct LCS check used to cross-validate the search.
pub fn satisfies_all(q: &[Color], inst: &MastermindInstance) -> bool {
    inst.queries().iter().all(|(g, r)| lcs_score(q, g).0 == *r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const LIMIT: u128 = 1 << 60;

    fn inst(n: usize, triples: &[(usize, usize, usize)]) -> ThreeDmInstance {
        ThreeDmInstance::new(n, triples.to_vec()).unwrap()
    }

    #[test]
    fn layout_arithmetic() {
        let mm = reduce_3dm(&inst(1, &[(1, 1, 1)]));
        assert_eq!((mm.len(), mm.colors(), mm.queries().len()), (7, 3, 7));
        assert_eq!(ReductionLayout::new(1, 1).separators(), 3);
        let mm = reduce_3dm(&inst(2, &[(1, 1, 1), (2, 2, 2), (1, 2, 1)]));
        assert_eq!((mm.len(), mm.colors(), mm.queries().len()), (17, 5, 13));
        assert_eq!(
            ReductionLayout::from_shape(17, 5),
            Some(ReductionLayout::new(2, 3))
        );
        assert_eq!(ReductionLayout::from_shape(16, 5), None);
    }

    #[test]
    fn enforcer_queries() {
        let mm = reduce_3dm(&inst(2, &[(1, 2, 1), (2, 1, 2)]));
        let layout = ReductionLayout::new(2, 2);
        assert!(mm.queries()[0].0.iter().all(|&c| c == layout.null()));
        assert_eq!(mm.queries()[0].1, 0);
        assert!(mm.queries()[1].0.iter().all(|&c| c == layout.separator()));
        assert_eq!(mm.queries()[1].1, layout.separators());
        assert_eq!(mm.reduction_layout(), Some(layout));
    }

    #[test]
    fn rejects_bad_indices() {
        assert!(ThreeDmInstance::new(2, vec![(1, 3, 1)]).is_err());
        assert!(ThreeDmInstance::new(2, vec![(0, 1, 1)]).is_err());
        assert!(ThreeDmInstance::new(2, vec![]).is_err());
    }

    #[test]
    fn matching_witness_verifies() {
        let i = inst(2, &[(1, 1, 1), (1, 2, 2), (2, 2, 2)]);
        let matching = solve_3dm_bruteforce(&i, LIMIT).unwrap().unwrap();
        assert_eq!(matching, [0, 2]);
        let mm = reduce_3dm(&i);
        let q = construct_from_matching(&i, &matching).unwrap();
        assert!(verify_witness(&q, &mm).unwrap());
        assert!(satisfies_all(&q, &mm));
        let null = Sequence::monochromatic(ReductionLayout::new(2, 3).null(), mm.len());
        assert!(!verify_witness(&null, &mm).unwrap());
        assert!(verify_witness(&q[1..], &mm).is_err());
        assert!(construct_from_matching(&i, &[0, 1]).is_err());
    }

    #[test]
    fn three_dm_small_cases() {
        assert!(solve_3dm_bruteforce(&inst(1, &[(1, 1, 1)]), LIMIT)
            .unwrap()
            .is_some());
        assert!(
            solve_3dm_bruteforce(&inst(2, &[(1, 1, 1), (1, 2, 2)]), LIMIT)
                .unwrap()
                .is_none()
        );
    }

    #[test]
    fn brute_force_small_cases() {
        let sat = reduce_3dm(&inst(1, &[(1, 1, 1)]));
        let q = brute_force_satisfiable(&sat, LIMIT).unwrap().unwrap();
        assert!(verify_witness(&q, &sat).unwrap());
        let unsat = reduce_3dm(&inst(2, &[(1, 1, 1), (1, 2, 2)]));
        assert_eq!(brute_force_satisfiable(&unsat, LIMIT).unwrap(), None);
    }

    #[test]
    fn shifted_alignment_satisfies_an_unsolvable_instance() {
        // z_1 is covered by both triples, so there is no matching. Yet the
        // secret below meets every response: in each chooser for triple 1,
        // an alignment shifted left by two positions gives up one separator
        // and gains two matches, one against a neighboring element slot and
        // one against a `Z` slot holding the "zero" color.
        let i = inst(2, &[(1, 2, 1), (2, 1, 1)]);
        assert!(solve_3dm_bruteforce(&i, LIMIT).unwrap().is_none());
        let mm = reduce_3dm(&i);
        let q = Sequence::new(vec![0, 3, 1, 3, 1, 3, 0, 3, 1, 3, 1, 3, 0, 3, 0]);
        assert!(satisfies_all(&q, &mm));
        assert!(brute_force_satisfiable(&mm, LIMIT).unwrap().is_some());
    }

    #[test]
    fn contradictory_duplicates_are_unsatisfiable() {
        let g = Sequence::new(vec![0, 1, 0]);
        let mm = MastermindInstance::new(3, 2, vec![(g.clone(), 1), (g, 2)]).unwrap();
        assert_eq!(brute_force_satisfiable(&mm, LIMIT).unwrap(), None);
    }

    #[test]
    fn refuses_large_searches() {
        let mm = reduce_3dm(&inst(3, &[(1, 1, 1), (2, 2, 2), (3, 3, 3)]));
        assert!(matches!(
            brute_force_satisfiable(&mm, 10),
            Err(Error::SearchTooLarge { limit: 10, .. })
        ));
    }

    #[test]
    fn structured_search_agrees_with_unstructured_on_tiny_instances() {
        for triples in [vec![(1, 1, 1)], vec![(1, 1, 1), (1, 1, 1)]] {
            let i = inst(1, &triples);
            let mm = reduce_3dm(&i);
            let a = brute_force_with_plan(&mm, LIMIT, SearchPlan::Auto).unwrap();
            let b = brute_force_with_plan(&mm, LIMIT, SearchPlan::Unstructured).unwrap();
            assert_eq!(a.is_some(), b.is_some());
        }
    }

    #[test]
    fn text_round_trips() {
        let i = inst(2, &[(1, 2, 1), (2, 1, 2)]);
        assert_eq!(ThreeDmInstance::parse(&i.to_text(), "i").unwrap(), i);
        let mm = reduce_3dm(&i);
        let text = mm.to_text();
        assert!(text.starts_with("15 4\n"));
        assert_eq!(MastermindInstance::parse(&text, "mm").unwrap(), mm);
        assert!(matches!(
            MastermindInstance::parse("3 2\n01x 1\n", "mm"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn random_candidates_rarely_verify() {
        let i = inst(2, &[(1, 1, 1), (2, 2, 2), (1, 2, 1)]);
        let mm = reduce_3dm(&i);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let hits = (0..500)
            .filter(|_| {
                let q: Vec<Color> = (0..mm.len())
                    .map(|_| rng.random_range(0..mm.colors()) as Color)
                    .collect();
                verify_witness(&q, &mm).unwrap()
            })
            .count();
        assert_eq!(hits, 0);
    }

    proptest! {
        #[test]
        fn masked_lcs_matches_wildcard_dp(
            fixed in prop::collection::vec(prop::option::of(0u16..3), 0..40),
            other in prop::collection::vec(0u16..3, 0..40),
        ) {
            // `None` positions match every color.
            let words = fixed.len().div_ceil(64).max(1);
            let mut masks = vec![vec![0u64; words]; 3];
            for (p, c) in fixed.iter().enumerate() {
                for color in 0..3u16 {
                    if c.is_none_or(|c| c == color) {
                        masks[color as usize][p / 64] |= 1 << (p % 64);
                    }
                }
            }
            let index = LcsIndex::from_masks(fixed.len(), masks);
            let mut dp = vec![vec![0usize; other.len() + 1]; fixed.len() + 1];
            for i in 1..=fixed.len() {
                for j in 1..=other.len() {
                    let hit = fixed[i - 1].is_none_or(|c| c == other[j - 1]);
                    dp[i][j] = dp[i - 1][j].max(dp[i][j - 1]).max(dp[i - 1][j - 1] + usize::from(hit));
                }
            }
            prop_assert_eq!(index.lcs(&other), dp[fixed.len()][other.len()]);
        }
    }
}
