//! Executable versions of the constructive steps behind the splitting and
//! bounding results: splitters from slaloms, guessers and the greedy
//! disjoint pair, the shifted bound `g̃`, maxfin closures, escape functions
//! and the `[f < g]` filter subbase.
//!
//! Enumerations are 0-indexed throughout. Where a construction is usually
//! stated with a 1-indexed enumeration `y(1), y(2), …`, element `y(i)` here
//! is `y.element(i - 1)`.

use std::collections::HashSet;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::compression::compress_set;
use crate::epset::EpSet;
use crate::error::{LabError, Result};
use crate::families::{FamilySpec, KindClaim};
use crate::lazy::{GreedySide, LazySet, LazySource};
use crate::qafun::QaFun;

/// `⋃ₙ [h(2n), h(2n+1))`, the union of every other interval of `h`.
pub fn splitter_from_slalom(h: &QaFun) -> Result<EpSet> {
    h.require_increasing()?;
    let s = h.start();
    let m = h.period();
    let cycle = m.lcm(&2);
    let period = h.incr() * (cycle / m);
    let from = h.eval(s);
    let limit = from + period;
    let mut marks = vec![false; limit as usize];
    let mut j = 0;
    while h.eval(j) < limit {
        if j % 2 == 0 {
            let hi = h.eval(j + 1).min(limit);
            marks[h.eval(j) as usize..hi as usize].fill(true);
        }
        j += 1;
    }
    Ok(EpSet::from_fn(from, period, |x| marks[x as usize]))
}

/// The `2n` smallest elements of `y`.
pub fn first2n(y: &EpSet, n: u64) -> Result<Vec<u64>> {
    y.require_infinite()?;
    if n == 0 {
        return Err(LabError::InvalidArgument("first2n is defined for n ≥ 1".into()));
    }
    Ok(y.iter().take(2 * n as usize).collect())
}

/// Guessing function that interleaves the codes `n ↦ first2n(y, n)` of a
/// finite family by residue class: round `n` answers with strand `n mod k`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawGuesser", into = "RawGuesser")]
pub struct GuesserProgram {
    strands: Vec<EpSet>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawGuesser {
    pub strands: Vec<EpSet>,
}

impl TryFrom<RawGuesser> for GuesserProgram {
    type Error = LabError;

    fn try_from(raw: RawGuesser) -> Result<Self> {
        GuesserProgram::new(raw.strands)
    }
}

impl From<GuesserProgram> for RawGuesser {
    fn from(g: GuesserProgram) -> Self {
        RawGuesser { strands: g.strands }
    }
}

impl GuesserProgram {
    pub fn new(strands: Vec<EpSet>) -> Result<Self> {
        if strands.is_empty() {
            return Err(LabError::InvalidArgument("a guesser needs at least one strand".into()));
        }
        for y in &strands {
            y.require_infinite()?;
        }
        Ok(Self { strands })
    }

    pub fn strands(&self) -> &[EpSet] {
        &self.strands
    }

    fn strand_at(&self, n: u64) -> &EpSet {
        &self.strands[(n % self.strands.len() as u64) as usize]
    }

    /// `g(n)`; empty at `n = 0`.
    pub fn guess(&self, n: u64) -> Vec<u64> {
        self.strand_at(n).iter().take(2 * n as usize).collect()
    }

    /// `g(n) = first2n(y, n)`.
    pub fn matches_at(&self, y: &EpSet, n: u64) -> bool {
        n >= 1 && self.guess(n) == y.iter().take(2 * n as usize).collect::<Vec<_>>()
    }

    /// Whether `g` agrees with the code of `y` infinitely often. Agreement at
    /// `n` pins the first `2n` elements, so this holds iff `y` is a strand.
    pub fn guesses(&self, y: &EpSet) -> bool {
        self.strands.contains(y)
    }
}

impl fmt::Display for GuesserProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("guesser[")?;
        for (i, y) in self.strands.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            write!(f, "{y}")?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for GuesserProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub fn rothberger_guesser(family: &[EpSet]) -> Result<GuesserProgram> {
    GuesserProgram::new(family.to_vec())
}

/// The greedy pair `I = {iₙ}`, `J = {jₙ}`: at round `n ≥ 1`, `iₙ < jₙ` are
/// the two smallest members of `g(n)` not chosen in earlier rounds.
pub fn ij_from_guesser(g: &GuesserProgram) -> (LazySet, LazySet) {
    let side = |side| {
        LazySet::new(LazySource::Greedy {
            guesser: g.clone(),
            side,
        })
    };
    (side(GreedySide::I), side(GreedySide::J))
}

/// Runs greedy rounds until every strand element below `depth` has been
/// chosen; later rounds can then only choose elements `≥ depth`, so the
/// returned truncations of `I` and `J` are exact.
pub(crate) fn greedy_truncation(g: &GuesserProgram, depth: u64, budget: u64) -> Result<(Vec<u64>, Vec<u64>)> {
    let k = g.strands.len() as u64;
    let mut used: HashSet<u64> = HashSet::new();
    // cursor[i]: index of the first unchosen element of strand i
    let mut cursor = vec![0u64; k as usize];
    let (mut is, mut js) = (Vec::new(), Vec::new());
    let mut steps: u64 = 0;
    let elem = |i: usize, idx: u64| g.strands[i].element(idx).expect("strands are infinite");
    let done = |cursor: &mut [u64], used: &HashSet<u64>, steps: &mut u64| {
        let mut all = true;
        for (i, c) in cursor.iter_mut().enumerate() {
            while used.contains(&elem(i, *c)) {
                *c += 1;
                *steps += 1;
            }
            all &= elem(i, *c) >= depth;
        }
        all
    };
    let mut n: u64 = 0;
    while !done(&mut cursor, &used, &mut steps) {
        n += 1;
        let i = (n % k) as usize;
        let mut picks = [0u64; 2];
        let mut found = 0;
        let mut idx = cursor[i];
        while found < 2 && idx < 2 * n {
            let x = elem(i, idx);
            if !used.contains(&x) {
                picks[found] = x;
                found += 1;
            }
            idx += 1;
            steps += 1;
        }
        if found < 2 {
            return Err(LabError::ExhaustedChoice { round: n });
        }
        used.insert(picks[0]);
        used.insert(picks[1]);
        if picks[0] < depth {
            is.push(picks[0]);
        }
        if picks[1] < depth {
            js.push(picks[1]);
        }
        steps += 1;
        if steps > budget {
            return Err(LabError::BudgetExceeded { depth, budget });
        }
    }
    is.sort_unstable();
    js.sort_unstable();
    Ok((is, js))
}

/// `g̃(n) = g(h(n+1))`.
pub fn gtilde(g: &QaFun, h: &QaFun) -> Result<QaFun> {
    h.require_increasing()?;
    Ok(g.compose(&h.shift()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundingRow {
    pub f: QaFun,
    /// `[f ≤ g]`
    pub le_bound: EpSet,
    /// `[f ≤ g]/h`
    pub compressed: EpSet,
    /// `[f ≤ g̃]`
    pub le_shifted: EpSet,
    /// `[f ≤ g]/h ⊆* [f ≤ g̃]`
    pub almost_subset: bool,
    /// `[f ≤ g]/h ⊆ [f ≤ g̃]`
    pub subset: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundingReport {
    pub g: QaFun,
    pub h: QaFun,
    pub gtilde: QaFun,
    pub rows: Vec<BoundingRow>,
}

impl BoundingReport {
    pub fn verifies(&self) -> bool {
        self.rows.iter().all(|r| r.almost_subset)
    }

    /// Recomputes every row from the stored inputs and compares.
    pub fn reverify(&self) -> bool {
        let ys: Vec<QaFun> = self.rows.iter().map(|r| r.f.clone()).collect();
        bounding_reduction(&ys, &self.g, &self.h).is_ok_and(|r| r == *self)
    }
}

/// Transfers the bound `g` through the compressor `h`: for each `f`, the set
/// `[f ≤ g]/h` lands (almost) inside `[f ≤ g̃]`.
///
/// Requires `h` increasing, every `f` and `g` nondecreasing, and every
/// `[f ≤ g]` infinite.
pub fn bounding_reduction(ys: &[QaFun], g: &QaFun, h: &QaFun) -> Result<BoundingReport> {
    h.require_increasing()?;
    if !g.is_nondecreasing() {
        return Err(LabError::NotMonotone(g.to_string()));
    }
    let gt = gtilde(g, h)?;
    let mut rows = Vec::with_capacity(ys.len());
    for f in ys {
        if !f.is_nondecreasing() {
            return Err(LabError::NotMonotone(f.to_string()));
        }
        let le_bound = f.le_set(g, false);
        if !le_bound.is_infinite() {
            return Err(LabError::WitnessInvalid(format!("[f ≤ g] is finite for f = {f}")));
        }
        let compressed = compress_set(&le_bound, h)?;
        let le_shifted = f.le_set(&gt, false);
        rows.push(BoundingRow {
            almost_subset: compressed.almost_subset(&le_shifted),
            subset: compressed.difference(&le_shifted).is_empty(),
            f: f.clone(),
            le_bound,
            compressed,
            le_shifted,
        });
    }
    Ok(BoundingReport {
        g: g.clone(),
        h: h.clone(),
        gtilde: gt,
        rows,
    })
}

/// `{max(F) : ∅ ≠ F ⊆ Y}`, deduplicated, in order of discovery.
pub fn maxfin_closure(ys: &[QaFun]) -> Result<Vec<QaFun>> {
    if ys.is_empty() {
        return Err(LabError::InvalidArgument("maxfin of an empty family".into()));
    }
    let mut out: Vec<QaFun> = Vec::new();
    for f in ys {
        let mut fresh = vec![f.clone()];
        for r in &out {
            fresh.push(QaFun::pointwise_max([r, f])?);
        }
        for x in fresh {
            if !out.contains(&x) {
                out.push(x);
            }
        }
    }
    Ok(out)
}

/// `max(Y) + 1`, which exceeds every member of the maxfin closure everywhere.
pub fn escape_function(ys: &[QaFun]) -> Result<QaFun> {
    Ok(QaFun::pointwise_max(ys)?.plus(1))
}

/// `{[f < g] : f ∈ Y}`, valid when `g` stays above every member of the
/// maxfin closure infinitely often.
pub fn filter_subbase_from_bound(ys: &[QaFun], g: &QaFun) -> Result<FamilySpec> {
    for m in maxfin_closure(ys)? {
        if !m.le_set(g, true).is_infinite() {
            return Err(LabError::WitnessInvalid(format!("[m < g] is finite for m = {m}")));
        }
    }
    Ok(FamilySpec::new(ys.iter().map(|f| f.le_set(g, true)))?.with_claim(Some(KindClaim::FilterSubbase)))
}

/// Slalom built by the recursion `h(0) = 0`, `h(n+1) = b(h(n)) + 1` with
/// `b = max Y`. Since `h(n) ≤ f(h(n)) ≤ b(h(n))`, each window holds a value
/// of every `f`. Values grow geometrically and leave the periodic class, so
/// they are produced on demand in `u128`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LazyFun {
    ys: Vec<QaFun>,
}

pub fn recursive_slalom_stream(ys: &[QaFun]) -> Result<LazyFun> {
    if ys.is_empty() {
        return Err(LabError::InvalidArgument("recursive slalom of an empty family".into()));
    }
    for f in ys {
        f.require_increasing()?;
    }
    Ok(LazyFun { ys: ys.to_vec() })
}

impl LazyFun {
    fn bound(&self, x: u128) -> Result<u128> {
        self.ys
            .iter()
            .map(|f| f.eval_wide(x).ok_or_else(|| LabError::Overflow("recursive slalom".into())))
            .try_fold(0, |acc, v| v.map(|v| acc.max(v)))
    }

    /// `h(0), …, h(count − 1)`.
    pub fn values(&self, count: usize) -> Result<Vec<u128>> {
        let mut out = Vec::with_capacity(count);
        let mut h: u128 = 0;
        for _ in 0..count {
            out.push(h);
            h = self.bound(h)?.checked_add(1).ok_or_else(|| LabError::Overflow("recursive slalom".into()))?;
        }
        Ok(out)
    }

    /// Every image meets `[h(n), h(n+1))` for `n < depth`.
    pub fn slalom_holds(&self, depth: usize) -> Result<bool> {
        let h = self.values(depth + 1)?;
        Ok(self.ys.iter().all(|f| {
            h.windows(2).all(|w| {
                let t = least_index_at_least(f, w[0]);
                f.eval_wide(t).is_some_and(|v| v < w[1])
            })
        }))
    }
}

/// Least `t` with `f(t) ≥ x`, for increasing `f` (so `t ≤ x`).
fn least_index_at_least(f: &QaFun, x: u128) -> u128 {
    let (mut lo, mut hi) = (0u128, x);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if f.eval_wide(mid).is_some_and(|v| v >= x) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::split_witness_check;

    fn evens() -> EpSet {
        EpSet::residue_class(2, 0)
    }
    fn odds() -> EpSet {
        EpSet::residue_class(2, 1)
    }
    fn mult(k: u64) -> EpSet {
        EpSet::residue_class(k, 0)
    }
    fn lin(a: u64, b: u64) -> QaFun {
        QaFun::linear(a, b)
    }

    #[test]
    fn splitter_examples() {
        assert_eq!(splitter_from_slalom(&lin(1, 0)).unwrap(), evens());
        assert_eq!(
            splitter_from_slalom(&lin(2, 0)).unwrap(),
            EpSet::new(vec![], 0, 4, vec![0, 1]).unwrap()
        );
        let a = splitter_from_slalom(&lin(3, 0)).unwrap();
        assert_eq!(a, EpSet::new(vec![], 0, 6, vec![0, 1, 2]).unwrap());
        assert!(split_witness_check(&[evens(), mult(3)], &a).unwrap());
        assert!(splitter_from_slalom(&lin(0, 3)).is_err());
    }

    #[test]
    fn splitter_matches_interval_union() {
        let h = QaFun::new(vec![1, 2, 6], 2, 7, vec![8, 11]).unwrap();
        let a = splitter_from_slalom(&h).unwrap();
        for x in 0..400 {
            let j = (0..).take_while(|&j| h.eval(j) <= x).last();
            let expect = j.is_some_and(|j| j % 2 == 0);
            assert_eq!(a.contains(x), expect, "x={x}");
        }
    }

    #[test]
    fn first2n_examples() {
        assert_eq!(first2n(&EpSet::naturals(), 2).unwrap(), [0, 1, 2, 3]);
        assert_eq!(first2n(&evens(), 2).unwrap(), [0, 2, 4, 6]);
        assert_eq!(first2n(&odds(), 1).unwrap(), [1, 3]);
        assert!(first2n(&EpSet::finite([1, 2, 3]), 1).is_err());
    }

    #[test]
    fn guesser_examples() {
        let g = rothberger_guesser(&[EpSet::naturals()]).unwrap();
        assert_eq!(g.guess(3), [0, 1, 2, 3, 4, 5]);
        let g = rothberger_guesser(&[evens(), odds()]).unwrap();
        assert_eq!(g.guess(2), [0, 2, 4, 6]);
        assert_eq!(g.guess(3), [1, 3, 5, 7, 9, 11]);
        assert!((1..40).filter(|n| n % 2 == 0).all(|n| g.matches_at(&evens(), n)));
        assert!(!g.matches_at(&evens(), 3));
        assert!(g.guesses(&odds()) && !g.guesses(&mult(3)));
    }

    #[test]
    fn greedy_pair_examples() {
        let (i, j) = ij_from_guesser(&rothberger_guesser(&[EpSet::naturals()]).unwrap());
        assert_eq!(i.truncate(10).unwrap(), [0, 2, 4, 6, 8]);
        assert_eq!(j.truncate(10).unwrap(), [1, 3, 5, 7, 9]);
        let (i, j) = ij_from_guesser(&rothberger_guesser(&[evens()]).unwrap());
        assert_eq!(i.truncate(20).unwrap(), [0, 4, 8, 12, 16]);
        assert_eq!(j.truncate(20).unwrap(), [2, 6, 10, 14, 18]);
    }

    #[test]
    fn greedy_truncations_are_consistent_and_disjoint() {
        let g = rothberger_guesser(&[
            evens(),
            EpSet::new(vec![1], 3, 5, vec![0, 2]).unwrap(),
            mult(3),
        ])
        .unwrap();
        let (i, j) = greedy_truncation(&g, 600, u64::MAX).unwrap();
        let (i2, j2) = greedy_truncation(&g, 200, u64::MAX).unwrap();
        assert_eq!(i.iter().copied().filter(|&x| x < 200).collect::<Vec<_>>(), i2);
        assert_eq!(j.iter().copied().filter(|&x| x < 200).collect::<Vec<_>>(), j2);
        assert!(i.iter().all(|x| j.binary_search(x).is_err()));
    }

    #[test]
    fn gtilde_examples() {
        assert_eq!(gtilde(&lin(3, 0), &lin(2, 0)).unwrap(), lin(6, 6));
        assert_eq!(gtilde(&lin(1, 0), &lin(1, 0)).unwrap(), lin(1, 1));
        assert_eq!(gtilde(&lin(1, 1), &lin(3, 0)).unwrap(), lin(3, 4));
    }

    #[test]
    fn bounding_examples() {
        let r = bounding_reduction(&[lin(1, 0)], &lin(3, 0), &lin(2, 0)).unwrap();
        assert_eq!(r.rows[0].le_bound, EpSet::naturals());
        assert_eq!(r.rows[0].compressed, EpSet::naturals());
        assert_eq!(r.rows[0].le_shifted, EpSet::naturals());
        assert_eq!(r.gtilde, lin(6, 6));
        assert!(r.verifies() && r.reverify());

        assert!(matches!(
            bounding_reduction(&[lin(2, 0)], &lin(1, 0), &lin(2, 0)),
            Err(LabError::WitnessInvalid(_))
        ));

        let r = bounding_reduction(&[lin(1, 0)], &lin(1, 0), &lin(1, 0)).unwrap();
        assert_eq!(r.gtilde, lin(1, 1));
        assert!(r.verifies());
    }

    #[test]
    fn bounding_rejects_non_monotone_bound() {
        let g = QaFun::new(vec![], 2, 2, vec![0, 0]).unwrap();
        let g = QaFun::new(vec![], 2, 4, vec![g.eval(0) + 3, 0]).unwrap();
        assert!(matches!(
            bounding_reduction(&[lin(1, 0)], &g, &lin(2, 1)),
            Err(LabError::NotMonotone(_))
        ));
    }

    #[test]
    fn maxfin_examples() {
        let f = lin(2, 0);
        assert_eq!(maxfin_closure(std::slice::from_ref(&f)).unwrap(), vec![f.clone()]);
        let g = lin(1, 10);
        let c = maxfin_closure(&[f.clone(), g.clone()]).unwrap();
        assert_eq!(c.len(), 3);
        assert!(c.contains(&f) && c.contains(&g));
        let cc = maxfin_closure(&c).unwrap();
        assert_eq!(cc.len(), c.len());
        assert!(cc.iter().all(|x| c.contains(x)));
    }

    #[test]
    fn escape_examples() {
        let ys = [lin(2, 0), lin(1, 10)];
        let e = escape_function(&ys).unwrap();
        assert!((0..200).all(|n| e.eval(n) == (2 * n).max(n + 10) + 1));
        for m in maxfin_closure(&ys).unwrap() {
            assert!(!e.le_star(&m));
            assert!(m.le_set(&e, true).is_cofinite() && m.le_set(&e, true) == EpSet::naturals());
        }
        assert_eq!(escape_function(&[lin(3, 1)]).unwrap(), lin(3, 2));
    }

    #[test]
    fn subbase_examples() {
        let s = filter_subbase_from_bound(&[lin(1, 0)], &lin(2, 0)).unwrap();
        assert_eq!(s.generators(), &[EpSet::at_least(1)]);
        assert!(s.subbase_check());
        let s = filter_subbase_from_bound(&[lin(2, 0), lin(2, 1)], &lin(3, 0)).unwrap();
        assert_eq!(s.generators(), &[EpSet::at_least(1), EpSet::at_least(2)]);
        assert!(s.subbase_check());
        assert!(matches!(
            filter_subbase_from_bound(&[lin(2, 0)], &lin(1, 0)),
            Err(LabError::WitnessInvalid(_))
        ));
    }

    #[test]
    fn recursive_slalom_examples() {
        let h = recursive_slalom_stream(&[lin(1, 0)]).unwrap();
        assert_eq!(h.values(5).unwrap(), [0, 1, 2, 3, 4]);
        let h = recursive_slalom_stream(&[lin(2, 0)]).unwrap();
        assert_eq!(h.values(5).unwrap(), [0, 1, 3, 7, 15]);
        assert!(h.slalom_holds(64).unwrap());
        let mixed = recursive_slalom_stream(&[lin(3, 1), QaFun::new(vec![0, 5], 2, 7, vec![6, 9]).unwrap()]).unwrap();
        assert!(mixed.slalom_holds(64).unwrap());
        assert!(recursive_slalom_stream(&[lin(0, 4)]).is_err());
    }
}
