//! Eventually periodic-increment functions ℕ → ℕ.
//!
//! A [`QaFun`] is a finite table of initial values followed by a periodic
//! base that climbs by a constant increment each period:
//!
//! ```text
//! f(n) = table[n]                              for n < s = table.len()
//! f(n) = base[(n − s) mod m] + q·⌊(n − s)/m⌋   for n ≥ s
//! ```
//!
//! This class is closed under composition, pointwise maximum and shifts, and
//! comparison sets `{n : f(n) ≤ g(n)}` are eventually periodic, which makes
//! `≤*` and "equal infinitely often" decidable.

use std::cmp::Ordering;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::epset::{write_u64_list, EpSet};
use crate::error::{LabError, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawQaFun", into = "RawQaFun")]
pub struct QaFun {
    table: Vec<u64>,
    period: u64,
    incr: u64,
    base: Vec<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawQaFun {
    #[serde(default)]
    pub table: Vec<u64>,
    pub period: u64,
    pub incr: u64,
    pub base: Vec<u64>,
}

impl TryFrom<RawQaFun> for QaFun {
    type Error = LabError;

    fn try_from(raw: RawQaFun) -> Result<Self> {
        QaFun::new(raw.table, raw.period, raw.incr, raw.base)
    }
}

impl From<QaFun> for RawQaFun {
    fn from(f: QaFun) -> Self {
        RawQaFun {
            table: f.table,
            period: f.period,
            incr: f.incr,
            base: f.base,
        }
    }
}

impl QaFun {
    pub fn new(table: Vec<u64>, period: u64, incr: u64, base: Vec<u64>) -> Result<Self> {
        if period == 0 {
            return Err(LabError::InvalidArgument("period must be at least 1".into()));
        }
        if base.len() as u64 != period {
            return Err(LabError::InvalidArgument(format!(
                "base has {} values but period is {period}",
                base.len()
            )));
        }
        Ok(Self {
            table,
            period,
            incr,
            base,
        }
        .canonicalize())
    }

    /// `n ↦ slope·n + offset`.
    pub fn linear(slope: u64, offset: u64) -> Self {
        Self {
            table: Vec::new(),
            period: 1,
            incr: slope,
            base: vec![offset],
        }
    }

    pub fn identity() -> Self {
        Self::linear(1, 0)
    }

    pub fn constant(c: u64) -> Self {
        Self::linear(0, c)
    }

    /// Samples `value` on `[0, start + period)`; the caller guarantees that
    /// `value(n + period) = value(n) + incr` for all `n ≥ start`.
    pub(crate) fn tabulate(start: u64, period: u64, incr: u64, value: impl Fn(u64) -> u64) -> Self {
        Self {
            table: (0..start).map(&value).collect(),
            period,
            incr,
            base: (start..start + period).map(&value).collect(),
        }
        .canonicalize()
    }

    fn canonicalize(mut self) -> Self {
        let s = self.start();
        let m = self.period;
        let value = |f: &Self, n: u64| f.eval(n) as i128;
        if let Some(d) = (1..m).filter(|d| m.is_multiple_of(*d)).find(|&d| {
            let c = value(&self, s + d) - value(&self, s);
            (0..m).all(|j| value(&self, s + j + d) - value(&self, s + j) == c)
        }) {
            let c = value(&self, s + d) - value(&self, s);
            debug_assert!(c >= 0);
            self.base.truncate(d as usize);
            self.period = d;
            self.incr = c as u64;
        }
        let m = self.period as usize;
        while let Some(&last) = self.table.last() {
            if last + self.incr != self.base[m - 1] {
                break;
            }
            self.table.pop();
            self.base.rotate_right(1);
            self.base[0] = last;
        }
        self
    }

    pub fn table(&self) -> &[u64] {
        &self.table
    }

    /// Index where the periodic part begins (the table length).
    pub fn start(&self) -> u64 {
        self.table.len() as u64
    }

    pub fn period(&self) -> u64 {
        self.period
    }

    pub fn incr(&self) -> u64 {
        self.incr
    }

    pub fn base(&self) -> &[u64] {
        &self.base
    }

    pub fn eval(&self, n: u64) -> u64 {
        let s = self.start();
        if n < s {
            self.table[n as usize]
        } else {
            let k = n - s;
            self.base[(k % self.period) as usize] + self.incr * (k / self.period)
        }
    }

    /// Overflow-checked evaluation at arguments beyond `u64`.
    pub fn eval_wide(&self, n: u128) -> Option<u128> {
        let s = self.start() as u128;
        if n < s {
            return Some(self.table[n as usize] as u128);
        }
        let k = n - s;
        let m = self.period as u128;
        (self.incr as u128)
            .checked_mul(k / m)?
            .checked_add(self.base[(k % m) as usize] as u128)
    }

    /// Average growth `incr / period` as a reduced fraction.
    pub fn slope(&self) -> (u64, u64) {
        let g = self.incr.gcd(&self.period);
        (self.incr / g, self.period / g)
    }

    /// Strictly increasing. Checked on `[0, s + m]`, which spans one full
    /// period of the difference sequence.
    pub fn is_increasing(&self) -> bool {
        (0..self.start() + self.period).all(|n| self.eval(n) < self.eval(n + 1))
    }

    pub fn is_nondecreasing(&self) -> bool {
        (0..self.start() + self.period).all(|n| self.eval(n) <= self.eval(n + 1))
    }

    pub(crate) fn require_increasing(&self) -> Result<()> {
        if self.is_increasing() {
            Ok(())
        } else {
            Err(LabError::NotIncreasing(self.to_string()))
        }
    }

    /// Least `N` such that `f(n) ≥ bound` for every `n ≥ N` in the periodic
    /// part, or the table length when the increment is zero (the function is
    /// then eventually periodic, which is all callers need).
    pub(crate) fn eventually_at_least(&self, bound: u64) -> u64 {
        let s = self.start();
        if self.incr == 0 {
            return s;
        }
        let low = *self.base.iter().min().expect("nonempty base");
        let t = if bound > low { (bound - low).div_ceil(self.incr) } else { 0 };
        s + self.period * t
    }

    /// `n ↦ f(n + 1)`.
    pub fn shift(&self) -> Self {
        Self::tabulate(self.start().saturating_sub(1), self.period, self.incr, |n| self.eval(n + 1))
    }

    /// `n ↦ f(n) + c`.
    pub fn plus(&self, c: u64) -> Self {
        Self {
            table: self.table.iter().map(|x| x + c).collect(),
            period: self.period,
            incr: self.incr,
            base: self.base.iter().map(|x| x + c).collect(),
        }
    }

    /// Pointwise sum.
    pub fn add(&self, other: &Self) -> Self {
        let start = self.start().max(other.start());
        let period = self.period.lcm(&other.period);
        let incr = self.incr * (period / self.period) + other.incr * (period / other.period);
        Self::tabulate(start, period, incr, |n| self.eval(n) + other.eval(n))
    }

    /// `n ↦ self(inner(n))`.
    pub fn compose(&self, inner: &Self) -> Self {
        let (start, k) = if inner.incr == 0 {
            (inner.start(), 1)
        } else {
            (
                inner.eventually_at_least(self.start()),
                self.period / inner.incr.gcd(&self.period),
            )
        };
        let period = inner.period * k;
        // inner climbs by inner.incr·k over `period`, a multiple of self.period
        let incr = self.incr * (inner.incr * k / self.period);
        Self::tabulate(start, period, incr, |n| self.eval(inner.eval(n)))
    }

    /// Pointwise maximum of a nonempty family.
    pub fn pointwise_max<'a>(family: impl IntoIterator<Item = &'a QaFun>) -> Result<Self> {
        let mut it = family.into_iter();
        let first = it
            .next()
            .ok_or_else(|| LabError::InvalidArgument("pointwise maximum of an empty family".into()))?
            .clone();
        Ok(it.fold(first, |acc, f| acc.max2(f)))
    }

    fn max2(&self, other: &Self) -> Self {
        let c = Crossing::of(self, other);
        let incr = c.incr_f.max(c.incr_g);
        Self::tabulate(c.start, c.period, incr, |n| self.eval(n).max(other.eval(n)))
    }

    /// `{n : f(n) ≤ g(n)}`, or `{n : f(n) < g(n)}` when `strict`.
    pub fn le_set(&self, g: &Self, strict: bool) -> EpSet {
        let c = Crossing::of(self, g);
        EpSet::from_fn(c.start, c.period, |n| {
            let (x, y) = (self.eval(n), g.eval(n));
            if strict {
                x < y
            } else {
                x <= y
            }
        })
    }

    /// `{n : f(n) = g(n)}`.
    pub fn eq_set(&self, g: &Self) -> EpSet {
        let c = Crossing::of(self, g);
        EpSet::from_fn(c.start, c.period, |n| self.eval(n) == g.eval(n))
    }

    /// `f ≤* g`: `f(n) ≤ g(n)` for all but finitely many `n`.
    pub fn le_star(&self, g: &Self) -> bool {
        match Crossing::of(self, g).direction() {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => self.le_set(g, false).is_cofinite(),
        }
    }

    /// Exact image of an increasing function.
    pub fn image_set(&self) -> Result<EpSet> {
        self.require_increasing()?;
        let b0 = self.base[0];
        let pattern = self.base.iter().map(|&b| b - b0).collect();
        EpSet::new(self.table.clone(), b0, self.incr, pattern)
    }
}

/// Alignment of two functions on a common period, past the point where the
/// sign of `g − f` settles.
struct Crossing {
    start: u64,
    period: u64,
    incr_f: u64,
    incr_g: u64,
}

impl Crossing {
    /// Past `start` the difference `g − f` is periodic with `period` when the
    /// increments match, and otherwise has a constant sign with magnitude at
    /// least one, so `≤`, `<` and `=` are all periodic from `start` on.
    fn of(f: &QaFun, g: &QaFun) -> Self {
        let n0 = f.start().max(g.start());
        let period = f.period.lcm(&g.period);
        let incr_f = f.incr * (period / f.period);
        let incr_g = g.incr * (period / g.period);
        let start = if incr_f == incr_g {
            n0
        } else {
            let delta = (incr_f as i128 - incr_g as i128).abs();
            let rounds = (0..period)
                .map(|j| {
                    let n = n0 + j;
                    let gap = g.eval(n) as i128 - f.eval(n) as i128;
                    // distance still to travel before |gap| ≥ 1 on the winning side
                    let need = if incr_g > incr_f { 1 - gap } else { 1 + gap };
                    if need <= 0 {
                        0
                    } else {
                        ((need + delta - 1) / delta) as u64
                    }
                })
                .max()
                .unwrap_or(0);
            n0 + rounds * period
        };
        Self {
            start,
            period,
            incr_f,
            incr_g,
        }
    }

    fn direction(&self) -> Ordering {
        self.incr_f.cmp(&self.incr_g)
    }
}

impl fmt::Display for QaFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("qa(table=")?;
        write_u64_list(f, &self.table)?;
        write!(f, ",period={},incr={},base=", self.period, self.incr)?;
        write_u64_list(f, &self.base)?;
        f.write_str(")")
    }
}

impl fmt::Debug for QaFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Interleaving of finitely many functions by residue class:
/// `g(n) = strands[n mod k](n)`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawStrandFun", into = "RawStrandFun")]
pub struct StrandFun {
    strands: Vec<QaFun>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawStrandFun {
    pub strands: Vec<QaFun>,
}

impl TryFrom<RawStrandFun> for StrandFun {
    type Error = LabError;

    fn try_from(raw: RawStrandFun) -> Result<Self> {
        StrandFun::new(raw.strands)
    }
}

impl From<StrandFun> for RawStrandFun {
    fn from(g: StrandFun) -> Self {
        RawStrandFun { strands: g.strands }
    }
}

impl StrandFun {
    pub fn new(strands: Vec<QaFun>) -> Result<Self> {
        if strands.is_empty() {
            return Err(LabError::InvalidArgument("a strand function needs at least one strand".into()));
        }
        Ok(Self { strands })
    }

    pub fn strands(&self) -> &[QaFun] {
        &self.strands
    }

    pub fn eval(&self, n: u64) -> u64 {
        let k = self.strands.len() as u64;
        self.strands[(n % k) as usize].eval(n)
    }

    /// Whether `g(n) = f(n)` for infinitely many `n`, decided strand by
    /// strand on each residue class.
    pub fn eq_infinitely_often(&self, f: &QaFun) -> bool {
        let k = self.strands.len() as u64;
        self.strands
            .iter()
            .enumerate()
            .any(|(i, s)| s.eq_set(f).intersect(&EpSet::residue_class(k, i as u64)).is_infinite())
    }
}

impl fmt::Display for StrandFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("strands[")?;
        for (i, s) in self.strands.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            write!(f, "{s}")?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for StrandFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lin(a: u64, b: u64) -> QaFun {
        QaFun::linear(a, b)
    }

    fn values(f: &QaFun, n: u64) -> Vec<u64> {
        (0..n).map(|i| f.eval(i)).collect()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(lin(3, 1).eval(4), 13);
        let f = QaFun::new(vec![5], 1, 2, vec![7]).unwrap();
        assert_eq!(f.eval(3), 11);
        assert_eq!(f.eval(0), 5);
        assert_eq!(lin(2, 9).eval(0), 9);
    }

    #[test]
    fn canonical_form_minimises_period_and_start() {
        let f = QaFun::new(vec![0, 2], 2, 4, vec![4, 6]).unwrap();
        assert_eq!(f, lin(2, 0));
        let g = QaFun::new(vec![], 2, 4, vec![0, 3]).unwrap();
        assert_eq!(g.period(), 2);
    }

    #[test]
    fn compose_examples() {
        assert_eq!(lin(3, 1).compose(&lin(2, 0)), lin(6, 1));
        let f = QaFun::new(vec![], 2, 4, vec![0, 3]).unwrap();
        let h = lin(2, 0).compose(&f);
        assert_eq!(h, QaFun::new(vec![], 2, 8, vec![0, 6]).unwrap());
        assert_eq!(QaFun::identity().compose(&f), f);
    }

    #[test]
    fn pointwise_max_examples() {
        let m = QaFun::pointwise_max([&lin(2, 0), &lin(1, 10)]).unwrap();
        assert_eq!(values(&m, 11), (10..=20).collect::<Vec<_>>());
        assert!((10..100).all(|n| m.eval(n) == 2 * n));
        assert_eq!(m.start(), 10);
        let f = QaFun::new(vec![4, 1], 2, 3, vec![0, 5]).unwrap();
        assert_eq!(QaFun::pointwise_max([&f]).unwrap(), f);
        assert_eq!(QaFun::pointwise_max([&lin(2, 0), &lin(2, 1)]).unwrap(), lin(2, 1));
    }

    #[test]
    fn le_examples() {
        assert!(lin(2, 0).le_star(&lin(3, 0)));
        assert!(!lin(3, 0).le_star(&lin(2, 0)));
        assert!(!lin(1, 10).le_star(&lin(1, 5)));
        assert_eq!(lin(2, 0).le_set(&lin(1, 5), false), EpSet::finite(0..=5));
        assert_eq!(lin(1, 0).le_set(&lin(2, 0), false), EpSet::naturals());
        assert_eq!(lin(1, 0).le_set(&lin(2, 0), true), EpSet::at_least(1));
    }

    #[test]
    fn strand_examples() {
        let g = StrandFun::new(vec![lin(1, 0), lin(2, 0)]).unwrap();
        assert!(g.eq_infinitely_often(&lin(1, 0)));
        assert!(!g.eq_infinitely_often(&lin(3, 0)));
        let f = QaFun::new(vec![3], 2, 5, vec![1, 4]).unwrap();
        assert!(StrandFun::new(vec![f.clone()]).unwrap().eq_infinitely_often(&f));
        assert_eq!(g.eval(5), 10);
        assert!(StrandFun::new(vec![]).is_err());
    }

    #[test]
    fn image_examples() {
        assert_eq!(lin(2, 0).image_set().unwrap(), EpSet::residue_class(2, 0));
        assert_eq!(lin(3, 1).image_set().unwrap(), EpSet::residue_class(3, 1));
        assert!(matches!(lin(0, 1).image_set(), Err(LabError::NotIncreasing(_))));
    }

    #[test]
    fn shift_and_plus() {
        let f = QaFun::new(vec![0, 5], 2, 3, vec![6, 7]).unwrap();
        let s = f.shift();
        assert!((0..50).all(|n| s.eval(n) == f.eval(n + 1)));
        assert!((0..50).all(|n| f.plus(4).eval(n) == f.eval(n) + 4));
    }

    fn arb_qafun() -> impl Strategy<Value = QaFun> {
        (
            proptest::collection::vec(0u64..30, 0..4),
            1u64..4,
            0u64..8,
        )
            .prop_flat_map(|(table, period, incr)| {
                (
                    Just(table),
                    Just(period),
                    Just(incr),
                    proptest::collection::vec(0u64..30, period as usize),
                )
            })
            .prop_map(|(t, p, q, b)| QaFun::new(t, p, q, b).unwrap())
    }

    proptest! {
        #[test]
        fn le_star_is_transitive(f in arb_qafun(), g in arb_qafun(), h in arb_qafun()) {
            if f.le_star(&g) && g.le_star(&h) {
                prop_assert!(f.le_star(&h));
            }
        }

        #[test]
        fn increasing_functions_dominate_identity(f in arb_qafun()) {
            if f.is_increasing() {
                prop_assert!((0..200).all(|n| f.eval(n) >= n));
            }
        }

        #[test]
        fn comparisons_match_pointwise(f in arb_qafun(), g in arb_qafun()) {
            let le = f.le_set(&g, false);
            let lt = f.le_set(&g, true);
            let m = QaFun::pointwise_max([&f, &g]).unwrap();
            for n in 0..400 {
                prop_assert_eq!(le.contains(n), f.eval(n) <= g.eval(n));
                prop_assert_eq!(lt.contains(n), f.eval(n) < g.eval(n));
                prop_assert_eq!(m.eval(n), f.eval(n).max(g.eval(n)));
            }
        }
    }
}
