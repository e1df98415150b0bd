//! Eventually periodic subsets of ℕ.
//!
//! An [`EpSet`] is a finite prefix below `start` followed by a tail that
//! repeats a residue pattern with period `period`:
//!
//! ```text
//! n ∈ a  ⇔  (n < start ∧ n ∈ prefix) ∨ (n ≥ start ∧ (n − start) mod period ∈ pattern)
//! ```
//!
//! Values are always kept in canonical form (minimal period, then minimal
//! start), so structural equality is set equality. Finite sets are ordinary
//! values with an empty pattern and period 1.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::qafun::QaFun;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawEpSet", into = "RawEpSet")]
pub struct EpSet {
    prefix: Vec<u64>,
    start: u64,
    period: u64,
    pattern: Vec<u64>,
}

/// Unvalidated field form used for JSON and by the text parser.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawEpSet {
    #[serde(default)]
    pub prefix: Vec<u64>,
    #[serde(default)]
    pub start: u64,
    pub period: u64,
    pub pattern: Vec<u64>,
}

impl TryFrom<RawEpSet> for EpSet {
    type Error = LabError;

    fn try_from(raw: RawEpSet) -> Result<Self> {
        EpSet::new(raw.prefix, raw.start, raw.period, raw.pattern)
    }
}

impl From<EpSet> for RawEpSet {
    fn from(a: EpSet) -> Self {
        RawEpSet {
            prefix: a.prefix,
            start: a.start,
            period: a.period,
            pattern: a.pattern,
        }
    }
}

impl EpSet {
    /// Validates the fields and returns the canonical form.
    ///
    /// Prefix elements must lie below `start`, the period must be positive
    /// and pattern residues must lie below the period. Duplicates and order
    /// are irrelevant.
    pub fn new(mut prefix: Vec<u64>, start: u64, period: u64, mut pattern: Vec<u64>) -> Result<Self> {
        if period == 0 {
            return Err(LabError::InvalidArgument("period must be at least 1".into()));
        }
        if let Some(&x) = prefix.iter().find(|&&x| x >= start) {
            return Err(LabError::InvalidArgument(format!(
                "prefix element {x} is not below start {start}"
            )));
        }
        if let Some(&r) = pattern.iter().find(|&&r| r >= period) {
            return Err(LabError::InvalidArgument(format!(
                "pattern residue {r} is not below period {period}"
            )));
        }
        prefix.sort_unstable();
        prefix.dedup();
        pattern.sort_unstable();
        pattern.dedup();
        Ok(Self::canonical(prefix, start, period, pattern))
    }

    pub fn empty() -> Self {
        Self::finite([])
    }

    pub fn naturals() -> Self {
        Self::residue_class(1, 0)
    }

    /// `{n : n ≡ residue (mod modulus)}`.
    pub fn residue_class(modulus: u64, residue: u64) -> Self {
        assert!(modulus >= 1, "modulus must be positive");
        Self::canonical(Vec::new(), 0, modulus, vec![residue % modulus])
    }

    /// Every `n ≥ from`.
    pub fn at_least(from: u64) -> Self {
        Self::canonical(Vec::new(), from, 1, vec![0])
    }

    pub fn finite(elems: impl IntoIterator<Item = u64>) -> Self {
        let mut prefix: Vec<u64> = elems.into_iter().collect();
        prefix.sort_unstable();
        prefix.dedup();
        let start = prefix.last().map_or(0, |&x| x + 1);
        Self {
            prefix,
            start,
            period: 1,
            pattern: Vec::new(),
        }
    }

    /// Builds a set from a membership predicate that the caller guarantees
    /// is periodic with the given period from `start` on.
    pub(crate) fn from_fn(start: u64, period: u64, mut member: impl FnMut(u64) -> bool) -> Self {
        let prefix: Vec<u64> = (0..start).filter(|&n| member(n)).collect();
        let pattern: Vec<u64> = (0..period).filter(|&r| member(start + r)).collect();
        Self::canonical(prefix, start, period, pattern)
    }

    /// Expects sorted, deduplicated, in-range fields.
    fn canonical(mut prefix: Vec<u64>, mut start: u64, period: u64, pattern: Vec<u64>) -> Self {
        if pattern.is_empty() {
            return Self::finite(prefix);
        }
        let mut bits = vec![false; period as usize];
        for &r in &pattern {
            bits[r as usize] = true;
        }
        let p = minimal_cyclic_period(&bits);
        bits.truncate(p);
        while start > 0 {
            let x = start - 1;
            let in_prefix = prefix.last() == Some(&x);
            if in_prefix != bits[p - 1] {
                break;
            }
            if in_prefix {
                prefix.pop();
            }
            start = x;
            bits.rotate_right(1);
        }
        let pattern = bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(r, _)| r as u64)
            .collect();
        Self {
            prefix,
            start,
            period: p as u64,
            pattern,
        }
    }

    pub fn prefix(&self) -> &[u64] {
        &self.prefix
    }

    pub fn start(&self) -> u64 {
        self.start
    }

    pub fn period(&self) -> u64 {
        self.period
    }

    pub fn pattern(&self) -> &[u64] {
        &self.pattern
    }

    pub fn contains(&self, n: u64) -> bool {
        if n < self.start {
            self.prefix.binary_search(&n).is_ok()
        } else {
            self.pattern.binary_search(&((n - self.start) % self.period)).is_ok()
        }
    }

    pub fn is_infinite(&self) -> bool {
        !self.pattern.is_empty()
    }

    pub fn is_cofinite(&self) -> bool {
        self.pattern.len() as u64 == self.period
    }

    pub fn is_empty(&self) -> bool {
        self.prefix.is_empty() && self.pattern.is_empty()
    }

    pub(crate) fn require_infinite(&self) -> Result<()> {
        if self.is_infinite() {
            Ok(())
        } else {
            Err(LabError::FiniteSet(self.to_string()))
        }
    }

    /// Least element `≥ x`, if any.
    pub fn next_at_or_after(&self, x: u64) -> Option<u64> {
        if x < self.start {
            let i = self.prefix.partition_point(|&e| e < x);
            if let Some(&e) = self.prefix.get(i) {
                return Some(e);
            }
            return self.pattern.first().map(|&r| self.start + r);
        }
        let first = *self.pattern.first()?;
        let offset = x - self.start;
        let block = offset - offset % self.period;
        let r = offset % self.period;
        let i = self.pattern.partition_point(|&p| p < r);
        Some(match self.pattern.get(i) {
            Some(&p) => self.start + block + p,
            None => self.start + block + self.period + first,
        })
    }

    /// The `k`-th element in increasing order (0-indexed).
    pub fn element(&self, k: u64) -> Option<u64> {
        let np = self.prefix.len() as u64;
        if k < np {
            return Some(self.prefix[k as usize]);
        }
        if self.pattern.is_empty() {
            return None;
        }
        let k = k - np;
        let w = self.pattern.len() as u64;
        Some(self.start + (k / w) * self.period + self.pattern[(k % w) as usize])
    }

    /// Elements in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        (0..).map_while(move |k| self.element(k))
    }

    /// Elements below `bound`, in increasing order.
    pub fn elements_below(&self, bound: u64) -> Vec<u64> {
        self.iter().take_while(|&x| x < bound).collect()
    }

    /// Whether `[lo, hi)` contains an element.
    pub fn meets_window(&self, lo: u64, hi: u64) -> bool {
        self.next_at_or_after(lo).is_some_and(|x| x < hi)
    }

    fn combine(&self, other: &Self, op: impl Fn(bool, bool) -> bool) -> Self {
        let start = self.start.max(other.start);
        let period = self.period.lcm(&other.period);
        Self::from_fn(start, period, |n| op(self.contains(n), other.contains(n)))
    }

    pub fn intersect(&self, other: &Self) -> Self {
        self.combine(other, |x, y| x && y)
    }

    pub fn union(&self, other: &Self) -> Self {
        self.combine(other, |x, y| x || y)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.combine(other, |x, y| x && !y)
    }

    pub fn complement(&self) -> Self {
        Self::from_fn(self.start, self.period, |n| !self.contains(n))
    }

    /// `self ⊆* other`: the difference is finite.
    pub fn almost_subset(&self, other: &Self) -> bool {
        !self.difference(other).is_infinite()
    }

    /// Largest cyclic gap between consecutive tail residues, i.e. the least
    /// window length that meets the set at every position of the tail.
    pub fn tail_gap_bound(&self) -> Result<u64> {
        self.require_infinite()?;
        let wrap = self.pattern[0] + self.period - self.pattern[self.pattern.len() - 1];
        let inner = self.pattern.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(0);
        Ok(wrap.max(inner))
    }

    /// The increasing enumeration `e` with image exactly `self`.
    pub fn enumeration(&self) -> Result<QaFun> {
        self.require_infinite()?;
        let base = self.pattern.iter().map(|&r| self.start + r).collect();
        QaFun::new(self.prefix.clone(), self.pattern.len() as u64, self.period, base)
    }
}

/// Smallest divisor `d` of `bits.len()` with `bits[i] == bits[i mod d]`.
fn minimal_cyclic_period(bits: &[bool]) -> usize {
    let p = bits.len();
    (1..=p)
        .filter(|d| p.is_multiple_of(*d))
        .find(|&d| (d..p).all(|i| bits[i] == bits[i % d]))
        .unwrap_or(p)
}

pub(crate) fn write_list(f: &mut fmt::Formatter<'_>, xs: &[u64]) -> fmt::Result {
    f.write_str("[")?;
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{x}")?;
    }
    f.write_str("]")
}

impl fmt::Display for EpSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ep(prefix=")?;
        write_list(f, &self.prefix)?;
        write!(f, ",start={},period={},pattern=", self.start, self.period)?;
        write_list(f, &self.pattern)?;
        f.write_str(")")
    }
}

impl fmt::Debug for EpSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub(crate) use write_list as write_u64_list;

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn evens() -> EpSet {
        EpSet::residue_class(2, 0)
    }
    fn odds() -> EpSet {
        EpSet::residue_class(2, 1)
    }
    fn mult(k: u64) -> EpSet {
        EpSet::residue_class(k, 0)
    }
    fn ep(prefix: &[u64], start: u64, period: u64, pattern: &[u64]) -> EpSet {
        EpSet::new(prefix.to_vec(), start, period, pattern.to_vec()).unwrap()
    }

    fn sieve(prefix: &[u64], start: u64, period: u64, pattern: &[u64], n: u64) -> bool {
        if n < start {
            prefix.contains(&n)
        } else {
            pattern.contains(&((n - start) % period))
        }
    }

    #[test]
    fn member_examples() {
        assert!(evens().contains(4));
        assert!(!evens().contains(3));
        assert!(ep(&[1], 2, 3, &[0]).contains(5));
    }

    #[test]
    fn canonicalize_examples() {
        assert_eq!(ep(&[], 0, 4, &[0, 2]), evens());
        assert_eq!(evens().period(), 2);
        assert_eq!(evens().pattern(), &[0]);
        assert_eq!(ep(&[0], 1, 2, &[1]), evens());
        assert_eq!(evens().start(), 0);
    }

    #[test]
    fn boolean_examples() {
        assert_eq!(evens().intersect(&mult(3)), mult(6));
        let e = evens().intersect(&odds());
        assert!(e.is_empty() && !e.is_infinite());
        let a = ep(&[2], 3, 5, &[1, 4]);
        assert_eq!(a.intersect(&EpSet::naturals()), a);
        assert_eq!(evens().union(&odds()), EpSet::naturals());
        assert_eq!(evens().union(&mult(4)), evens());
        assert_eq!(a.union(&EpSet::empty()), a);
        assert_eq!(evens().complement(), odds());
        assert_eq!(EpSet::at_least(5).complement(), EpSet::finite(0..5));
        assert_eq!(EpSet::naturals().complement(), EpSet::empty());
    }

    #[test]
    fn almost_subset_and_cofinite_examples() {
        assert!(evens().almost_subset(&EpSet::naturals()));
        let a = EpSet::finite([0, 1]).union(&mult(4));
        assert!(a.almost_subset(&mult(4)));
        assert!(!evens().almost_subset(&odds()));
        assert!(EpSet::at_least(3).is_cofinite());
        assert!(!evens().is_cofinite());
        assert!(ep(&[], 0, 1, &[0]).is_cofinite());
    }

    #[test]
    fn gap_bound_examples() {
        assert_eq!(evens().tail_gap_bound().unwrap(), 2);
        assert_eq!(ep(&[], 0, 6, &[0, 1]).tail_gap_bound().unwrap(), 5);
        assert_eq!(EpSet::naturals().tail_gap_bound().unwrap(), 1);
        assert!(matches!(EpSet::finite([3]).tail_gap_bound(), Err(LabError::FiniteSet(_))));
    }

    #[test]
    fn enumeration_examples() {
        let e = evens().enumeration().unwrap();
        assert_eq!((0..5).map(|n| e.eval(n)).collect::<Vec<_>>(), [0, 2, 4, 6, 8]);
        let o = odds().enumeration().unwrap();
        assert_eq!((0..4).map(|n| o.eval(n)).collect::<Vec<_>>(), [1, 3, 5, 7]);
        let f = ep(&[], 0, 6, &[0, 1]).enumeration().unwrap();
        assert_eq!(f, QaFun::new(vec![], 2, 6, vec![0, 1]).unwrap());
        assert_eq!((0..4).map(|n| f.eval(n)).collect::<Vec<_>>(), [0, 1, 6, 7]);
        assert!(EpSet::finite([1, 2]).enumeration().is_err());
    }

    #[test]
    fn rejects_malformed_fields() {
        assert!(EpSet::new(vec![], 0, 0, vec![]).is_err());
        assert!(EpSet::new(vec![5], 3, 1, vec![0]).is_err());
        assert!(EpSet::new(vec![], 0, 3, vec![3]).is_err());
    }

    #[test]
    fn next_and_element_agree() {
        let a = ep(&[1, 4], 6, 5, &[0, 3]);
        let listed: Vec<u64> = a.iter().take(8).collect();
        assert_eq!(listed, [1, 4, 6, 9, 11, 14, 16, 19]);
        assert_eq!(a.next_at_or_after(0), Some(1));
        assert_eq!(a.next_at_or_after(5), Some(6));
        assert_eq!(a.next_at_or_after(12), Some(14));
        assert_eq!(EpSet::finite([2]).next_at_or_after(3), None);
    }

    fn raw_parts() -> impl Strategy<Value = (Vec<u64>, u64, u64, Vec<u64>)> {
        (0u64..8, 1u64..7).prop_flat_map(|(start, period)| {
            (
                proptest::collection::vec(0..start.max(1), 0..4),
                Just(start),
                Just(period),
                proptest::collection::vec(0..period, 0..4),
            )
        })
        .prop_map(|(prefix, start, period, pattern)| {
            let prefix = if start == 0 { vec![] } else { prefix };
            (prefix, start, period, pattern)
        })
    }

    proptest! {
        #[test]
        fn canonical_form_preserves_membership((prefix, start, period, pattern) in raw_parts()) {
            let a = EpSet::new(prefix.clone(), start, period, pattern.clone()).unwrap();
            for n in 0..4 * (start + period) + 16 {
                prop_assert_eq!(a.contains(n), sieve(&prefix, start, period, &pattern, n));
            }
            let again = EpSet::new(a.prefix.clone(), a.start, a.period, a.pattern.clone()).unwrap();
            prop_assert_eq!(again, a);
        }

        #[test]
        fn de_morgan((p1, s1, q1, r1) in raw_parts(), (p2, s2, q2, r2) in raw_parts()) {
            let a = EpSet::new(p1, s1, q1, r1).unwrap();
            let b = EpSet::new(p2, s2, q2, r2).unwrap();
            prop_assert_eq!(a.union(&b).complement(), a.complement().intersect(&b.complement()));
            prop_assert_eq!(a.complement().complement(), a);
        }
    }
}
