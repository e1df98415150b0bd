//! Finitely generated semifilters and battery-relative reaping / ultrafilter
//! checks.
//!
//! Membership is always answered for the semifilter `⟨S⟩` generated by the
//! listed sets: `b ∈ ⟨S⟩` iff some generator is almost contained in `b`.
//! Properties that quantify over all infinite sets are only offered relative
//! to an explicit [`TestBattery`] (`*_relative`) or as witness checks.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::epset::EpSet;
use crate::error::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KindClaim {
    SemifilterBase,
    FilterBase,
    FilterSubbase,
}

impl KindClaim {
    pub fn as_str(self) -> &'static str {
        match self {
            KindClaim::SemifilterBase => "semifilter-base",
            KindClaim::FilterBase => "filter-base",
            KindClaim::FilterSubbase => "filter-subbase",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "semifilter-base" => Some(KindClaim::SemifilterBase),
            "filter-base" => Some(KindClaim::FilterBase),
            "filter-subbase" => Some(KindClaim::FilterSubbase),
            _ => None,
        }
    }
}

impl fmt::Display for KindClaim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Nonempty list of infinite generators, canonical and deduplicated in order
/// of first appearance.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawFamily", into = "RawFamily")]
pub struct FamilySpec {
    generators: Vec<EpSet>,
    claim: Option<KindClaim>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawFamily {
    pub generators: Vec<EpSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub claim: Option<KindClaim>,
}

impl TryFrom<RawFamily> for FamilySpec {
    type Error = LabError;

    fn try_from(raw: RawFamily) -> Result<Self> {
        Ok(FamilySpec::new(raw.generators)?.with_claim(raw.claim))
    }
}

impl From<FamilySpec> for RawFamily {
    fn from(s: FamilySpec) -> Self {
        RawFamily {
            generators: s.generators,
            claim: s.claim,
        }
    }
}

impl FamilySpec {
    pub fn new(generators: impl IntoIterator<Item = EpSet>) -> Result<Self> {
        let mut out: Vec<EpSet> = Vec::new();
        for a in generators {
            a.require_infinite()?;
            if !out.contains(&a) {
                out.push(a);
            }
        }
        if out.is_empty() {
            return Err(LabError::InvalidArgument("a family needs at least one generator".into()));
        }
        Ok(Self {
            generators: out,
            claim: None,
        })
    }

    pub fn with_claim(mut self, claim: Option<KindClaim>) -> Self {
        self.claim = claim;
        self
    }

    pub fn generators(&self) -> &[EpSet] {
        &self.generators
    }

    pub fn claim(&self) -> Option<KindClaim> {
        self.claim
    }

    /// Whether the stated kind claim holds (vacuously true without one).
    pub fn claim_holds(&self) -> bool {
        match self.claim {
            None | Some(KindClaim::SemifilterBase) => true,
            Some(KindClaim::FilterBase) => self.is_filter_base(),
            Some(KindClaim::FilterSubbase) => self.subbase_check(),
        }
    }

    /// `b ∈ ⟨S⟩`.
    pub fn gen_membership(&self, b: &EpSet) -> Result<bool> {
        b.require_infinite()?;
        Ok(self.generators.iter().any(|a| a.almost_subset(b)))
    }

    /// Images of the intersection maps `(a₁,…,a_j) ↦ a₁∩…∩a_j` for `j ≤ k`.
    ///
    /// Tuples with repeats collapse onto subsets, so this enumerates the
    /// nonempty subsets of at most `k` generators, smallest first.
    pub fn psi_k(&self, k: usize) -> Result<FamilySpec> {
        if k == 0 {
            return Err(LabError::InvalidArgument("psi_k needs k ≥ 1".into()));
        }
        let n = self.generators.len();
        let mut out = Vec::new();
        for size in 1..=k.min(n) {
            for idx in combinations(n, size) {
                let meet = idx
                    .iter()
                    .skip(1)
                    .fold(self.generators[idx[0]].clone(), |acc, &i| acc.intersect(&self.generators[i]));
                if !meet.is_infinite() {
                    return Err(LabError::FiniteIntersection { indices: idx });
                }
                out.push(meet);
            }
        }
        FamilySpec::new(out)
    }

    /// Every finite intersection of generators is infinite. Intersections
    /// only shrink, so it suffices to check the intersection of all of them.
    pub fn subbase_check(&self) -> bool {
        self.generators
            .iter()
            .skip(1)
            .fold(self.generators[0].clone(), |acc, a| acc.intersect(a))
            .is_infinite()
    }

    /// For all generators `a, b` some generator `c` has `c ⊆* a ∩ b`.
    pub fn is_filter_base(&self) -> bool {
        let g = &self.generators;
        g.iter().enumerate().all(|(i, a)| {
            g[i + 1..].iter().all(|b| {
                let ab = a.intersect(b);
                g.iter().any(|c| c.almost_subset(&ab))
            })
        })
    }

    /// `a ∈ S⁺`: the complement of `a` is finite or outside `⟨S⟩`.
    pub fn dual_membership(&self, a: &EpSet) -> Result<bool> {
        a.require_infinite()?;
        let c = a.complement();
        Ok(!c.is_infinite() || !self.gen_membership(&c)?)
    }

    pub fn ultra_relative(&self, battery: &TestBattery) -> bool {
        self.is_filter_base()
            && battery.tests.iter().all(|c| {
                let cc = c.complement();
                self.generators
                    .iter()
                    .any(|a| a.almost_subset(c) || a.almost_subset(&cc))
            })
    }

    pub fn base_for_roth_relative(&self, battery: &TestBattery) -> bool {
        battery
            .tests
            .iter()
            .all(|c| self.generators.iter().any(|a| a.almost_subset(c)))
    }
}

/// Finite stand-in for "every infinite set".
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawBattery", into = "RawBattery")]
pub struct TestBattery {
    tests: Vec<EpSet>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawBattery {
    pub tests: Vec<EpSet>,
}

impl TryFrom<RawBattery> for TestBattery {
    type Error = LabError;

    fn try_from(raw: RawBattery) -> Result<Self> {
        TestBattery::new(raw.tests)
    }
}

impl From<TestBattery> for RawBattery {
    fn from(b: TestBattery) -> Self {
        RawBattery { tests: b.tests }
    }
}

impl TestBattery {
    pub fn new(tests: impl IntoIterator<Item = EpSet>) -> Result<Self> {
        let tests: Vec<EpSet> = tests.into_iter().collect();
        for t in &tests {
            t.require_infinite()?;
        }
        Ok(Self { tests })
    }

    pub fn tests(&self) -> &[EpSet] {
        &self.tests
    }
}

/// Both `y ∩ c` and `y ∩ c∁` are infinite for every `y`.
pub fn split_witness_check(family: &[EpSet], c: &EpSet) -> Result<bool> {
    c.require_infinite()?;
    let cc = c.complement();
    let mut ok = true;
    for y in family {
        y.require_infinite()?;
        ok &= y.intersect(c).is_infinite() && y.intersect(&cc).is_infinite();
    }
    Ok(ok)
}

/// No test in the battery splits the family.
pub fn reaping_relative(family: &[EpSet], battery: &TestBattery) -> Result<bool> {
    for c in &battery.tests {
        if split_witness_check(family, c)? {
            return Ok(false);
        }
    }
    for y in family {
        y.require_infinite()?;
    }
    Ok(true)
}

/// Index sets of size `k` from `0..n`, in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

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
    fn fam(sets: &[EpSet]) -> FamilySpec {
        FamilySpec::new(sets.to_vec()).unwrap()
    }
    fn battery(sets: &[EpSet]) -> TestBattery {
        TestBattery::new(sets.to_vec()).unwrap()
    }

    #[test]
    fn membership_examples() {
        let s = fam(&[evens(), mult(3)]);
        assert!(s.gen_membership(&EpSet::naturals()).unwrap());
        assert!(!fam(&[evens()]).gen_membership(&odds()).unwrap());
        assert!(!s.gen_membership(&mult(6)).unwrap());
        assert!(s.gen_membership(&EpSet::finite([0])).is_err());
    }

    #[test]
    fn psi_examples() {
        let s = fam(&[evens(), mult(3)]);
        assert_eq!(s.psi_k(2).unwrap().generators(), &[evens(), mult(3), mult(6)]);
        assert_eq!(
            fam(&[evens(), odds()]).psi_k(2),
            Err(LabError::FiniteIntersection { indices: vec![0, 1] })
        );
        assert_eq!(s.psi_k(1).unwrap(), s);
        assert!(s.psi_k(0).is_err());
    }

    #[test]
    fn base_examples() {
        assert!(fam(&[evens(), mult(3)]).subbase_check());
        assert!(!fam(&[evens(), odds()]).subbase_check());
        assert!(fam(&[EpSet::naturals()]).subbase_check());
        assert!(fam(&[evens()]).is_filter_base());
        assert!(!fam(&[evens(), mult(3)]).is_filter_base());
        assert!(fam(&[evens(), mult(6)]).is_filter_base());
    }

    #[test]
    fn dual_examples() {
        let s = fam(&[evens()]);
        assert!(s.dual_membership(&evens()).unwrap());
        assert!(!s.dual_membership(&odds()).unwrap());
        assert!(s.dual_membership(&EpSet::naturals()).unwrap());
    }

    #[test]
    fn split_and_reap_examples() {
        assert!(split_witness_check(&[EpSet::naturals()], &evens()).unwrap());
        assert!(!split_witness_check(&[evens()], &evens()).unwrap());
        let y = EpSet::new(vec![], 0, 4, vec![0, 1]).unwrap();
        assert!(split_witness_check(&[y], &evens()).unwrap());

        assert!(reaping_relative(&[evens()], &battery(&[evens()])).unwrap());
        assert!(!reaping_relative(&[EpSet::naturals()], &battery(&[evens()])).unwrap());
        assert!(reaping_relative(&[mult(5)], &TestBattery::default()).unwrap());
    }

    #[test]
    fn relative_examples() {
        assert!(fam(&[evens()]).ultra_relative(&battery(&[evens(), odds()])));
        assert!(!fam(&[evens()]).ultra_relative(&battery(&[mult(3)])));
        assert!(!fam(&[EpSet::naturals()]).ultra_relative(&battery(&[evens()])));
        assert!(fam(&[evens(), odds()]).base_for_roth_relative(&battery(&[evens(), odds()])));
        assert!(!fam(&[evens()]).base_for_roth_relative(&battery(&[odds()])));
        assert!(fam(&[mult(7)]).base_for_roth_relative(&TestBattery::default()));
    }

    #[test]
    fn claims() {
        assert!(fam(&[evens(), mult(6)]).with_claim(Some(KindClaim::FilterBase)).claim_holds());
        assert!(!fam(&[evens(), odds()]).with_claim(Some(KindClaim::FilterSubbase)).claim_holds());
    }

    #[test]
    fn combinations_enumerates_subsets() {
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(3, 3), vec![vec![0, 1, 2]]);
        assert_eq!(combinations(2, 3).len(), 0);
    }

    fn arb_set() -> impl Strategy<Value = EpSet> {
        (0u64..5, 1u64..6, proptest::collection::vec(0u64..6, 1..4)).prop_map(|(start, period, pat)| {
            let pat: Vec<u64> = pat.into_iter().map(|r| r % period).collect();
            EpSet::new(vec![], start, period, pat).unwrap()
        })
    }

    proptest! {
        #[test]
        fn membership_is_monotone(gens in proptest::collection::vec(arb_set(), 1..4), extra in arb_set(), b in arb_set()) {
            let s = FamilySpec::new(gens.clone()).unwrap();
            let mut more = gens;
            more.push(extra);
            let t = FamilySpec::new(more).unwrap();
            if s.gen_membership(&b).unwrap() {
                prop_assert!(t.gen_membership(&b).unwrap());
            }
        }

        #[test]
        fn subbase_check_matches_full_psi(gens in proptest::collection::vec(arb_set(), 1..4)) {
            let s = FamilySpec::new(gens).unwrap();
            prop_assert_eq!(s.subbase_check(), s.psi_k(s.generators().len()).is_ok());
        }

        #[test]
        fn filter_bases_never_hold_both_sides(gens in proptest::collection::vec(arb_set(), 1..4), a in arb_set()) {
            let s = FamilySpec::new(gens).unwrap();
            let c = a.complement();
            if s.is_filter_base() && c.is_infinite() {
                prop_assert!(!(s.gen_membership(&a).unwrap() && s.gen_membership(&c).unwrap()));
            }
        }

        #[test]
        fn split_refutes_reaping(y in proptest::collection::vec(arb_set(), 1..4), c in arb_set(), rest in proptest::collection::vec(arb_set(), 0..3)) {
            let mut tests = rest;
            tests.push(c.clone());
            if split_witness_check(&y, &c).unwrap() {
                prop_assert!(!reaping_relative(&y, &TestBattery::new(tests).unwrap()).unwrap());
            }
        }

        #[test]
        fn ultra_implies_reaping(gens in proptest::collection::vec(arb_set(), 1..4), tests in proptest::collection::vec(arb_set(), 0..4)) {
            let s = FamilySpec::new(gens).unwrap();
            let t = TestBattery::new(tests).unwrap();
            if s.ultra_relative(&t) {
                prop_assert!(reaping_relative(s.generators(), &t).unwrap());
            }
        }
    }
}
