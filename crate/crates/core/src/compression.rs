//! Compression of sets by an interval partition of ℕ.
//!
//! For an increasing `h`, the compressed set `a/h` collects the indices of
//! the intervals `[h(n), h(n+1))` that meet `a`. An increasing `h` is a
//! slalom for a family when every member meets all but finitely many of
//! those intervals, i.e. when every compressed member is cofinite.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::epset::EpSet;
use crate::error::{LabError, Result};
use crate::families::FamilySpec;
use crate::qafun::QaFun;

/// `a/h` for any (possibly finite) `a`. `h` must be increasing.
pub(crate) fn compress_unchecked(a: &EpSet, h: &QaFun) -> EpSet {
    // h(n) ≥ n, so every window from `start` on lies in a's periodic part,
    // and `period` steps move the windows by a multiple of a's period.
    let start = h.start().max(a.start());
    let period = h.period() * (a.period() / h.incr().gcd(&a.period()));
    EpSet::from_fn(start, period, |n| a.meets_window(h.eval(n), h.eval(n + 1)))
}

/// `a/h = {n : a ∩ [h(n), h(n+1)) ≠ ∅}`.
pub fn compress_set(a: &EpSet, h: &QaFun) -> Result<EpSet> {
    a.require_infinite()?;
    h.require_increasing()?;
    Ok(compress_unchecked(a, h))
}

/// `S/h`, deduplicated, in order of first appearance.
pub fn compress_family(family: &[EpSet], h: &QaFun) -> Result<Vec<EpSet>> {
    let mut out: Vec<EpSet> = Vec::with_capacity(family.len());
    for a in family {
        let c = compress_set(a, h)?;
        if !out.contains(&c) {
            out.push(c);
        }
    }
    Ok(out)
}

pub fn is_slalom(h: &QaFun, family: &[EpSet]) -> Result<bool> {
    for a in family {
        if !compress_set(a, h)?.is_cofinite() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The linear slalom `h(n) = G·n`, where `G` is the largest tail gap in the
/// family.
pub fn build_slalom(family: &[EpSet]) -> Result<QaFun> {
    if family.is_empty() {
        return Err(LabError::InvalidArgument("cannot build a slalom for an empty family".into()));
    }
    let mut gap = 1;
    for a in family {
        gap = gap.max(a.tail_gap_bound()?);
    }
    Ok(QaFun::linear(gap, 0))
}

/// Whether the compressed family generates the Fréchet filter.
pub fn frechet_after(family: &[EpSet], h: &QaFun) -> Result<bool> {
    is_slalom(h, family)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrichotomyTag {
    Frechet,
    UltraLike,
    FullLike,
    Unclassified,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Set,
    Complement,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Certificate {
    /// The compressor itself is a slalom for the family.
    Slalom(QaFun),
    /// For each test, the index of a compressed generator almost contained in it.
    Covering(Vec<usize>),
    /// For each test, a compressed generator and the side it is almost contained in.
    Decisive(Vec<(usize, Side)>),
    None,
}

/// Outcome of [`classify_trichotomy`]. Verdicts other than `Frechet` are
/// relative to the supplied test battery.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrichotomyVerdict {
    pub tag: TrichotomyTag,
    pub compressed: Vec<EpSet>,
    pub certificate: Certificate,
}

impl TrichotomyVerdict {
    /// Re-checks the certificate against the compressed family and tests.
    pub fn verify(&self, tests: &[EpSet]) -> bool {
        let c = &self.compressed;
        match (&self.tag, &self.certificate) {
            (TrichotomyTag::Frechet, Certificate::Slalom(_)) => c.iter().all(EpSet::is_cofinite),
            (TrichotomyTag::FullLike, Certificate::Covering(idx)) => {
                idx.len() == tests.len()
                    && idx.iter().zip(tests).all(|(&i, t)| c.get(i).is_some_and(|a| a.almost_subset(t)))
            }
            (TrichotomyTag::UltraLike, Certificate::Decisive(rows)) => {
                rows.len() == tests.len()
                    && rows.iter().zip(tests).all(|((i, side), t)| {
                        c.get(*i).is_some_and(|a| match side {
                            Side::Set => a.almost_subset(t),
                            Side::Complement => a.almost_subset(&t.complement()),
                        })
                    })
            }
            (TrichotomyTag::Unclassified, Certificate::None) => true,
            _ => false,
        }
    }
}

/// Sorts `S/h` into Fréchet / ultrafilter-like / full-like relative to a
/// finite battery of test sets.
pub fn classify_trichotomy(family: &[EpSet], h: &QaFun, tests: &[EpSet]) -> Result<TrichotomyVerdict> {
    for t in tests {
        t.require_infinite()?;
    }
    let compressed = compress_family(family, h)?;
    if compressed.iter().all(EpSet::is_cofinite) {
        return Ok(TrichotomyVerdict {
            tag: TrichotomyTag::Frechet,
            compressed,
            certificate: Certificate::Slalom(h.clone()),
        });
    }
    let covering: Option<Vec<usize>> = tests
        .iter()
        .map(|t| compressed.iter().position(|a| a.almost_subset(t)))
        .collect();
    if let Some(idx) = covering {
        return Ok(TrichotomyVerdict {
            tag: TrichotomyTag::FullLike,
            compressed,
            certificate: Certificate::Covering(idx),
        });
    }
    let spec = FamilySpec::new(compressed.clone())?;
    if spec.is_filter_base() {
        let decisive: Option<Vec<(usize, Side)>> = tests
            .iter()
            .map(|t| {
                let tc = t.complement();
                compressed.iter().enumerate().find_map(|(i, a)| {
                    if a.almost_subset(t) {
                        Some((i, Side::Set))
                    } else if a.almost_subset(&tc) {
                        Some((i, Side::Complement))
                    } else {
                        None
                    }
                })
            })
            .collect();
        if let Some(rows) = decisive {
            return Ok(TrichotomyVerdict {
                tag: TrichotomyTag::UltraLike,
                compressed,
                certificate: Certificate::Decisive(rows),
            });
        }
    }
    Ok(TrichotomyVerdict {
        tag: TrichotomyTag::Unclassified,
        compressed,
        certificate: Certificate::None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn evens() -> EpSet {
        EpSet::residue_class(2, 0)
    }
    fn odds() -> EpSet {
        EpSet::residue_class(2, 1)
    }
    fn mult(k: u64) -> EpSet {
        EpSet::residue_class(k, 0)
    }
    fn lin(a: u64) -> QaFun {
        QaFun::linear(a, 0)
    }

    fn brute(a: &EpSet, h: &QaFun, n: u64) -> bool {
        (h.eval(n)..h.eval(n + 1)).any(|x| a.contains(x))
    }

    #[test]
    fn compress_examples() {
        assert_eq!(compress_set(&evens(), &lin(2)).unwrap(), EpSet::naturals());
        assert_eq!(compress_set(&mult(4), &lin(2)).unwrap(), evens());
        let cof = EpSet::at_least(7);
        let h = QaFun::new(vec![1, 4], 2, 5, vec![6, 8]).unwrap();
        assert!(compress_set(&cof, &h).unwrap().is_cofinite());
        assert!(matches!(compress_set(&EpSet::finite([1]), &lin(2)), Err(LabError::FiniteSet(_))));
        assert!(matches!(compress_set(&evens(), &lin(0)), Err(LabError::NotIncreasing(_))));
    }

    #[test]
    fn compress_family_examples() {
        assert_eq!(
            compress_family(&[evens(), mult(4)], &lin(2)).unwrap(),
            vec![EpSet::naturals(), evens()]
        );
        let s = vec![mult(3), EpSet::new(vec![1], 2, 5, vec![0, 3]).unwrap()];
        assert_eq!(compress_family(&s, &QaFun::identity()).unwrap(), s);
        assert!(compress_family(&[], &lin(2)).unwrap().is_empty());
    }

    #[test]
    fn slalom_examples() {
        assert!(is_slalom(&lin(3), &[evens()]).unwrap());
        assert!(!is_slalom(&lin(1), &[evens()]).unwrap());
        assert!(is_slalom(&QaFun::linear(5, 2), &[EpSet::naturals()]).unwrap());
        assert_eq!(build_slalom(&[evens()]).unwrap(), lin(2));
        assert_eq!(build_slalom(&[EpSet::naturals()]).unwrap(), lin(1));
        assert_eq!(build_slalom(&[evens(), mult(3)]).unwrap(), lin(3));
        assert!(frechet_after(&[mult(4)], &lin(4)).unwrap());
        assert!(!frechet_after(&[evens()], &lin(1)).unwrap());
        assert!(frechet_after(&[EpSet::at_least(3)], &QaFun::linear(2, 1)).unwrap());
    }

    #[test]
    fn trichotomy_examples() {
        let v = classify_trichotomy(&[mult(4)], &lin(4), &[odds()]).unwrap();
        assert_eq!(v.tag, TrichotomyTag::Frechet);
        assert!(v.verify(&[odds()]));

        let tests = [evens(), odds()];
        let v = classify_trichotomy(&[evens()], &lin(1), &tests).unwrap();
        assert_eq!(v.tag, TrichotomyTag::UltraLike);
        assert_eq!(v.certificate, Certificate::Decisive(vec![(0, Side::Set), (0, Side::Complement)]));
        assert!(v.verify(&tests));

        let v = classify_trichotomy(&[evens(), odds()], &lin(1), &tests).unwrap();
        assert_eq!(v.tag, TrichotomyTag::FullLike);
        assert!(v.verify(&tests));

        let v = classify_trichotomy(&[evens()], &lin(1), &[mult(3)]).unwrap();
        assert_eq!(v.tag, TrichotomyTag::Unclassified);
    }

    #[test]
    fn compress_matches_definition_on_mixed_inputs() {
        let sets = [
            EpSet::new(vec![0, 3], 5, 7, vec![2, 5]).unwrap(),
            EpSet::new(vec![], 4, 6, vec![1]).unwrap(),
            EpSet::finite([2, 9, 30]),
        ];
        let hs = [
            QaFun::new(vec![2, 3], 3, 7, vec![5, 6, 8]).unwrap(),
            QaFun::linear(4, 1),
            QaFun::new(vec![], 2, 9, vec![0, 5]).unwrap(),
        ];
        for a in &sets {
            for h in &hs {
                let c = compress_unchecked(a, h);
                for n in 0..300 {
                    assert_eq!(c.contains(n), brute(a, h, n), "{a} {h} n={n}");
                }
            }
        }
    }
}
