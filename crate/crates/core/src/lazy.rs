//! Sets that leave the eventually periodic universe, known only through
//! their truncations `a ∩ [0, D)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::constructions::{greedy_truncation, GuesserProgram};
use crate::epset::{write_u64_list, EpSet};
use crate::error::{LabError, Result};
use crate::qafun::QaFun;

pub const DEFAULT_BUDGET: u64 = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GreedySide {
    I,
    J,
}

/// The deterministic program behind a [`LazySet`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LazySource {
    /// `{f(0) + ⋯ + f(n) + n : n ∈ ℕ}`.
    PartialSums(QaFun),
    /// An eventually periodic set read as a stream.
    Periodic(EpSet),
    /// One side of the greedy disjoint pair drawn from a guesser.
    Greedy { guesser: GuesserProgram, side: GreedySide },
}

impl LazySource {
    pub fn name(&self) -> &'static str {
        match self {
            LazySource::PartialSums(_) => "partial_sums",
            LazySource::Periodic(_) => "periodic",
            LazySource::Greedy { side: GreedySide::I, .. } => "greedy_i",
            LazySource::Greedy { side: GreedySide::J, .. } => "greedy_j",
        }
    }
}

impl fmt::Display for LazySource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LazySource::PartialSums(g) => write!(f, "{}({g})", self.name()),
            LazySource::Periodic(a) => write!(f, "{}({a})", self.name()),
            LazySource::Greedy { guesser, .. } => write!(f, "{}({guesser})", self.name()),
        }
    }
}

/// A strictly increasing set given by a generator and a step budget.
/// Only truncations are observable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LazySet {
    source: LazySource,
    budget: u64,
}

impl LazySet {
    pub fn new(source: LazySource) -> Self {
        Self {
            source,
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn source(&self) -> &LazySource {
        &self.source
    }

    /// Elements below `depth`, in increasing order.
    pub fn truncate(&self, depth: u64) -> Result<Vec<u64>> {
        let over = || LabError::BudgetExceeded {
            depth,
            budget: self.budget,
        };
        match &self.source {
            LazySource::PartialSums(f) => {
                let mut out = Vec::new();
                let mut sum: u64 = 0;
                for n in 0.. {
                    if n > self.budget {
                        return Err(over());
                    }
                    sum = sum
                        .checked_add(f.eval(n))
                        .ok_or_else(|| LabError::Overflow("partial sums".into()))?;
                    let x = sum + n;
                    if x >= depth {
                        break;
                    }
                    out.push(x);
                }
                Ok(out)
            }
            LazySource::Periodic(a) => {
                let out = a.elements_below(depth);
                if out.len() as u64 > self.budget {
                    return Err(over());
                }
                Ok(out)
            }
            LazySource::Greedy { guesser, side } => {
                let (i, j) = greedy_truncation(guesser, depth, self.budget)?;
                Ok(match side {
                    GreedySide::I => i,
                    GreedySide::J => j,
                })
            }
        }
    }

    pub fn truncation(&self, depth: u64) -> Result<LazyTruncation> {
        Ok(LazyTruncation {
            generator: self.source.clone(),
            depth,
            elements: self.truncate(depth)?,
        })
    }
}

/// `a_f = {f(0) + ⋯ + f(n) + n}`, an injective code of `f` as an infinite set.
pub fn baire_to_roth(f: &QaFun) -> LazySet {
    LazySet::new(LazySource::PartialSums(f.clone()))
}

/// Serialized form of a lazy set: a truncation tagged with its generator.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LazyTruncation {
    pub generator: LazySource,
    pub depth: u64,
    pub elements: Vec<u64>,
}

impl LazyTruncation {
    /// Re-runs the generator and compares.
    pub fn replays(&self) -> bool {
        LazySet::new(self.generator.clone())
            .truncate(self.depth)
            .is_ok_and(|e| e == self.elements)
    }
}

impl fmt::Display for LazyTruncation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "trunc(gen={},depth={},elements=", self.generator, self.depth)?;
        write_u64_list(f, &self.elements)?;
        f.write_str(")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_sum_examples() {
        assert_eq!(baire_to_roth(&QaFun::constant(0)).truncate(6).unwrap(), [0, 1, 2, 3, 4, 5]);
        assert_eq!(baire_to_roth(&QaFun::constant(1)).truncate(10).unwrap(), [1, 3, 5, 7, 9]);
        assert_eq!(baire_to_roth(&QaFun::identity()).truncate(15).unwrap(), [0, 2, 5, 9, 14]);
    }

    #[test]
    fn truncation_edge_cases() {
        let a = baire_to_roth(&QaFun::linear(3, 2));
        assert!(a.truncate(0).unwrap().is_empty());
        let evens = LazySet::new(LazySource::Periodic(EpSet::residue_class(2, 0)));
        assert_eq!(evens.truncate(5).unwrap(), [0, 2, 4]);
        let tight = baire_to_roth(&QaFun::constant(0)).with_budget(10);
        assert!(matches!(tight.truncate(100), Err(LabError::BudgetExceeded { .. })));
    }

    #[test]
    fn partial_sums_strictly_increase_for_arbitrary_input() {
        let f = QaFun::new(vec![0, 9, 0], 3, 0, vec![4, 0, 0]).unwrap();
        let t = baire_to_roth(&f).truncate(10_000).unwrap();
        assert!(t.windows(2).all(|w| w[0] < w[1]));
        let shorter = baire_to_roth(&f).truncate(500).unwrap();
        assert_eq!(&t[..shorter.len()], &shorter[..]);
    }

    #[test]
    fn truncation_replays() {
        let t = baire_to_roth(&QaFun::constant(1)).truncation(10).unwrap();
        assert!(t.replays());
        assert_eq!(
            t.to_string(),
            "trunc(gen=partial_sums(qa(table=[],period=1,incr=0,base=[1])),depth=10,elements=[1,3,5,7,9])"
        );
    }
}
