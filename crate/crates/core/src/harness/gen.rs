//! Random values for the suites.
//!
//! Every case owns a ChaCha8 stream: the generator is seeded with the run
//! seed and switched to stream number `case`, so cases are independent of
//! each other and of the order they run in.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::GenParams;
use crate::constructions::GuesserProgram;
use crate::covers::{CoverSequence, CoverTrace};
use crate::epset::EpSet;
use crate::qafun::{QaFun, StrandFun};

pub type CaseRng = ChaCha8Rng;

pub fn case_rng(seed: u64, case: u64) -> CaseRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(case);
    rng
}

/// Unnormalised fields of an eventually periodic set, as drawn. Keeping the
/// raw draw lets the oracles work from the defining formula rather than
/// from the canonical form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetFields {
    pub prefix: Vec<u64>,
    pub start: u64,
    pub period: u64,
    pub pattern: Vec<u64>,
}

impl SetFields {
    pub fn build(&self) -> EpSet {
        EpSet::new(self.prefix.clone(), self.start, self.period, self.pattern.clone()).expect("fields are in range")
    }

    pub fn contains(&self, n: u64) -> bool {
        if n < self.start {
            self.prefix.contains(&n)
        } else {
            self.pattern.contains(&((n - self.start) % self.period))
        }
    }
}

impl std::fmt::Display for SetFields {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "ep(prefix={:?},start={},period={},pattern={:?})",
            self.prefix, self.start, self.period, self.pattern
        )
    }
}

pub fn set_fields(rng: &mut CaseRng, p: &GenParams, infinite: bool) -> SetFields {
    let start = rng.random_range(0..=p.max_start);
    let period = rng.random_range(1..=p.max_period.max(1));
    let prefix = (0..start).filter(|_| rng.random_bool(p.density)).collect();
    let mut pattern: Vec<u64> = (0..period).filter(|_| rng.random_bool(p.density)).collect();
    if infinite && pattern.is_empty() {
        pattern.push(rng.random_range(0..period));
    }
    SetFields {
        prefix,
        start,
        period,
        pattern,
    }
}

/// An infinite set; finite ones only when `infinite` is false.
pub fn epset(rng: &mut CaseRng, p: &GenParams, infinite: bool) -> EpSet {
    set_fields(rng, p, infinite).build()
}

/// The `i`-th generated set for a parameter set: canonical, infinite and
/// fixed by `(seed, i)`.
pub fn gen_epset(p: &GenParams, i: u64) -> EpSet {
    epset(&mut case_rng(p.seed, i), p, true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Increasing,
    Nondecreasing,
    Arbitrary,
}

/// Unnormalised fields of a quasi-affine function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunFields {
    pub table: Vec<u64>,
    pub period: u64,
    pub incr: u64,
    pub base: Vec<u64>,
}

impl FunFields {
    pub fn build(&self) -> QaFun {
        QaFun::new(self.table.clone(), self.period, self.incr, self.base.clone()).expect("fields are in range")
    }

    pub fn eval(&self, n: u64) -> u64 {
        let t = self.table.len() as u64;
        if n < t {
            self.table[n as usize]
        } else {
            let k = n - t;
            self.base[(k % self.period) as usize] + self.incr * (k / self.period)
        }
    }
}

impl std::fmt::Display for FunFields {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "qa(table={:?},period={},incr={},base={:?})",
            self.table, self.period, self.incr, self.base
        )
    }
}

pub fn fun_fields(rng: &mut CaseRng, p: &GenParams, shape: Shape) -> FunFields {
    let t = rng.random_range(0..=p.max_start / 2) as usize;
    let m = rng.random_range(1..=p.max_period.clamp(1, 4));
    let step_lo = match shape {
        Shape::Increasing => 1,
        _ => 0,
    };
    let step_hi = p.slope_max.max(1);
    match shape {
        Shape::Increasing | Shape::Nondecreasing => {
            let mut v = rng.random_range(0..=3u64);
            let mut vals = Vec::with_capacity(t + m as usize);
            for _ in 0..t + m as usize {
                vals.push(v);
                v += rng.random_range(step_lo..=step_hi);
            }
            let base = vals.split_off(t);
            // wraps the last base value to the first value of the next block
            let incr = v - base[0];
            FunFields {
                table: vals,
                period: m,
                incr,
                base,
            }
        }
        Shape::Arbitrary => {
            let hi = 4 * step_hi;
            FunFields {
                table: (0..t).map(|_| rng.random_range(0..=hi)).collect(),
                period: m,
                incr: rng.random_range(0..=step_hi * m),
                base: (0..m).map(|_| rng.random_range(0..=hi)).collect(),
            }
        }
    }
}

pub fn qafun(rng: &mut CaseRng, p: &GenParams, shape: Shape) -> QaFun {
    fun_fields(rng, p, shape).build()
}

pub fn family(rng: &mut CaseRng, p: &GenParams) -> Vec<EpSet> {
    let k = rng.random_range(1..=p.family_max.max(1));
    (0..k).map(|_| epset(rng, p, true)).collect()
}

pub fn functions(rng: &mut CaseRng, p: &GenParams, shape: Shape) -> Vec<QaFun> {
    let k = rng.random_range(1..=p.family_max.max(1));
    (0..k).map(|_| qafun(rng, p, shape)).collect()
}

pub fn battery(rng: &mut CaseRng, p: &GenParams) -> Vec<EpSet> {
    (0..p.battery_size).map(|_| epset(rng, p, true)).collect()
}

pub fn strands(rng: &mut CaseRng, p: &GenParams) -> StrandFun {
    let k = rng.random_range(1..=3);
    StrandFun::new((0..k).map(|_| qafun(rng, p, Shape::Arbitrary)).collect()).expect("nonempty")
}

pub fn guesser(rng: &mut CaseRng, p: &GenParams) -> GuesserProgram {
    GuesserProgram::new(family(rng, p)).expect("infinite strands")
}

/// A cover of `points_max` or fewer points. Traces are infinite when
/// `large`, otherwise merely nonempty.
pub fn cover(rng: &mut CaseRng, p: &GenParams, large: bool) -> CoverTrace {
    let k = rng.random_range(1..=p.points_max.max(1));
    cover_on(rng, p, large, k)
}

fn cover_on(rng: &mut CaseRng, p: &GenParams, large: bool, points: usize) -> CoverTrace {
    let traces = (0..points).map(|i| {
        let mut t = epset(rng, p, large);
        if t.is_empty() {
            t = EpSet::finite([rng.random_range(0..=p.max_start)]);
        }
        (format!("x{i}"), t)
    });
    CoverTrace::new(traces).expect("distinct labels")
}

/// A cyclic sequence of one to three covers over a shared point list.
pub fn sequence(rng: &mut CaseRng, p: &GenParams, large: bool) -> CoverSequence {
    let k = rng.random_range(1..=p.points_max.max(1));
    let len = rng.random_range(1..=3);
    CoverSequence::new((0..len).map(|_| cover_on(rng, p, large, k)).collect()).expect("shared points")
}
