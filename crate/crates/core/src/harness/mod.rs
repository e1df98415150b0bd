//! Seeded property suites with brute-force oracles.
//!
//! A suite is a list of named properties. Each property draws one input per
//! case from that case's own random stream, runs the check, and shrinks any
//! failing input. Cases run in parallel and are merged by index, so a
//! `(seed, params, suite)` triple always renders the same report.

pub mod gen;
pub mod oracle;
pub mod shrink;
mod suites;

use std::collections::BTreeMap;
use std::fmt;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use gen::{case_rng, CaseRng};
use shrink::{minimise, Shrink};

use suites::SUITES;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenParams {
    pub seed: u64,
    pub cases: u64,
    pub max_start: u64,
    pub max_period: u64,
    /// Probability that a residue (or prefix point) is a member.
    pub density: f64,
    /// Largest single step of a generated function.
    pub slope_max: u64,
    pub family_max: usize,
    pub battery_size: usize,
    pub points_max: usize,
    /// Truncation depth for lazy sets.
    pub depth: u64,
}

impl Default for GenParams {
    fn default() -> Self {
        Self {
            seed: 42,
            cases: 1000,
            max_start: 8,
            max_period: 8,
            density: 0.5,
            slope_max: 4,
            family_max: 4,
            battery_size: 4,
            points_max: 4,
            depth: 2000,
        }
    }
}

/// Result of one check on one input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    /// Passed, and falls in the named category (tallied in the report).
    Count(&'static str),
    /// Input outside the property's domain.
    Discard,
    Fail(String),
}

impl Outcome {
    fn failed(&self) -> bool {
        matches!(self, Outcome::Fail(_))
    }
}

/// Fails with `msg` unless `cond`.
pub fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub case: u64,
    pub input: String,
    pub shrunk: String,
    pub shrink_steps: usize,
    /// Failure message of the shrunk input.
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub name: String,
    pub passed: u64,
    pub discarded: u64,
    pub failed: u64,
    pub counters: BTreeMap<String, u64>,
    /// The first few failures, shrunk.
    pub counterexamples: Vec<Counterexample>,
}

const KEPT_COUNTEREXAMPLES: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub params: GenParams,
    pub properties: Vec<PropertyReport>,
    /// Wall time; left out of both renderings so reports compare byte-for-byte.
    #[serde(skip)]
    pub elapsed: Duration,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.properties.iter().all(|p| p.failed == 0)
    }

    pub fn failures(&self) -> u64 {
        self.properties.iter().map(|p| p.failed).sum()
    }

    pub fn property(&self, name: &str) -> Option<&PropertyReport> {
        self.properties.iter().find(|p| p.name == name)
    }

    pub fn counter(&self, property: &str, key: &str) -> u64 {
        self.property(property)
            .and_then(|p| p.counters.get(key).copied())
            .unwrap_or(0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialise")
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = &self.params;
        writeln!(
            f,
            "suite {} seed={} cases={}: {}",
            self.suite,
            p.seed,
            p.cases,
            if self.passed() { "pass" } else { "FAIL" }
        )?;
        for prop in &self.properties {
            write!(
                f,
                "  {}: {} passed, {} discarded, {} failed",
                prop.name, prop.passed, prop.discarded, prop.failed
            )?;
            for (k, v) in &prop.counters {
                write!(f, ", {k}={v}")?;
            }
            writeln!(f)?;
            for c in &prop.counterexamples {
                writeln!(f, "    case {}: {}", c.case, c.message)?;
                writeln!(f, "      input:  {}", c.input)?;
                writeln!(f, "      shrunk: {} ({} steps)", c.shrunk, c.shrink_steps)?;
            }
        }
        Ok(())
    }
}

/// Collects the properties of one suite run.
pub(crate) struct Runner<'p> {
    params: &'p GenParams,
    properties: Vec<PropertyReport>,
}

fn guarded<I>(prop: &(impl Fn(&I) -> Outcome + Sync), input: &I) -> Outcome {
    match catch_unwind(AssertUnwindSafe(|| prop(input))) {
        Ok(o) => o,
        Err(e) => {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Outcome::Fail(format!("panicked: {msg}"))
        }
    }
}

impl<'p> Runner<'p> {
    pub(crate) fn new(params: &'p GenParams) -> Self {
        Self {
            params,
            properties: Vec::new(),
        }
    }

    /// Runs `prop` on `cases` inputs drawn by `gen`.
    pub(crate) fn check<I, G, P>(&mut self, name: &str, cases: u64, gen: G, prop: P)
    where
        I: Shrink + Clone + Render + Send,
        G: Fn(&mut CaseRng, &GenParams) -> I + Sync,
        P: Fn(&I) -> Outcome + Sync,
    {
        let p = self.params;
        // each property gets its own block of streams
        let salt = (self.properties.len() as u64) << 40;
        let results: Vec<(u64, Outcome, Option<Counterexample>)> = (0..cases)
            .into_par_iter()
            .map(|case| {
                let mut rng = case_rng(p.seed, salt | case);
                let input = gen(&mut rng, p);
                let out = guarded(&prop, &input);
                let cex = out.failed().then(|| {
                    let (small, steps) = minimise(&input, |c| guarded(&prop, c).failed());
                    let message = match guarded(&prop, &small) {
                        Outcome::Fail(m) => m,
                        _ => unreachable!("shrinking keeps failing inputs"),
                    };
                    Counterexample {
                        case,
                        input: input.render(),
                        shrunk: small.render(),
                        shrink_steps: steps,
                        message,
                    }
                });
                (case, out, cex)
            })
            .collect();
        let mut report = PropertyReport {
            name: name.to_string(),
            ..PropertyReport::default()
        };
        for (_, out, cex) in results {
            match out {
                Outcome::Pass => report.passed += 1,
                Outcome::Count(key) => {
                    report.passed += 1;
                    *report.counters.entry(key.to_string()).or_default() += 1;
                }
                Outcome::Discard => report.discarded += 1,
                Outcome::Fail(_) => report.failed += 1,
            }
            if let Some(c) = cex {
                if report.counterexamples.len() < KEPT_COUNTEREXAMPLES {
                    report.counterexamples.push(c);
                }
            }
        }
        self.properties.push(report);
    }

    fn finish(self, suite: &str, started: Instant) -> SuiteReport {
        SuiteReport {
            suite: suite.to_string(),
            params: self.params.clone(),
            properties: self.properties,
            elapsed: started.elapsed(),
        }
    }
}

/// Names accepted by [`run_suite`].
pub fn suite_names() -> impl Iterator<Item = &'static str> {
    SUITES.iter().map(|(n, _)| *n)
}

/// Runs a named suite.
pub fn run_suite(name: &str, params: &GenParams) -> Result<SuiteReport> {
    let suite = SUITES
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| LabError::UnknownSuite(name.to_string()))?;
    let started = Instant::now();
    let mut runner = Runner::new(params);
    (suite.1)(&mut runner);
    Ok(runner.finish(name, started))
}

/// Inputs that are reported but never shrunk.
#[derive(Debug, Clone)]
pub struct Opaque<T>(pub T);

impl<T: Clone> Shrink for Opaque<T> {
    fn shrink(&self) -> Vec<Self> {
        Vec::new()
    }
}

impl<T: fmt::Debug> Render for Opaque<T> {
    fn render(&self) -> String {
        format!("{:?}", self.0)
    }
}

/// Text form of a suite input, used in counterexamples.
pub trait Render {
    fn render(&self) -> String;
}

macro_rules! render_via_display {
    ($($t:ty),*) => {$(
        impl Render for $t {
            fn render(&self) -> String {
                self.to_string()
            }
        }
    )*};
}

render_via_display!(
    u64,
    crate::epset::EpSet,
    crate::qafun::QaFun,
    crate::covers::CoverTrace,
    crate::covers::CoverSequence,
    gen::SetFields,
    gen::FunFields
);

impl<T: Render> Render for Vec<T> {
    fn render(&self) -> String {
        let items: Vec<String> = self.iter().map(Render::render).collect();
        format!("[{}]", items.join("; "))
    }
}

impl<A: Render, B: Render> Render for (A, B) {
    fn render(&self) -> String {
        format!("({}, {})", self.0.render(), self.1.render())
    }
}

impl<A: Render, B: Render, C: Render> Render for (A, B, C) {
    fn render(&self) -> String {
        format!("({}, {}, {})", self.0.render(), self.1.render(), self.2.render())
    }
}
