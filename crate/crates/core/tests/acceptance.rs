//! Acceptance gate. Prints one line per criterion and exits non-zero if any
//! criterion fails or overruns its time limit.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use omega_lab_core::harness::{run_suite, suite_names, GenParams, SuiteReport};
use omega_lab_core::{evaluate_selection, CoverSequence, CoverTrace, EpSet, PickSchedule, QaFun, SelectionMode};

fn params(cases: u64) -> GenParams {
    GenParams {
        cases,
        ..GenParams::default()
    }
}

fn suite(name: &str, p: &GenParams) -> Result<SuiteReport, String> {
    let r = run_suite(name, p).map_err(|e| e.to_string())?;
    if r.passed() {
        Ok(r)
    } else {
        Err(format!("suite {name} failed:\n{r}"))
    }
}

fn at_least(r: &SuiteReport, property: &str, n: u64) -> Result<(), String> {
    let got = r.property(property).map(|p| p.passed).unwrap_or(0);
    if got >= n {
        Ok(())
    } else {
        Err(format!("{}/{property}: {got} passing cases, need {n}", r.suite))
    }
}

fn counter_at_least(r: &SuiteReport, property: &str, key: &str, n: u64) -> Result<(), String> {
    let got = r.counter(property, key);
    if got >= n {
        Ok(())
    } else {
        Err(format!("{}/{property}: {key} = {got}, need {n}", r.suite))
    }
}

fn oracle_agreement() -> Result<(), String> {
    let p = params(1000);
    let e = suite("oracle-epsets", &p)?;
    at_least(&e, "boolean-algebra", 1000)?;
    at_least(&e, "canonical-form", 1000)?;
    let q = suite("oracle-qafuns", &p)?;
    at_least(&q, "operations", 1000)?;
    at_least(&q, "comparisons", 1000)?;
    let c = suite("oracle-compress", &p)?;
    at_least(&c, "compress-set", 1000)
}

fn slalom_equivalence() -> Result<(), String> {
    let r = suite("slalom", &params(1000))?;
    at_least(&r, "built-slalom", 1000)?;
    at_least(&r, "slalom-iff-cofinite", 1000)
}

fn splitter_replay() -> Result<(), String> {
    let r = suite("split1", &params(1000))?;
    at_least(&r, "splitter", 1000)
}

fn greedy_pair_replay() -> Result<(), String> {
    let p = GenParams {
        depth: 2000,
        ..params(300)
    };
    let r = suite("rothsplit", &p)?;
    at_least(&r, "greedy-pair", 300)
}

fn bounding_replay() -> Result<(), String> {
    let r = suite("split4", &params(2500))?;
    counter_at_least(&r, "bounding-reduction", "verified", 1000)?;
    counter_at_least(&r, "bounding-reduction", "witness_invalid", 100)
}

fn maxfin_constructions() -> Result<(), String> {
    let r = suite("maxfin", &params(1000))?;
    at_least(&r, "escape-and-closure", 500)?;
    counter_at_least(&r, "subbase", "precondition_holds", 500)
}

fn trace_glue_identity() -> Result<(), String> {
    let r = suite("glue", &params(500))?;
    at_least(&r, "glue-is-compression", 500)?;
    at_least(&r, "gamma-glueable", 500)
}

fn worked_selection_examples() -> Result<(), String> {
    let cover = |traces: &[(&str, EpSet)]| {
        CoverSequence::constant(CoverTrace::new(traces.iter().map(|(l, t)| (l.to_string(), t.clone()))).unwrap())
    };
    let evens = EpSet::residue_class(2, 0);

    let v = evaluate_selection(
        &cover(&[("x", EpSet::naturals())]),
        &PickSchedule::Single(QaFun::identity()),
        SelectionMode::S1,
    )
    .map_err(|e| e.to_string())?;
    if v.hits[0].trace != EpSet::naturals() || !v.tags.gamma {
        return Err(format!("S1 on {{x↦ℕ}} with p(k)=k: {v:?}"));
    }

    let v = evaluate_selection(
        &cover(&[("x", evens.clone()), ("y", EpSet::residue_class(2, 1))]),
        &PickSchedule::Windows(QaFun::linear(2, 0)),
        SelectionMode::Ufin,
    )
    .map_err(|e| e.to_string())?;
    if v.hits.iter().any(|p| p.trace != EpSet::naturals()) || !v.tags.gamma {
        return Err(format!("Ufin on {{evens, odds}} with h=2n: {v:?}"));
    }

    let v = evaluate_selection(
        &cover(&[("x", EpSet::residue_class(4, 0))]),
        &PickSchedule::Single(QaFun::linear(2, 0)),
        SelectionMode::S1,
    )
    .map_err(|e| e.to_string())?;
    if v.hits[0].trace != evens || !v.tags.large || v.tags.gamma {
        return Err(format!("S1 on {{mult4}} with p(k)=2k: {v:?}"));
    }
    Ok(())
}

fn selection_runner() -> Result<(), String> {
    let r = suite("selection", &params(300))?;
    at_least(&r, "ufin-gamma", 300)?;
    worked_selection_examples()
}

fn round_trips() -> Result<(), String> {
    let r = suite("roundtrip", &params(1000))?;
    at_least(&r, "text-and-json", 1000)?;
    at_least(&r, "enumeration", 1000)
}

fn determinism() -> Result<(), String> {
    let p = GenParams::default();
    for name in suite_names() {
        let a = run_suite(name, &p).map_err(|e| e.to_string())?;
        let b = run_suite(name, &p).map_err(|e| e.to_string())?;
        if a.to_string() != b.to_string() || a.to_json() != b.to_json() {
            return Err(format!("suite {name} renders differently on a second run"));
        }
    }
    Ok(())
}

type Criterion = (u32, &'static str, u64, fn() -> Result<(), String>);

const CRITERIA: &[Criterion] = &[
    (1, "oracle agreement for sets, functions and compression", 10, oracle_agreement),
    (2, "built slaloms are Fréchet; is_slalom matches cofinite compression", 5, slalom_equivalence),
    (3, "splitter from a slalom splits every member", 5, splitter_replay),
    (4, "greedy disjoint pair grows inside every member", 20, greedy_pair_replay),
    (5, "bound transfer through h verifies; invalid witnesses rejected", 5, bounding_replay),
    (6, "escape, maxfin closure and filter subbase", 5, maxfin_constructions),
    (7, "glued traces equal compressed traces; glueable partitions verify", 5, trace_glue_identity),
    (8, "selection runner and worked verdicts", 5, selection_runner),
    (9, "text/json round trips; enumeration and image are inverse", 5, round_trips),
    (10, "reports are byte-identical across runs", 60, determinism),
];

fn main() -> ExitCode {
    let mut failed = 0;
    for &(id, what, limit, run) in CRITERIA {
        let started = Instant::now();
        let result = run();
        let took = started.elapsed();
        let verdict = match result {
            Ok(()) if took <= Duration::from_secs(limit) => "PASS".to_string(),
            Ok(()) => format!("FAIL (over the {limit} s limit)"),
            Err(e) => format!("FAIL: {e}"),
        };
        if !verdict.starts_with("PASS") {
            failed += 1;
        }
        println!("criterion {id:>2} [{what}] {took:.2?}: {verdict}");
    }
    if failed == 0 {
        println!("acceptance: all {} criteria pass", CRITERIA.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
