//! The named suites. Each property returns `Err(message)` on the first
//! disagreement with its oracle.

use num_integer::Integer;
use rand::Rng;

use super::gen::{self, FunFields, SetFields, Shape};
use super::oracle;
use super::{ensure, Opaque, Outcome, Runner};
use crate::compression::{
    build_slalom, classify_trichotomy, compress_family, compress_set, frechet_after, is_slalom, TrichotomyTag,
};
use crate::constructions::{
    bounding_reduction, escape_function, filter_subbase_from_bound, ij_from_guesser, maxfin_closure,
    recursive_slalom_stream, rothberger_guesser, splitter_from_slalom,
};
use crate::covers::{
    classify_cover, evaluate_selection, gamma_glueable, gamma_glueable_with, glue_cover, split_cover, CoverSequence,
    CoverTrace, GlueCase, PickSchedule, SelectionMode,
};
use crate::epset::EpSet;
use crate::error::LabError;
use crate::families::{reaping_relative, split_witness_check, FamilySpec, KindClaim, TestBattery};
use crate::lazy::{baire_to_roth, GreedySide, LazySet, LazySource};
use crate::qafun::QaFun;
use crate::text::{parse_family_file, parse_sequence_file, FamilyFile};

type Check = std::result::Result<(), String>;
type SuiteFn = fn(&mut Runner<'_>);

pub(crate) static SUITES: &[(&str, SuiteFn)] = &[
    ("oracle-epsets", oracle_epsets),
    ("oracle-qafuns", oracle_qafuns),
    ("oracle-compress", oracle_compress),
    ("slalom", slalom),
    ("split1", split1),
    ("rothsplit", rothsplit),
    ("split4", split4),
    ("maxfin", maxfin),
    ("families", families),
    ("glue", glue),
    ("selection", selection),
    ("roundtrip", roundtrip),
];

fn outcome(r: Check) -> Outcome {
    match r {
        Ok(()) => Outcome::Pass,
        Err(m) => Outcome::Fail(m),
    }
}

fn counted(r: std::result::Result<&'static str, String>) -> Outcome {
    match r {
        Ok(key) => Outcome::Count(key),
        Err(m) => Outcome::Fail(m),
    }
}

fn first_mismatch(what: &str, got: &EpSet, bound: u64, member: impl Fn(u64) -> bool) -> Check {
    match oracle::agrees(got, bound, member) {
        None => Ok(()),
        Some(n) => Err(format!("{what} disagrees with brute force at n={n}: got {got}")),
    }
}

// ---------------------------------------------------------------- epsets

fn oracle_epsets(r: &mut Runner<'_>) {
    let cases = r.params.cases;
    r.check(
        "boolean-algebra",
        cases,
        |rng, p| {
            let fa = rng.random_bool(0.85);
            let fb = rng.random_bool(0.85);
            (gen::set_fields(rng, p, fa), gen::set_fields(rng, p, fb))
        },
        |(a, b): &(SetFields, SetFields)| outcome(boolean_algebra(a, b)),
    );
    r.check(
        "canonical-form",
        cases,
        |rng, p| {
            let infinite = rng.random_bool(0.85);
            (gen::set_fields(rng, p, infinite), rng.random_range(0..4u64))
        },
        |(a, k): &(SetFields, u64)| outcome(canonical_form(a, *k)),
    );
}

fn boolean_algebra(a: &SetFields, b: &SetFields) -> Check {
    let (x, y) = (a.build(), b.build());
    let d = oracle::window(&[a, b]);
    first_mismatch("membership", &x, d, |n| a.contains(n))?;
    first_mismatch("intersect", &x.intersect(&y), d, |n| a.contains(n) && b.contains(n))?;
    first_mismatch("union", &x.union(&y), d, |n| a.contains(n) || b.contains(n))?;
    first_mismatch("difference", &x.difference(&y), d, |n| a.contains(n) && !b.contains(n))?;
    first_mismatch("complement", &x.complement(), d, |n| !a.contains(n))?;
    ensure(x.almost_subset(&y) == oracle::almost_subset(a, b), || {
        format!("almost_subset({x}, {y}) = {}", x.almost_subset(&y))
    })?;
    ensure(
        x.is_infinite() == oracle::is_infinite(|n| a.contains(n), a.start, a.period),
        || format!("is_infinite({x})"),
    )?;
    ensure(
        x.is_cofinite() == oracle::is_cofinite(|n| a.contains(n), a.start, a.period),
        || format!("is_cofinite({x})"),
    )?;
    ensure(x.union(&y).complement() == x.complement().intersect(&y.complement()), || {
        "De Morgan fails".into()
    })?;
    let same = (0..d).all(|n| a.contains(n) == b.contains(n));
    ensure((x == y) == same, || format!("equality of {x} and {y} disagrees with membership"))?;
    for lo in (0..d).step_by(3) {
        let hi = lo + lo % 7;
        ensure(x.meets_window(lo, hi) == (lo..hi).any(|n| a.contains(n)), || {
            format!("meets_window({x}, {lo}, {hi})")
        })?;
    }
    Ok(())
}

fn canonical_form(a: &SetFields, k: u64) -> Check {
    let x = a.build();
    let again = EpSet::new(x.prefix().to_vec(), x.start(), x.period(), x.pattern().to_vec()).map_err(|e| e.to_string())?;
    ensure(again == x, || format!("canonicalisation not idempotent on {x}"))?;
    // the same set, unrolled k steps and with a doubled period
    let start = a.start + k;
    let period = 2 * a.period;
    let alt = EpSet::new(
        (0..start).filter(|&n| a.contains(n)).collect(),
        start,
        period,
        (0..period).filter(|&r| a.contains(start + r)).collect(),
    )
    .map_err(|e| e.to_string())?;
    ensure(alt == x, || format!("{alt} should canonicalise to {x}"))?;
    ensure(x.period() <= a.period && x.start() <= a.start, || {
        format!("canonical form {x} is larger than the input {a}")
    })?;
    if x.is_infinite() {
        let e = x.enumeration().map_err(|e| e.to_string())?;
        let brute: Vec<u64> = (0..).filter(|&n| a.contains(n)).take(40).collect();
        ensure((0..40).all(|k| e.eval(k) == brute[k as usize]), || format!("enumeration of {x} is {e}"))?;
        ensure(e.image_set().as_ref() == Ok(&x), || format!("image_set(enumeration({x})) differs"))?;
    }
    Ok(())
}

// ---------------------------------------------------------------- qafuns

fn any_shape(rng: &mut gen::CaseRng) -> Shape {
    match rng.random_range(0..3) {
        0 => Shape::Increasing,
        1 => Shape::Nondecreasing,
        _ => Shape::Arbitrary,
    }
}

fn oracle_qafuns(r: &mut Runner<'_>) {
    let cases = r.params.cases;
    r.check(
        "operations",
        cases,
        |rng, p| {
            let (sf, sg) = (any_shape(rng), any_shape(rng));
            (gen::fun_fields(rng, p, sf), gen::fun_fields(rng, p, sg))
        },
        |(f, g): &(FunFields, FunFields)| outcome(fun_operations(f, g)),
    );
    r.check(
        "comparisons",
        cases,
        |rng, p| {
            let (sf, sg) = (any_shape(rng), any_shape(rng));
            (gen::fun_fields(rng, p, sf), gen::fun_fields(rng, p, sg))
        },
        |(f, g): &(FunFields, FunFields)| outcome(fun_comparisons(f, g)),
    );
}

fn fun_operations(f: &FunFields, g: &FunFields) -> Check {
    let (ff, gg) = (f.build(), g.build());
    let w = oracle::fun_window(&[f, g]);
    for n in 0..w {
        ensure(ff.eval(n) == f.eval(n), || format!("eval({ff}, {n})"))?;
    }
    let fg = ff.compose(&gg);
    let mx = QaFun::pointwise_max([&ff, &gg]).map_err(|e| e.to_string())?;
    let sum = ff.add(&gg);
    let sh = ff.shift();
    for n in 0..w {
        ensure(fg.eval(n) == f.eval(g.eval(n)), || format!("compose {ff} ∘ {gg} = {fg} wrong at {n}"))?;
        ensure(mx.eval(n) == f.eval(n).max(g.eval(n)), || format!("max({ff}, {gg}) = {mx} wrong at {n}"))?;
        ensure(sum.eval(n) == f.eval(n) + g.eval(n), || format!("sum wrong at {n}"))?;
        ensure(sh.eval(n) == f.eval(n + 1), || format!("shift wrong at {n}"))?;
    }
    let edge = f.table.len() as u64 + 2 * f.period + 1;
    let inc = (0..edge).all(|n| f.eval(n) < f.eval(n + 1));
    let nondec = (0..edge).all(|n| f.eval(n) <= f.eval(n + 1));
    ensure(ff.is_increasing() == inc, || format!("is_increasing({ff})"))?;
    ensure(ff.is_nondecreasing() == nondec, || format!("is_nondecreasing({ff})"))?;
    if inc {
        ensure(ff.eval(w) >= w, || format!("increasing {ff} falls below the identity"))?;
        let img = ff.image_set().map_err(|e| e.to_string())?;
        let top = f.eval(w);
        let values: std::collections::BTreeSet<u64> = (0..=w).map(|n| f.eval(n)).collect();
        first_mismatch("image_set", &img, top, |x| values.contains(&x))?;
        ensure(img.enumeration().as_ref() == Ok(&ff), || format!("enumeration(image_set({ff})) differs"))?;
    }
    Ok(())
}

fn fun_comparisons(f: &FunFields, g: &FunFields) -> Check {
    let (ff, gg) = (f.build(), g.build());
    let (t, l) = oracle::settled(&ff, &gg);
    let w = t + l + 64;
    first_mismatch("le_set", &ff.le_set(&gg, false), w, |n| f.eval(n) <= g.eval(n))?;
    first_mismatch("lt_set", &ff.le_set(&gg, true), w, |n| f.eval(n) < g.eval(n))?;
    first_mismatch("eq_set", &ff.eq_set(&gg), w, |n| f.eval(n) == g.eval(n))?;
    ensure(ff.le_star(&gg) == oracle::le_star(&ff, &gg), || {
        format!("le_star({ff}, {gg}) = {}", ff.le_star(&gg))
    })?;
    Ok(())
}

// ---------------------------------------------------------------- compression

fn oracle_compress(r: &mut Runner<'_>) {
    let cases = r.params.cases;
    r.check(
        "compress-set",
        cases,
        |rng, p| (gen::set_fields(rng, p, true), gen::fun_fields(rng, p, Shape::Increasing)),
        |(a, h): &(SetFields, FunFields)| outcome(compress_matches(a, h)),
    );
}

fn compress_matches(a: &SetFields, h: &FunFields) -> Check {
    let (x, hh) = (a.build(), h.build());
    let c = compress_set(&x, &hh).map_err(|e| e.to_string())?;
    let w = 2 * (a.start + h.table.len() as u64 + h.period * a.period) + 64;
    first_mismatch("compress_set", &c, w, |n| (h.eval(n)..h.eval(n + 1)).any(|k| a.contains(k)))?;
    ensure(c.is_cofinite() == oracle::compressed_cofinite(&x, &hh), || {
        format!("cofiniteness of {x}/{hh}")
    })?;
    ensure(c.is_infinite() == oracle::compressed_infinite(&x, &hh), || {
        format!("infiniteness of {x}/{hh}")
    })?;
    let fam = compress_family(&[x.clone(), x.clone()], &hh).map_err(|e| e.to_string())?;
    ensure(fam == vec![c.clone()], || "compress_family does not deduplicate".into())
}

// ---------------------------------------------------------------- slaloms

fn slalom(r: &mut Runner<'_>) {
    let cases = r.params.cases;
    r.check(
        "built-slalom",
        cases,
        gen::family,
        |s: &Vec<EpSet>| outcome(built_slalom(s)),
    );
    r.check(
        "slalom-iff-cofinite",
        cases,
        |rng, p| (gen::family(rng, p), gen::qafun(rng, p, Shape::Increasing)),
        |(s, h): &(Vec<EpSet>, QaFun)| {
            outcome((|| {
                let got = is_slalom(h, s).map_err(|e| e.to_string())?;
                let want = s.iter().all(|a| oracle::compressed_cofinite(a, h));
                ensure(got == want, || format!("is_slalom({h}) = {got}"))?;
                ensure(frechet_after(s, h) == Ok(want), || "frechet_after differs from is_slalom".into())
            })())
        },
    );
    r.check(
        "trichotomy",
        cases,
        |rng, p| (gen::family(rng, p), gen::qafun(rng, p, Shape::Increasing), gen::battery(rng, p)),
        |(s, h, tests): &(Vec<EpSet>, QaFun, Vec<EpSet>)| counted(trichotomy(s, h, tests)),
    );
    r.check(
        "recursive-slalom",
        cases,
        |rng, p| gen::functions(rng, p, Shape::Increasing),
        |ys: &Vec<QaFun>| counted(recursive(ys)),
    );
}

fn built_slalom(s: &[EpSet]) -> Check {
    let h = build_slalom(s).map_err(|e| e.to_string())?;
    ensure(frechet_after(s, &h) == Ok(true), || format!("built slalom {h} is not Fréchet"))?;
    ensure(s.iter().all(|a| oracle::compressed_cofinite(a, &h)), || {
        format!("brute force finds a missed window for {h}")
    })
}

fn trichotomy(s: &[EpSet], h: &QaFun, tests: &[EpSet]) -> std::result::Result<&'static str, String> {
    let v = classify_trichotomy(s, h, tests).map_err(|e| e.to_string())?;
    ensure(v.verify(tests), || format!("certificate of {:?} does not verify", v.tag))?;
    let frechet = s.iter().all(|a| oracle::compressed_cofinite(a, h));
    ensure((v.tag == TrichotomyTag::Frechet) == frechet, || {
        format!("tag {:?} but Fréchet by brute force is {frechet}", v.tag)
    })?;
    if v.tag == TrichotomyTag::FullLike {
        ensure(
            tests.iter().all(|t| v.compressed.iter().any(|a| oracle::set_almost_subset(a, t))),
            || "full-like verdict without covering generators".into(),
        )?;
    }
    Ok(match v.tag {
        TrichotomyTag::Frechet => "frechet",
        TrichotomyTag::UltraLike => "ultra_like",
        TrichotomyTag::FullLike => "full_like",
        TrichotomyTag::Unclassified => "unclassified",
    })
}

fn recursive(ys: &[QaFun]) -> std::result::Result<&'static str, String> {
    let h = recursive_slalom_stream(ys).map_err(|e| e.to_string())?;
    match h.slalom_holds(64) {
        Ok(true) => Ok("depth_64"),
        Ok(false) => Err("recursive slalom misses a window below depth 64".into()),
        Err(LabError::Overflow(_)) => match h.slalom_holds(32) {
            Ok(true) => Ok("depth_32"),
            other => Err(format!("recursive slalom at depth 32: {other:?}")),
        },
        Err(e) => Err(e.to_string()),
    }
}

// ---------------------------------------------------------------- splitting

fn split1(r: &mut Runner<'_>) {
    let cases = r.params.cases;
    r.check(
        "splitter",
        cases,
        gen::family,
        |s: &Vec<EpSet>| {
            outcome((|| {
                let h = build_slalom(s).map_err(|e| e.to_string())?;
                let c = splitter_from_slalom(&h).map_err(|e| e.to_string())?;
                ensure(split_witness_check(s, &c) == Ok(true), || format!("{c} does not split"))?;
                for a in s {
                    let settled = a.start().max(c.start());
                    let l = a.period().lcm(&c.period());
                    ensure(
                        oracle::is_infinite(|n| a.contains(n) && c.contains(n), settled, l)
                            && oracle::is_infinite(|n| a.contains(n) && !c.contains(n), settled, l),
                        || format!("brute force: {c} does not split {a}"),
                    )?;
                }
                let battery = TestBattery::new([c.clone()]).map_err(|e| e.to_string())?;
                ensure(reaping_relative(s, &battery) == Ok(false), || "split family reported reaping".into())
            })())
        },
    );
}

fn rothsplit(r: &mut Runner<'_>) {
    let cases = r.params.cases;
    let depth = r.params.depth.max(8);
    r.check(
        "greedy-pair",
        cases,
        gen::family,
        move |ys: &Vec<EpSet>| outcome(greedy_pair(ys, depth)),
    );
}

fn greedy_pair(ys: &[EpSet], depth: u64) -> Check {
    let g = rothberger_guesser(ys).map_err(|e| e.to_string())?;
    ensure(ys.iter().all(|y| g.guesses(y)), || "guesser misses a member".into())?;
    let (i, j) = ij_from_guesser(&g);
    let depths = [depth / 4, depth / 2, depth];
    let mut prev: Option<(Vec<u64>, Vec<u64>)> = None;
    let mut counts: Vec<Vec<(usize, usize)>> = vec![Vec::new(); ys.len()];
    for &d in &depths {
        let ti = i.truncate(d).map_err(|e| e.to_string())?;
        let tj = j.truncate(d).map_err(|e| e.to_string())?;
        ensure(ti.iter().all(|x| tj.binary_search(x).is_err()), || format!("I and J meet below {d}"))?;
        if let Some((pi, pj)) = &prev {
            ensure(ti.starts_with(pi) && tj.starts_with(pj), || format!("truncation at {d} does not extend"))?;
        }
        for (k, y) in ys.iter().enumerate() {
            let ci = ti.iter().filter(|&&x| y.contains(x)).count();
            let cj = tj.iter().filter(|&&x| y.contains(x)).count();
            counts[k].push((ci, cj));
        }
        prev = Some((ti, tj));
    }
    for (k, c) in counts.iter().enumerate() {
        ensure(
            c.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 < w[1].1),
            || format!("|I∩y|, |J∩y| not growing for {}: {c:?}", ys[k]),
        )?;
    }
    Ok(())
}

fn split4(r: &mut Runner<'_>) {
    let cases = r.params.cases;
    r.check(
        "bounding-reduction",
        cases,
        |rng, p| {
            let ys = gen::functions(rng, p, Shape::Nondecreasing);
            let h = gen::qafun(rng, p, Shape::Increasing);
            let g = match rng.random_range(0..5) {
                // a bound above every member
                0 | 1 => QaFun::pointwise_max(&ys)
                    .expect("nonempty")
                    .add(&gen::qafun(rng, p, Shape::Nondecreasing)),
                2 | 3 => gen::qafun(rng, p, Shape::Nondecreasing),
                // a bound that some member clears everywhere
                _ => {
                    let g = gen::qafun(rng, p, Shape::Nondecreasing);
                    let mut ys = ys.clone();
                    ys.push(g.plus(1));
                    return (ys, g, h);
                }
            };
            (ys, g, h)
        },
        |(ys, g, h): &(Vec<QaFun>, QaFun, QaFun)| counted(bounding(ys, g, h)),
    );
}

fn bounding(ys: &[QaFun], g: &QaFun, h: &QaFun) -> std::result::Result<&'static str, String> {
    let valid = ys.iter().all(|f| oracle::le_infinite(f, g, false));
    match bounding_reduction(ys, g, h) {
        Err(LabError::WitnessInvalid(_)) if !valid => Ok("witness_invalid"),
        Err(e) => Err(format!("unexpected error: {e}")),
        Ok(_) if !valid => Err("accepted an instance with finite [f ≤ g]".into()),
        Ok(report) => {
            ensure(report.verifies(), || "reduction does not verify".into())?;
            ensure(report.reverify(), || "report does not replay".into())?;
            let w = 4 * (h.start() + g.start() + h.period() * g.period()) + 64;
            for row in &report.rows {
                let f = &row.f;
                ensure(row.subset, || format!("[f≤g]/h ⊄ [f≤g̃] for f = {f}"))?;
                first_mismatch("[f ≤ g]", &row.le_bound, w, |n| f.eval(n) <= g.eval(n))?;
                first_mismatch("[f ≤ g̃]", &row.le_shifted, w, |n| f.eval(n) <= g.eval(h.eval(n + 1)))?;
                for n in 0..w {
                    let hit = (h.eval(n)..h.eval(n + 1)).any(|k| f.eval(k) <= g.eval(k));
                    ensure(!hit || f.eval(n) <= g.eval(h.eval(n + 1)), || {
                        format!("chain breaks at n={n} for f = {f}")
                    })?;
                }
            }
            Ok("verified")
        }
    }
}

// ---------------------------------------------------------------- maxfin

fn maxfin(r: &mut Runner<'_>) {
    let cases = r.params.cases;
    r.check(
        "escape-and-closure",
        cases,
        |rng, p| gen::functions(rng, p, Shape::Arbitrary),
        |ys: &Vec<QaFun>| outcome(closure_checks(ys)),
    );
    r.check(
        "subbase",
        cases,
        |rng, p| {
            let ys = gen::functions(rng, p, Shape::Arbitrary);
            let g = if rng.random_bool(0.75) {
                QaFun::pointwise_max(&ys)
                    .expect("nonempty")
                    .add(&gen::qafun(rng, p, Shape::Arbitrary))
                    .plus(1)
            } else {
                gen::qafun(rng, p, Shape::Arbitrary)
            };
            (ys, g)
        },
        |(ys, g): &(Vec<QaFun>, QaFun)| counted(subbase(ys, g)),
    );
}

fn same_members(a: &[QaFun], b: &[QaFun]) -> bool {
    a.iter().all(|f| b.contains(f)) && b.iter().all(|f| a.contains(f))
}

fn closure_checks(ys: &[QaFun]) -> Check {
    let closure = maxfin_closure(ys).map_err(|e| e.to_string())?;
    let k = ys.len();
    let w = 4 * ys.iter().map(|f| f.start() + f.period()).max().unwrap_or(0) + 64;
    // every nonempty subset's maximum is in the closure, and nothing else is
    for mask in 1u32..(1 << k) {
        let brute = |n: u64| (0..k).filter(|i| mask >> i & 1 == 1).map(|i| ys[i].eval(n)).max().unwrap_or(0);
        ensure(closure.iter().any(|m| (0..w).all(|n| m.eval(n) == brute(n))), || {
            format!("max of subset {mask:b} missing from the closure")
        })?;
    }
    ensure(closure.len() < 1 << k, || "closure larger than the subset count".into())?;
    let e = escape_function(ys).map_err(|e| e.to_string())?;
    for m in &closure {
        ensure(!oracle::le_star(&e, m), || format!("escape {e} ≤* {m}"))?;
        ensure((0..w).all(|n| e.eval(n) > m.eval(n)), || format!("escape {e} does not beat {m}"))?;
    }
    let again = maxfin_closure(&closure).map_err(|e| e.to_string())?;
    ensure(same_members(&again, &closure), || "maxfin is not idempotent".into())?;
    let (a, b) = ys.split_at(k / 2);
    if !a.is_empty() {
        let ca = maxfin_closure(a).map_err(|e| e.to_string())?;
        let cb = maxfin_closure(b).map_err(|e| e.to_string())?;
        ensure(ca.iter().chain(&cb).all(|f| closure.contains(f)), || {
            "maxfin(A) ∪ maxfin(B) ⊄ maxfin(A ∪ B)".into()
        })?;
    }
    // a max-closed family split in two: the union identity is exact
    let (c1, c2) = closure.split_at(closure.len() / 2);
    if !c1.is_empty() {
        let mut union = maxfin_closure(c1).map_err(|e| e.to_string())?;
        union.extend(maxfin_closure(c2).map_err(|e| e.to_string())?);
        ensure(same_members(&union, &closure), || "directed union identity fails".into())?;
    }
    Ok(())
}

fn subbase(ys: &[QaFun], g: &QaFun) -> std::result::Result<&'static str, String> {
    let closure = maxfin_closure(ys).map_err(|e| e.to_string())?;
    let holds = closure.iter().all(|m| oracle::le_infinite(m, g, true));
    match filter_subbase_from_bound(ys, g) {
        Ok(spec) => {
            ensure(holds, || "accepted a bound below some max".into())?;
            ensure(spec.subbase_check(), || format!("{:?} is not a subbase", spec.generators()))?;
            ensure(spec.claim() == Some(KindClaim::FilterSubbase) && spec.claim_holds(), || {
                "claim not recorded".into()
            })?;
            let (t, l) = ys.iter().fold((0, 1), |(t, l), f| {
                let (tf, lf) = oracle::settled(f, g);
                (t.max(tf), l.lcm(&lf))
            });
            ensure((t..t + l).any(|n| ys.iter().all(|f| f.eval(n) < g.eval(n))), || {
                "brute force: the [f < g] have finite intersection".into()
            })?;
            Ok("precondition_holds")
        }
        Err(LabError::WitnessInvalid(_)) if !holds => Ok("precondition_fails"),
        Err(e) => Err(e.to_string()),
    }
}

// ---------------------------------------------------------------- families

fn families(r: &mut Runner<'_>) {
    let cases = r.params.cases;
    r.check(
        "semifilters",
        cases,
        |rng, p| (gen::family(rng, p), gen::battery(rng, p), gen::epset(rng, p, true)),
        |(s, tests, b): &(Vec<EpSet>, Vec<EpSet>, EpSet)| outcome(semifilter_checks(s, tests, b)),
    );
}

fn semifilter_checks(s: &[EpSet], tests: &[EpSet], b: &EpSet) -> Check {
    let spec = FamilySpec::new(s.to_vec()).map_err(|e| e.to_string())?;
    let g = spec.generators();
    let member = |x: &EpSet| g.iter().any(|a| oracle::set_almost_subset(a, x));
    ensure(spec.gen_membership(b) == Ok(member(b)), || format!("membership of {b}"))?;
    for t in tests {
        if member(b) {
            ensure(spec.gen_membership(&b.union(t)) == Ok(true), || "membership is not upward closed".into())?;
        }
    }
    let meet = g.iter().skip(1).fold(g[0].clone(), |acc, a| acc.intersect(a));
    let sub = oracle::set_infinite(&meet);
    ensure(spec.subbase_check() == sub, || "subbase_check disagrees with brute force".into())?;
    ensure(spec.psi_k(g.len()).is_ok() == sub, || "psi_k disagrees with subbase_check".into())?;
    let fb = g.iter().all(|x| {
        g.iter().all(|y| {
            let xy = x.intersect(y);
            g.iter().any(|c| oracle::set_almost_subset(c, &xy))
        })
    });
    ensure(spec.is_filter_base() == fb, || "is_filter_base disagrees with brute force".into())?;
    let bc = b.complement();
    let dual = !oracle::set_infinite(&bc) || !member(&bc);
    ensure(spec.dual_membership(b) == Ok(dual), || format!("dual membership of {b}"))?;
    let battery = TestBattery::new(tests.to_vec()).map_err(|e| e.to_string())?;
    let reaping = reaping_relative(g, &battery).map_err(|e| e.to_string())?;
    for t in tests {
        if split_witness_check(g, t) == Ok(true) {
            ensure(!reaping, || "a splitting test yet reaping".into())?;
        }
    }
    if spec.ultra_relative(&battery) {
        ensure(reaping, || "ultra but not reaping".into())?;
    }
    Ok(())
}

// ---------------------------------------------------------------- covers

fn glue(r: &mut Runner<'_>) {
    let cases = r.params.cases;
    r.check(
        "glue-is-compression",
        cases,
        |rng, p| {
            let large = rng.random_bool(0.7);
            (gen::cover(rng, p, large), gen::qafun(rng, p, Shape::Increasing))
        },
        |(c, h): &(CoverTrace, QaFun)| outcome(glue_checks(c, h)),
    );
    r.check(
        "gamma-glueable",
        cases,
        |rng, p| (gen::cover(rng, p, true), gen::qafun(rng, p, Shape::Increasing)),
        |(c, h): &(CoverTrace, QaFun)| counted(glueable_checks(c, h)),
    );
}

fn glue_checks(c: &CoverTrace, h: &QaFun) -> Check {
    let glued = glue_cover(c, h).map_err(|e| e.to_string())?;
    for (p, q) in c.points().iter().zip(glued.points()) {
        let t = &p.trace;
        if t.is_infinite() {
            ensure(compress_set(t, h).as_ref() == Ok(&q.trace), || format!("glued trace of {} differs", p.label))?;
        }
        let w = 2 * (t.start() + h.start() + h.period() * t.period()) + 64;
        first_mismatch("glued trace", &q.trace, w, |n| oracle::meets(t, h, n))?;
    }
    let tags = classify_cover(c).map_err(|e| e.to_string())?;
    let traces = c.traces();
    let meet = traces.iter().skip(1).fold(traces[0].clone(), |acc, t| acc.intersect(t));
    ensure(tags.gamma == traces.iter().all(oracle::set_cofinite), || "gamma tag".into())?;
    ensure(tags.large == traces.iter().all(oracle::set_infinite), || "large tag".into())?;
    ensure(tags.omega_rel == oracle::set_infinite(&meet), || "omega tag".into())?;
    if tags.large {
        let s = splitter_from_slalom(&build_slalom(&traces).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        ensure(split_cover(c, &s) == Ok(true), || "constructed splitter does not split the cover".into())?;
    }
    Ok(())
}

fn partition_holds(c: &CoverTrace, b: &QaFun, every_piece: bool) -> bool {
    c.points().iter().all(|p| {
        if every_piece {
            let w = 2 * (p.trace.start() + b.start() + b.period() * p.trace.period()) + 64;
            (0..w).all(|n| oracle::meets(&p.trace, b, n))
        } else {
            oracle::compressed_cofinite(&p.trace, b)
        }
    })
}

fn glueable_checks(c: &CoverTrace, h: &QaFun) -> std::result::Result<&'static str, String> {
    let part = gamma_glueable(c).map_err(|e| e.to_string())?;
    ensure(part.verify(c), || "built partition does not verify".into())?;
    let b = part.boundaries();
    ensure(b.eval(0) == 0 && b.is_increasing(), || format!("bad boundaries {b}"))?;
    ensure(partition_holds(c, &b, part.mode == GlueCase::Case1), || "brute force rejects the partition".into())?;
    let covering = c
        .traces()
        .iter()
        .map(|t| compress_set(t, h))
        .collect::<crate::Result<Vec<_>>>()
        .map_err(|e| e.to_string())?;
    let meet = covering.iter().skip(1).fold(covering[0].clone(), |acc, t| acc.intersect(t));
    match gamma_glueable_with(c, Some(h)) {
        Ok(part) => {
            ensure(part.verify(c), || format!("partition for forced {h} does not verify"))?;
            let b = part.boundaries();
            ensure(partition_holds(c, &b, part.mode == GlueCase::Case1), || {
                "brute force rejects the forced partition".into()
            })?;
            Ok(match part.mode {
                GlueCase::Case1 => "forced_case1",
                GlueCase::Case2 => "forced_case2",
            })
        }
        Err(LabError::Unglueable(_)) => {
            ensure(!oracle::set_infinite(&meet), || format!("{h} declared unglueable"))?;
            Ok("forced_unglueable")
        }
        Err(e) => Err(e.to_string()),
    }
}

fn selection(r: &mut Runner<'_>) {
    let cases = r.params.cases;
    r.check(
        "ufin-gamma",
        cases,
        |rng, p| gen::cover(rng, p, true),
        |c: &CoverTrace| {
            outcome((|| {
                let h = build_slalom(&c.traces()).map_err(|e| e.to_string())?;
                let seq = CoverSequence::constant(c.clone());
                let v = evaluate_selection(&seq, &PickSchedule::Windows(h), SelectionMode::Ufin)
                    .map_err(|e| e.to_string())?;
                ensure(v.tags.gamma && !v.fails, || format!("Ufin verdict {:?}", v.tags))
            })())
        },
    );
    r.check(
        "rounds",
        cases,
        |rng, p| {
            let large = rng.random_bool(0.7);
            let seq = gen::sequence(rng, p, large);
            let mode = rng.random_range(0..3u64);
            let f = gen::qafun(rng, p, if mode == 0 { Shape::Arbitrary } else { Shape::Increasing });
            (seq, f, mode)
        },
        |(seq, f, mode): &(CoverSequence, QaFun, u64)| outcome(selection_rounds(seq, f, *mode)),
    );
}

fn selection_rounds(seq: &CoverSequence, f: &QaFun, mode: u64) -> Check {
    let (mode, schedule) = match mode {
        0 => (SelectionMode::S1, PickSchedule::Single(f.clone())),
        1 => (SelectionMode::Sfin, PickSchedule::Windows(f.clone())),
        _ => (SelectionMode::Ufin, PickSchedule::Windows(f.clone())),
    };
    let v = evaluate_selection(seq, &schedule, mode).map_err(|e| e.to_string())?;
    ensure(v.tags_consistent(), || "tags do not match hit sets".into())?;
    let covers = seq.covers();
    let len = covers.len() as u64;
    let w = 4 * (f.start() + f.period() * 8 * len) + 128;
    for (i, hit) in v.hits.iter().enumerate() {
        first_mismatch("hit set", &hit.trace, w, |k| {
            let t = &covers[(k % len) as usize].points()[i].trace;
            match mode {
                SelectionMode::S1 => t.contains(f.eval(k)),
                _ => (f.eval(k)..f.eval(k + 1)).any(|x| t.contains(x)),
            }
        })?;
    }
    let again = evaluate_selection(&seq.rotated(covers.len()), &schedule, mode).map_err(|e| e.to_string())?;
    ensure(again == v, || "verdict changes under a full rotation".into())
}

// ---------------------------------------------------------------- round trips

fn roundtrip(r: &mut Runner<'_>) {
    let cases = r.params.cases;
    r.check(
        "text-and-json",
        cases,
        |rng, p| Opaque(rng.random::<u64>() ^ p.seed),
        |s: &Opaque<u64>| outcome(round_trips(s.0)),
    );
    r.check(
        "enumeration",
        cases,
        |rng, p| (gen::epset(rng, p, true), gen::qafun(rng, p, Shape::Increasing)),
        |(a, f): &(EpSet, QaFun)| {
            outcome((|| {
                let e = a.enumeration().map_err(|e| e.to_string())?;
                ensure(e.is_increasing(), || format!("enumeration of {a} not increasing"))?;
                ensure(e.image_set().as_ref() == Ok(a), || format!("image_set(enumeration({a}))"))?;
                let img = f.image_set().map_err(|e| e.to_string())?;
                ensure(img.enumeration().as_ref() == Ok(f), || format!("enumeration(image_set({f}))"))
            })())
        },
    );
}

fn text_trip<T>(v: &T) -> Check
where
    T: std::fmt::Display + std::str::FromStr + PartialEq,
    T::Err: std::fmt::Display,
{
    let s = v.to_string();
    match s.parse::<T>() {
        Ok(back) if back == *v => Ok(()),
        Ok(back) => Err(format!("{s} parses back as {back}")),
        Err(e) => Err(format!("{s} does not parse: {e}")),
    }
}

fn json_trip<T>(v: &T) -> Check
where
    T: serde::Serialize + serde::de::DeserializeOwned + PartialEq + std::fmt::Debug,
{
    let s = serde_json::to_string(v).map_err(|e| e.to_string())?;
    let back: T = serde_json::from_str(&s).map_err(|e| format!("{s}: {e}"))?;
    ensure(back == *v, || format!("json round trip changes {v:?}"))
}

fn round_trips(seed: u64) -> Check {
    let p = super::GenParams::default();
    let rng = &mut gen::case_rng(seed, 0);
    let infinite = rng.random_bool(0.8);
    let a = gen::epset(rng, &p, infinite);
    let shape = any_shape(rng);
    let f = gen::qafun(rng, &p, shape);
    let st = gen::strands(rng, &p);
    let g = gen::guesser(rng, &p);
    text_trip(&a)?;
    json_trip(&a)?;
    text_trip(&f)?;
    json_trip(&f)?;
    text_trip(&st)?;
    json_trip(&st)?;
    text_trip(&g)?;
    json_trip(&g)?;

    let source = match rng.random_range(0..3) {
        0 => baire_to_roth(&gen::qafun(rng, &p, Shape::Arbitrary)),
        1 => LazySet::new(LazySource::Periodic(gen::epset(rng, &p, true))),
        _ => LazySet::new(LazySource::Greedy {
            guesser: g.clone(),
            side: if rng.random_bool(0.5) { GreedySide::I } else { GreedySide::J },
        }),
    };
    let t = source.truncation(rng.random_range(0..120)).map_err(|e| e.to_string())?;
    text_trip(&t)?;
    json_trip(&t)?;
    ensure(t.replays(), || format!("{t} does not replay"))?;

    let claim = [None, Some(KindClaim::SemifilterBase), Some(KindClaim::FilterBase), Some(KindClaim::FilterSubbase)]
        [rng.random_range(0..4)];
    let spec = FamilySpec::new(gen::family(rng, &p)).map_err(|e| e.to_string())?.with_claim(claim);
    let battery = TestBattery::new(gen::battery(rng, &p)).map_err(|e| e.to_string())?;
    let file = FamilyFile {
        tests: battery.tests().to_vec(),
        ..FamilyFile::from(&spec)
    };
    let back = parse_family_file(&file.render()).map_err(|e| e.to_string())?;
    ensure(back.family().as_ref() == Ok(&spec) && back.battery() == battery, || {
        format!("family file round trip changes\n{}", file.render())
    })?;
    json_trip(&spec)?;
    json_trip(&battery)?;

    let large = rng.random_bool(0.5);
    let seq = gen::sequence(rng, &p, large);
    let back = parse_sequence_file(&seq.to_string()).map_err(|e| e.to_string())?;
    ensure(back == seq, || format!("sequence file round trip changes\n{seq}"))?;
    let cover = seq.covers()[0].clone();
    let back = crate::text::parse_cover_file(&cover.to_string()).map_err(|e| e.to_string())?;
    ensure(back == cover, || format!("cover file round trip changes\n{cover}"))?;
    json_trip(&seq)?;
    json_trip(&cover)?;

    // derived values travel as JSON
    let traces = cover.traces();
    json_trip(&classify_cover(&cover).map_err(|e| e.to_string())?)?;
    if cover.traces().iter().all(EpSet::is_infinite) {
        json_trip(&gamma_glueable(&cover).map_err(|e| e.to_string())?)?;
        let h = build_slalom(&traces).map_err(|e| e.to_string())?;
        json_trip(&classify_trichotomy(&traces, &h, battery.tests()).map_err(|e| e.to_string())?)?;
        let v = evaluate_selection(&CoverSequence::constant(cover.clone()), &PickSchedule::Windows(h), SelectionMode::Ufin)
            .map_err(|e| e.to_string())?;
        json_trip(&v)?;
    }
    let ys = gen::functions(rng, &p, Shape::Nondecreasing);
    let bound = QaFun::pointwise_max(&ys).map_err(|e| e.to_string())?;
    let h = gen::qafun(rng, &p, Shape::Increasing);
    json_trip(&bounding_reduction(&ys, &bound, &h).map_err(|e| e.to_string())?)?;
    json_trip(&p)?;
    Ok(())
}
