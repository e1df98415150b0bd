use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value as Json};

use omega_lab_core::harness::{self, gen, GenParams};
use omega_lab_core::text::{self, Value};
use omega_lab_core::{
    bounding_reduction, build_slalom, classify_cover, classify_trichotomy, compress_family,
    escape_function, evaluate_selection, filter_subbase_from_bound, gamma_glueable_with, glue_cover,
    ij_from_guesser, maxfin_closure, reaping_relative, rothberger_guesser, split_cover, split_witness_check,
    splitter_from_slalom, CoverSequence, CoverTrace, EpSet, FamilySpec, LabError, PickSchedule, QaFun,
    SelectionMode, TestBattery,
};

#[derive(Parser)]
#[command(name = "omega-lab", version, about = "Exact checks for filters, slaloms and covers on ℕ")]
struct Cli {
    /// Seed for generated values and suites.
    #[arg(long, global = true, env = "OMEGA_LAB_SEED", default_value_t = 42)]
    seed: u64,
    /// Number of cases per property (suites) or values (gen).
    #[arg(long, global = true)]
    cases: Option<u64>,
    /// Truncation depth for lazy sets.
    #[arg(long, global = true)]
    depth: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write output to FILE instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a value, print its canonical form and evaluate it.
    Eval {
        /// An ep(...), qa(...), strands[...], guesser[...] or trunc(...) value.
        value: String,
        /// Points to evaluate at (membership for sets, values for functions).
        #[arg(long = "at", value_delimiter = ',')]
        at: Vec<u64>,
    },
    /// Compress a family by an increasing h.
    Compress {
        family: PathBuf,
        #[arg(long)]
        h: String,
        /// Family file whose [tests] section is the battery.
        #[arg(long)]
        tests: Option<PathBuf>,
    },
    /// Structural checks of a family against its battery.
    Classify {
        family: PathBuf,
        #[arg(long)]
        tests: Option<PathBuf>,
    },
    /// Build a witness and verify it.
    #[command(subcommand)]
    Witness(Witness),
    /// Cover operations.
    #[command(subcommand)]
    Cover(CoverCmd),
    /// Run a property suite (or `all`).
    Suite { name: String },
    /// Print random values from the seeded generators.
    Gen {
        #[arg(value_enum)]
        kind: GenKind,
    },
}

#[derive(Subcommand)]
enum Witness {
    /// Splitter from the built slalom of a family.
    Split1 { family: PathBuf },
    /// Disjoint pair (I, J) from the guesser of a family, truncated at --depth.
    Rothsplit { family: PathBuf },
    /// Bound transfer through h for a [functions] file.
    Split4 {
        functions: PathBuf,
        #[arg(long)]
        g: String,
        #[arg(long)]
        h: String,
    },
    /// Filter subbase {[f < g]} for a [functions] file.
    Subbase {
        functions: PathBuf,
        #[arg(long)]
        g: String,
    },
    /// Function escaping the maxfin closure of a [functions] file.
    Escape { functions: PathBuf },
}

#[derive(Subcommand)]
enum CoverCmd {
    Classify {
        cover: PathBuf,
    },
    Glue {
        cover: PathBuf,
        #[arg(long)]
        h: String,
    },
    /// Whether a set splits the cover (default: splitter of the built slalom).
    Split {
        cover: PathBuf,
        #[arg(long)]
        set: Option<String>,
    },
    Glueable {
        cover: PathBuf,
        #[arg(long = "force-h")]
        force_h: Option<String>,
    },
    /// Play a selection game against a cyclic cover sequence.
    Game {
        sequence: PathBuf,
        #[arg(long, value_parser = parse_mode)]
        mode: SelectionMode,
        #[arg(long)]
        schedule: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Epset,
    Qafun,
    Family,
    Cover,
    Sequence,
}

fn parse_mode(s: &str) -> Result<SelectionMode, String> {
    SelectionMode::parse(s).ok_or_else(|| format!("unknown mode `{s}` (s1, sfin, ufin)"))
}

/// What a command produced: its rendering, and whether the checked
/// property held.
struct Report {
    text: String,
    json: Json,
    ok: bool,
}

impl Report {
    fn new(text: String, json: Json, ok: bool) -> Self {
        Self { text, json, ok }
    }
}

/// Bad input or I/O trouble; exits with status 2.
#[derive(Debug)]
struct Failure(String);

impl From<LabError> for Failure {
    fn from(e: LabError) -> Self {
        Failure(e.to_string())
    }
}

type Res<T> = Result<T, Failure>;

fn read(path: &Path) -> Res<String> {
    fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn in_file<T>(path: &Path, r: Result<T, omega_lab_core::ParseError>) -> Res<T> {
    r.map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn arg<T: std::str::FromStr<Err = omega_lab_core::ParseError>>(name: &str, s: &str) -> Res<T> {
    s.parse().map_err(|e| Failure(format!("--{name}: {e}")))
}

fn family_file(path: &Path) -> Res<text::FamilyFile> {
    in_file(path, text::parse_family_file(&read(path)?))
}

fn family(path: &Path) -> Res<FamilySpec> {
    Ok(family_file(path)?.family()?)
}

/// Battery from `--tests`, else from the family file's own [tests].
fn battery(family_path: &Path, tests: Option<&Path>) -> Res<TestBattery> {
    Ok(family_file(tests.unwrap_or(family_path))?.battery())
}

fn functions(path: &Path) -> Res<Vec<QaFun>> {
    let fs = in_file(path, text::parse_function_file(&read(path)?))?;
    if fs.is_empty() {
        return Err(Failure(format!("{}: no functions", path.display())));
    }
    Ok(fs)
}

fn cover(path: &Path) -> Res<CoverTrace> {
    in_file(path, text::parse_cover_file(&read(path)?))
}

fn lines<T: std::fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(|x| format!("  {x}\n")).collect()
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "verified"
    } else {
        "NOT verified"
    }
}

fn eval(value: &str, at: &[u64], depth: u64) -> Res<Report> {
    let v: Value = arg("value", value)?;
    Ok(match v {
        Value::Set(a) => {
            let members: Vec<bool> = at.iter().map(|&n| a.contains(n)).collect();
            let below = a.elements_below(depth.min(200));
            let mut text = format!(
                "{a}\ninfinite: {}\ncofinite: {}\nelements below {}: {below:?}\n",
                a.is_infinite(),
                a.is_cofinite(),
                depth.min(200)
            );
            for (n, m) in at.iter().zip(&members) {
                text.push_str(&format!("contains({n}): {m}\n"));
            }
            let json = json!({"value": a, "infinite": a.is_infinite(), "cofinite": a.is_cofinite(),
                "at": at, "contains": members});
            Report::new(text, json, true)
        }
        Value::Fun(f) => {
            let points: Vec<u64> = if at.is_empty() { (0..10).collect() } else { at.to_vec() };
            let values: Vec<u64> = points.iter().map(|&n| f.eval(n)).collect();
            let (num, den) = f.slope();
            let mut text = format!(
                "{f}\nslope: {num}/{den}\nincreasing: {}\nnondecreasing: {}\n",
                f.is_increasing(),
                f.is_nondecreasing()
            );
            for (n, x) in points.iter().zip(&values) {
                text.push_str(&format!("f({n}) = {x}\n"));
            }
            let json = json!({"value": f, "increasing": f.is_increasing(),
                "nondecreasing": f.is_nondecreasing(), "at": points, "values": values});
            Report::new(text, json, true)
        }
        Value::Strands(g) => {
            let points: Vec<u64> = if at.is_empty() { (0..10).collect() } else { at.to_vec() };
            let values: Vec<u64> = points.iter().map(|&n| g.eval(n)).collect();
            let text = format!("{g}\nvalues at {points:?}: {values:?}\n");
            Report::new(text, json!({"value": g, "at": points, "values": values}), true)
        }
        Value::Guesser(g) => {
            let points: Vec<u64> = if at.is_empty() { (1..4).collect() } else { at.to_vec() };
            let guesses: Vec<Vec<u64>> = points.iter().map(|&n| g.guess(n)).collect();
            let mut text = format!("{g}\n");
            for (n, x) in points.iter().zip(&guesses) {
                text.push_str(&format!("g({n}) = {x:?}\n"));
            }
            Report::new(text, json!({"value": g, "at": points, "guesses": guesses}), true)
        }
        Value::Truncation(t) => {
            let ok = t.replays();
            let text = format!("{t}\nreplays: {ok}\n");
            Report::new(text, json!({"value": t, "replays": ok}), ok)
        }
    })
}

fn compress(family_path: &Path, h: &str, tests: Option<&Path>) -> Res<Report> {
    let spec = family(family_path)?;
    let h: QaFun = arg("h", h)?;
    let battery = battery(family_path, tests)?;
    let compressed = compress_family(spec.generators(), &h)?;
    let v = classify_trichotomy(spec.generators(), &h, battery.tests())?;
    let ok = v.verify(battery.tests());
    let text = format!(
        "h: {h}\ncompressed:\n{}verdict: {:?}\ncertificate: {:?}\n{}\n",
        lines(&compressed),
        v.tag,
        v.certificate,
        verdict(ok)
    );
    Ok(Report::new(text, json!({"h": h, "compressed": compressed, "verdict": v, "verified": ok}), ok))
}

fn classify(family_path: &Path, tests: Option<&Path>) -> Res<Report> {
    let spec = family(family_path)?;
    let battery = battery(family_path, tests)?;
    let g = spec.generators();
    let slalom = build_slalom(g)?;
    let facts = json!({
        "generators": g.len(),
        "claim": spec.claim().map(|c| c.as_str()),
        "claim_holds": spec.claim_holds(),
        "subbase": spec.subbase_check(),
        "filter_base": spec.is_filter_base(),
        "ultra_relative": spec.ultra_relative(&battery),
        "base_for_roth_relative": spec.base_for_roth_relative(&battery),
        "reaping_relative": reaping_relative(g, &battery)?,
        "slalom": slalom,
    });
    let mut text = String::new();
    if let Json::Object(map) = &facts {
        for (k, v) in map.iter().filter(|(k, _)| *k != "slalom") {
            let v = match v {
                Json::Null => "none".to_string(),
                Json::String(s) => s.clone(),
                v => v.to_string(),
            };
            text.push_str(&format!("{k}: {v}\n"));
        }
    }
    text.push_str(&format!("slalom: {slalom}\n"));
    Ok(Report::new(text, facts, spec.claim_holds()))
}

fn witness(w: &Witness, depth: u64) -> Res<Report> {
    match w {
        Witness::Split1 { family: path } => {
            let spec = family(path)?;
            let h = build_slalom(spec.generators())?;
            let c = splitter_from_slalom(&h)?;
            let ok = split_witness_check(spec.generators(), &c)?;
            let text = format!("slalom: {h}\nsplitter: {c}\n{}\n", verdict(ok));
            Ok(Report::new(text, json!({"slalom": h, "splitter": c, "verified": ok}), ok))
        }
        Witness::Rothsplit { family: path } => {
            let spec = family(path)?;
            let g = rothberger_guesser(spec.generators())?;
            let (i, j) = ij_from_guesser(&g);
            let ti = i.truncation(depth)?;
            let tj = j.truncation(depth)?;
            let disjoint = ti.elements.iter().all(|x| tj.elements.binary_search(x).is_err());
            let counts: Vec<(usize, usize)> = spec
                .generators()
                .iter()
                .map(|y| {
                    let c = |xs: &[u64]| xs.iter().filter(|&&x| y.contains(x)).count();
                    (c(&ti.elements), c(&tj.elements))
                })
                .collect();
            let ok = disjoint && counts.iter().all(|&(a, b)| a > 0 && b > 0);
            let mut text = format!("guesser: {g}\nI: {ti}\nJ: {tj}\ndisjoint: {disjoint}\n");
            for (y, (a, b)) in spec.generators().iter().zip(&counts) {
                text.push_str(&format!("|I∩y| = {a}, |J∩y| = {b} for {y}\n"));
            }
            text.push_str(verdict(ok));
            text.push('\n');
            let json = json!({"guesser": g, "i": ti, "j": tj, "disjoint": disjoint, "counts": counts, "verified": ok});
            Ok(Report::new(text, json, ok))
        }
        Witness::Split4 { functions: path, g, h } => {
            let ys = functions(path)?;
            let g: QaFun = arg("g", g)?;
            let h: QaFun = arg("h", h)?;
            let r = bounding_reduction(&ys, &g, &h)?;
            let ok = r.verifies();
            let mut text = format!("g: {}\nh: {}\ng~: {}\n", r.g, r.h, r.gtilde);
            for row in &r.rows {
                text.push_str(&format!(
                    "f = {}\n  [f<=g] = {}\n  [f<=g]/h = {}\n  [f<=g~] = {}\n  almost subset: {}, subset: {}\n",
                    row.f, row.le_bound, row.compressed, row.le_shifted, row.almost_subset, row.subset
                ));
            }
            text.push_str(verdict(ok));
            text.push('\n');
            Ok(Report::new(text, json!({"report": r, "verified": ok}), ok))
        }
        Witness::Subbase { functions: path, g } => {
            let ys = functions(path)?;
            let g: QaFun = arg("g", g)?;
            let spec = filter_subbase_from_bound(&ys, &g)?;
            let ok = spec.subbase_check();
            let file = text::FamilyFile::from(&spec);
            let text = format!("{}{}\n", file.render(), verdict(ok));
            Ok(Report::new(text, json!({"family": spec, "verified": ok}), ok))
        }
        Witness::Escape { functions: path } => {
            let ys = functions(path)?;
            let e = escape_function(&ys)?;
            let closure = maxfin_closure(&ys)?;
            let ok = closure.iter().all(|m| !e.le_star(m));
            let text = format!("escape: {e}\nmaxfin closure:\n{}{}\n", lines(&closure), verdict(ok));
            Ok(Report::new(text, json!({"escape": e, "closure": closure, "verified": ok}), ok))
        }
    }
}

fn cover_cmd(c: &CoverCmd) -> Res<Report> {
    match c {
        CoverCmd::Classify { cover: path } => {
            let c = cover(path)?;
            let tags = classify_cover(&c)?;
            Ok(Report::new(format!("{tags}\n"), json!(tags), true))
        }
        CoverCmd::Glue { cover: path, h } => {
            let c = cover(path)?;
            let h: QaFun = arg("h", h)?;
            let glued = glue_cover(&c, &h)?;
            let tags = classify_cover(&glued)?;
            let text = format!("{glued}tags: {tags}\n");
            Ok(Report::new(text, json!({"cover": glued, "tags": tags}), true))
        }
        CoverCmd::Split { cover: path, set } => {
            let c = cover(path)?;
            let s: EpSet = match set {
                Some(s) => arg("set", s)?,
                None => splitter_from_slalom(&build_slalom(&c.traces())?)?,
            };
            let ok = split_cover(&c, &s)?;
            let text = format!("set: {s}\nsplits: {ok}\n");
            Ok(Report::new(text, json!({"set": s, "splits": ok}), ok))
        }
        CoverCmd::Glueable { cover: path, force_h } => {
            let c = cover(path)?;
            let forced: Option<QaFun> = force_h.as_deref().map(|h| arg("force-h", h)).transpose()?;
            let part = gamma_glueable_with(&c, forced.as_ref())?;
            let ok = part.verify(&c);
            let pieces: Vec<String> = part.pieces(6).iter().map(|r| format!("[{}, {})", r.start, r.end)).collect();
            let mut text = format!("case: {:?}\nh: {}\n", part.mode, part.h);
            if let Some(s) = &part.selector {
                text.push_str(&format!("selector: {s}\n"));
            }
            text.push_str(&format!("pieces: {} ...\n{}\n", pieces.join(" "), verdict(ok)));
            Ok(Report::new(text, json!({"partition": part, "verified": ok}), ok))
        }
        CoverCmd::Game { sequence, mode, schedule } => {
            let seq: CoverSequence = in_file(sequence, text::parse_sequence_file(&read(sequence)?))?;
            let f: QaFun = arg("schedule", schedule)?;
            let schedule = match mode {
                SelectionMode::S1 => PickSchedule::Single(f),
                _ => PickSchedule::Windows(f),
            };
            let v = evaluate_selection(&seq, &schedule, *mode)?;
            let mut text = String::new();
            for p in &v.hits {
                text.push_str(&format!("{}: {}\n", p.label, p.trace));
            }
            text.push_str(&format!("tags: {}\n{}\n", v.tags, if v.fails { "fails" } else { "succeeds" }));
            Ok(Report::new(text, json!(v), !v.fails))
        }
    }
}

fn params(cli: &Cli) -> GenParams {
    let mut p = GenParams {
        seed: cli.seed,
        ..GenParams::default()
    };
    if let Some(c) = cli.cases {
        p.cases = c;
    }
    if let Some(d) = cli.depth {
        p.depth = d;
    }
    p
}

fn suite(name: &str, p: &GenParams) -> Res<Report> {
    let names: Vec<&str> = if name == "all" {
        harness::suite_names().collect()
    } else {
        vec![name]
    };
    let mut text = String::new();
    let mut reports = Vec::new();
    let mut ok = true;
    for n in names {
        let r = harness::run_suite(n, p)?;
        eprintln!("{n}: {:.2?}", r.elapsed);
        ok &= r.passed();
        text.push_str(&r.to_string());
        reports.push(r);
    }
    let json = serde_json::to_value(&reports).expect("reports serialise");
    Ok(Report::new(text, json, ok))
}

fn generate(kind: GenKind, p: &GenParams) -> Report {
    let count = p.cases.min(1000);
    let mut text = String::new();
    let mut json = Vec::new();
    for i in 0..count {
        let rng = &mut gen::case_rng(p.seed, i);
        let (t, j) = match kind {
            GenKind::Epset => {
                let a = gen::epset(rng, p, true);
                (format!("{a}\n"), json!(a))
            }
            GenKind::Qafun => {
                let f = gen::qafun(rng, p, gen::Shape::Increasing);
                (format!("{f}\n"), json!(f))
            }
            GenKind::Family => {
                let spec = FamilySpec::new(gen::family(rng, p)).expect("generated sets are infinite");
                (text::FamilyFile::from(&spec).render(), json!(spec))
            }
            GenKind::Cover => {
                let c = gen::cover(rng, p, true);
                (c.to_string(), json!(c))
            }
            GenKind::Sequence => {
                let s = gen::sequence(rng, p, true);
                (s.to_string(), json!(s))
            }
        };
        if i > 0 && !matches!(kind, GenKind::Epset | GenKind::Qafun) {
            text.push('\n');
        }
        text.push_str(&t);
        json.push(j);
    }
    Report::new(text, Json::Array(json), true)
}

fn run(cli: &Cli) -> Res<Report> {
    let p = params(cli);
    match &cli.command {
        Command::Eval { value, at } => eval(value, at, p.depth),
        Command::Compress { family, h, tests } => compress(family, h, tests.as_deref()),
        Command::Classify { family, tests } => classify(family, tests.as_deref()),
        Command::Witness(w) => witness(w, p.depth),
        Command::Cover(c) => cover_cmd(c),
        Command::Suite { name } => suite(name, &p),
        Command::Gen { kind } => Ok(generate(*kind, &p)),
    }
}

fn emit(cli: &Cli, report: &Report) -> Res<()> {
    let body = match cli.format {
        Format::Text => report.text.clone(),
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&report.json).expect("json values serialise")),
    };
    match &cli.out {
        Some(path) => fs::write(path, body).map_err(|e| Failure(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(body.as_bytes())
            .map_err(|e| Failure(e.to_string())),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|r| emit(&cli, &r).map(|()| r.ok));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
