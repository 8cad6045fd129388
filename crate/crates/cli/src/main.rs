use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bocce::convergence::{compute_trends, fmt_float, lattice_report, LatticeConfig, Sections};
use bocce::functionals::{pettis_norm, DEFAULT_BLOCK_CAP};
use bocce::oscillation::{bocce_osc, pettis_bocce_osc, small_bocce_osc, SearchConfig};
use bocce::random;
use bocce::tight::{biting_decompose, finite_set_witness, tightness_search, TightnessGrid};
use bocce::{gallery, DyadicSet, Error, FunctionSequence, Functional, Resolution, StepFunction};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "bocce", version, about = "Convergence diagnostics for step-function sequences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full lattice report: trends, flags, criteria, moduli, tightness, biting.
    Report(Common),
    /// Pettis norm of one member.
    Pettis(Common),
    /// Bocce oscillation of one member on a set.
    Bocce(BocceArgs),
    /// Tightness search over constant compact sets.
    Tight(TightArgs),
    /// Biting decomposition.
    Bite(Common),
    /// Uniform and equi-integrability moduli.
    Moduli(Common),
    /// Lattice and oscillation invariants on seeded random instances.
    Property(PropertyArgs),
}

#[derive(Clone, Copy, ValueEnum, Default)]
enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Args, Clone)]
struct Common {
    /// Gallery name or path to a JSON sequence file.
    source: String,
    /// Number of gallery members to generate.
    #[arg(long, default_value_t = 8)]
    prefix: usize,
    /// One-based member index for single-function subcommands.
    #[arg(long)]
    k: Option<usize>,
    /// Level at which criterion searches enumerate candidate sets.
    #[arg(long)]
    level: Option<u32>,
    /// Comma-separated ε values.
    #[arg(long, value_delimiter = ',')]
    eps_grid: Option<Vec<f64>>,
    /// JSON file or inline JSON array of functionals.
    #[arg(long)]
    functionals: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = bocce::dyadic::DEFAULT_MAX_LEVEL)]
    max_level: u32,
    /// Flag tolerance.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct BocceArgs {
    #[command(flatten)]
    common: Common,
    /// `full` or `level:hexmask`.
    #[arg(long, default_value = "full")]
    set: String,
    /// Use the Pettis-Bocce oscillation instead.
    #[arg(long)]
    pettis: bool,
    /// Also report the small oscillation over the atoms of this level.
    #[arg(long)]
    partition_level: Option<u32>,
}

#[derive(Args)]
struct TightArgs {
    #[command(flatten)]
    common: Common,
    /// Single ε; overrides --eps-grid.
    #[arg(long)]
    eps: Option<f64>,
    /// Also build finite-set witnesses from in-measure convergence.
    #[arg(long)]
    finite: bool,
}

#[derive(Args)]
struct PropertyArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    count: usize,
    #[arg(long, default_value_t = 8)]
    prefix: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Lib(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Lib(Error::Parse(_)) => 2,
            Failure::Lib(Error::ResolutionOverflow { .. }) => 3,
            _ => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Lib(e) => write!(f, "{e}"),
            Failure::Io(s) => f.write_str(s),
        }
    }
}

struct Loaded {
    sequence: FunctionSequence,
    duals: Vec<StepFunction>,
}

fn read_text(arg: &str) -> Result<String, Failure> {
    std::fs::read_to_string(arg).map_err(|e| Failure::Io(format!("cannot read {arg}: {e}")))
}

fn parse_json<T: serde::de::DeserializeOwned>(text: &str, what: &str) -> Result<T, Failure> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("{what}: {e}")).into())
}

/// Accepts `{members, limit?, label?}` or a bare array of step functions.
fn load_file(path: &str) -> Result<FunctionSequence, Failure> {
    let text = read_text(path)?;
    let value: Value = parse_json(&text, path)?;
    if value.is_array() {
        let members: Vec<StepFunction> = parse_json(&text, path)?;
        Ok(FunctionSequence::new(members, None, path)?)
    } else {
        let mut seq: FunctionSequence = parse_json(&text, path)?;
        if seq.label().is_empty() {
            seq = FunctionSequence::new(seq.members().to_vec(), seq.limit().cloned(), path)?;
        }
        Ok(seq)
    }
}

fn load(c: &Common) -> Result<Loaded, Failure> {
    let resolution = Resolution::new(c.max_level)?;
    let loaded = if Path::new(&c.source).is_file() {
        Loaded {
            sequence: load_file(&c.source)?,
            duals: Vec::new(),
        }
    } else {
        let prefix = c.k.map_or(c.prefix, |k| k.max(c.prefix));
        if prefix as u64 > resolution.max_level as u64 {
            return Err(Error::ResolutionOverflow {
                level: prefix as u32,
                max: resolution.max_level,
            }
            .into());
        }
        let e = gallery::by_name(&c.source, prefix)?;
        Loaded {
            sequence: e.sequence,
            duals: e.duals,
        }
    };
    let s = &loaded.sequence;
    for f in s.members().iter().chain(s.limit()).chain(&loaded.duals) {
        resolution.check(f.level())?;
    }
    Ok(loaded)
}

fn functionals(c: &Common) -> Result<Option<Vec<Functional>>, Failure> {
    let Some(arg) = &c.functionals else { return Ok(None) };
    let text = if arg.trim_start().starts_with('[') {
        arg.clone()
    } else {
        read_text(arg)?
    };
    parse_json(&text, "functionals").map(Some)
}

fn config(c: &Common, duals: Vec<StepFunction>) -> Result<LatticeConfig, Failure> {
    let mut cfg = LatticeConfig::default().with_duals(duals);
    if let Some(t) = c.tol {
        cfg = cfg.with_tol(t);
    }
    cfg.functionals = functionals(c)?;
    let mut search = SearchConfig {
        resolution: Resolution::new(c.max_level)?,
        ..SearchConfig::default()
    };
    if let Some(l) = c.level {
        search.resolution.check(l)?;
        search = search.with_search_level(l);
    }
    if let Some(g) = &c.eps_grid {
        search = search.with_eps_grid(g.clone());
        cfg.tightness.eps = g.clone();
    }
    cfg.search = search;
    Ok(cfg)
}

fn member(seq: &FunctionSequence, k: Option<usize>) -> Result<(usize, &StepFunction), Failure> {
    let k = k.unwrap_or(seq.len());
    let f = seq
        .member(k)
        .ok_or_else(|| Error::InvalidArgument(format!("no member f_{k} in a prefix of {}", seq.len())))?;
    Ok((k, f))
}

/// Numbers rounded to twelve significant digits; object keys are sorted by
/// `serde_json`'s map.
fn canonical(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64");
            let r: f64 = fmt_float(x).parse().unwrap_or(x);
            json!(r)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(canonical).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, canonical(v))).collect()),
        other => other,
    }
}

fn to_json<T: Serialize>(x: &T) -> String {
    let v = serde_json::to_value(x).expect("serializable");
    let mut s = serde_json::to_string_pretty(&canonical(v)).expect("serializable");
    s.push('\n');
    s
}

fn csv_rows(rows: &[(Option<usize>, String, f64)]) -> String {
    let mut out = String::from("k,metric,value\n");
    for (k, m, v) in rows {
        let k = k.map(|k| k.to_string()).unwrap_or_default();
        out.push_str(&format!("{k},{m},{}\n", fmt_float(*v)));
    }
    out
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Io(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_report(c: &Common) -> Result<String, Failure> {
    let l = load(c)?;
    let cfg = config(c, l.duals)?;
    let report = lattice_report(&l.sequence, &cfg)?;
    Ok(match c.format {
        Format::Json => to_json(&report),
        Format::Csv => report.to_csv(),
    })
}

fn run_pettis(c: &Common) -> Result<String, Failure> {
    let l = load(c)?;
    let (k, f) = member(&l.sequence, c.k)?;
    let family = functionals(c)?.unwrap_or_default();
    let r = pettis_norm(f, DEFAULT_BLOCK_CAP, &family)?;
    Ok(match c.format {
        Format::Json => to_json(&json!({ "k": k, "pettis": r, "l1_norm": f.l1_norm() })),
        Format::Csv => csv_rows(&[(Some(k), "pettis".into(), r.value), (Some(k), "l1_norm".into(), f.l1_norm())]),
    })
}

fn parse_set(s: &str) -> Result<DyadicSet, Failure> {
    if s == "full" {
        Ok(DyadicSet::full(0)?)
    } else {
        Ok(s.parse()?)
    }
}

fn run_bocce(a: &BocceArgs) -> Result<String, Failure> {
    let c = &a.common;
    let l = load(c)?;
    let (k, f) = member(&l.sequence, c.k)?;
    let set = parse_set(&a.set)?;
    let resolution = Resolution::new(c.max_level)?;
    resolution.check(set.level())?;
    let (metric, value) = if a.pettis {
        ("pettis_bocce", pettis_bocce_osc(f, &set, DEFAULT_BLOCK_CAP)?)
    } else {
        ("bocce", bocce_osc(f, &set))
    };
    let small = match a.partition_level {
        Some(level) => {
            resolution.check(level)?;
            Some(small_bocce_osc(f, &bocce::DyadicPartition::atoms(level)?))
        }
        None => None,
    };
    Ok(match c.format {
        Format::Json => {
            let mut v = json!({ "k": k, "set": set, metric: value });
            if let Some(s) = small {
                v["small_bocce"] = json!(s);
            }
            to_json(&v)
        }
        Format::Csv => {
            let mut rows = vec![(Some(k), metric.to_string(), value)];
            if let Some(s) = small {
                rows.push((Some(k), "small_bocce".into(), s));
            }
            csv_rows(&rows)
        }
    })
}

fn run_tight(a: &TightArgs) -> Result<String, Failure> {
    let c = &a.common;
    let l = load(c)?;
    let mut grid = TightnessGrid::default();
    if let Some(g) = &c.eps_grid {
        grid.eps = g.clone();
    }
    if let Some(e) = a.eps {
        grid.eps = vec![e];
    }
    let outcomes = tightness_search(&l.sequence, &grid);
    let finite = if a.finite {
        Some(
            grid.eps
                .iter()
                .map(|&e| finite_set_witness(&l.sequence, e).map(|(n, w)| json!({ "settle_index": n, "witness": w })))
                .collect::<Result<Vec<_>, _>>()?,
        )
    } else {
        None
    };
    Ok(match c.format {
        Format::Json => {
            let mut v = json!({ "prefix": l.sequence.len(), "outcomes": outcomes });
            if let Some(f) = finite {
                v["finite_set"] = Value::Array(f);
            }
            to_json(&v)
        }
        Format::Csv => {
            let mut rows = Vec::new();
            for o in &outcomes {
                let eps = fmt_float(o.eps());
                match o.witness() {
                    Some(w) => {
                        for (i, e) in w.escape.iter().enumerate() {
                            rows.push((Some(i + 1), format!("tight.escape.eps={eps}"), *e));
                        }
                    }
                    None => {
                        if let bocce::tight::TightnessOutcome::NotFound { min_escape, .. } = o {
                            rows.push((None, format!("tight.not_found.min_escape.eps={eps}"), *min_escape));
                        }
                    }
                }
            }
            csv_rows(&rows)
        }
    })
}

fn run_bite(c: &Common) -> Result<String, Failure> {
    let l = load(c)?;
    let cfg = config(c, l.duals)?;
    let b = biting_decompose(&l.sequence, &cfg.biting);
    Ok(match c.format {
        Format::Json => to_json(&b),
        Format::Csv => {
            let mut rows = Vec::new();
            for (i, &m) in b.set_measures.iter().enumerate() {
                rows.push((Some(i + 1), "bite.set_measure".to_string(), m));
                rows.push((Some(i + 1), "bite.bitten_l1".to_string(), b.bitten_l1[i]));
                rows.push((Some(i + 1), "bite.removed_measure".to_string(), b.removed_measure[i]));
            }
            csv_rows(&rows)
        }
    })
}

fn run_moduli(c: &Common) -> Result<String, Failure> {
    let l = load(c)?;
    let cfg = config(c, l.duals)?;
    let curves = bocce::convergence::moduli(&l.sequence, &cfg.family(l.sequence.kind()))?;
    Ok(match c.format {
        Format::Json => to_json(&curves),
        Format::Csv => {
            let report_like: Vec<(Option<usize>, String, f64)> = curves
                .iter()
                .flat_map(|m| {
                    let name = serde_json::to_value(m.kind).ok().and_then(|v| v.as_str().map(str::to_string));
                    let param = if m.decreasing { "c" } else { "delta" };
                    let name = name.unwrap_or_default();
                    m.points
                        .iter()
                        .map(move |(t, v)| (None, format!("modulus.{name}.{param}={}", fmt_float(*t)), *v))
                })
                .collect();
            csv_rows(&report_like)
        }
    })
}

#[derive(Serialize)]
struct PropertyCheck {
    name: &'static str,
    passed: usize,
    failed: usize,
}

fn run_property(a: &PropertyArgs) -> Result<(String, bool), Failure> {
    let mut rng = random::rng(a.seed);
    let cfg = LatticeConfig {
        sections: Sections {
            criteria: false,
            moduli: false,
            tightness: false,
            biting: false,
        },
        ..LatticeConfig::default()
    };
    let mut lattice = PropertyCheck {
        name: "lattice_consistency",
        passed: 0,
        failed: 0,
    };
    let mut small = PropertyCheck {
        name: "small_oscillation_identity",
        passed: 0,
        failed: 0,
    };
    let mut pettis = PropertyCheck {
        name: "pettis_between_scalar_and_l1",
        passed: 0,
        failed: 0,
    };
    let tally = |c: &mut PropertyCheck, ok: bool| {
        if ok {
            c.passed += 1
        } else {
            c.failed += 1
        }
    };
    for _ in 0..a.count {
        let seq = random::sequence(&mut rng, a.prefix.max(1));
        let (_, flags) = compute_trends(&seq, &cfg)?;
        tally(&mut lattice, flags.consistent());

        let f = random::step_function(&mut rng, bocce::SpaceKind::L2, 3, 4, 4);
        let pi = random::partition(&mut rng, 3, 3);
        let direct = f.sub(&f.cond_expectation(&pi))?.l1_norm();
        tally(&mut small, (small_bocce_osc(&f, &pi) - direct).abs() <= 1e-12);

        let x = random::unit_functional(&mut rng, f.kind(), 4);
        let p = pettis_norm(&f, DEFAULT_BLOCK_CAP, &[])?.value;
        let lower = f.scalarize(&x)?.l1_norm();
        tally(&mut pettis, lower <= p + 1e-12 && p <= f.l1_norm() + 1e-12);
    }
    let checks = [lattice, small, pettis];
    let ok = checks.iter().all(|c| c.failed == 0);
    let text = match a.format {
        Format::Json => to_json(&json!({ "seed": a.seed, "count": a.count, "checks": checks })),
        Format::Csv => csv_rows(
            &checks
                .iter()
                .flat_map(|c| {
                    [
                        (None, format!("property.{}.passed", c.name), c.passed as f64),
                        (None, format!("property.{}.failed", c.name), c.failed as f64),
                    ]
                })
                .collect::<Vec<_>>(),
        ),
    };
    Ok((text, ok))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (result, out) = match &cli.command {
        Command::Report(c) => (run_report(c).map(|t| (t, true)), &c.out),
        Command::Pettis(c) => (run_pettis(c).map(|t| (t, true)), &c.out),
        Command::Bocce(a) => (run_bocce(a).map(|t| (t, true)), &a.common.out),
        Command::Tight(a) => (run_tight(a).map(|t| (t, true)), &a.common.out),
        Command::Bite(c) => (run_bite(c).map(|t| (t, true)), &c.out),
        Command::Moduli(c) => (run_moduli(c).map(|t| (t, true)), &c.out),
        Command::Property(a) => (run_property(a), &a.out),
    };
    match result.and_then(|(text, ok)| emit(&text, out).map(|_| ok)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
