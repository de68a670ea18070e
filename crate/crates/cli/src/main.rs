//! `isotuple`: reproduce the worked examples, classify user-supplied tuples
//! and run seeded theorem campaigns.
//!
//! Exit codes: 0 success, 1 golden mismatch or campaign counterexample,
//! 2 usage or parse error, 3 campaign stopped by its budget.

mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use isotuple::classify::{defect_profile, DefectProfile, DEFAULT_K_MAX};
use isotuple::golden::{run_golden, GoldenFile, GoldenReport};
use isotuple::par::Execution;
use isotuple::transforms::{delta_scaled, isosym_scaled, triangle_scaled};
use isotuple::tuples::{adjoint_tuple, max_commutator_within};
use isotuple::verify::{run_campaign, write_csv_summary, CampaignConfig, CampaignReport, TheoremId};
use isotuple::{CMatrix, OperatorTuple, Tolerance};

use config::CampaignFile;

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_PARTIAL: u8 = 3;

#[derive(Parser)]
#[command(name = "isotuple", version, about = "Isometric and symmetric defects of commuting matrix tuples")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Recompute the worked examples and compare them with the golden values.
    ReproPaper {
        #[arg(long)]
        json: bool,
        /// Golden file to compare against instead of the embedded copy.
        #[arg(long, value_name = "FILE")]
        golden: Option<PathBuf>,
    },
    /// Defect profile and verdicts for a pair of tuples.
    Check {
        #[command(flatten)]
        input: PairInput,
        /// Isometric degree to test.
        #[arg(long)]
        m: Option<u32>,
        /// Symmetric degree to test.
        #[arg(long)]
        n: Option<u32>,
        #[command(flatten)]
        tol: TolArgs,
        #[arg(long, default_value_t = DEFAULT_K_MAX)]
        k_max: u32,
        #[arg(long)]
        json: bool,
    },
    /// Least isometric and symmetric degrees of a pair.
    MinDegree {
        #[command(flatten)]
        input: PairInput,
        #[command(flatten)]
        tol: TolArgs,
        #[arg(long, default_value_t = DEFAULT_K_MAX)]
        k_max: u32,
        #[arg(long)]
        json: bool,
    },
    /// Seeded randomized check of one theorem, or `all`.
    Campaign(CampaignArgs),
}

#[derive(Args)]
struct PairInput {
    /// Tuple file for A. Defaults to the adjoint of B.
    #[arg(long, value_name = "FILE")]
    tuple_a: Option<PathBuf>,
    /// Tuple file for B.
    #[arg(long, value_name = "FILE")]
    tuple_b: PathBuf,
    /// Matrix file for X. Defaults to the identity.
    #[arg(long, value_name = "FILE")]
    x: Option<PathBuf>,
}

#[derive(Args, Clone, Copy)]
struct TolArgs {
    /// Relative tolerance of the zero test.
    #[arg(long)]
    tol: Option<f64>,
    /// Absolute tolerance of the zero test.
    #[arg(long)]
    abs_tol: Option<f64>,
}

impl TolArgs {
    fn resolve(self, base: Tolerance) -> anyhow::Result<Tolerance> {
        Ok(Tolerance::new(
            self.abs_tol.unwrap_or(base.abs_eps),
            self.tol.unwrap_or(base.rel_eps),
        )?)
    }
}

#[derive(Args)]
struct CampaignArgs {
    /// Theorem id, `ex00-golden` or `all`.
    #[arg(long)]
    theorem: Option<String>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Wall-clock budget in seconds; the report is partial when it runs out.
    #[arg(long)]
    budget: Option<f64>,
    /// Write the JSON report here. With `all`, one file per theorem in this directory.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Write a CSV summary here.
    #[arg(long, value_name = "FILE")]
    csv: Option<PathBuf>,
    /// TOML file with defaults for any of these flags.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(flatten)]
    tol: TolArgs,
    /// Last index of the Cesàro limit check.
    #[arg(long)]
    t_max: Option<u32>,
    /// Run trials on one thread.
    #[arg(long)]
    sequential: bool,
    #[arg(long)]
    json: bool,
}

/// Failure with a fixed exit code.
struct Exit(u8, anyhow::Error);

impl<E: Into<anyhow::Error>> From<E> for Exit {
    fn from(e: E) -> Self {
        Exit(EXIT_USAGE, e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(EXIT_USAGE);
    }
    let result = match cli.command {
        Command::ReproPaper { json, golden } => repro_paper(json, golden.as_deref()),
        Command::Check {
            input,
            m,
            n,
            tol,
            k_max,
            json,
        } => check(&input, m, n, tol, k_max, json),
        Command::MinDegree {
            input,
            tol,
            k_max,
            json,
        } => min_degree(&input, tol, k_max, json),
        Command::Campaign(args) => campaign(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Exit(code, e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(code)
        }
    }
}

#[cfg(feature = "parallel")]
fn init_threads() -> anyhow::Result<()> {
    let Ok(value) = std::env::var("ISOTUPLE_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .map_err(|_| anyhow!("ISOTUPLE_THREADS must be a positive integer, got '{value}'"))?;
    if n == 0 {
        bail!("ISOTUPLE_THREADS must be a positive integer, got '{value}'");
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

#[cfg(not(feature = "parallel"))]
fn init_threads() -> anyhow::Result<()> {
    Ok(())
}

fn print_json<T: Serialize>(value: &T) -> Result<(), Exit> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn repro_paper(json: bool, golden: Option<&Path>) -> Result<u8, Exit> {
    let file = match golden {
        Some(p) => GoldenFile::load(p)?,
        None => GoldenFile::embedded(),
    };
    let report = run_golden(&file).map_err(|e| Exit(EXIT_FAILURE, e.into()))?;
    if json {
        print_json(&report)?;
    } else {
        print_golden_table(&report);
    }
    Ok(if report.all_passed() { 0 } else { EXIT_FAILURE })
}

fn print_golden_table(report: &GoldenReport) {
    for c in &report.checks {
        let verdict = if c.passed { "pass" } else { "FAIL" };
        println!("{verdict}  {:<72} dev {:.2e} (limit {:.0e})", c.name, c.deviation, c.limit);
        if let Some(note) = &c.note {
            println!("      note: {note}");
        }
        if !c.passed {
            if let (Some(e), Some(a)) = (&c.expected, &c.actual) {
                println!("      expected:");
                print_indented(e);
                println!("      actual:");
                print_indented(a);
            }
        }
    }
    let failed = report.failures().count();
    println!("{} of {} checks passed", report.checks.len() - failed, report.checks.len());
}

fn print_indented(m: &CMatrix) {
    for line in m.to_string().lines() {
        println!("        {line}");
    }
}

fn read_json(path: &Path) -> anyhow::Result<serde_json::Value> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("{} is not valid JSON", path.display()))
}

/// A tuple file, or a bare matrix taken as a one-component tuple.
fn read_tuple(path: &Path) -> anyhow::Result<OperatorTuple> {
    let value = read_json(path)?;
    if value.is_array() {
        let m: CMatrix = serde_json::from_value(value).with_context(|| format!("{}: bad matrix", path.display()))?;
        return Ok(OperatorTuple::single(m));
    }
    serde_json::from_value(value).with_context(|| format!("{}: bad tuple", path.display()))
}

fn read_matrix(path: &Path) -> anyhow::Result<CMatrix> {
    serde_json::from_value(read_json(path)?).with_context(|| format!("{}: bad matrix", path.display()))
}

struct Pair {
    a: OperatorTuple,
    b: OperatorTuple,
    x: CMatrix,
    warnings: Vec<String>,
}

fn load_pair(input: &PairInput, tol: &Tolerance) -> anyhow::Result<Pair> {
    let b = read_tuple(&input.tuple_b)?;
    let a = match &input.tuple_a {
        Some(p) => read_tuple(p)?,
        None => adjoint_tuple(&b),
    };
    let x = match &input.x {
        Some(p) => read_matrix(p)?,
        None => CMatrix::identity(b.dim()),
    };
    if a.d() != b.d() {
        bail!("tuple lengths differ: A has {}, B has {}", a.d(), b.d());
    }
    if a.dim() != b.dim() || x.dim() != b.dim() {
        bail!("dimensions differ: A is {0}×{0}, B is {1}×{1}, X is {2}×{2}", a.dim(), b.dim(), x.dim());
    }
    let mut warnings = Vec::new();
    for (t, name) in [(&a, "A"), (&b, "B")] {
        let (norm, scale) = max_commutator_within(t);
        if !tol.accepts(norm, scale) {
            warnings.push(format!("{name} is not commuting: commutator norm {norm:.3e}"));
        }
    }
    Ok(Pair { a, b, x, warnings })
}

#[derive(Serialize)]
struct Verdict {
    test: String,
    degree: Vec<u32>,
    holds: bool,
    norm: f64,
    threshold: f64,
}

#[derive(Serialize)]
struct CheckReport {
    profile: DefectProfile,
    verdicts: Vec<Verdict>,
    warnings: Vec<String>,
}

fn check(input: &PairInput, m: Option<u32>, n: Option<u32>, tol: TolArgs, k_max: u32, json: bool) -> Result<u8, Exit> {
    let tol = tol.resolve(Tolerance::default())?;
    let pair = load_pair(input, &tol)?;
    let profile = defect_profile(&pair.a, &pair.b, &pair.x, k_max, &tol)?;
    let mut verdicts = Vec::new();
    let verdict = |test: &str, degree: Vec<u32>, d: isotuple::transforms::Defect| Verdict {
        test: test.to_string(),
        degree,
        holds: d.is_zero(&tol),
        norm: d.norm(),
        threshold: tol.threshold(d.scale),
    };
    if let Some(m) = m {
        verdicts.push(verdict("isometric", vec![m], triangle_scaled(&pair.a, &pair.b, &pair.x, m)?));
    }
    if let Some(n) = n {
        verdicts.push(verdict("symmetric", vec![n], delta_scaled(&pair.a, &pair.b, &pair.x, n)?));
    }
    if let (Some(m), Some(n)) = (m, n) {
        verdicts.push(verdict("isosymmetric", vec![m, n], isosym_scaled(&pair.a, &pair.b, &pair.x, m, n)?));
    }
    let report = CheckReport {
        profile,
        verdicts,
        warnings: pair.warnings,
    };
    if json {
        return print_json(&report).map(|_| 0);
    }
    for w in &report.warnings {
        println!("warning: {w}");
    }
    println!("{:>3}  {:>12}  {:>12}", "k", "‖Δ^k(X)‖", "‖δ^k(X)‖");
    let p = &report.profile;
    for k in 0..=p.k_max as usize {
        println!("{k:>3}  {:>12.4e}  {:>12.4e}", p.triangle_norms[k], p.delta_norms[k]);
    }
    println!("minimal isometric degree: {}", degree_text(p.min_isometry_degree, p.k_max));
    println!("minimal symmetric degree: {}", degree_text(p.min_symmetry_degree, p.k_max));
    if p.anomaly_count() > 0 {
        println!(
            "tolerance anomalies: isometric {:?}, symmetric {:?}",
            p.isometry_anomalies, p.symmetry_anomalies
        );
    }
    for v in &report.verdicts {
        let at = v.degree.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
        println!(
            "{} at {}={at}: {} (norm {:.3e}, threshold {:.3e})",
            v.test,
            if v.degree.len() == 1 { if v.test == "isometric" { "m" } else { "n" } } else { "(m,n)" },
            v.holds,
            v.norm,
            v.threshold
        );
    }
    Ok(0)
}

fn degree_text(d: Option<u32>, k_max: u32) -> String {
    match d {
        Some(k) => k.to_string(),
        None => format!("none ≤ {k_max}"),
    }
}

fn min_degree(input: &PairInput, tol: TolArgs, k_max: u32, json: bool) -> Result<u8, Exit> {
    let tol = tol.resolve(Tolerance::default())?;
    let pair = load_pair(input, &tol)?;
    let p = defect_profile(&pair.a, &pair.b, &pair.x, k_max, &tol)?;
    if json {
        #[derive(Serialize)]
        struct Degrees {
            k_max: u32,
            isometry: Option<u32>,
            symmetry: Option<u32>,
            warnings: Vec<String>,
        }
        return print_json(&Degrees {
            k_max,
            isometry: p.min_isometry_degree,
            symmetry: p.min_symmetry_degree,
            warnings: pair.warnings,
        })
        .map(|_| 0);
    }
    for w in &pair.warnings {
        println!("warning: {w}");
    }
    println!(
        "symmetry: {}, isometry: {}",
        degree_text(p.min_symmetry_degree, k_max),
        degree_text(p.min_isometry_degree, k_max)
    );
    Ok(0)
}

fn campaign(args: CampaignArgs) -> Result<u8, Exit> {
    let file = match &args.config {
        Some(p) => CampaignFile::load(p)?,
        None => CampaignFile::default(),
    };
    let theorem = args
        .theorem
        .or(file.theorem)
        .ok_or_else(|| anyhow!("--theorem is required (or set `theorem` in the config file)"))?;
    let theorems: Vec<TheoremId> = if theorem == "all" {
        TheoremId::all()
    } else {
        vec![theorem.parse()?]
    };
    let base_tol = Tolerance::new(
        file.abs_tol.unwrap_or(Tolerance::default().abs_eps),
        file.tol.unwrap_or(Tolerance::default().rel_eps),
    )?;
    let budget = match args.budget.or(file.budget) {
        Some(s) if !(s >= 0.0 && s.is_finite()) => bail_usage(format!("--budget must be a non-negative number, got {s}"))?,
        Some(s) => Some(Duration::from_secs_f64(s)),
        None => None,
    };
    let sequential = args.sequential || file.sequential.unwrap_or(false);
    let json = args.json || file.json.unwrap_or(false);
    let out = args.out.or(file.out);
    let csv = args.csv.or(file.csv);
    let mut reports = Vec::new();
    for &theorem in &theorems {
        let mut cfg = CampaignConfig::new(theorem, args.trials.or(file.trials).unwrap_or(100), args.seed.or(file.seed).unwrap_or(0));
        cfg.tol = args.tol.resolve(base_tol)?;
        cfg.budget = budget;
        cfg.execution = if sequential { Execution::Sequential } else { Execution::Parallel };
        if let Some(t) = args.t_max.or(file.t_max) {
            cfg.t_max = t;
        }
        let report = run_campaign(&cfg)?;
        if !report.invariant_holds() {
            return Err(Exit(EXIT_FAILURE, anyhow!("report counts are inconsistent for {theorem}")));
        }
        reports.push(report);
    }
    if let Some(path) = &out {
        write_reports(path, &reports, theorems.len() > 1)?;
    }
    if let Some(path) = &csv {
        let f = fs::File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
        write_csv_summary(f, &reports)?;
    }
    if json {
        if reports.len() == 1 {
            println!("{}", reports[0].to_json()?);
        } else {
            print_json(&reports)?;
        }
    } else {
        for r in &reports {
            print!("{}", r.summary_table());
            println!();
        }
    }
    Ok(campaign_exit(&reports))
}

fn bail_usage<T>(msg: String) -> Result<T, Exit> {
    Err(Exit(EXIT_USAGE, anyhow!(msg)))
}

fn write_reports(path: &Path, reports: &[CampaignReport], many: bool) -> anyhow::Result<()> {
    if many {
        fs::create_dir_all(path).with_context(|| format!("cannot create {}", path.display()))?;
        for r in reports {
            let p = path.join(format!("{}.json", r.theorem_id));
            fs::write(&p, r.to_json()?).with_context(|| format!("cannot write {}", p.display()))?;
        }
    } else {
        fs::write(path, reports[0].to_json()?).with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(())
}

fn campaign_exit(reports: &[CampaignReport]) -> u8 {
    if reports.iter().any(|r| r.counterexample_count > 0) {
        EXIT_FAILURE
    } else if reports.iter().any(|r| r.budget_exhausted) {
        EXIT_PARTIAL
    } else {
        0
    }
}
