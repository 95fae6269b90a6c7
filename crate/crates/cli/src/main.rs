//! `mdrsp` command-line front end.
//!
//! Exit codes: 0 success (optimal, all checks passed), 1 usage or input
//! error (or a failed verification), 2 time limit reached.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{ArgGroup, Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use mdrsp::instance::SolutionFile;
use mdrsp::polylab::{self, LabReport};
use mdrsp::table::{self, BenchRow};
use mdrsp::{branch_and_cut, generate_instance, parse_tsplib, ClassTag, Instance, Params, Report, Termination};

const EXIT_OK: u8 = 0;
const EXIT_ERROR: u8 = 1;
const EXIT_TIME_LIMIT: u8 = 2;

#[derive(Parser)]
#[command(name = "mdrsp", version, about = "Exact branch-and-cut for the multiple depot ring-star problem")]
struct Cli {
    /// More log output (repeat for debug level).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an instance from a TSPLIB file by placing random depots.
    Generate(GenerateArgs),
    /// Solve an instance to optimality.
    Solve(SolveArgs),
    /// Solve every instance of a manifest and write the table as CSV.
    Bench(BenchArgs),
    /// Enumeration-based checks on tiny instances.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// TSPLIB file supplying the customers.
    tsplib: PathBuf,
    #[arg(long)]
    depots: usize,
    /// I or II.
    #[arg(long, default_value = "I")]
    class: ClassTag,
    /// Routing weight for Class II: 3, 5, 7 or 9.
    #[arg(long)]
    alpha: Option<u32>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Clone)]
struct SolverFlags {
    /// Wall-clock limit in seconds.
    #[arg(long, default_value_t = 7200.0)]
    time_limit: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    no_heuristic: bool,
    /// Also separate the odd-hole inequalities.
    #[arg(long)]
    enable_oddhole: bool,
}

impl SolverFlags {
    fn params(&self) -> Result<Params> {
        if self.time_limit.is_nan() || self.time_limit < 0.0 {
            bail!("--time-limit must be a nonnegative number of seconds");
        }
        Ok(Params {
            time_limit: self.time_limit,
            seed: self.seed,
            heuristic: !self.no_heuristic,
            odd_hole: self.enable_oddhole,
            ..Params::default()
        })
    }
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    #[command(flatten)]
    flags: SolverFlags,
    /// Solution file; the report goes next to it as `<stem>.report.json`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Text file with one instance path per line (`#` starts a comment);
    /// relative paths are resolved against the manifest's directory.
    manifest: PathBuf,
    #[command(flatten)]
    flags: SolverFlags,
    /// CSV output; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
#[command(group(ArgGroup::new("check").required(true).args(["dim", "facets", "validity", "oracle_suite"])))]
struct VerifyArgs {
    /// Measure the polytope dimension for U customers and N depots.
    #[arg(long, num_args = 2, value_names = ["U", "N"])]
    dim: Option<Vec<usize>>,
    /// Facet check: prop2, prop3, prop4, prop5 or sec1.
    #[arg(long, value_name = "PROP")]
    facets: Option<String>,
    /// Instance size for --facets (default 4 2, or 6 2 for prop5).
    #[arg(long, num_args = 2, value_names = ["U", "N"], requires = "facets")]
    size: Option<Vec<usize>>,
    /// Check every inequality family on all feasible vectors.
    #[arg(long, num_args = 2, value_names = ["U", "N"])]
    validity: Option<Vec<usize>>,
    /// Compare the solver with the brute-force optimum on this many
    /// seeded instances.
    #[arg(long, value_name = "COUNT")]
    oracle_suite: Option<usize>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let result = match cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn load_instance(path: &Path) -> Result<Instance> {
    Instance::from_json(&read(path)?).with_context(|| format!("invalid instance {}", path.display()))
}

fn cmd_generate(a: GenerateArgs) -> Result<u8> {
    if a.class == ClassTag::II && a.alpha.is_none() {
        bail!("--class II requires --alpha");
    }
    if a.class == ClassTag::I && a.alpha.is_some() {
        bail!("--alpha only applies to --class II");
    }
    let base = parse_tsplib(&read(&a.tsplib)?).with_context(|| format!("invalid TSPLIB file {}", a.tsplib.display()))?;
    let inst = generate_instance(&base, a.depots, a.class, a.alpha, a.seed)?;
    write(&a.out, &inst.to_json())?;
    Ok(EXIT_OK)
}

/// Report file contents: the search report plus its table row.
#[derive(Serialize)]
struct SolveOutput<'a> {
    #[serde(flatten)]
    report: &'a Report,
    row: BenchRow,
}

fn exit_for(t: Termination) -> u8 {
    match t {
        Termination::Optimal => EXIT_OK,
        Termination::TimeLimit | Termination::NodeLimit => EXIT_TIME_LIMIT,
    }
}

fn cmd_solve(a: SolveArgs) -> Result<u8> {
    let params = a.flags.params()?;
    let inst = load_instance(&a.instance)?;
    let report = branch_and_cut(&inst, &params)?;
    let row = BenchRow::from_report(&inst, &report);
    let sol = report.incumbent.as_ref().context("solver returned no incumbent")?;
    let violations = sol.check_feasible(&inst);
    if !violations.is_empty() {
        bail!("internal error: incumbent is infeasible: {violations:?}");
    }
    let sol_json = SolutionFile::new(&inst, sol).to_json();
    let out = SolveOutput { report: &report, row };
    let mut report_json = serde_json::to_string_pretty(&out)?;
    report_json.push('\n');
    match &a.out {
        Some(path) => {
            write(path, &sol_json)?;
            write(&report_path(path), &report_json)?;
        }
        None => print!("{sol_json}"),
    }
    eprintln!(
        "{}: {:?}, cost {:.4}, lower bound {:.4}, nodes {}, {:.2}s",
        report.name, report.termination, report.ub, report.lb, report.stats.nodes, report.stats.time_seconds
    );
    Ok(exit_for(report.termination))
}

fn report_path(solution: &Path) -> PathBuf {
    let stem = solution.file_stem().and_then(|s| s.to_str()).unwrap_or("solution");
    solution.with_file_name(format!("{stem}.report.json"))
}

fn manifest_entries(path: &Path) -> Result<Vec<PathBuf>> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let entries: Vec<PathBuf> = read(path)?
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(|l| {
            let p = PathBuf::from(l);
            if p.is_absolute() {
                p
            } else {
                dir.join(p)
            }
        })
        .collect();
    if entries.is_empty() {
        bail!("manifest {} lists no instances", path.display());
    }
    Ok(entries)
}

fn bench_threads() -> Result<usize> {
    match std::env::var("MDRSP_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => bail!("MDRSP_THREADS must be a positive integer, got {v:?}"),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

fn cmd_bench(a: BenchArgs) -> Result<u8> {
    let params = a.flags.params()?;
    let entries = manifest_entries(&a.manifest)?;
    let instances = entries.iter().map(|p| load_instance(p)).collect::<Result<Vec<_>>>()?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(bench_threads()?).build()?;
    // rows come back in manifest order whatever the completion order
    let rows: Vec<BenchRow> = pool.install(|| {
        instances
            .par_iter()
            .map(|inst| -> Result<BenchRow> {
                let report = branch_and_cut(inst, &params)?;
                Ok(BenchRow::from_report(inst, &report))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let csv = table::to_csv(&rows);
    match &a.out {
        Some(path) => write(path, &csv)?,
        None => print!("{csv}"),
    }
    Ok(if rows.iter().all(|r| r.opt.is_some()) { EXIT_OK } else { EXIT_TIME_LIMIT })
}

fn pair(v: &[usize]) -> (usize, usize) {
    (v[0], v[1])
}

fn lab_report(u: usize, n: usize, dim_measured: Option<usize>, checks: Vec<Value>, pass: bool) -> LabReport {
    LabReport {
        u,
        n,
        m: mdrsp::Layout::new(u, n).len(),
        dim_formula: polylab::dim_formula(u, n),
        dim_measured,
        checks,
        pass,
    }
}

fn cmd_verify(a: VerifyArgs) -> Result<u8> {
    let report: Value = if let Some(d) = &a.dim {
        let (u, n) = pair(d);
        let r = polylab::verify_dimension(u, n)?;
        let mut v = serde_json::to_value(lab_report(
            u,
            n,
            Some(r.dim_measured),
            vec![json!({"kind": "dimension", "report": r})],
            r.pass,
        ))?;
        if let Some(note) = &r.note {
            v["note"] = json!(note);
        }
        v
    } else if let Some(prop) = &a.facets {
        let (u, n) = match &a.size {
            Some(s) => pair(s),
            None if prop == "prop5" => (6, 2),
            None => (4, 2),
        };
        let r = polylab::run_facet(prop, u, n)?;
        let mut v = serde_json::to_value(lab_report(u, n, None, vec![json!({"kind": "facet", "report": r})], r.pass))?;
        if let Some(note) = &r.note {
            v["note"] = json!(note);
        }
        v
    } else if let Some(s) = &a.validity {
        let (u, n) = pair(s);
        let sample = polylab::enumerate_feasible(u, n)?;
        let results = polylab::validity_suite(&sample);
        let failures: Vec<_> = results.iter().filter(|r| !r.pass).collect();
        let forms = polylab::sec_forms_agree(&sample);
        let pass = failures.is_empty() && forms;
        let checks = vec![
            json!({
                "kind": "validity",
                "vectors": sample.vectors.len(),
                "inequalities": results.len(),
                "failures": failures,
            }),
            json!({"kind": "subtour-forms-agree", "pass": forms}),
        ];
        serde_json::to_value(lab_report(u, n, None, checks, pass))?
    } else if let Some(count) = a.oracle_suite {
        let params = Params::default();
        let cases = (0..count)
            .into_par_iter()
            .map(|i| polylab::oracle_case(i, &params))
            .collect::<Result<Vec<_>, _>>()?;
        let matches = cases.iter().filter(|c| c.pass).count();
        json!({
            "kind": "oracle-suite",
            "instances": count,
            "matches": matches,
            "pass": matches == count,
            "cases": cases,
        })
    } else {
        bail!("no check selected");
    };
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    match &a.out {
        Some(path) => write(path, &text)?,
        None => print!("{text}"),
    }
    let pass = report["pass"].as_bool().unwrap_or(false);
    Ok(if pass { EXIT_OK } else { EXIT_ERROR })
}
