//! `charvar`: sampling, flows, involutions and verification suites from the shell.
//!
//! Exit codes: 0 success, 1 verification failures, 2 usage or input errors,
//! 3 solver failures.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use charvar::flows::{act_with, TorusElement};
use charvar::io::{read_jsonl, write_jsonl, RepRecord};
use charvar::polytope::{moment_mu_with, mu_lambda_with};
use charvar::repvar::{class_equal_with, Representation};
use charvar::sampler::{sample_with, SampleSpec, SampleTarget};
use charvar::sigma::{classify_fixed_point_with, random_fixed_point};
use charvar::su2::trial_rng;
use charvar::tau::solve_fiber;
use charvar::verify::{self, Suite};
use charvar::{Error, Tolerances, DEFAULT_TOLERANCES};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

#[derive(Parser, Debug)]
#[command(name = "charvar", version, about = "SU(2) character variety of the genus-2 surface")]
#[command(args_override_self = true)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// key=value file of default flag values; explicit flags win
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// worker threads (default: all cores)
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// seed for every random draw
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// factor applied to every numerical tolerance
    #[arg(long, global = true, default_value_t = 1.0)]
    tol: f64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw representations and write them as JSON lines
    Sample(SampleArgs),
    /// Apply torus elements to input representations
    Flow(FlowArgs),
    /// Moment coordinates of input representations
    Moment(MomentArgs),
    /// Apply the involution tau to input representations
    Tau(TauArgs),
    /// Draw fixed points of sigma with stratum and piece tags
    FixedPoints(FixedPointsArgs),
    /// Run the sigma certification suite and write a JSON report
    CertifySigma(CertifyArgs),
    /// Run verification suites and print a JSON report
    Verify(VerifyArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Target {
    Interior,
    Face,
    Edge,
    Vertex,
    Abelian,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[arg(long, default_value_t = 10)]
    count: usize,
    #[arg(long, value_enum, default_value_t = Target::Interior)]
    target: Target,
    /// fixed interior base point `x1,x2,x3` (interior target only)
    #[arg(long, value_parser = parse_triple)]
    base: Option<[f64; 3]>,
    /// conjugate every sample by a random element
    #[arg(long)]
    conjugate: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FlowArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    /// torus angles `t1,t2,t3`; repeat for an orbit
    #[arg(long = "angles", value_parser = parse_triple)]
    angles: Vec<[f64; 3]>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Csv,
    Jsonl,
}

#[derive(Args, Debug)]
struct MomentArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TauArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    /// also check that applying tau twice returns the input class
    #[arg(long)]
    check: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FixedPointsArgs {
    #[arg(long, default_value_t = 12)]
    count: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CertifyArgs {
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value = "all", value_parser = parse_suite)]
    suite: Suite,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
}

fn parse_triple(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated numbers, got '{s}'"));
    }
    let mut out = [0.0; 3];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p.parse().map_err(|e| format!("'{p}': {e}"))?;
    }
    Ok(out)
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse()
}

/// Failure carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_solve_failure() { 3 } else { 2 };
        Failure { code, message: e.to_string() }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::usage(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::usage(e.to_string())
    }
}

type Outcome = Result<ExitCode, Failure>;

const SUBCOMMANDS: [&str; 7] = [
    "sample",
    "flow",
    "moment",
    "tau",
    "fixed-points",
    "certify-sigma",
    "verify",
];

/// Inserts `--key value` pairs from the config file right after the subcommand,
/// so that flags given on the command line override them.
fn expand_config(args: Vec<String>) -> Result<Vec<String>, Failure> {
    let mut path = None;
    for (i, a) in args.iter().enumerate() {
        if a == "--config" {
            path = args.get(i + 1).cloned();
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        }
    }
    let Some(path) = path else { return Ok(args) };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| Failure::usage(format!("config {path}: {e}")))?;
    let mut extra = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Failure::usage(format!("config {path}:{}: expected key=value", n + 1)))?;
        let (key, value) = (key.trim(), value.trim().trim_matches('"'));
        match value {
            "true" => extra.push(format!("--{key}")),
            "false" => {}
            _ => {
                extra.push(format!("--{key}"));
                extra.push(value.to_string());
            }
        }
    }
    let at = args
        .iter()
        .position(|a| SUBCOMMANDS.contains(&a.as_str()))
        .map(|i| i + 1)
        .unwrap_or(args.len());
    let mut out = args[..at].to_vec();
    out.extend(extra);
    out.extend_from_slice(&args[at..]);
    Ok(out)
}

fn open_output(path: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn read_input(path: &Option<PathBuf>) -> Result<Vec<Representation>, Failure> {
    let reps = match path {
        Some(p) => read_jsonl(BufReader::new(open_input(p)?))?,
        None => read_jsonl(io::stdin().lock())?,
    };
    Ok(reps)
}

fn open_input(p: &Path) -> Result<File, Failure> {
    File::open(p).map_err(|e| Failure::usage(format!("{}: {e}", p.display())))
}

fn cmd_sample(a: &SampleArgs, seed: u64, tol: &Tolerances) -> Outcome {
    let target = match (a.target, a.base) {
        (Target::Interior, Some(x)) => SampleTarget::FixedBase(x),
        (Target::Interior, None) => SampleTarget::InteriorUniformBase,
        (_, Some(_)) => return Err(Failure::usage("--base applies to the interior target only")),
        (Target::Face, None) => SampleTarget::BoundaryFace,
        (Target::Edge, None) => SampleTarget::BoundaryEdge,
        (Target::Vertex, None) => SampleTarget::Vertex,
        (Target::Abelian, None) => SampleTarget::AbelianTorus,
    };
    let spec = SampleSpec { count: a.count, seed, target, conjugate: a.conjugate };
    let reps = sample_with(&spec, tol)?;
    let records: Vec<RepRecord> = reps
        .iter()
        .enumerate()
        .map(|(i, r)| RepRecord::new(*r, tol).with_meta("index", i))
        .collect();
    write_jsonl(open_output(&a.out)?, &records)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_flow(a: &FlowArgs, tol: &Tolerances) -> Outcome {
    let reps = read_input(&a.input)?;
    let angles = if a.angles.is_empty() { vec![[0.0; 3]] } else { a.angles.clone() };
    let mut records = Vec::new();
    for (line, rho) in reps.iter().enumerate() {
        for t in &angles {
            let torus = TorusElement::new(t[0], t[1], t[2]);
            // the zero element leaves every slot untouched
            let moved = if *t == [0.0; 3] { *rho } else { act_with(&torus, rho, tol)? };
            records.push(
                RepRecord::new(moved, tol)
                    .with_meta("line", line + 1)
                    .with_meta("angles", t.to_vec()),
            );
        }
    }
    write_jsonl(open_output(&a.out)?, &records)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_moment(a: &MomentArgs, tol: &Tolerances) -> Outcome {
    let reps = read_input(&a.input)?;
    let out = open_output(&a.out)?;
    match a.format {
        Format::Jsonl => {
            let records: Vec<RepRecord> = reps
                .iter()
                .enumerate()
                .map(|(i, r)| RepRecord::new(*r, tol).with_meta("line", i + 1))
                .collect();
            write_jsonl(out, &records)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record([
                "line", "residual", "mu1", "mu2", "mu3", "mu_region", "lambda1", "lambda2",
                "lambda3", "lambda_region",
            ])?;
            for (i, rho) in reps.iter().enumerate() {
                let mu = moment_mu_with(rho, tol)?;
                let ml = mu_lambda_with(rho, tol)?;
                let mut row = vec![(i + 1).to_string(), rho.relation_residual().to_string()];
                row.extend(mu.x.iter().map(f64::to_string));
                row.push(mu.region.to_string());
                row.extend(ml.x.iter().map(f64::to_string));
                row.push(ml.region.to_string());
                w.write_record(&row)?;
            }
            w.flush()?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_tau(a: &TauArgs, tol: &Tolerances) -> Outcome {
    let reps = read_input(&a.input)?;
    let mut records = Vec::new();
    let mut all_ok = true;
    for (i, rho) in reps.iter().enumerate() {
        let sol = solve_fiber(rho, tol)?;
        let image = sol.generators.act(&sol.coordinates.angles.inverse(), &sol.section);
        let after = mu_lambda_with(&image, tol)?.x;
        let mut rec = RepRecord::new(image, tol)
            .with_meta("line", i + 1)
            .with_meta("mu_lambda_before", sol.coordinates.base.x.to_vec())
            .with_meta("mu_lambda_after", after.to_vec())
            .with_meta("angles", sol.coordinates.angles.angles.to_vec())
            .with_meta("fiber_residual", sol.residual)
            .with_meta("input_residual", rho.relation_residual());
        if a.check {
            let twice = charvar::tau::tau_with(&image, tol)?;
            let ok = class_equal_with(&twice, rho, tol);
            all_ok &= ok;
            rec = rec.with_meta("tau_twice_class_equal", ok);
        }
        records.push(rec);
    }
    write_jsonl(open_output(&a.out)?, &records)?;
    Ok(if all_ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_fixed_points(a: &FixedPointsArgs, seed: u64, tol: &Tolerances) -> Outcome {
    let points: Vec<serde_json::Value> = (0..a.count as u64)
        .into_par_iter()
        .map(|i| -> Result<serde_json::Value, Error> {
            let mut rng = trial_rng(seed, i);
            let rho = random_fixed_point(&mut rng, i)?;
            let rec = RepRecord::new(rho, tol).with_meta("index", i);
            let mut v = serde_json::to_value(rec).expect("record serializes");
            let meta = match classify_fixed_point_with(&rho, tol) {
                Ok(p) => json!({
                    "stratum": p.stratum,
                    "piece": p.piece,
                    "conjugator": p.conjugator,
                    "fixed_residual": p.residual,
                }),
                Err(e) => json!({ "stratum": "Indeterminate", "reason": e.to_string() }),
            };
            v["sigma"] = meta;
            Ok(v)
        })
        .collect::<Result<_, _>>()?;
    write_jsonl(open_output(&a.out)?, &points)?;
    Ok(ExitCode::SUCCESS)
}

fn emit_report(report: &verify::VerifyReport, out: &Option<PathBuf>) -> Outcome {
    let mut w = open_output(out)?;
    serde_json::to_writer_pretty(&mut w, report).map_err(|e| Failure::usage(e.to_string()))?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_certify_sigma(a: &CertifyArgs, seed: u64, tol: &Tolerances) -> Outcome {
    let report = verify::run_suite(Suite::Sigma, a.samples, seed, tol);
    emit_report(&report, &a.out)
}

fn cmd_verify(a: &VerifyArgs, seed: u64, tol: &Tolerances) -> Outcome {
    let start = Instant::now();
    let mut report = verify::run_suite(a.suite, a.samples, seed, tol);
    report.wall_time_s = start.elapsed().as_secs_f64();
    emit_report(&report, &None)
}

fn run(cli: Cli) -> Outcome {
    if let Some(j) = cli.common.jobs {
        if j == 0 {
            return Err(Failure::usage("--jobs must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| Failure::usage(e.to_string()))?;
    }
    if !(cli.common.tol > 0.0 && cli.common.tol.is_finite()) {
        return Err(Failure::usage("--tol must be a positive factor"));
    }
    let tol = DEFAULT_TOLERANCES.scaled(cli.common.tol);
    let seed = cli.common.seed;
    match &cli.command {
        Command::Sample(a) => cmd_sample(a, seed, &tol),
        Command::Flow(a) => cmd_flow(a, &tol),
        Command::Moment(a) => cmd_moment(a, &tol),
        Command::Tau(a) => cmd_tau(a, &tol),
        Command::FixedPoints(a) => cmd_fixed_points(a, seed, &tol),
        Command::CertifySigma(a) => cmd_certify_sigma(a, seed, &tol),
        Command::Verify(a) => cmd_verify(a, seed, &tol),
    }
}

fn main() -> ExitCode {
    let args = match expand_config(std::env::args().collect()) {
        Ok(a) => a,
        Err(f) => {
            eprintln!("charvar: {}", f.message);
            return ExitCode::from(f.code);
        }
    };
    let cli = Cli::try_parse_from(args).unwrap_or_else(|e| e.exit());
    match run(cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("charvar: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
