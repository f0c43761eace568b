//! Command-line front end: `solve`, `sweep`, `fold` and `certify`.
//!
//! Every flag may also come from a flat JSON file given with `--config`,
//! using the flag names as keys. Flags given on the command line win.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::certificates::{certify_all, Certificate};
use crate::continuation::{locate_fold_with, sweep, Branch, FoldBracket};
use crate::error::{Error, Result};
use crate::integrator::{integrate, validate, AcceptedTrajectory, ValidationReport};
use crate::io;
use crate::model::{reconstruct_phi, BoundaryKind, ProblemSpec};
use crate::shooting::find_shooting_roots;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PRECONDITION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "epitaxy-bvp", version, about = "Shooting solver and certificates for the radial epitaxy BVP")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve at one λ and write the trajectory, validation and profile.
    Solve(Flags),
    /// Find all roots over a list or range of λ.
    Sweep(Flags),
    /// Bracket the fold λ₀ by bisection on root count.
    Fold(Flags),
    /// Evaluate every applicable certificate at one λ.
    Certify(Flags),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Solve,
    Sweep,
    Fold,
    Certify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    #[default]
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Bc {
    Dirichlet,
    Navier,
}

impl From<Bc> for BoundaryKind {
    fn from(bc: Bc) -> Self {
        match bc {
            Bc::Dirichlet => BoundaryKind::Dirichlet,
            Bc::Navier => BoundaryKind::Navier,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BranchArg {
    Lower,
    Upper,
}

/// Flags shared by all subcommands; unset values fall back to the config
/// file and then to per-command defaults.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Flags {
    /// Deposition rate λ.
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// Outer boundary condition.
    #[arg(long, value_enum)]
    pub bc: Option<Bc>,
    /// Shooting slope; `solve` picks a root from the scan when omitted.
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub a_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub a_max: Option<f64>,
    /// Series launch point.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Fold bracket width for `fold`, integrator tolerance otherwise.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Integrator tolerance (all commands).
    #[arg(long)]
    pub step_tol: Option<f64>,
    /// Output sample count.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Lower end of the λ range (fold bracket or sweep).
    #[arg(long, allow_negative_numbers = true)]
    pub lo: Option<f64>,
    /// Upper end of the λ range.
    #[arg(long, allow_negative_numbers = true)]
    pub hi: Option<f64>,
    /// Number of λ values in a `sweep` range.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Explicit comma-separated λ list for `sweep`.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub lambdas: Option<Vec<f64>>,
    /// Root used by `solve` when `--a` is absent.
    #[arg(long, value_enum)]
    pub branch: Option<BranchArg>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Format of the record printed on stdout.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// JSON file with default values for any of the flags above.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl Flags {
    /// Fill every unset field from `other`.
    pub fn or(self, other: Flags) -> Flags {
        Flags {
            lambda: self.lambda.or(other.lambda),
            bc: self.bc.or(other.bc),
            a: self.a.or(other.a),
            a_min: self.a_min.or(other.a_min),
            a_max: self.a_max.or(other.a_max),
            eps: self.eps.or(other.eps),
            tol: self.tol.or(other.tol),
            step_tol: self.step_tol.or(other.step_tol),
            grid: self.grid.or(other.grid),
            lo: self.lo.or(other.lo),
            hi: self.hi.or(other.hi),
            steps: self.steps.or(other.steps),
            lambdas: self.lambdas.or(other.lambdas),
            branch: self.branch.or(other.branch),
            out: self.out.or(other.out),
            format: self.format.or(other.format),
            config: self.config.or(other.config),
        }
    }
}

/// A fully parsed invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub flags: Flags,
}

/// Result of a successful run: the record for stdout and the files written.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub written: Vec<PathBuf>,
}

/// Errors surfaced by [`run`], split by exit status.
#[derive(Debug)]
pub enum RunError {
    Usage(String),
    Solver(Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Usage(_) => EXIT_USAGE,
            RunError::Solver(e) if e.is_precondition() => EXIT_PRECONDITION,
            RunError::Solver(_) => EXIT_NUMERICAL,
        }
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Usage(msg) => write!(f, "usage error: {msg}"),
            RunError::Solver(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        RunError::Solver(e)
    }
}

/// Parse command-line arguments (including the program name) and merge the
/// config file if one is named.
pub fn parse_args<I, T>(args: I) -> std::result::Result<RunConfig, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args)?;
    let (command, flags) = match cli.command {
        Command::Solve(f) => (CommandKind::Solve, f),
        Command::Sweep(f) => (CommandKind::Sweep, f),
        Command::Fold(f) => (CommandKind::Fold, f),
        Command::Certify(f) => (CommandKind::Certify, f),
    };
    Ok(RunConfig { command, flags })
}

fn load_config(path: &Path) -> std::result::Result<Flags, RunError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| RunError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| RunError::Usage(format!("invalid config {}: {e}", path.display())))
}

/// Entry point used by the binary; returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match parse_args(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(&config) {
        Ok(outcome) => {
            print!("{}", outcome.stdout);
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(config: &RunConfig) -> std::result::Result<Outcome, RunError> {
    let flags = match &config.flags.config {
        Some(path) => config.flags.clone().or(load_config(path)?),
        None => config.flags.clone(),
    };
    let out_dir = flags.out.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out_dir).map_err(Error::from)?;
    let ctx = Context {
        format: flags.format.unwrap_or_default(),
        out_dir,
        written: Vec::new(),
    };
    match config.command {
        CommandKind::Solve => run_solve(&flags, ctx),
        CommandKind::Sweep => run_sweep(&flags, ctx),
        CommandKind::Fold => run_fold(&flags, ctx),
        CommandKind::Certify => run_certify(&flags, ctx),
    }
}

struct Context {
    format: Format,
    out_dir: PathBuf,
    written: Vec<PathBuf>,
}

impl Context {
    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.out_dir.join(name);
        io::write_atomic(&path, bytes)?;
        self.written.push(path);
        Ok(())
    }

    fn finish(self, stdout: Vec<u8>) -> Outcome {
        Outcome {
            stdout: String::from_utf8_lossy(&stdout).into_owned(),
            written: self.written,
        }
    }
}

fn usage(msg: impl Into<String>) -> RunError {
    RunError::Usage(msg.into())
}

fn kind_of(flags: &Flags) -> BoundaryKind {
    flags.bc.map(BoundaryKind::from).unwrap_or(BoundaryKind::Dirichlet)
}

/// Numerical settings from the flags; `step_tol_from_tol` lets `--tol`
/// stand in for `--step-tol`.
fn build_spec(flags: &Flags, lambda: f64, step_tol_from_tol: bool) -> std::result::Result<ProblemSpec, RunError> {
    let mut spec = ProblemSpec::new(lambda, kind_of(flags));
    if let Some(eps) = flags.eps {
        spec.eps = eps;
    }
    let tol = flags
        .step_tol
        .or(if step_tol_from_tol { flags.tol } else { None });
    if let Some(tol) = tol {
        spec.step_tol = tol;
    }
    if let Some(grid) = flags.grid {
        spec.grid_n = grid;
    }
    if let Some(lo) = flags.a_min {
        spec.slope_min = lo;
    }
    if let Some(hi) = flags.a_max {
        spec.slope_max = hi;
    }
    spec.validate().map_err(|e| usage(e.to_string()))?;
    Ok(spec)
}

fn require_lambda(flags: &Flags) -> std::result::Result<f64, RunError> {
    flags.lambda.ok_or_else(|| usage("--lambda is required"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveSummary {
    pub lambda: f64,
    pub kind: BoundaryKind,
    pub a: f64,
    pub accepted: bool,
    pub validation: ValidationReport,
}

fn run_solve(flags: &Flags, mut ctx: Context) -> std::result::Result<Outcome, RunError> {
    let lambda = require_lambda(flags)?;
    let spec = build_spec(flags, lambda, true)?;
    let a = match flags.a {
        Some(a) if a > 0.0 || !a.is_finite() => {
            return Err(usage(format!("--a must be finite and <= 0, got {a}")))
        }
        Some(a) => a,
        None => {
            let roots = find_shooting_roots(&spec)?;
            let slopes = roots.slopes();
            let pick = match flags.branch.unwrap_or(BranchArg::Upper) {
                BranchArg::Upper => slopes.last(),
                BranchArg::Lower => slopes.first(),
            };
            *pick.ok_or(Error::NoRoot { lambda })?
        }
    };
    let traj = integrate(&spec, a)?;
    let report = validate(&traj);
    let accepted = AcceptedTrajectory::new(traj.clone(), &spec.tolerances);
    ctx.write("trajectory.csv", &io::trajectory_csv(&traj)?)?;
    ctx.write("validation.json", &io::json_bytes(&report)?)?;
    let accepted = accepted?;
    ctx.write("profile.csv", &io::profile_csv(&reconstruct_phi(&accepted))?)?;
    let stdout = match ctx.format {
        Format::Json => io::json_bytes(&SolveSummary {
            lambda,
            kind: spec.kind,
            a,
            accepted: true,
            validation: report,
        })?,
        Format::Csv => io::trajectory_csv(&traj)?,
    };
    Ok(ctx.finish(stdout))
}

fn sweep_lambdas(flags: &Flags, kind: BoundaryKind) -> std::result::Result<Vec<f64>, RunError> {
    if let Some(list) = &flags.lambdas {
        if list.is_empty() {
            return Err(usage("--lambdas must not be empty"));
        }
        return Ok(list.clone());
    }
    let (lo, hi, steps) = match kind {
        BoundaryKind::Dirichlet => (0.0, 200.0, 41),
        BoundaryKind::Navier => (0.0, 12.0, 25),
    };
    let lo = flags.lo.unwrap_or(lo);
    let hi = flags.hi.unwrap_or(hi);
    let steps = flags.steps.unwrap_or(steps);
    if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo < hi) {
        return Err(usage(format!("sweep range must satisfy 0 <= lo < hi, got [{lo}, {hi}]")));
    }
    if steps < 2 {
        return Err(usage("--steps must be at least 2"));
    }
    Ok((0..steps)
        .map(|k| {
            if k + 1 == steps {
                hi
            } else {
                lo + (hi - lo) * k as f64 / (steps - 1) as f64
            }
        })
        .collect())
}

fn run_sweep(flags: &Flags, mut ctx: Context) -> std::result::Result<Outcome, RunError> {
    let kind = kind_of(flags);
    let lambdas = sweep_lambdas(flags, kind)?;
    if lambdas.iter().any(|l| !(l.is_finite() && *l >= 0.0)) || lambdas.windows(2).any(|w| w[0] >= w[1]) {
        return Err(usage("sweep lambdas must be finite, >= 0 and strictly ascending"));
    }
    let base = build_spec(flags, lambdas[0], true)?;
    let diagram = sweep(kind, &lambdas, &base)?;
    let csv = io::diagram_csv(&diagram)?;
    ctx.write("diagram.csv", &csv)?;
    if let Some(fold) = &diagram.fold {
        ctx.write("fold.json", &io::json_bytes(fold)?)?;
    }
    let stdout = match ctx.format {
        Format::Json => io::json_bytes(&diagram)?,
        Format::Csv => csv,
    };
    Ok(ctx.finish(stdout))
}

/// Default fold bracket and width for each boundary kind.
pub fn default_fold_search(kind: BoundaryKind) -> ((f64, f64), f64) {
    match kind {
        BoundaryKind::Dirichlet => ((144.0, 307.0), 0.5),
        BoundaryKind::Navier => ((9.0, 128.0 / 11.0), 0.05),
    }
}

fn fold_csv(fold: &FoldBracket) -> Vec<u8> {
    format!(
        "lo,hi,kind\n{},{},{}\n",
        io::fmt_f64(fold.lo),
        io::fmt_f64(fold.hi),
        fold.kind
    )
    .into_bytes()
}

fn run_fold(flags: &Flags, mut ctx: Context) -> std::result::Result<Outcome, RunError> {
    let kind = kind_of(flags);
    let ((lo, hi), tol) = default_fold_search(kind);
    let lo = flags.lo.unwrap_or(lo);
    let hi = flags.hi.unwrap_or(hi);
    let tol = flags.tol.unwrap_or(tol);
    if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo < hi) {
        return Err(usage(format!("fold bracket must satisfy 0 <= lo < hi, got [{lo}, {hi}]")));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(usage(format!("--tol must be positive, got {tol}")));
    }
    let base = build_spec(flags, lo, false)?;
    let fold = locate_fold_with(&base, (lo, hi), tol)?;
    ctx.write("fold.json", &io::json_bytes(&fold)?)?;
    let stdout = match ctx.format {
        Format::Json => io::json_bytes(&fold)?,
        Format::Csv => fold_csv(&fold),
    };
    Ok(ctx.finish(stdout))
}

fn certificates_csv(certs: &[Certificate]) -> Vec<u8> {
    let mut out = String::from("kind,lambda,verdict,key,value\n");
    for c in certs {
        for (k, v) in &c.witness {
            out.push_str(&format!(
                "{:?},{},{:?},{},{}\n",
                c.kind,
                io::fmt_f64(c.lambda),
                c.verdict,
                k,
                io::fmt_f64(*v)
            ));
        }
    }
    out.into_bytes()
}

fn run_certify(flags: &Flags, mut ctx: Context) -> std::result::Result<Outcome, RunError> {
    let lambda = require_lambda(flags)?;
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(usage(format!("--lambda must be finite and >= 0, got {lambda}")));
    }
    let certs = certify_all(lambda, kind_of(flags))?;
    let json = io::json_bytes(&certs)?;
    ctx.write("certificates.json", &json)?;
    let stdout = match ctx.format {
        Format::Json => json,
        Format::Csv => certificates_csv(&certs),
    };
    Ok(ctx.finish(stdout))
}

impl From<BranchArg> for Branch {
    fn from(b: BranchArg) -> Self {
        match b {
            BranchArg::Lower => Branch::Lower,
            BranchArg::Upper => Branch::Upper,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> RunConfig {
        let mut full = vec!["epitaxy-bvp"];
        full.extend_from_slice(args);
        parse_args(full).unwrap()
    }

    #[test]
    fn flags_parse() {
        let c = parse(&["solve", "--lambda", "10", "--bc", "navier", "--a", "-4.5", "--grid", "100"]);
        assert_eq!(c.command, CommandKind::Solve);
        assert_eq!(c.flags.lambda, Some(10.0));
        assert_eq!(c.flags.bc, Some(Bc::Navier));
        assert_eq!(c.flags.a, Some(-4.5));
        assert_eq!(c.flags.grid, Some(100));
        let c = parse(&["sweep", "--lambdas", "0,5,10"]);
        assert_eq!(c.flags.lambdas, Some(vec![0.0, 5.0, 10.0]));
    }

    #[test]
    fn unknown_flag_is_usage_error() {
        let e = parse_args(["epitaxy-bvp", "solve", "--bogus", "1"]).unwrap_err();
        assert!(e.use_stderr());
        assert_eq!(main_with_args(["epitaxy-bvp", "solve", "--bogus", "1"]), EXIT_USAGE);
    }

    #[test]
    fn command_line_wins_over_config() {
        let file: Flags = serde_json::from_str(r#"{"lambda": 3.0, "bc": "navier", "a-min": -50.0}"#).unwrap();
        let cli = Flags {
            lambda: Some(7.0),
            ..Default::default()
        };
        let merged = cli.or(file);
        assert_eq!(merged.lambda, Some(7.0));
        assert_eq!(merged.bc, Some(Bc::Navier));
        assert_eq!(merged.a_min, Some(-50.0));
        assert!(serde_json::from_str::<Flags>(r#"{"lamda": 1}"#).is_err());
    }

    #[test]
    fn tol_meaning_depends_on_command() {
        let flags = Flags {
            tol: Some(1e-7),
            ..Default::default()
        };
        assert_eq!(build_spec(&flags, 1.0, true).unwrap().step_tol, 1e-7);
        assert_eq!(build_spec(&flags, 1.0, false).unwrap().step_tol, 1e-10);
    }

    #[test]
    fn bad_window_is_usage_error() {
        let flags = Flags {
            a_min: Some(-1.0),
            a_max: Some(-2.0),
            ..Default::default()
        };
        assert!(matches!(build_spec(&flags, 1.0, true), Err(RunError::Usage(_))));
    }

    #[test]
    fn sweep_range_endpoints() {
        let flags = Flags {
            lo: Some(1.0),
            hi: Some(2.0),
            steps: Some(3),
            ..Default::default()
        };
        assert_eq!(sweep_lambdas(&flags, BoundaryKind::Navier).unwrap(), vec![1.0, 1.5, 2.0]);
    }
}
