//! Command-line front end.
//!
//! Exit codes: 0 pass, 1 mathematical violation found, 2 usage error,
//! 3 numeric failure (a tolerance or bracket could not be met).

mod report;
pub mod suite;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rug::{Float, Rational};

use crate::cmdeg::{check_sign_pattern, estimate_cm_degree, DegreeSearch, HOracle, LogGrid, ScaledTailOracle};
use crate::error::Error;
use crate::inequalities::{
    check_difference_bound, check_ineq_bessel, check_ineq_trigamma, default_bessel_grid, default_trigamma_grid,
    f_poly_exact, FPolyForm,
};
use crate::laplace::{self, verify_representation, Representation};
use crate::laurent::{self, TailSeries};
use crate::precision::{WorkingPrecision, DEFAULT_DIGITS};
use crate::specfun;

pub use report::{write_atomic, ErrorInfo, Provenance, Record, Report, Timing, CSV_HEADER};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "cmverify", version, about = "Verified numerics for e^(1/t) - psi'(t) and the remainder of e^(1/z)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Significant decimal digits for computation and output.
    #[arg(long, global = true, default_value_t = DEFAULT_DIGITS)]
    pub digits: u32,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write the report here (atomically) instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one function at one point.
    #[command(allow_negative_numbers = true)]
    Eval(EvalArgs),
    /// Bracket the completely monotonic degree of H_k.
    #[command(allow_negative_numbers = true)]
    Degree(DegreeArgs),
    /// Scan the alternating sign pattern of h or of t^r H_k(t).
    #[command(allow_negative_numbers = true)]
    VerifyCm(VerifyCmArgs),
    /// Compare a closed form with its Laplace-integral representation.
    #[command(allow_negative_numbers = true)]
    VerifyIntegral(VerifyIntegralArgs),
    /// Scan an inequality over a grid, or check the difference bound at a point.
    #[command(allow_negative_numbers = true)]
    Inequality(InequalityArgs),
    /// Evaluate f_i(t) exactly in one or all forms.
    #[command(allow_negative_numbers = true)]
    Fpoly(FpolyArgs),
    /// Run the full verification battery.
    Suite(SuiteArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvalFn {
    Trigamma,
    Polygamma,
    ExpRecipDeriv,
    BesselI,
    Hyp1f2,
    Hk,
    HkDeriv,
    H,
    HDeriv,
    Kernel1f2,
    KernelBessel,
    HKernel,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long = "fn", value_enum)]
    pub function: EvalFn,
    /// Evaluation point.
    #[arg(long, visible_alias = "z")]
    pub t: String,
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub i: Option<u32>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long)]
    pub grid_min: Option<f64>,
    #[arg(long)]
    pub grid_max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
}

impl GridArgs {
    fn resolve(&self, default: LogGrid) -> Result<LogGrid, CliError> {
        let t_min = self.grid_min.unwrap_or(default.t_min());
        let t_max = self.grid_max.unwrap_or(default.t_max());
        let points = self.points.unwrap_or(default.len());
        if !(t_min.is_finite() && t_min > 0.0) {
            return Err(CliError::usage("--grid-min must be > 0"));
        }
        if !(t_max.is_finite() && t_max > t_min) {
            return Err(CliError::usage("--grid-max must be > --grid-min"));
        }
        if points < 2 {
            return Err(CliError::usage("--points must be >= 2"));
        }
        LogGrid::new(t_min, t_max, points).map_err(|e| CliError::usage(e.to_string()))
    }
}

#[derive(Debug, Args)]
pub struct DegreeArgs {
    #[arg(long, default_value_t = 0)]
    pub k: u32,
    #[arg(long)]
    pub r_min: Option<f64>,
    #[arg(long)]
    pub r_max: Option<f64>,
    /// Target bracket width.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_order: Option<u32>,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CmTarget {
    H,
    Hk,
}

#[derive(Debug, Args)]
pub struct VerifyCmArgs {
    #[arg(long = "fn", value_enum, default_value_t = CmTarget::H)]
    pub function: CmTarget,
    #[arg(long, default_value_t = 0)]
    pub k: u32,
    /// Exponent r in t^r H_k(t); defaults to k + 1.
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub max_order: Option<u32>,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RepArg {
    F12,
    Bessel,
    H,
    HDeriv,
}

#[derive(Debug, Args)]
pub struct VerifyIntegralArgs {
    #[arg(long, value_enum)]
    pub rep: RepArg,
    #[arg(long, default_value_t = 0)]
    pub k: u32,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long, visible_alias = "t", default_value = "1")]
    pub z: String,
    #[arg(long, default_value_t = 1e-10)]
    pub rel_tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    Trigamma,
    Bessel,
    Difference,
}

#[derive(Debug, Args)]
pub struct InequalityArgs {
    #[arg(long, value_enum)]
    pub which: Which,
    /// Derivative order (difference bound only).
    #[arg(long)]
    pub i: Option<u32>,
    /// Point (difference bound only).
    #[arg(long)]
    pub t: Option<String>,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Args)]
pub struct FpolyArgs {
    #[arg(long)]
    pub i: u32,
    /// Rational (`3/2`) or decimal (`1.5`) point.
    #[arg(long)]
    pub t: String,
    /// A, B, C, D or all.
    #[arg(long, default_value = "all")]
    pub form: String,
}

#[derive(Debug, Args)]
pub struct SuiteArgs {
    /// Comma-separated criterion numbers (default: all).
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<u32>,
}

/// Error raised while validating or executing a request.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Usage(String),
    Core(Error),
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain { msg, .. } | Error::Argument { msg, .. } | Error::Unsupported { msg, .. } => {
                CliError::Usage(msg)
            }
            other => CliError::Core(other),
        }
    }
}

/// What a run produced: the rendered report (if any), diagnostics and exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
    pub report: Option<Report>,
}

impl Outcome {
    fn usage(msg: String) -> Self {
        Outcome { exit_code: EXIT_USAGE, stdout: String::new(), stderr: msg, report: None }
    }
}

/// Parses `args` (program name first), executes, and renders the report.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    Outcome { exit_code: EXIT_PASS, stdout: text, stderr: String::new(), report: None }
                }
                _ => Outcome::usage(text),
            };
        }
    };
    let echo = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect::<Vec<_>>().join(" ");
    let report = match execute(&cli, echo) {
        Ok(report) => report,
        Err(msg) => return Outcome::usage(format!("error: {msg}\n")),
    };
    let text = match cli.format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    };
    let exit_code = if report.error.is_some() {
        EXIT_NUMERIC
    } else if report.pass {
        EXIT_PASS
    } else {
        EXIT_VIOLATION
    };
    let stderr = report
        .error
        .as_ref()
        .map(|e| format!("error: {} in {}: {}\n", e.kind, e.operation, e.message))
        .unwrap_or_default();
    if let Some(path) = &cli.out {
        if let Err(e) = write_atomic(path, &text) {
            return Outcome::usage(format!("error: cannot write {}: {e}\n", path.display()));
        }
        return Outcome { exit_code, stdout: String::new(), stderr, report: Some(report) };
    }
    Outcome { exit_code, stdout: text, stderr, report: Some(report) }
}

/// Validates and runs the request. `Err` is a usage error message.
pub fn execute(cli: &Cli, echo: String) -> Result<Report, String> {
    let prec = WorkingPrecision::new(cli.digits).map_err(|_| {
        format!(
            "--digits must lie in [{}, {}]",
            crate::precision::MIN_DIGITS,
            crate::precision::MAX_DIGITS
        )
    })?;
    let mut ctx = Context { prec, inputs: BTreeMap::new(), results: Vec::new() };
    ctx.input("digits", cli.digits);
    ctx.input(
        "format",
        match cli.format {
            Format::Json => "json",
            Format::Csv => "csv",
        },
    );
    let start = Instant::now();
    let (subcommand, outcome) = match &cli.command {
        Command::Eval(a) => ("eval", run_eval(&mut ctx, a)),
        Command::Degree(a) => ("degree", run_degree(&mut ctx, a)),
        Command::VerifyCm(a) => ("verify-cm", run_verify_cm(&mut ctx, a)),
        Command::VerifyIntegral(a) => ("verify-integral", run_verify_integral(&mut ctx, a)),
        Command::Inequality(a) => ("inequality", run_inequality(&mut ctx, a)),
        Command::Fpoly(a) => ("fpoly", run_fpoly(&mut ctx, a)),
        Command::Suite(a) => ("suite", run_suite(&mut ctx, a)),
    };
    let error = match outcome {
        Ok(()) => None,
        Err(CliError::Usage(msg)) => return Err(msg),
        Err(CliError::Core(e)) => Some(error_info(&e)),
    };
    let Context { inputs, results, .. } = ctx;
    Ok(Report {
        command: echo,
        subcommand: subcommand.to_string(),
        inputs,
        pass: Report::compute_pass(&results, &error),
        results,
        error,
        timing: Timing { elapsed_ms: start.elapsed().as_secs_f64() * 1e3 },
    })
}

fn error_info(e: &Error) -> ErrorInfo {
    let (kind, operation, message) = match e {
        Error::Domain { op, msg } => ("domain", op.to_string(), msg.clone()),
        Error::Argument { op, msg } => ("argument", op.to_string(), msg.clone()),
        Error::Unsupported { op, msg } => ("unsupported", op.to_string(), msg.clone()),
        Error::NumericFailure { op, msg } => ("numeric-failure", op.to_string(), msg.clone()),
        Error::Bracket(msg) => ("bracket", "estimate_cm_degree".to_string(), msg.clone()),
    };
    ErrorInfo { kind: kind.to_string(), operation, message }
}

pub(crate) struct Context {
    pub prec: WorkingPrecision,
    pub inputs: BTreeMap<String, String>,
    pub results: Vec<Record>,
}

impl Context {
    pub fn input(&mut self, key: &str, value: impl ToString) {
        self.inputs.insert(key.to_string(), value.to_string());
    }

    pub fn fmt(&self, v: &Float) -> String {
        self.prec.format(v)
    }

    pub fn push(&mut self, r: Record) {
        self.results.push(r);
    }

    fn grid(&mut self, args: &GridArgs, default: LogGrid) -> Result<LogGrid, CliError> {
        let grid = args.resolve(default)?;
        self.input("grid_min", grid.t_min());
        self.input("grid_max", grid.t_max());
        self.input("points", grid.len());
        Ok(grid)
    }
}

/// Parses a decimal at working precision; `strict` demands `> 0`, otherwise `>= 0`.
fn parse_point(prec: WorkingPrecision, name: &str, text: &str, strict: bool) -> Result<Float, CliError> {
    let v = prec
        .parse(text)
        .map_err(|_| CliError::usage(format!("--{name}: cannot parse {text:?} as a number")))?;
    if strict && (v.is_sign_negative() || v.is_zero()) {
        return Err(CliError::usage(format!("{name} must be > 0")));
    }
    if !strict && v.is_sign_negative() && !v.is_zero() {
        return Err(CliError::usage(format!("{name} must be >= 0")));
    }
    Ok(v)
}

fn require(v: Option<u32>, flag: &str, what: &str) -> Result<u32, CliError> {
    v.ok_or_else(|| CliError::usage(format!("--{flag} is required for {what}")))
}

fn run_eval(ctx: &mut Context, a: &EvalArgs) -> Result<(), CliError> {
    let prec = ctx.prec;
    let name = a.function.to_possible_value().expect("no skipped variants").get_name().to_string();
    ctx.input("fn", &name);
    ctx.input("t", &a.t);
    let nonneg = matches!(
        a.function,
        EvalFn::BesselI | EvalFn::Hyp1f2 | EvalFn::Kernel1f2 | EvalFn::KernelBessel | EvalFn::HKernel
    );
    let t = parse_point(prec, "t", &a.t, !nonneg)?;
    let mut params = Vec::new();
    let (value, provenance) = match a.function {
        EvalFn::Trigamma => (specfun::polygamma(1, &t, prec)?, Provenance::EulerMaclaurin),
        EvalFn::Polygamma => {
            let n = require(a.n, "n", "polygamma")?;
            if n == 0 {
                return Err(CliError::usage("n must be >= 1"));
            }
            params.push(("n", n));
            (specfun::polygamma(n, &t, prec)?, Provenance::EulerMaclaurin)
        }
        EvalFn::ExpRecipDeriv => {
            let i = require(a.i, "i", "exp-recip-deriv")?;
            params.push(("i", i));
            let v = if i == 0 { prec.float(t.recip_ref()).exp() } else { specfun::exp_recip_derivative(i, &t, prec)? };
            (v, Provenance::ClosedForm)
        }
        EvalFn::BesselI => {
            let n = require(a.n, "n", "bessel-i (the order)")?;
            params.push(("n", n));
            (specfun::bessel_i(n, &t, prec)?, Provenance::Series)
        }
        EvalFn::Hyp1f2 => {
            let k = require(a.k, "k", "hyp1f2 (parameters k+1, k+2)")?;
            params.push(("k", k));
            (specfun::hyp1f2(k + 1, k + 2, &t, prec)?, Provenance::Series)
        }
        EvalFn::Hk => {
            let k = require(a.k, "k", "hk")?;
            params.push(("k", k));
            (laurent::remainder_hk(k, &t, prec)?, Provenance::Series)
        }
        EvalFn::HkDeriv => {
            let k = require(a.k, "k", "hk-deriv")?;
            let n = require(a.n, "n", "hk-deriv")?;
            params.push(("k", k));
            params.push(("n", n));
            (laurent::remainder_hk_derivative(k, n, &t, prec)?, Provenance::Series)
        }
        EvalFn::H => (laurent::h_function(&t, prec)?, Provenance::ClosedForm),
        EvalFn::HDeriv => {
            let i = require(a.i, "i", "h-deriv")?;
            params.push(("i", i));
            (laurent::h_nth_derivative(i, &t, prec)?, Provenance::ClosedForm)
        }
        EvalFn::Kernel1f2 => {
            let k = require(a.k, "k", "kernel-1f2")?;
            params.push(("k", k));
            (laplace::kernel_1f2(k, &t, prec)?, Provenance::Series)
        }
        EvalFn::KernelBessel => {
            let k = require(a.k, "k", "kernel-bessel")?;
            params.push(("k", k));
            (laplace::kernel_bessel(k, &t, prec)?, Provenance::Series)
        }
        EvalFn::HKernel => {
            let p = if t < laplace::SERIES_CROSSOVER { Provenance::Series } else { Provenance::ClosedForm };
            (laplace::h_kernel(&t, prec)?, p)
        }
    };
    let mut id = format!("{name}(");
    for (key, v) in &params {
        ctx.input(key, v);
        id.push_str(&format!("{key}={v},"));
    }
    id.push_str(&format!("t={})", a.t));
    let record = Record::new(id, "value", ctx.fmt(&value), provenance);
    ctx.push(record);
    Ok(())
}

fn run_degree(ctx: &mut Context, a: &DegreeArgs) -> Result<(), CliError> {
    let prec = ctx.prec;
    let mut search = DegreeSearch::for_remainder(a.k);
    search.grid = ctx.grid(&a.grid, search.grid)?;
    if let Some(r) = a.r_min {
        search.r_min = r;
    }
    if let Some(r) = a.r_max {
        search.r_max = r;
    }
    if let Some(tol) = a.tol {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(CliError::usage("tol must be > 0"));
        }
        search.tol = tol;
    }
    if let Some(m) = a.max_order {
        search.max_order = m;
    }
    if search.r_min.partial_cmp(&search.r_max) != Some(std::cmp::Ordering::Less) {
        return Err(CliError::usage("--r-min must be < --r-max"));
    }
    ctx.input("k", a.k);
    ctx.input("r_min", search.r_min);
    ctx.input("r_max", search.r_max);
    ctx.input("tol", search.tol);
    ctx.input("max_order", search.max_order);
    let est = estimate_cm_degree(a.k, &search, prec)?;
    let expected = f64::from(a.k) + 1.0;
    let pass = est.contains(expected) && est.width() <= search.tol;
    let witness = &est.witness;
    ctx.push(
        Record::new(format!("degree(k={})", a.k), "bracket", format!("[{}, {}]", est.r_lo, est.r_hi), Provenance::Bisection)
            .pass(pass)
            .detail("r_lo", est.r_lo.to_string())
            .detail("r_hi", est.r_hi.to_string())
            .detail("width", est.width().to_string())
            .detail("expected", expected.to_string())
            .detail("bisection_steps", est.bisection_steps.to_string())
            .detail(
                "closure_checks",
                est.closure_checks.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(" "),
            ),
    );
    ctx.push(
        Record::new(format!("degree(k={})", a.k), "witness", ctx.fmt(&witness.value), Provenance::Scan)
            .detail("order", witness.order.to_string())
            .detail("t", ctx.fmt(&witness.t)),
    );
    Ok(())
}

fn run_verify_cm(ctx: &mut Context, a: &VerifyCmArgs) -> Result<(), CliError> {
    let prec = ctx.prec;
    let (report, id) = match a.function {
        CmTarget::H => {
            let grid = ctx.grid(&a.grid, LogGrid::new(0.05, 1e3, 200).expect("static grid"))?;
            let max_order = a.max_order.unwrap_or(8);
            ctx.input("fn", "h");
            ctx.input("max_order", max_order);
            (check_sign_pattern(&HOracle, &grid, max_order, prec)?, "h".to_string())
        }
        CmTarget::Hk => {
            let grid = ctx.grid(&a.grid, LogGrid::new(1e-2, 1e6, 200).expect("static grid"))?;
            let max_order = a.max_order.unwrap_or(6);
            let r = a.r.unwrap_or(f64::from(a.k) + 1.0);
            if !r.is_finite() {
                return Err(CliError::usage("--r must be finite"));
            }
            ctx.input("fn", "hk");
            ctx.input("k", a.k);
            ctx.input("r", r);
            ctx.input("max_order", max_order);
            let oracle = ScaledTailOracle { series: TailSeries::remainder(a.k), r: prec.float(r) };
            (check_sign_pattern(&oracle, &grid, max_order, prec)?, format!("t^{r} H_{}", a.k))
        }
    };
    let mut record = Record::new(id, "sign-pattern", report.verdict(), Provenance::Scan)
        .pass(report.pass)
        .detail("max_order", report.max_order.to_string());
    if let Some(v) = &report.first_violation {
        record = record
            .detail("violation_order", v.order.to_string())
            .detail("violation_t", ctx.fmt(&v.t))
            .detail("violation_value", ctx.fmt(&v.value));
    }
    ctx.push(record);
    Ok(())
}

fn run_verify_integral(ctx: &mut Context, a: &VerifyIntegralArgs) -> Result<(), CliError> {
    let prec = ctx.prec;
    if !(a.rel_tol > 0.0 && a.rel_tol < 1.0) {
        return Err(CliError::usage("rel-tol must lie in (0, 1)"));
    }
    let z = parse_point(prec, "z", &a.z, true)?;
    let rep = match a.rep {
        RepArg::F12 => Representation::F12 { k: a.k },
        RepArg::Bessel => Representation::Bessel { k: a.k },
        RepArg::H => Representation::H,
        RepArg::HDeriv => {
            let n = require(a.n, "n", "h-deriv")?;
            if n == 0 {
                return Err(CliError::usage("n must be >= 1"));
            }
            Representation::HDeriv { n }
        }
    };
    ctx.input("rep", rep.name());
    ctx.input("z", &a.z);
    ctx.input("rel_tol", a.rel_tol);
    let v = verify_representation(rep, &z, a.rel_tol, prec)?;
    let id = format!("{}@z={}", rep.name(), a.z);
    ctx.push(Record::new(&id, "lhs", ctx.fmt(&v.lhs), Provenance::ClosedForm));
    ctx.push(
        Record::new(&id, "rhs", ctx.fmt(&v.rhs), Provenance::Quadrature)
            .detail("error_estimate", ctx.fmt(&v.quadrature.error_estimate))
            .detail("truncation_t", ctx.fmt(&v.quadrature.truncation_t))
            .detail("nodes_used", v.quadrature.nodes_used.to_string()),
    );
    ctx.push(Record::new(&id, "rel_err", ctx.fmt(&v.rel_err), Provenance::Quadrature).pass(v.pass));
    Ok(())
}

fn run_inequality(ctx: &mut Context, a: &InequalityArgs) -> Result<(), CliError> {
    let prec = ctx.prec;
    let report = match a.which {
        Which::Trigamma => {
            ctx.input("which", "trigamma");
            let grid = ctx.grid(&a.grid, default_trigamma_grid())?;
            check_ineq_trigamma(&grid, prec)?
        }
        Which::Bessel => {
            ctx.input("which", "bessel");
            let grid = ctx.grid(&a.grid, default_bessel_grid())?;
            check_ineq_bessel(&grid, prec)?
        }
        Which::Difference => {
            ctx.input("which", "difference");
            let i = require(a.i, "i", "the difference bound")?;
            let text = a.t.as_deref().ok_or_else(|| CliError::usage("--t is required for the difference bound"))?;
            let t = parse_point(prec, "t", text, true)?;
            ctx.input("i", i);
            ctx.input("t", text);
            let d = check_difference_bound(i, &t, prec)?;
            let id = format!("difference(i={i},t={text})");
            ctx.push(Record::new(&id, "lhs", ctx.fmt(&d.lhs), Provenance::ClosedForm));
            ctx.push(Record::new(&id, "rhs", ctx.fmt(&d.rhs), Provenance::Exact));
            ctx.push(
                Record::new(&id, "gap", ctx.fmt(&prec.float(&d.rhs - &d.lhs)), Provenance::ClosedForm).pass(d.pass),
            );
            return Ok(());
        }
    };
    ctx.push(
        Record::new(report.id, "min_margin", ctx.fmt(&report.min_margin), Provenance::Scan)
            .pass(report.pass)
            .detail("argmin_t", ctx.fmt(&report.argmin_t)),
    );
    Ok(())
}

/// `p/q`, an integer, or a decimal literal (converted exactly).
fn parse_rational(text: &str) -> Result<Rational, CliError> {
    let text = text.trim();
    if let Ok(q) = text.parse::<Rational>() {
        return Ok(q);
    }
    let (mantissa, exponent) =
        split_decimal(text).ok_or_else(|| CliError::usage(format!("--t: cannot parse {text:?} as a rational")))?;
    let scale = Rational::from(rug::Integer::from(rug::Integer::u_pow_u(10, exponent.unsigned_abs())));
    Ok(if exponent >= 0 { Rational::from(mantissa) * scale } else { Rational::from(mantissa) / scale })
}

/// `"-1.25e3"` to `(-125, 1)`.
fn split_decimal(text: &str) -> Option<(rug::Integer, i32)> {
    let (body, exp) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (int_part, frac_part) = match body.find('.') {
        Some(pos) => (&body[..pos], &body[pos + 1..]),
        None => (body, ""),
    };
    let digits = format!("{int_part}{frac_part}");
    let mantissa = digits.parse::<rug::Integer>().ok()?;
    Some((mantissa, exp - frac_part.len() as i32))
}

fn run_fpoly(ctx: &mut Context, a: &FpolyArgs) -> Result<(), CliError> {
    let prec = ctx.prec;
    let t = parse_rational(&a.t)?;
    if t <= 0 {
        return Err(CliError::usage("t must be > 0"));
    }
    let forms: Vec<FPolyForm> = if a.form.eq_ignore_ascii_case("all") {
        FPolyForm::ALL.to_vec()
    } else {
        vec![a.form.parse::<FPolyForm>()?]
    };
    ctx.input("i", a.i);
    ctx.input("t", t.to_string());
    ctx.input("form", &a.form);
    let reference = f_poly_exact(a.i, &t, FPolyForm::A)?.value;
    for form in forms {
        let v = f_poly_exact(a.i, &t, form)?;
        let mut record = Record::new(format!("f_{}(t={})", a.i, t), form.name(), ctx.fmt(&prec.float(&v.value)), Provenance::Exact)
            .detail("exact", v.value.to_string())
            .detail("validated", v.validated.to_string());
        if v.validated {
            let agrees = v.value == reference;
            record = record.detail("equals_A", agrees.to_string()).pass(agrees && v.value < 0);
        } else {
            record = record.detail("equals_A", (v.value == reference).to_string());
        }
        ctx.push(record);
    }
    Ok(())
}

fn run_suite(ctx: &mut Context, a: &SuiteArgs) -> Result<(), CliError> {
    let selected: Vec<u32> = if a.only.is_empty() { suite::CRITERIA.to_vec() } else { a.only.clone() };
    for &c in &selected {
        if !suite::CRITERIA.contains(&c) {
            return Err(CliError::usage(format!("--only: no criterion {c}; expected 1..=8")));
        }
    }
    ctx.input(
        "only",
        selected.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","),
    );
    for c in selected {
        let record = suite::run_criterion(c, ctx.prec)?;
        ctx.push(record);
    }
    Ok(())
}
