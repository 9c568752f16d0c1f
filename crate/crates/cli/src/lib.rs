//! Command-line front end: special functions, operators, solving and
//! checking variational problems, and the reproduction of the fractional
//! isoperimetric example family.
//!
//! Exit codes: 0 on success, 1 on invalid input, 2 when a result misses
//! its tolerance.

pub mod csvio;
pub mod error;
pub mod format;
pub mod problem;
pub mod reference;
pub mod repro;

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use fracvar::fracops::{
    combined_caputo, dual_combined_rl, left_caputo, left_rlfd, left_rlfi, right_caputo, right_rlfd,
    right_rlfi,
};
use fracvar::solver::solve;
use fracvar::specfun::mittag_leffler;
use fracvar::variational::el_residual;
use fracvar::{FractionalParams, Grid, LagrangianExpr, MultiplierSet, PointBinding, SampledPath, Var};
use serde::Serialize;

pub use error::{CliError, Result};
use format::real;
use problem::{OptionsFile, ProblemFile};

#[derive(Debug, Parser)]
#[command(name = "frac", version, about = "Fractional variational calculus toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the Mittag-Leffler function E_alpha(z).
    Ml {
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, allow_negative_numbers = true)]
        z: f64,
    },
    /// Apply a fractional operator to a function of x sampled on a grid.
    Op {
        #[arg(long, value_enum)]
        kind: OpKind,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
        /// `a,b,n`
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        /// Expression in `x`.
        #[arg(long = "fn", allow_hyphen_values = true)]
        function: String,
        /// Output file (standard output when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve a problem file; writes the path and `<out>.report.json`.
    Solve {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long)]
        opts: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check the optimality conditions of a sampled path.
    CheckEl {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long)]
        path: PathBuf,
        /// Comma-separated multipliers, one per constraint.
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
        #[arg(long, default_value_t = CHECK_TOLERANCE)]
        tol: f64,
    },
    /// Solve the isoperimetric example for several orders and compare with
    /// the reference extremals.
    Reproduce {
        #[arg(long, default_value = "0.05,0.5,0.95")]
        alphas: String,
        #[arg(long, default_value_t = 1.0)]
        xi: f64,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        /// Write the report table as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory receiving one problem file per order.
        #[arg(long)]
        write_problems: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OpKind {
    Lrlfi,
    Rrlfi,
    Lcaputo,
    Rcaputo,
    Lrlfd,
    Rrlfd,
    Combined,
    Dual,
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code. Diagnostics go to standard error.
pub fn run<I, T>(args: I, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command, stdout) {
        Ok(Outcome::Success) => 0,
        Ok(Outcome::OutOfTolerance) => 2,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

/// Configures logging from `FRAC_LOG` (`quiet`, `info` or `debug`).
pub fn init_logging() {
    let level = match std::env::var("FRAC_LOG").as_deref() {
        Ok("debug") => log::LevelFilter::Debug,
        Ok("info") => log::LevelFilter::Info,
        Ok("quiet") => log::LevelFilter::Off,
        _ => log::LevelFilter::Warn,
    };
    let _ = env_logger::Builder::new().filter_level(level).try_init();
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    OutOfTolerance,
}

fn execute(command: Command, stdout: &mut dyn Write) -> Result<Outcome> {
    match command {
        Command::Ml { alpha, z } => {
            if !(alpha > 0.0 && alpha <= 1.0) {
                return Err(CliError::invalid(format!("alpha must lie in (0, 1], got {alpha}")));
            }
            let v = mittag_leffler(alpha, z)?;
            writeln!(stdout, "{}", real(v)).map_err(|e| CliError::io("stdout", e))?;
            Ok(Outcome::Success)
        }
        Command::Op {
            kind,
            alpha,
            beta,
            gamma,
            grid,
            function,
            out,
        } => {
            let grid = parse_grid(&grid)?;
            let f = sample_function(&function, &grid)?;
            let params = || -> Result<FractionalParams> {
                let (Some(b), Some(g)) = (beta, gamma) else {
                    return Err(CliError::invalid("--beta and --gamma are required for this kind"));
                };
                Ok(FractionalParams::new(alpha, b, g)?)
            };
            let value = match kind {
                OpKind::Lrlfi => left_rlfi(&f, alpha)?,
                OpKind::Rrlfi => right_rlfi(&f, alpha)?,
                OpKind::Lcaputo => left_caputo(&f, alpha)?,
                OpKind::Rcaputo => right_caputo(&f, alpha)?,
                OpKind::Lrlfd => left_rlfd(&f, alpha)?,
                OpKind::Rrlfd => right_rlfd(&f, alpha)?,
                OpKind::Combined => combined_caputo(&f, &params()?)?,
                OpKind::Dual => dual_combined_rl(&f, &params()?)?,
            };
            let rows = (0..grid.len()).map(|k| vec![grid.node(k), value.at(0, k)]);
            let header = ["x".to_string(), "value".to_string()];
            match out {
                Some(path) => csvio::write_table(create(&path)?, &header, rows)?,
                None => csvio::write_table(&mut *stdout, &header, rows)?,
            }
            Ok(Outcome::Success)
        }
        Command::Solve { problem, opts, out } => cmd_solve(&problem, opts.as_deref(), &out, stdout),
        Command::CheckEl {
            problem,
            path,
            lambda,
            tol,
        } => cmd_check_el(&problem, &path, lambda.as_deref(), tol, stdout),
        Command::Reproduce {
            alphas,
            xi,
            n,
            out,
            write_problems,
        } => {
            let alphas = parse_list(&alphas, "--alphas")?;
            let report = repro::reproduce(&alphas, xi, n, write_problems.as_deref())?;
            write!(stdout, "{}", report.table()).map_err(|e| CliError::io("stdout", e))?;
            if let Some(path) = out {
                report.write_csv(create(&path)?)?;
            }
            Ok(if report.passed() {
                Outcome::Success
            } else {
                Outcome::OutOfTolerance
            })
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(|e| CliError::io(path, e))?))
}

fn parse_list(text: &str, what: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::invalid(format!("{what}: `{s}` is not a number")))
        })
        .collect()
}

/// Parses `a,b,n`.
pub fn parse_grid(text: &str) -> Result<Grid> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let [a, b, n] = parts[..] else {
        return Err(CliError::invalid(format!("--grid expects a,b,n, got `{text}`")));
    };
    let num = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| CliError::invalid(format!("--grid: `{s}` is not a number")))
    };
    let n = n
        .parse::<usize>()
        .map_err(|_| CliError::invalid(format!("--grid: `{n}` is not a subinterval count")))?;
    Ok(Grid::new(num(a)?, num(b)?, n)?)
}

/// Samples an expression in `x` at the grid nodes.
pub fn sample_function(text: &str, grid: &Grid) -> Result<SampledPath> {
    let e = LagrangianExpr::parse(text, 1)
        .map_err(|err| CliError::invalid(format!("--fn `{text}`: {err}")))?;
    if [Var::Y(0), Var::Dy(0), Var::Frac(0)].into_iter().any(|v| e.depends_on(v)) {
        return Err(CliError::invalid(format!("--fn `{text}` may only use x")));
    }
    let values = grid
        .nodes()
        .into_iter()
        .map(|x| {
            e.eval(&PointBinding {
                x,
                y: &[0.0],
                dy: &[0.0],
                frac: &[0.0],
            })
        })
        .collect::<fracvar::Result<Vec<_>>>()?;
    Ok(SampledPath::scalar(*grid, values)?)
}

/// Default tolerance of `frac check-el`, also used for the transversality
/// verdict in solve reports.
pub const CHECK_TOLERANCE: f64 = 0.05;

#[derive(Debug, Serialize)]
pub struct TransversalityReport {
    pub component: usize,
    pub value: f64,
    pub flux: f64,
    pub satisfied: bool,
}

/// Contents of the `<out>.report.json` sidecar written by `frac solve`.
#[derive(Debug, Serialize)]
pub struct SolveSummary {
    pub converged: bool,
    pub iterations: usize,
    pub objective: f64,
    pub gradient_norm: f64,
    pub multipliers: Vec<f64>,
    pub el_max: Vec<f64>,
    pub transversality: Option<TransversalityReport>,
    pub constraint_violations: Vec<f64>,
    pub slackness: Vec<f64>,
    pub warnings: Vec<String>,
}

fn sidecar(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".report.json");
    PathBuf::from(name)
}

fn cmd_solve(problem: &Path, opts: Option<&Path>, out: &Path, stdout: &mut dyn Write) -> Result<Outcome> {
    let spec = ProblemFile::read(problem)?.to_spec()?;
    let options = match opts {
        Some(p) => OptionsFile::read(p)?.to_options()?,
        None => OptionsFile::default().to_options()?,
    };
    let report = solve(&spec, &options)?;
    csvio::write_path(create(out)?, &report.path)?;
    let summary = SolveSummary {
        converged: report.converged,
        iterations: report.iterations,
        objective: report.objective,
        gradient_norm: report.gradient_norm,
        multipliers: report.multipliers.values().to_vec(),
        el_max: report.residual.el_max_per_component(),
        transversality: report.residual.transversality.map(|t| TransversalityReport {
            component: t.component + 1,
            value: t.value,
            flux: t.flux,
            satisfied: t.satisfied(CHECK_TOLERANCE),
        }),
        constraint_violations: report.residual.constraint_violations.clone(),
        slackness: report.residual.slackness.clone(),
        warnings: report.warnings.clone(),
    };
    problem::write_json(&sidecar(out), &summary)?;
    let w = |e| CliError::io("stdout", e);
    writeln!(stdout, "converged: {}", report.converged).map_err(w)?;
    writeln!(stdout, "iterations: {}", report.iterations).map_err(w)?;
    writeln!(stdout, "objective: {}", real(report.objective)).map_err(w)?;
    for (j, l) in report.multipliers.values().iter().enumerate() {
        writeln!(stdout, "lambda{}: {}", j + 1, real(*l)).map_err(w)?;
    }
    for warning in &report.warnings {
        log::warn!("{warning}");
    }
    Ok(if report.converged {
        Outcome::Success
    } else {
        Outcome::OutOfTolerance
    })
}

fn cmd_check_el(
    problem: &Path,
    path: &Path,
    lambda: Option<&str>,
    tol: f64,
    stdout: &mut dyn Write,
) -> Result<Outcome> {
    if !(tol > 0.0) {
        return Err(CliError::invalid(format!("--tol must be positive, got {tol}")));
    }
    let spec = ProblemFile::read(problem)?.to_spec()?;
    let y = csvio::read_path(path, spec.grid(), spec.dim())?;
    let multipliers = lambda.map(|l| parse_list(l, "--lambda")).transpose()?.map(MultiplierSet::new);
    let residual = el_residual(&spec, &y, multipliers.as_ref())?;
    let w = |e| CliError::io("stdout", e);
    let verdict = |ok: bool| if ok { "ok" } else { "FAIL" };
    let mut pass = true;
    for (i, m) in residual.el_max_per_component().iter().enumerate() {
        let ok = *m <= tol;
        pass &= ok;
        writeln!(stdout, "el_max y{}: {} {}", i + 1, real(*m), verdict(ok)).map_err(w)?;
    }
    if let Some(t) = residual.transversality {
        let ok = t.satisfied(tol);
        pass &= ok;
        writeln!(
            stdout,
            "transversality y{}: {} (discrete flux {}) {}",
            t.component + 1,
            real(t.value),
            real(t.flux),
            verdict(ok)
        )
        .map_err(w)?;
    }
    let violations = residual.max_violation(spec.constraints());
    for (j, v) in residual.constraint_violations.iter().enumerate() {
        writeln!(stdout, "constraint {}: violation {}", j + 1, real(*v)).map_err(w)?;
    }
    if !residual.constraint_violations.is_empty() {
        let ok = violations <= tol;
        pass &= ok;
        writeln!(stdout, "max violation: {} {}", real(violations), verdict(ok)).map_err(w)?;
    }
    for (j, s) in residual.slackness.iter().enumerate() {
        let ok = s.abs() <= tol;
        pass &= ok;
        writeln!(stdout, "slackness {}: {} {}", j + 1, real(*s), verdict(ok)).map_err(w)?;
    }
    writeln!(stdout, "{}", if pass { "PASS" } else { "FAIL" }).map_err(w)?;
    Ok(if pass {
        Outcome::Success
    } else {
        Outcome::OutOfTolerance
    })
}
