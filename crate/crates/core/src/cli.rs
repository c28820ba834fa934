//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 invalid input, 3 IO error.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::entanglement::{concurrence_pair, Pair};
use crate::error::{Error, Result};
use crate::model::{closed_form_eigensystem, EigenSystem, ModelParams};
use crate::oracle::{evaluate_grid, Grid};
use crate::sweep::{
    evaluate_sweep, figure_file_name, figure_rows, format_significant, limit_table, parse_list,
    parse_range, resolve_sweep, write_csv, Coupling, SweepFile, SweepOverrides,
};
use crate::thermal::ThermalParams;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "xxring",
    version,
    about = "Thermal concurrence of the three-qubit XX ring with a field impurity",
    allow_negative_numbers = true
)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Concurrence at a single point.
    Eval(EvalArgs),
    /// Concurrence over a B × tau grid, written as CSV.
    Sweep(SweepArgs),
    /// Preset sweeps for figures 1-4.
    Figure(FigureArgs),
    /// Zero-temperature limits and the zero-field threshold.
    Limits,
    /// Cross-check the closed form against exact diagonalization.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct EvalArgs {
    /// Coupling sign, 1 or -1.
    #[arg(long)]
    j: Coupling,
    #[arg(long)]
    b: f64,
    #[arg(long)]
    tau: f64,
    #[arg(long, default_value = "12")]
    pair: Pair,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct SweepArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    pair: Option<Pair>,
    #[arg(long)]
    j: Option<Coupling>,
    /// Comma-separated field values.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "b_range")]
    b: Option<String>,
    /// min:max:count
    #[arg(long, allow_hyphen_values = true)]
    b_range: Option<String>,
    /// Comma-separated temperatures.
    #[arg(long, conflicts_with = "tau_range")]
    tau: Option<String>,
    /// min:max:count
    #[arg(long)]
    tau_range: Option<String>,
    /// Output CSV file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FigureArgs {
    /// Figure number, 1-4.
    id: u32,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Append a field value to the grid.
    #[arg(long)]
    b_max: Option<f64>,
    /// Prepend a temperature to the grid.
    #[arg(long)]
    tau_min: Option<f64>,
    /// Replace the field values, min:max:count.
    #[arg(long, allow_hyphen_values = true)]
    b_range: Option<String>,
    /// Replace the temperatures, min:max:count.
    #[arg(long)]
    tau_range: Option<String>,
}

enum Failure {
    Invalid(Error),
    Io(PathBuf, io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Invalid(e)
    }
}

type CmdResult = std::result::Result<i32, Failure>;

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> Failure + '_ {
    move |e| Failure::Io(path.to_path_buf(), e)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                EXIT_INVALID
            } else {
                let _ = write!(stdout, "{text}");
                EXIT_OK
            };
        }
    };

    let outcome = match cli.threads {
        Some(0) => Err(Failure::Invalid(Error::InvalidInput("--threads must be at least 1".into()))),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => {
                let mut buf = Vec::new();
                let result = pool.install(|| dispatch(cli.command, &mut buf));
                stdout.write_all(&buf).map_err(stdout_err).and(result)
            }
            Err(e) => Err(Failure::Invalid(Error::InvalidInput(format!("thread pool: {e}")))),
        },
        None => dispatch(cli.command, stdout),
    };

    match outcome {
        Ok(code) => code,
        Err(Failure::Invalid(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_INVALID
        }
        Err(Failure::Io(path, e)) => {
            let _ = writeln!(stderr, "error: {}: {e}", path.display());
            EXIT_IO
        }
    }
}

fn dispatch(command: Command, stdout: &mut dyn Write) -> CmdResult {
    match command {
        Command::Eval(a) => eval(a, stdout),
        Command::Sweep(a) => sweep(a, stdout),
        Command::Figure(a) => figure(a, stdout),
        Command::Limits => limits(stdout),
        Command::Verify(a) => {
            let grid = verify_grid(&a)?;
            Ok(run_verify(&grid, closed_form_eigensystem, stdout))
        }
    }
}

fn stdout_err(e: io::Error) -> Failure {
    Failure::Io(PathBuf::from("<stdout>"), e)
}

fn eval(a: EvalArgs, stdout: &mut dyn Write) -> CmdResult {
    let params = ModelParams::new(a.j.j(), a.b)?;
    let tp = ThermalParams::new(a.tau)?;
    let c = concurrence_pair(&params, &tp, a.pair)?;
    writeln!(stdout, "{}", format_significant(c, 12)).map_err(stdout_err)?;
    Ok(EXIT_OK)
}

fn sweep(a: SweepArgs, stdout: &mut dyn Write) -> CmdResult {
    let file = a.config.as_deref().map(SweepFile::load).transpose()?;
    let file_threads = file.as_ref().and_then(|f| f.threads);
    let flags = SweepOverrides {
        pair: a.pair,
        coupling: a.j,
        b: a.b.as_deref().map(parse_list).transpose()?,
        b_range: a.b_range,
        tau: a.tau.as_deref().map(parse_list).transpose()?,
        tau_range: a.tau_range,
        out: a.out,
    };
    let config = resolve_sweep(file, flags)?;
    let rows = match file_threads {
        Some(n) if rayon::current_thread_index().is_none() && n > 0 => {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?
                .install(|| evaluate_sweep(&config))?
        }
        Some(0) => return Err(Error::InvalidInput("threads must be at least 1".into()).into()),
        _ => evaluate_sweep(&config)?,
    };
    match &config.out {
        Some(path) => {
            let file = File::create(path).map_err(io_err(path))?;
            write_csv(BufWriter::new(file), &rows).map_err(io_err(path))?;
        }
        None => write_csv(&mut *stdout, &rows).map_err(stdout_err)?,
    }
    Ok(EXIT_OK)
}

fn figure(a: FigureArgs, stdout: &mut dyn Write) -> CmdResult {
    let rows = figure_rows(a.id)?;
    fs::create_dir_all(&a.out).map_err(io_err(&a.out))?;
    let path = a.out.join(figure_file_name(a.id));
    let file = File::create(&path).map_err(io_err(&path))?;
    write_csv(BufWriter::new(file), &rows).map_err(io_err(&path))?;
    writeln!(stdout, "{}: {} rows", path.display(), rows.len()).map_err(stdout_err)?;
    Ok(EXIT_OK)
}

fn limits(stdout: &mut dyn Write) -> CmdResult {
    let rows = limit_table()?;
    let mut text = String::from("label\tcomputed\texpected\ttolerance\tresult\n");
    for r in &rows {
        text.push_str(&format!(
            "{}\t{}\t{}\t{:e}\t{}\n",
            r.label,
            format_significant(r.computed, 12),
            format_significant(r.expected, 12),
            r.tolerance,
            if r.passed() { "PASS" } else { "FAIL" }
        ));
    }
    stdout.write_all(text.as_bytes()).map_err(stdout_err)?;
    Ok(if rows.iter().all(|r| r.passed()) { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

fn verify_grid(a: &VerifyArgs) -> Result<Grid> {
    let mut grid = Grid::default();
    if let Some(r) = &a.b_range {
        grid.b_values = parse_range(r)?;
    }
    if let Some(r) = &a.tau_range {
        grid.tau_values = parse_range(r)?;
    }
    if let Some(b) = a.b_max {
        if !b.is_finite() {
            return Err(Error::InvalidInput(format!("--b-max {b} is not finite")));
        }
        grid.b_values.push(b);
    }
    if let Some(tau) = a.tau_min {
        ThermalParams::new(tau)?;
        grid.tau_values.insert(0, tau);
    }
    if grid.is_empty() {
        return Err(Error::InvalidInput("verification grid is empty".into()));
    }
    for &tau in &grid.tau_values {
        ThermalParams::new(tau)?;
    }
    Ok(grid)
}

/// Runs the cross-check with a given closed-form provider, prints the
/// report and returns the exit code.
pub fn run_verify<F>(grid: &Grid, closed_form: F, stdout: &mut dyn Write) -> i32
where
    F: Fn(&ModelParams) -> Result<EigenSystem> + Sync,
{
    match evaluate_grid(grid, closed_form) {
        Ok(report) => {
            let _ = writeln!(stdout, "{report}");
            if report.passed() {
                EXIT_OK
            } else {
                EXIT_VERIFY_FAILED
            }
        }
        Err(e) => {
            let _ = writeln!(stdout, "error: {e}");
            match e {
                Error::ToleranceExceeded { .. } => EXIT_VERIFY_FAILED,
                _ => EXIT_INVALID,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("xxring").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn eval_prints_twelve_digits() {
        let (code, out, _) = run_str(&["eval", "--j", "-1", "--b", "0", "--tau", "0.5", "--pair", "12"]);
        assert_eq!(code, 0);
        let v: f64 = out.trim().parse().unwrap();
        assert!((v - 0.305).abs() < 1e-3, "{v}");
    }

    #[test]
    fn eval_rejects_bad_input() {
        let (code, _, err) = run_str(&["eval", "--j", "1", "--b", "0", "--tau", "0"]);
        assert_eq!(code, EXIT_INVALID);
        assert!(err.contains("temperature"), "{err}");
        assert_eq!(run_str(&["eval", "--j", "2", "--b", "0", "--tau", "1"]).0, EXIT_INVALID);
        assert_eq!(run_str(&["eval", "--j", "1", "--b", "0", "--tau", "1", "--pair", "14"]).0, EXIT_INVALID);
        assert_eq!(run_str(&["bogus"]).0, EXIT_INVALID);
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_str(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("sweep"));
    }

    #[test]
    fn sweep_to_stdout() {
        let (code, out, _) = run_str(&["sweep", "--j", "-1", "--b", "-1,1", "--tau-range", "0.5:1:2"]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[0], "pair,j_sign,B,tau,concurrence");
        assert!(lines[1].starts_with("12,-1,-1,0.5,"));
    }

    #[test]
    fn sweep_needs_axes() {
        assert_eq!(run_str(&["sweep", "--b", "1"]).0, EXIT_INVALID);
        assert_eq!(run_str(&["sweep", "--b", "1", "--tau-range", "0.1:1:0"]).0, EXIT_INVALID);
    }

    #[test]
    fn zero_threads_rejected() {
        assert_eq!(run_str(&["--threads", "0", "limits"]).0, EXIT_INVALID);
    }

    #[test]
    fn verify_grid_flags() {
        let a = VerifyArgs { b_max: Some(50.0), tau_min: Some(0.005), b_range: None, tau_range: None };
        let g = verify_grid(&a).unwrap();
        assert_eq!(*g.b_values.last().unwrap(), 50.0);
        assert_eq!(g.tau_values[0], 0.005);
        let bad = VerifyArgs { b_max: None, tau_min: Some(-1.0), b_range: None, tau_range: None };
        assert!(verify_grid(&bad).is_err());
    }
}
