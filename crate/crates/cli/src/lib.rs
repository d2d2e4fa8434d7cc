//! The `sgx` command line: run, verify and sweep `.sgx` experiments.
//!
//! Exit codes: 0 success, 1 unreadable or invalid input, 2 runtime failure
//! (including failed `verify` assertions), 3 `verify` on a network it does not
//! know how to check.

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use sgx_core::{build_network, parse_experiment, BeamNetwork, ExperimentSpec, ReportFormat};

pub mod run;
pub mod sweep;
pub mod verify;

#[derive(Debug)]
pub enum CliError {
    /// Missing file, parse or validation failure.
    Input(String),
    Runtime(String),
    /// `verify` on an unsupported topology.
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Runtime(_) => 2,
            CliError::Domain(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Runtime(m) | CliError::Domain(m) => m,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "sgx", version, about = "Cascaded Stern-Gerlach measurements and the energy they inject")]
pub struct Cli {
    /// Worker threads for Monte Carlo (0 or unset: all available).
    #[arg(long, global = true, env = "SGX_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Propagate an experiment and print its beam table.
    Run(RunArgs),
    /// Check the bundled experiment (or its no-B variant) against the expected beam table.
    Verify(VerifyArgs),
    /// Rerun an experiment over a range of one parameter.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Expectation,
    Montecarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Table => ReportFormat::Table,
            Format::Csv => ReportFormat::Csv,
            Format::Json => ReportFormat::Json,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct EngineArgs {
    #[arg(long, value_enum, default_value_t = Mode::Expectation)]
    pub mode: Mode,

    /// Monte Carlo seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Source particle count (overrides the file's `count=`).
    #[arg(long)]
    pub particles: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    pub input: PathBuf,

    #[command(flatten)]
    pub engine: EngineArgs,

    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,

    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    pub input: PathBuf,
}

#[derive(Debug, Clone, Args)]
#[command(allow_negative_numbers = true)]
pub struct SweepArgs {
    pub input: PathBuf,

    /// `alpha` or `time:<splitter>`.
    #[arg(long)]
    pub param: String,

    #[arg(long)]
    pub from: f64,

    #[arg(long)]
    pub to: f64,

    /// Number of evenly spaced values, endpoints included.
    #[arg(long)]
    pub steps: usize,

    #[command(flatten)]
    pub engine: EngineArgs,

    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,

    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn load_spec(path: &Path) -> Result<ExperimentSpec, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read `{}`: {e}", path.display())))?;
    parse_experiment(&text).map_err(|e| CliError::Input(format!("{}:{e}", path.display())))
}

pub fn build(spec: &ExperimentSpec, path: &Path) -> Result<BeamNetwork, CliError> {
    build_network(spec).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn emit(text: &str, out: Option<&Path>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) => {
            std::fs::write(path, text)
                .map_err(|e| CliError::Runtime(format!("cannot write `{}`: {e}", path.display())))?;
            let _ = writeln!(stderr, "sgx: wrote {}", path.display());
        }
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Runtime(format!("cannot write output: {e}")))?,
    }
    Ok(())
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    match &cli.command {
        Command::Run(args) => {
            let text = run::run(args)?;
            emit(&text, args.out.as_deref(), stdout, stderr)?;
            Ok(0)
        }
        Command::Verify(args) => {
            let report = verify::verify(&args.input)?;
            for check in &report.checks {
                let _ = writeln!(stdout, "{check}");
            }
            let failed = report.checks.iter().filter(|c| !c.passed).count();
            let _ = writeln!(
                stdout,
                "{}: {} of {} assertions passed ({})",
                if failed == 0 { "PASS" } else { "FAIL" },
                report.checks.len() - failed,
                report.checks.len(),
                report.shape
            );
            Ok(if failed == 0 { 0 } else { 2 })
        }
        Command::Sweep(args) => {
            let table = sweep::sweep(args)?;
            emit(&table.render(args.format), args.out.as_deref(), stdout, stderr)?;
            Ok(0)
        }
    }
}

/// Parses `args` (program name first) and executes the command. Never panics;
/// always returns one of the documented exit codes.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = stderr.write_all(rendered.as_bytes());
            } else {
                let _ = stdout.write_all(rendered.as_bytes());
            }
            return code;
        }
    };

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads.filter(|&n| n > 0) {
        builder = builder.num_threads(n);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(stderr, "sgx: cannot start worker threads: {e}");
            return 2;
        }
    };

    let mut out_buf = Vec::new();
    let mut err_buf = Vec::new();
    let outcome = catch_unwind(AssertUnwindSafe(|| pool.install(|| dispatch(&cli, &mut out_buf, &mut err_buf))));
    let _ = stdout.write_all(&out_buf);
    let _ = stderr.write_all(&err_buf);
    match outcome {
        Ok(Ok(code)) => code,
        Ok(Err(e)) => {
            let _ = writeln!(stderr, "sgx: {}", e.message());
            e.exit_code()
        }
        Err(_) => {
            let _ = writeln!(stderr, "sgx: internal error");
            2
        }
    }
}
