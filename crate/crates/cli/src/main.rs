//! Command-line front end for the exact h-space verifier.
//!
//! `hspace33 check <which>` samples certified regular points and runs the
//! selected checks; `hspace33 print-model` prints the model itself. Exit
//! codes: 0 every check passed or was skipped, 1 at least one check failed,
//! 2 the configuration was unusable (bad file, bad parameters, sampling or
//! usage error).

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hspace_core::verify::{run_selected, CheckKind, VerificationReport};
use hspace_core::{parse_params_file, render_params, HSpaceModel, HSpaceParams, SampleStrategy};

#[derive(Parser)]
#[command(
    name = "hspace33",
    version,
    about = "Exact verifier for a six-dimensional h-space of Segre type [33]"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification checks over sampled regular points.
    Check {
        /// Which check to run; `all` also runs the engine hygiene checks.
        #[arg(value_enum)]
        which: Which,
        #[command(flatten)]
        opts: CheckOpts,
    },
    /// Print the parameters, the defining function and the nonzero tensor
    /// components in expression syntax.
    PrintModel {
        /// Parameter file (defaults to the built-in parameters).
        #[arg(long)]
        params: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    All,
    Eisenhart,
    Integrability,
    Curvature,
    Parallel,
    Defining,
    Segre,
}

impl Which {
    fn kinds(self) -> Vec<CheckKind> {
        match self {
            Which::All => CheckKind::ALL.to_vec(),
            Which::Eisenhart => vec![CheckKind::Eisenhart],
            Which::Integrability => vec![CheckKind::Integrability],
            Which::Curvature => vec![CheckKind::Curvature],
            Which::Parallel => vec![CheckKind::Parallel],
            Which::Defining => vec![CheckKind::Defining],
            Which::Segre => vec![CheckKind::Segre],
        }
    }

    fn include_hygiene(self) -> bool {
        matches!(self, Which::All)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct CheckOpts {
    /// Parameter file (defaults to the built-in parameters).
    #[arg(long)]
    params: Option<PathBuf>,
    /// Seed for the point sampler.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Number of certified regular points to check at.
    #[arg(long, default_value_t = 20)]
    samples: usize,
    /// Sampling box: numerators in [-magnitude, magnitude], denominators in
    /// [1, magnitude].
    #[arg(long, default_value_t = 50)]
    magnitude: i64,
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check { which, opts } => check(which, &opts),
        Command::PrintModel { params } => print_model(params.as_deref()),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn load_params(path: Option<&Path>) -> Result<HSpaceParams, String> {
    match path {
        None => Ok(HSpaceParams::default()),
        Some(p) => {
            let text =
                fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
            parse_params_file(&text).map_err(|e| format!("{}: {e}", p.display()))
        }
    }
}

fn check(which: Which, opts: &CheckOpts) -> Result<u8, String> {
    if opts.magnitude < 1 {
        return Err("--magnitude must be at least 1".into());
    }
    let params = load_params(opts.params.as_deref())?;
    let strategy = SampleStrategy {
        seed: opts.seed,
        count: opts.samples,
        magnitude: opts.magnitude,
        max_rejections: 10_000,
    };
    let report = run_selected(&params, &strategy, &which.kinds(), which.include_hygiene());
    let rendered = match opts.format {
        Format::Text => report.to_text(),
        Format::Json => report.to_json(),
    };
    match &opts.out {
        Some(path) => fs::write(path, rendered)
            .map_err(|e| format!("{}: {e}", path.display()))?,
        None => write_stdout(&rendered)?,
    }
    Ok(verdict_code(&report))
}

/// Write to stdout, treating a closed pipe as a normal early exit rather
/// than an error.
fn write_stdout(text: &str) -> Result<(), String> {
    match io::stdout().write_all(text.as_bytes()) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        Err(e) => Err(format!("stdout: {e}")),
    }
}

fn verdict_code(report: &VerificationReport) -> u8 {
    if report.configuration_failure().is_some() {
        2
    } else if report.all_passed() {
        0
    } else {
        1
    }
}

fn print_model(params_path: Option<&Path>) -> Result<u8, String> {
    let params = load_params(params_path)?;
    let model = HSpaceModel::build(params).map_err(|e| e.to_string())?;

    let mut out = String::new();
    let _ = writeln!(out, "# parameters");
    let _ = write!(out, "{}", render_params(model.params()));

    let _ = writeln!(out);
    let _ = writeln!(out, "# defining function");
    let _ = writeln!(out, "phi = {}", model.phi().clone().simplify());

    let blocks = [
        ("g", model.metric().as_tensor()),
        ("a", model.a_tensor()),
        ("h", model.h()),
    ];
    for (label, tensor) in blocks {
        let _ = writeln!(out);
        let _ = writeln!(out, "# {label} (nonzero components, symmetric, 1-based indices)");
        for i in 0..hspace_core::DIM {
            for j in i..hspace_core::DIM {
                let component = tensor.component(&[i, j]).clone().simplify();
                if !component.is_zero() {
                    let _ = writeln!(out, "{label}[{},{}] = {component}", i + 1, j + 1);
                }
            }
        }
    }
    write_stdout(&out)?;
    Ok(0)
}
