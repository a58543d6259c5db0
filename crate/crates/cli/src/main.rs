use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use periodist_cli::{render, run_file, CliError, Command, Format, Overrides};

/// Tempered sequences on Z^d: corona witnesses, Bézout cofactors, stable-rank
/// reductions and periodic Fourier coefficients.
#[derive(Debug, Parser)]
#[command(name = "periodist", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// JSON job file.
    #[arg(long)]
    spec: PathBuf,
    /// Truncation window R (shells ‖n‖₁ ≤ R).
    #[arg(long)]
    window: Option<u64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("PERIODIST_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Input(format!("PERIODIST_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Input(e.to_string()))
}

fn execute(args: &Args) -> Result<i32, CliError> {
    configure_threads()?;
    let overrides = Overrides {
        window: args.window,
        epsilon: args.epsilon,
    };
    let report = run_file(args.command, &args.spec, &overrides)?;
    let text = render(&report, args.format)?;
    match &args.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match execute(&args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("periodist: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
