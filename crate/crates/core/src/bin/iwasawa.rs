use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use iwasawa_core::cli::{self, CliError, OutputFormat};

#[derive(Parser)]
#[command(name = "iwasawa", version, about = "Iwasawa invariants and K(1)-local homotopy orders of finite spectra")]
struct Args {
    /// Output format
    #[arg(long, global = true, value_enum, env = cli::FORMAT_ENV, default_value = "table")]
    format: OutputFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Characteristic polynomials and λ, μ of every eigenspace
    Invariants {
        spectrum: PathBuf,
        #[arg(long)]
        prime_override: Option<u64>,
        /// p-adic precision of the reduced coefficients
        #[arg(long, default_value_t = cli::default_precision())]
        precision: u32,
    },
    /// Compare homotopy orders with characteristic polynomial values
    Imc {
        spectrum: PathBuf,
        #[arg(long, value_parser = cli::parse_m_range, allow_hyphen_values = true, default_value = "-10..10")]
        m_range: std::ops::RangeInclusive<i64>,
        #[arg(long)]
        prime_override: Option<u64>,
    },
    /// Graded averages over windows of length 2(p-1)p^k
    Growth {
        spectrum: PathBuf,
        #[arg(long, default_value_t = 4)]
        ladder: u32,
        /// Added to the default starting degree
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        skip: i64,
        /// Print averages without growth ratios
        #[arg(long)]
        average_only: bool,
        #[arg(long)]
        prime_override: Option<u64>,
    },
    /// Orders of π_t of the K(1)-local sphere
    SphereTable {
        #[arg(long)]
        prime: u64,
        #[arg(long, allow_hyphen_values = true, default_value_t = -2)]
        from: i64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 40)]
        to: i64,
    },
}

fn run(args: Args) -> Result<(String, bool), CliError> {
    let format = args.format;
    match args.command {
        Command::Invariants { spectrum, prime_override, precision } => {
            let s = cli::read_spectrum(&spectrum, prime_override)?;
            Ok((cli::render_invariants(&cli::invariants_report(&s, precision)?, format)?, true))
        }
        Command::Imc { spectrum, m_range, prime_override } => {
            let s = cli::read_spectrum(&spectrum, prime_override)?;
            let report = cli::imc_report(&s, m_range);
            Ok((cli::render_imc(&report, format)?, report.report.all_in_window_match()))
        }
        Command::Growth { spectrum, ladder, skip, average_only, prime_override } => {
            let s = cli::read_spectrum(&spectrum, prime_override)?;
            Ok((cli::render_growth(&cli::growth_report(&s, ladder, skip, average_only)?, format)?, true))
        }
        Command::SphereTable { prime, from, to } => {
            Ok((cli::render_sphere_table(&cli::sphere_table(prime, from, to)?, format)?, true))
        }
    }
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok((out, ok)) => {
            let _ = std::io::stdout().write_all(out.as_bytes());
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
