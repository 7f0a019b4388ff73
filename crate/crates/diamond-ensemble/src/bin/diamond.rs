//! Thin command-line front end over the library.
//!
//! Machine-readable JSON goes to stdout, diagnostics to stderr; the exit
//! code is zero exactly when the command succeeded (and, for `verify`, every
//! check passed). `DIAMOND_THREADS` caps internal parallelism.

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use diamond_ensemble::asymptotics::reference_constants;
use diamond_ensemble::cli::{
    cmd_asymptote, cmd_energy, cmd_expect, cmd_generate, cmd_verify, CliError, OutputFormat,
};

#[derive(Parser)]
#[command(
    name = "diamond",
    about = "Random low-energy point configurations on the unit sphere",
    long_about = "Generates randomized point configurations on the unit sphere from \
                  piecewise-linear parallel populations, evaluates exact and sampled \
                  energies, and reproduces the asymptotic energy constants.\n\n\
                  Profile specs use the grammar `name:key=value[,key=value]`:\n  \
                  simple:K=<k>,M=<m>   one linear piece r(x) = K x\n  \
                  elaborated:m=<m>     three pieces, N = 82 m^2 + 2\n  \
                  quasioptimal:m=<m>   six pieces, N = 239 m^2 + 2\n\n\
                  The environment variable DIAMOND_THREADS caps internal parallelism."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a point set and write it to disk (CSV + JSON sidecar, or JSON)
    Generate {
        /// Profile spec, e.g. `quasioptimal:m=2`
        #[arg(long)]
        spec: String,
        /// Phase-generator seed
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output path
        #[arg(long)]
        out: PathBuf,
        /// csv (with .json sidecar) or json (single document)
        #[arg(long, default_value = "csv")]
        format: OutputFormat,
    },
    /// Energy of a points CSV: logarithmic by default, Riesz with --s
    Energy {
        /// Input CSV (`x,y,z` header)
        #[arg(long)]
        input: PathBuf,
        /// Riesz exponent; omit for logarithmic energy
        #[arg(long)]
        s: Option<f64>,
    },
    /// Expected energy of a profile: A/B/C breakdown plus the symmetric
    /// formula when applicable
    Expect {
        #[arg(long)]
        spec: String,
    },
    /// Convergence of the extracted order-N constant over a scale list
    Asymptote {
        /// Family: `simple:K=<k>`, `elaborated`, or `quasioptimal`
        #[arg(long)]
        family: String,
        /// Comma-separated scales, e.g. `16,32,64,128,256`
        #[arg(long, value_delimiter = ',')]
        m: Vec<i64>,
    },
    /// Run an invariant suite: `formulas` or `montecarlo`
    Verify {
        suite: String,
        /// Trials for the montecarlo suite
        #[arg(long, default_value_t = 2000)]
        trials: u64,
        /// Base seed for trial derivation
        #[arg(long, default_value_t = 0)]
        base_seed: u64,
    },
    /// Print the reference-constant table
    Constants,
}

fn configure_threads() {
    if let Ok(v) = std::env::var("DIAMOND_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n >= 1 => {
                // ignore failure: the pool can only be built once per process
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => eprintln!("warning: ignoring invalid DIAMOND_THREADS=`{v}`"),
        }
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Generate {
            spec,
            seed,
            out,
            format,
        } => {
            let summary = cmd_generate(&spec, seed, &out, format)?;
            println!("{}", serde_json::to_string_pretty(&summary).unwrap());
            Ok(true)
        }
        Command::Energy { input, s } => {
            let report = cmd_energy(&input, s)?;
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
            Ok(true)
        }
        Command::Expect { spec } => {
            let report = cmd_expect(&spec)?;
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
            Ok(true)
        }
        Command::Asymptote { family, m } => {
            let out = cmd_asymptote(&family, &m)?;
            println!("{}", serde_json::to_string_pretty(&out.reports).unwrap());
            eprintln!(
                "convergence: {}",
                if out.converging {
                    "strictly improving"
                } else {
                    "not strictly improving"
                }
            );
            Ok(true)
        }
        Command::Verify {
            suite,
            trials,
            base_seed,
        } => {
            let summary = cmd_verify(&suite, trials, base_seed)?;
            for check in &summary.checks {
                println!(
                    "{} {} — {}",
                    if check.pass { "PASS" } else { "FAIL" },
                    check.name,
                    check.detail
                );
            }
            println!(
                "{}: {}",
                summary.suite,
                if summary.passed { "ok" } else { "failed" }
            );
            Ok(summary.passed)
        }
        Command::Constants => {
            println!(
                "{}",
                serde_json::to_string_pretty(&reference_constants()).unwrap()
            );
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(err) => {
            eprintln!("error: {err}");
            let mut source = std::error::Error::source(&err);
            while let Some(cause) = source {
                eprintln!("  caused by: {cause}");
                source = cause.source();
            }
            ExitCode::FAILURE
        }
    }
}
