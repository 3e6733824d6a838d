//! Command-line entry point.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use angleapprox_harness::config::{builtin_config, ExperimentConfig};
use angleapprox_harness::suites::{run_suite, RunOptions, SuiteKind};

#[derive(Parser)]
#[command(
    name = "angleapprox",
    version,
    about = "Empirical verification suites for mixed smoothness and angular approximation in Lorentz spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Modulus-of-smoothness property suite
    VerifyProperties(SuiteArgs),
    /// Realization identity: modulus against residual plus derivative terms
    Realization(SuiteArgs),
    /// Inverse estimates: modulus against weighted best-approximation sums
    Inverse {
        #[arg(long, value_enum, default_value_t = Variant::Sharp)]
        variant: Variant,
        #[command(flatten)]
        args: SuiteArgs,
    },
    /// Direct estimate: best approximation against the modulus
    Direct(SuiteArgs),
    /// Lacunary-series comparisons on the coefficient lattice
    Lacunary(SuiteArgs),
    /// Norms with grid-convergence estimates
    Norms(SuiteArgs),
    /// Print a built-in suite configuration as JSON
    DumpConfig { suite: String },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Variant {
    Natural,
    Sharp,
}

#[derive(Args)]
struct SuiteArgs {
    /// Experiment configuration (JSON)
    #[arg(long)]
    config: PathBuf,
    /// Record ratio bands into the baseline instead of checking against it
    #[arg(long)]
    freeze: bool,
    /// Baseline file (overrides the config's path)
    #[arg(long)]
    baseline: Option<PathBuf>,
    /// Report CSV path (overrides the config's path)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed override
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

fn execute(kind: SuiteKind, args: &SuiteArgs) -> Result<bool, String> {
    let cfg = ExperimentConfig::load(&args.config).map_err(|e| e.to_string())?;
    let out = args
        .out
        .clone()
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from(format!("out/{}.csv", kind.name())));
    let opts = RunOptions {
        freeze: args.freeze,
        baseline: args.baseline.clone(),
        out,
        seed: args.seed,
        threads: args.threads.max(1),
    };
    let outcome = run_suite(kind, &cfg, &opts).map_err(|e| e.to_string())?;
    println!(
        "{}: {} rows, {} -> {}",
        kind.name(),
        outcome.rows,
        if outcome.pass { "pass" } else { "FAIL" },
        outcome.csv_path.display()
    );
    for f in outcome.failures.iter().take(10) {
        println!("  violation: {}", f);
    }
    if outcome.failures.len() > 10 {
        println!("  ... and {} more", outcome.failures.len() - 10);
    }
    Ok(outcome.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::VerifyProperties(args) => execute(SuiteKind::Properties, args),
        Command::Realization(args) => execute(SuiteKind::Realization, args),
        Command::Inverse { variant, args } => {
            let kind = match variant {
                Variant::Sharp => SuiteKind::InverseSharp,
                Variant::Natural => SuiteKind::InverseNatural,
            };
            execute(kind, args)
        }
        Command::Direct(args) => execute(SuiteKind::Direct, args),
        Command::Lacunary(args) => execute(SuiteKind::Lacunary, args),
        Command::Norms(args) => execute(SuiteKind::Norms, args),
        Command::DumpConfig { suite } => match builtin_config(suite) {
            Some(cfg) => {
                println!("{}", serde_json::to_string_pretty(&cfg).unwrap());
                Ok(true)
            }
            None => Err(format!(
                "unknown suite {:?}; expected one of {}",
                suite,
                angleapprox_harness::config::SUITE_NAMES.join(", ")
            )),
        },
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(msg) => {
            eprintln!("error: {}", msg);
            ExitCode::FAILURE
        }
    }
}
