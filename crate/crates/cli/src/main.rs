use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qram_core::scenario::{self, Command, OutputFormat, Overrides, ScenarioConfig};

/// Bucket-brigade QRAM simulator with a cavity-atom memory-cell model.
///
/// Addresses are written MSB-first: the leftmost bit picks the branch at the
/// root. Worker threads are capped by QRAM_SIM_THREADS when it is set.
#[derive(Parser, Debug)]
#[command(name = "qram-sim", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Exhaustive router-flip and baseline operation counts per depth.
    Counts(Common),
    /// One read call per address under both schemes; columns
    /// scheme,n,address,node_flips,pulse_broadcasts,glm_trit_ops,traversals,fidelity.
    Compare(Common),
    /// Monte Carlo error rate against the first-order estimate.
    NoiseSweep(Common),
    /// Read at a superposed address and compare with the ideal output state.
    SuperpositionDemo(Common),
    /// State after every write and read step of a single memory cell.
    CellTrace(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// Tree depth (largest depth for `counts`).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Error probability per event; comma-separated list for a sweep.
    #[arg(long, value_delimiter = ',')]
    epsilon: Option<Vec<f64>>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Verify results and exit non-zero on any failed check.
    #[arg(long)]
    check: bool,
    /// TOML scenario file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    JsonLines,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let (command, args) = match cli.command {
        Sub::Counts(a) => (Command::Counts, a),
        Sub::Compare(a) => (Command::Compare, a),
        Sub::NoiseSweep(a) => (Command::NoiseSweep, a),
        Sub::SuperpositionDemo(a) => (Command::SuperpositionDemo, a),
        Sub::CellTrace(a) => (Command::CellTrace, a),
    };

    let mut config = match &args.config {
        Some(path) => {
            let config = ScenarioConfig::from_toml(&std::fs::read_to_string(path)?)?;
            if config.command != command {
                return Err(format!(
                    "{} describes a `{}` scenario, not `{command}`",
                    path.display(),
                    config.command
                )
                .into());
            }
            config
        }
        None => ScenarioConfig::new(command),
    };
    config.apply(&Overrides {
        n: args.n,
        trials: args.trials,
        seed: args.seed,
        epsilons: args.epsilon,
        output_path: args.out.map(|p| p.display().to_string()),
        format: args.format.map(|f| match f {
            Format::Csv => OutputFormat::Csv,
            Format::JsonLines => OutputFormat::JsonLines,
        }),
    });

    let report = scenario::run(&config)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    match &config.output_path {
        Some(path) => std::fs::write(path, &report.output)?,
        None => print!("{}", report.output),
    }

    if !args.check {
        return Ok(ExitCode::SUCCESS);
    }
    let failed: Vec<_> = report.checks.iter().filter(|c| !c.passed).collect();
    for c in &failed {
        eprintln!("FAIL {}: {}", c.name, c.detail);
    }
    eprintln!(
        "{} of {} checks passed",
        report.checks.len() - failed.len(),
        report.checks.len()
    );
    Ok(if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}
