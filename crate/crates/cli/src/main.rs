use std::path::PathBuf;
use std::process::ExitCode;

use bdris::experiments::{apply_config_text, ExperimentRegistry, ExperimentResult};
use bdris::Error;
use clap::{Parser, Subcommand};

/// Closed-form BD-RIS design experiments.
#[derive(Debug, Parser)]
#[command(name = "bdris", version, about)]
struct Cli {
    /// Flat `key = value` config applied on top of the verb's defaults.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Base seed; overrides the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Directory for `<verb>.csv` and `<verb>.json`. Without it the CSV goes
    /// to stdout.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Worker threads for trial-level parallelism.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    verb: Verb,
}

#[derive(Debug, Subcommand)]
enum Verb {
    /// Single-antenna power and bounds for every architecture.
    Siso,
    /// Single-user MIMO designs.
    Mimo,
    /// Multi-user weighted sum power.
    Mu,
    /// Synthesis wall time against the surface size.
    Bench,
    /// Eigenstructure properties and brute-force optimality checks.
    Verify,
}

impl Verb {
    fn name(&self) -> &'static str {
        match self {
            Verb::Siso => "siso",
            Verb::Mimo => "mimo",
            Verb::Mu => "mu",
            Verb::Bench => "bench",
            Verb::Verify => "verify",
        }
    }
}

const EXIT_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_CHECKS: u8 = 3;

fn run(cli: &Cli) -> Result<ExperimentResult, Error> {
    let registry = ExperimentRegistry::default();
    let experiment = registry
        .get(cli.verb.name())
        .expect("every verb is registered");
    let mut cfg = experiment.default_config();
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
            key: "--config".into(),
            message: format!("{}: {e}", path.display()),
        })?;
        apply_config_text(&mut cfg, &text)?;
    }
    if let Some(seed) = cli.seed {
        cfg.base.seed = seed;
    }
    experiment.run(&cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot set up {n} threads: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    }

    let result = match run(&cli) {
        Ok(r) => r,
        Err(e @ Error::Config { .. }) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_FAILURE);
        }
    };

    match &cli.out {
        Some(dir) => match result.write_to(dir) {
            Ok((csv, json)) => eprintln!("wrote {} and {}", csv.display(), json.display()),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_FAILURE);
            }
        },
        None => print!("{}", result.to_csv()),
    }
    for c in &result.summary.checks {
        eprintln!(
            "{} {} value={:.3e} limit={:.3e}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.threshold
        );
    }

    if matches!(cli.verb, Verb::Verify) && !result.all_checks_passed() {
        return ExitCode::from(EXIT_CHECKS);
    }
    ExitCode::SUCCESS
}
