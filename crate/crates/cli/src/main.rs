use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wtc_cli::{Outcome, RunConfig};

#[derive(Parser)]
#[command(
    name = "wtc",
    version,
    about = "Laurent series solutions of a generalized NLS equation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the coefficient table and a summary.
    Expand(Common),
    /// Generate the series, run all checks and write a report.
    Verify(Common),
    /// Write field samples over the configured grid.
    Sample(Common),
    /// Verify a coefficient table previously written by `expand`.
    Report(Common),
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long, required_unless_present = "seed")]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "wtc-out")]
    out: PathBuf,
    /// Override the number of terms.
    #[arg(long)]
    n: Option<usize>,
    /// Use a random admissible problem drawn from this seed instead of a config.
    #[arg(long, conflicts_with = "config")]
    seed: Option<u64>,
}

impl Common {
    fn load(&self) -> Outcome<RunConfig> {
        let mut config = match (&self.config, self.seed) {
            (Some(path), _) => RunConfig::load(path)?,
            (None, Some(seed)) => RunConfig::random(seed, 30),
            (None, None) => unreachable!("clap requires --config or --seed"),
        };
        if let Some(n) = self.n {
            config.n = n;
            config.validate()?;
        }
        Ok(config)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (args, action): (&Common, fn(&RunConfig, &std::path::Path) -> Outcome) = match &cli.command
    {
        Command::Expand(a) => (a, wtc_cli::expand),
        Command::Verify(a) => (a, wtc_cli::verify),
        Command::Sample(a) => (a, wtc_cli::sample),
        Command::Report(a) => (a, wtc_cli::report),
    };
    let result = args.load().and_then(|config| action(&config, &args.out));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("{failure}");
            ExitCode::from(failure.exit_code())
        }
    }
}
