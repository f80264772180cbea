//! Argument parsing and process-level plumbing.

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::Parser;

use crate::{execute, Command, Format, Options, Parallel, RunError, ScenarioFile};

#[derive(Debug, Parser)]
#[command(
    name = "deference-lab",
    version,
    about = "Decide and probe Total Trust between an agent and an expert"
)]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,
    pub scenario: PathBuf,
    /// Named gamble from the scenario file for a local check (check only).
    #[arg(long)]
    pub gamble: Option<String>,
    /// Scale of the base Gaussian measure.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub sigma: f64,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

impl Args {
    pub fn options(&self) -> Options {
        Options {
            command: self.command,
            scenario: self.scenario.display().to_string(),
            gamble: self.gamble.clone(),
            sigma: self.sigma,
            samples: self.samples,
            seed: self.seed,
        }
    }
}

/// Runs one command, writing the report to stdout. Returns the exit code.
pub fn run(args: &Args) -> i32 {
    let started = Instant::now();
    let result = (|| -> Result<_, RunError> {
        let opts = args.options();
        opts.validate()?;
        let file = ScenarioFile::load(&args.scenario)?;
        let runner = Parallel::from_env()?;
        execute(&runner, &opts, &file)
    })();
    match result {
        Ok(outcome) => {
            let text = outcome.report.render(args.format, Some(started.elapsed()));
            let mut out = std::io::stdout().lock();
            if out
                .write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .is_err()
            {
                return 1;
            }
            outcome.exit_code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
