use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use depbase::baselines::BaselineKind;
use depbase_cli::{cmd_baseline, cmd_llm, cmd_report, CliError, RunConfig};

#[derive(Parser)]
#[command(
    name = "depbase",
    version,
    about = "Uninformed dependency baselines and LLM parse evaluation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct RunArgs {
    /// TOML run configuration.
    #[arg(short, long)]
    config: PathBuf,
    /// Override the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the output directory.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate and score baseline trees for the test split.
    Baseline {
        #[command(flatten)]
        run: RunArgs,
        /// Comma-separated subset of the configured baselines, e.g. L,R,RD*.
        #[arg(long, value_delimiter = ',')]
        systems: Vec<BaselineKind>,
    },
    /// Query the configured models (or replay their caches), repair and score.
    Llm {
        #[command(flatten)]
        run: RunArgs,
        /// Comma-separated subset of configured model names.
        #[arg(long, value_delimiter = ',')]
        models: Vec<String>,
    },
    /// Merge the tables of finished runs.
    Report {
        /// Directory for the merged tables.
        #[arg(short, long)]
        output: PathBuf,
        /// Run directories written by `baseline` or `llm`.
        #[arg(required = true)]
        runs: Vec<PathBuf>,
    },
}

fn load(run: &RunArgs) -> Result<RunConfig, CliError> {
    let mut c = RunConfig::load(&run.config)?;
    if let Some(s) = run.seed {
        c.seed = s;
    }
    if let Some(o) = &run.output {
        c.output_dir = o.clone();
    }
    Ok(c)
}

fn main() -> ExitCode {
    match real_main() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn real_main() -> Result<ExitCode, CliError> {
    let cli = Cli::parse();
    let runs = match cli.command {
        Command::Baseline { run, systems } => {
            let mut c = load(&run)?;
            if !systems.is_empty() {
                c.baselines = systems;
            }
            c.models.clear();
            c.validate()?;
            cmd_baseline(&c)?
        }
        Command::Llm { run, models } => {
            let mut c = load(&run)?;
            if !models.is_empty() {
                c.models.retain(|m| models.contains(&m.model));
                if c.models.len() != models.len() {
                    return Err(CliError::Config("unknown model name in --models".into()));
                }
            }
            c.baselines.clear();
            c.validate()?;
            cmd_llm(&c)?
        }
        Command::Report { output, runs } => cmd_report(&runs, &output)?,
    };
    print!("{}", depbase_cli::report::report_tsv(&runs));
    let failed: usize = runs.iter().map(|r| r.failed_queries).sum();
    if failed > 0 {
        eprintln!("error: {failed} sentences got no model response");
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}
