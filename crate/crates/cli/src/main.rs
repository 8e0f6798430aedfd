use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use csm_cli::generate::{generate, Family};
use csm_cli::{exit_code, run_cases, summary_table, write_jsonl, CaseFile, CliError, EXIT_FAILURE, EXIT_PARSE};

#[derive(Parser)]
#[command(name = "csm", version, about = "Exact checks of CSM class identities on linear stratifications")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every case of a case file.
    Run {
        file: PathBuf,
        /// Cases evaluated concurrently.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Write the JSON-lines report here.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Write a generated case file.
    Generate {
        /// generic-arrangement-pair, splayed-coordinate-pair or flag-of-flats.
        family: Family,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        /// Hyperplanes per side for generic pairs.
        #[arg(short, long, default_value_t = 2)]
        k: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
}

fn run(file: PathBuf, jobs: usize, json: Option<PathBuf>) -> Result<i32, CliError> {
    let text = fs::read_to_string(&file).map_err(|e| CliError::Parse(format!("{}: {e}", file.display())))?;
    let reports = run_cases(&CaseFile::from_json(&text)?, jobs)?;
    if let Some(path) = json {
        let mut out = fs::File::create(path)?;
        write_jsonl(&mut out, &reports)?;
    }
    print!("{}", summary_table(&reports));
    Ok(exit_code(&reports))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { file, jobs, json } => run(file, jobs, json),
        Command::Generate { family, n, seed, k, output } => generate(family, n, k, seed)
            .and_then(|f| fs::write(&output, f.to_json() + "\n").map_err(CliError::from))
            .map(|_| 0),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if matches!(e, CliError::Parse(_)) { EXIT_PARSE } else { EXIT_FAILURE } as u8)
        }
    }
}
