//! `usf`: command-line access to the biased-walk and spanning-forest toolkit.
//!
//! Results go to stdout or `--out`, always preceded by the resolved
//! parameters. Failures print one JSON record on stderr and exit with the
//! code of their category; no output file is written in that case.

mod commands;
mod config;
mod error;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use config::{Command, OutputFormat, Params};
use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "usf",
    version,
    about = "Biased random walks and weighted spanning forests on Z^d"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    params: Params,
}

fn configure_workers(workers: Option<usize>) -> Result<(), CliError> {
    let Some(w) = workers else { return Ok(()) };
    if w == 0 {
        return Err(CliError::domain("--workers must be positive"));
    }
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(w)
        .build_global()
        .map_err(|e| CliError::other(e.to_string()))?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut params = cli.params;
    if let Some(path) = params.config.clone() {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::parse(format!("cannot read config {}: {e}", path.display())))?;
        params.merge_config(&text)?;
    }
    configure_workers(params.workers)?;
    let table = commands::execute(cli.command, &params)?;
    let bytes = table.render(params.output.unwrap_or(OutputFormat::Csv))?;
    match &params.out {
        Some(path) => std::fs::write(path, bytes)?,
        None => std::io::stdout().lock().write_all(&bytes)?,
    }
    Ok(())
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("{}", e.record());
    ExitCode::from(e.kind.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind as K;
            if matches!(
                e.kind(),
                K::DisplayHelp | K::DisplayVersion | K::DisplayHelpOnMissingArgumentOrSubcommand
            ) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let first = e
                .to_string()
                .lines()
                .next()
                .unwrap_or_default()
                .trim_start_matches("error: ")
                .to_string();
            return fail(&CliError::parse(first));
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}
