//! `sfl`: experiments on the stability of high-order consensus as networks
//! grow.

mod commands;
mod config;
mod error;
mod svg;

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use commands::{Command, Output};
use config::{resolve_seed, ExperimentConfig, Params};
use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "sfl", version, about = "Stability analysis of high-order consensus on growing networks")]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,

    /// Replay a resolved config written by an earlier run.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(flatten)]
    params: Params,
}

fn resolve(cli: Cli) -> CliResult<ExperimentConfig> {
    let mut config = match (&cli.config, cli.command) {
        (Some(path), _) => {
            let mut config = ExperimentConfig::from_json(&std::fs::read_to_string(path)?)?;
            if let Some(command) = cli.command {
                if command.name() != config.command {
                    return Err(CliError::Usage(format!(
                        "config is for '{}', not '{}'",
                        config.command,
                        command.name()
                    )));
                }
            }
            if cli.params.out.is_some() {
                config.params.out = cli.params.out;
            }
            config
        }
        (None, Some(command)) => ExperimentConfig {
            command: command.name().to_string(),
            params: cli.params,
        },
        (None, None) => return Err(CliError::Usage("a subcommand or --config is required".into())),
    };
    resolve_seed(&mut config.params)?;
    Ok(config)
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents)?;
    Ok(())
}

fn execute(config: &ExperimentConfig) -> CliResult<()> {
    let command = Command::from_name(&config.command)?;
    let p = &config.params;
    log::info!("resolved config: {}", serde_json::to_string(config).expect("config serializes"));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(p.jobs.max(1))
        .build()
        .map_err(|e| CliError::Usage(format!("--jobs: {e}")))?;
    let Output { body, summary, svg } = pool.install(|| commands::run(command, p))?;

    let mut stdout = std::io::stdout().lock();
    match &p.out {
        Some(path) => {
            write_file(path, &body)?;
            write_file(Path::new(&format!("{}.config.json", path.display())), &config.to_json())?;
        }
        None if summary.is_none() => stdout.write_all(body.as_bytes())?,
        None => {}
    }
    if let Some(line) = summary {
        writeln!(stdout, "{line}")?;
    }
    if let (Some(path), Some(svg)) = (&p.svg, svg) {
        write_file(path, &svg)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match resolve(cli).and_then(|config| execute(&config)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
