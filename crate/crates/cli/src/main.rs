mod args;
mod commands;
mod error;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{CommandFactory, Parser};

use args::{Cli, Command};
use error::{CliError, Result};
use output::{OutDir, RunManifest, Versions};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .parse_default_env()
        .init();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(cli: Cli) -> Result<()> {
    let (mut command, out_dir) = match (cli.from_manifest, cli.command) {
        (Some(_), Some(_)) => {
            return Err(CliError::validation(
                "--from-manifest cannot be combined with a subcommand",
            ));
        }
        (Some(path), None) => {
            let manifest = RunManifest::read(&path)?;
            let dir = cli
                .out
                .unwrap_or_else(|| path.parent().map(Path::to_path_buf).unwrap_or_default());
            (manifest.command, dir)
        }
        (None, Some(cmd)) => (cmd, cli.out.unwrap_or_else(|| PathBuf::from("."))),
        (None, None) => {
            Cli::command().print_help().ok();
            return Err(CliError::validation("a subcommand or --from-manifest is required"));
        }
    };
    resolve_config(&mut command)?;
    log::info!("running {}", command.name());
    let mut out = OutDir::create(&out_dir)?;
    let report = commands::run(&command, &mut out)?;
    let manifest = RunManifest {
        command,
        versions: Versions::current(),
        meshes: report.meshes,
        results: report.results,
        timing: report.timing,
        outputs: out.written().to_vec(),
    };
    let path = manifest.write(&mut out)?;
    log::info!("wrote {}", path.display());
    Ok(())
}

/// Fills in defaults that depend on other arguments and records mesh files
/// by absolute path, so the manifest holds the configuration actually run.
fn resolve_config(command: &mut Command) -> Result<()> {
    let (mesh, source, rhs) = match command {
        Command::Solve(a) => (&mut a.mesh, &mut a.source, &mut a.rhs),
        Command::CompareOracle(a) => (&mut a.mesh, &mut a.source, &mut a.rhs),
        _ => return Ok(()),
    };
    if let Some(p) = &mut mesh.mesh {
        *p = p.canonicalize().map_err(CliError::io(p.clone()))?;
    }
    let src = *source.get_or_insert_with(|| commands::default_source(mesh));
    rhs.get_or_insert(commands::default_rhs(src));
    Ok(())
}
