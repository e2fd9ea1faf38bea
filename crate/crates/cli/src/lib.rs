//! Command-line front end: configuration, subcommands, exit codes and
//! atomic report output.

pub mod commands;
pub mod config;

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::commands::{Envelope, SCHEMA};
use crate::config::{CommandName, Flags, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Exit code for an error: validation problems with the input data give 2,
/// numerical failures 3, everything else (usage, parsing, I/O) 1.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    use minvar::Error as E;
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<E>() {
            return match e {
                E::MinimalityViolation { .. } | E::AdmissibilityViolation { .. } | E::Domain(_) | E::Unsupported(_) => {
                    EXIT_INVALID
                }
                E::NotQuasiconformal { .. } | E::SeriesDivergenceRisk { .. } | E::Convergence(_) => EXIT_NUMERICAL,
                E::Json(_) | E::Io(_) => EXIT_USAGE,
            };
        }
    }
    EXIT_USAGE
}

/// Write `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    let result = (|| {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    result
}

fn render<T: Serialize>(command: CommandName, cfg: &RunConfig, body: T) -> anyhow::Result<String> {
    let env = Envelope {
        schema: SCHEMA,
        command,
        config: cfg.clone(),
        body,
    };
    Ok(serde_json::to_string_pretty(&env)? + "\n")
}

/// Run one subcommand and return the JSON report text. Mesh output is
/// written to its OBJ path here; the returned text is its summary.
pub fn execute(command: CommandName, flags: Flags) -> anyhow::Result<String> {
    let cfg = RunConfig::from_flags(flags)?;
    use commands as c;
    match command {
        CommandName::Validate => render(command, &cfg, c::validate(&cfg)?),
        CommandName::Destab => render(command, &cfg, c::destab(&cfg)?),
        CommandName::Index => render(command, &cfg, c::index(&cfg)?),
        CommandName::Nmi => render(command, &cfg, c::nmi(&cfg)?),
        CommandName::Schwarz => render(command, &cfg, c::schwarz(&cfg)?),
        CommandName::Energy => render(command, &cfg, c::energy(&cfg)?),
        CommandName::Report => render(command, &cfg, c::report(&cfg)?),
        CommandName::Mesh => {
            let (summary, obj) = c::mesh(&cfg)?;
            let path = cfg.output.as_ref().expect("checked by mesh");
            write_atomic(path, obj.as_bytes())?;
            render(command, &cfg, summary)
        }
    }
}

/// Full CLI entry point; returns the process exit code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    use clap::Parser;
    let cli = match config::Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let (command, flags) = cli.command.split();
    let output = if command == CommandName::Mesh { None } else { flags.output.clone() };
    match execute(command, flags) {
        Ok(text) => {
            let written = match &output {
                Some(p) => write_atomic(p, text.as_bytes()),
                None => std::io::stdout().write_all(text.as_bytes()),
            };
            match written {
                Ok(()) => EXIT_OK,
                Err(e) => {
                    eprintln!("error: {e}");
                    EXIT_USAGE
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code(&e)
        }
    }
}
