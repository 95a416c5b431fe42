use std::io::Write;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;
use fpaut_cli::{run, Cli};

fn emit(cli: Cli) -> Result<i32> {
    let cfg = cli.into_config();
    let output = run(&cfg)?;
    match &cfg.out {
        Some(path) => std::fs::write(path, &output.report).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().write_all(output.report.as_bytes())?,
    }
    Ok(output.exit_code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match emit(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
