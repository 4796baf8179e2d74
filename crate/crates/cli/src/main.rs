mod args;
mod commands;
mod render;

use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use serde_json::json;

use args::{Cli, Format};
use commands::{Context, Outcome};

const EXIT_FAILED: u8 = 2;
const EXIT_USAGE: u8 = 1;

fn emit(cli: &Cli, body: &str) -> std::io::Result<()> {
    match &cli.config.out {
        Some(path) => std::fs::write(path, body),
        None => std::io::stdout().lock().write_all(body.as_bytes()),
    }
}

fn render(cli: &Cli, outcome: &Outcome) -> String {
    match cli.config.format {
        Format::Text => format!("{}\n", outcome.text),
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&outcome.json).expect("json values serialize")),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    let result = Context::new(&cli.config).and_then(|ctx| commands::run(&cli.command, &ctx));
    match result {
        Ok(outcome) => {
            if let Err(e) = emit(&cli, &render(&cli, &outcome)) {
                eprintln!("error: cannot write output: {e}");
                return ExitCode::from(EXIT_USAGE);
            }
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAILED)
            }
        }
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            if cli.config.format == Format::Json {
                let body = json!({ "error": { "code": e.code(), "message": e.to_string() } });
                let _ = emit(&cli, &format!("{}\n", serde_json::to_string_pretty(&body).expect("json values serialize")));
            }
            ExitCode::from(if e.is_usage() { EXIT_USAGE } else { EXIT_FAILED })
        }
    }
}
