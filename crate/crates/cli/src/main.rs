mod commands;
mod config;
mod error;
mod manifest;
mod plot;

use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind as ClapKind;
use clap::Parser;

use commands::Cli;
use error::CliError;

fn report_error(err: &CliError, json: bool) {
    if json {
        let obj = serde_json::json!({
            "error": {
                "kind": err.kind_name(),
                "code": err.exit_code(),
                "message": err.to_string(),
            }
        });
        emit(&format!(
            "{}\n",
            serde_json::to_string_pretty(&obj).expect("error object serializes")
        ));
    } else {
        eprintln!("moodcast: {err}");
    }
}

// A closed pipe on stdout (`| head`) is not an error worth reporting.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn main() -> ExitCode {
    let raw: Vec<String> = std::env::args().collect();
    let json = raw.iter().any(|a| a == "--json");
    let args = match config::inject(raw) {
        Ok(a) => a,
        Err(e) => {
            report_error(&e, json);
            return ExitCode::from(e.exit_code());
        }
    };
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ClapKind::DisplayHelp | ClapKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            if json {
                report_error(
                    &CliError::Usage(e.render().to_string().trim_end().to_owned()),
                    true,
                );
            } else {
                let _ = e.print();
            }
            return ExitCode::from(1);
        }
    };
    match commands::run(&cli) {
        Ok(outcome) => {
            if cli.json {
                emit(&format!(
                    "{}\n",
                    serde_json::to_string_pretty(&outcome.json).expect("outcome serializes")
                ));
            } else {
                emit(&outcome.human);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            report_error(&e, cli.json);
            ExitCode::from(e.exit_code())
        }
    }
}
