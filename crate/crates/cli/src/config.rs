//! `--config FILE` support. The file holds `key=value` lines; each key that
//! names a flag of the chosen subcommand (or a global flag) becomes that
//! flag, inserted right after the subcommand token so explicit flags on the
//! command line, which come later, win.

use std::path::Path;

use clap::{ArgAction, CommandFactory};

use crate::commands::Cli;
use crate::error::CliError;

const VALUED_GLOBALS: [&str; 3] = ["--out-dir", "--config", "--seed"];

fn config_path(args: &[String]) -> Option<String> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(v) = a.strip_prefix("--config=") {
            return Some(v.to_owned());
        }
    }
    None
}

fn subcommand_position(args: &[String]) -> Option<usize> {
    let mut i = 1;
    while i < args.len() {
        let a = &args[i];
        if VALUED_GLOBALS.contains(&a.as_str()) {
            i += 2;
            continue;
        }
        if !a.starts_with('-') {
            return Some(i);
        }
        i += 1;
    }
    None
}

/// Parses `key=value` lines; `#` starts a comment.
pub fn parse_pairs(text: &str, source: &Path) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::Usage(format!(
                "{}:{}: expected key=value, found {line:?}",
                source.display(),
                idx + 1
            )));
        };
        out.push((k.trim().replace('_', "-"), v.trim().to_owned()));
    }
    Ok(out)
}

pub fn inject(args: Vec<String>) -> Result<Vec<String>, CliError> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let Some(pos) = subcommand_position(&args) else {
        return Ok(args);
    };
    let path = Path::new(&path);
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_owned(),
        source,
    })?;
    let root = Cli::command();
    let Some(sub) = root.find_subcommand(&args[pos]) else {
        // let clap report the unknown subcommand
        return Ok(args);
    };
    let known_anywhere = |key: &str| {
        root.get_subcommands()
            .flat_map(|s| s.get_arguments())
            .chain(root.get_arguments())
            .any(|a| a.get_long() == Some(key))
    };
    let mut injected = Vec::new();
    for (key, value) in parse_pairs(&text, path)? {
        if key == "config" {
            continue;
        }
        let arg = sub
            .get_arguments()
            .chain(root.get_arguments())
            .find(|a| a.get_long() == Some(key.as_str()));
        let Some(arg) = arg else {
            if known_anywhere(&key) {
                continue;
            }
            return Err(CliError::Usage(format!(
                "{}: unknown key {key:?}",
                path.display()
            )));
        };
        match arg.get_action() {
            ArgAction::SetTrue => match value.as_str() {
                "true" | "1" | "yes" => injected.push(format!("--{key}")),
                "false" | "0" | "no" => {}
                other => {
                    return Err(CliError::Usage(format!(
                        "{}: {key} expects true or false, found {other:?}",
                        path.display()
                    )))
                }
            },
            _ => injected.push(format!("--{key}={value}")),
        }
    }
    let mut out = args[..=pos].to_vec();
    out.extend(injected);
    out.extend_from_slice(&args[pos + 1..]);
    Ok(out)
}
