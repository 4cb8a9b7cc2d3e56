//! `--config` files: a JSON object whose top-level keys are global flags (`out_dir`, `seed`,
//! `quiet`) or subcommand names mapping to objects of that subcommand's flags.
//!
//! ```json
//! {"seed": 7, "poll": {"window": 5, "weights": "cosiatec=2", "patterns": ["a.json", "b.json"]}}
//! ```
//!
//! Each entry becomes `--key value` tokens (underscores turn into hyphens) placed after the
//! subcommand, unless the same flag already appears on the command line.

use std::ffi::OsString;
use std::path::Path;

use clap::CommandFactory;
use serde_json::{Map, Value};

use super::args::Cli;
use super::CliError;

const GLOBAL_KEYS: [&str; 3] = ["out_dir", "seed", "quiet"];
const VALUE_FLAGS: [&str; 3] = ["--out-dir", "--seed", "--config"];

fn subcommand_names() -> Vec<String> {
    Cli::command().get_subcommands().map(|c| c.get_name().to_string()).collect()
}

/// Position of the subcommand token, skipping values of global flags.
fn subcommand_position(args: &[OsString], names: &[String]) -> Option<usize> {
    let mut i = 1;
    while i < args.len() {
        let a = args[i].to_string_lossy();
        if VALUE_FLAGS.contains(&a.as_ref()) {
            i += 2;
            continue;
        }
        if names.iter().any(|n| n == a.as_ref()) {
            return Some(i);
        }
        i += 1;
    }
    None
}

fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(p.into());
        }
    }
    None
}

fn present(args: &[OsString], flag: &str) -> bool {
    let with_eq = format!("{flag}=");
    args.iter().any(|a| {
        let s = a.to_string_lossy();
        s == flag || s.starts_with(&with_eq)
    })
}

fn scalar(key: &str, v: &Value) -> Result<String, CliError> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        _ => Err(CliError::config(format!("config key '{key}' must be a string, number, boolean or array"))),
    }
}

fn push_entries(out: &mut Vec<OsString>, args: &[OsString], entries: &Map<String, Value>) -> Result<(), CliError> {
    for (key, value) in entries {
        let flag = format!("--{}", key.replace('_', "-"));
        if present(args, &flag) {
            continue;
        }
        match value {
            Value::Bool(true) => out.push(flag.into()),
            Value::Bool(false) | Value::Null => {}
            Value::Array(items) => {
                for item in items {
                    out.push(flag.clone().into());
                    out.push(scalar(key, item)?.into());
                }
            }
            other => {
                out.push(flag.into());
                out.push(scalar(key, other)?.into());
            }
        }
    }
    Ok(())
}

/// The argument list with the config file's entries spliced in.
pub(crate) fn expand(args: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let path = Path::new(&path);
    let text = std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let root: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::config(format!("{}: invalid JSON: {e}", path.display())))?;
    let Value::Object(root) = root else {
        return Err(CliError::config(format!("{}: config must be a JSON object", path.display())));
    };
    let names = subcommand_names();
    let Some(pos) = subcommand_position(&args, &names) else {
        return Ok(args);
    };
    let current = args[pos].to_string_lossy().into_owned();

    let mut globals = Map::new();
    let mut own = Map::new();
    for (key, value) in root {
        if GLOBAL_KEYS.contains(&key.as_str()) {
            globals.insert(key, value);
        } else if names.contains(&key) {
            match value {
                Value::Object(m) if key == current => own = m,
                Value::Object(_) => {}
                _ => return Err(CliError::config(format!("config key '{key}' must be an object"))),
            }
        } else {
            return Err(CliError::config(format!("unknown config key '{key}'")));
        }
    }

    let mut injected = Vec::new();
    push_entries(&mut injected, &args, &globals)?;
    push_entries(&mut injected, &args, &own)?;
    let mut out = args;
    out.splice(pos + 1..pos + 1, injected);
    Ok(out)
}
