//! Flat `key = value` config files merged into the command line.
//!
//! Lines are `key = value` or `key value`; `#` starts a comment. A key names
//! a long flag without the dashes. Keys the chosen subcommand does not accept
//! are ignored so that one file can serve several commands. Flags given on the
//! command line win.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::Command;

pub const CONFIG_ENV: &str = "OPFLOW_CONFIG";

#[derive(Clone, Debug, PartialEq)]
pub struct ConfigFile {
    pub path: PathBuf,
    pub bytes: Vec<u8>,
    pub entries: Vec<(String, String)>,
}

pub fn parse(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = match line.split_once('=') {
            Some((k, v)) => (k.trim(), v.trim()),
            None => match line.split_once(char::is_whitespace) {
                Some((k, v)) => (k.trim(), v.trim()),
                None => (line, ""),
            },
        };
        let key = key.trim_start_matches("--");
        if key.is_empty() || key.contains(char::is_whitespace) {
            return Err(format!("config line {}: malformed entry {raw:?}", lineno + 1));
        }
        out.push((key.to_string(), value.to_string()));
    }
    Ok(out)
}

pub fn load(path: &Path) -> Result<ConfigFile, String> {
    let bytes = std::fs::read(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let text = std::str::from_utf8(&bytes).map_err(|_| format!("config {} is not UTF-8", path.display()))?;
    Ok(ConfigFile {
        path: path.to_path_buf(),
        entries: parse(text)?,
        bytes,
    })
}

/// `--config PATH` from the raw arguments, else the environment.
pub fn locate(args: &[OsString]) -> Option<PathBuf> {
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    std::env::var_os(CONFIG_ENV).map(PathBuf::from)
}

fn takes_value(cmd: &Command, long: &str) -> bool {
    cmd.get_arguments()
        .find(|a| a.get_long() == Some(long))
        .map(|a| a.get_action().takes_values())
        .unwrap_or(false)
}

/// Name of the subcommand in `args`, skipping global flags and their values.
fn subcommand_name(cmd: &Command, args: &[OsString]) -> Option<String> {
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if let Some(long) = s.strip_prefix("--") {
            if !long.contains('=') && takes_value(cmd, long) {
                it.next();
            }
            continue;
        }
        if s.starts_with('-') {
            continue;
        }
        return Some(s.into_owned());
    }
    None
}

fn given(args: &[OsString], long: &str) -> bool {
    let flag = format!("--{long}");
    let prefix = format!("--{long}=");
    args.iter().any(|a| {
        let s = a.to_string_lossy();
        s == flag.as_str() || s.starts_with(&prefix)
    })
}

/// Appends config entries accepted by the chosen subcommand (or globally)
/// that the command line does not already set.
pub fn merge(cmd: &Command, args: &[OsString], config: &ConfigFile) -> Vec<OsString> {
    let mut out = args.to_vec();
    let Some(name) = subcommand_name(cmd, args) else {
        return out;
    };
    let Some(sub) = cmd.find_subcommand(&name) else {
        return out;
    };
    let accepted = |key: &str| {
        key != "config"
            && sub
                .get_arguments()
                .chain(cmd.get_arguments())
                .any(|a| a.get_long() == Some(key))
    };
    for (key, value) in &config.entries {
        if !accepted(key) || given(&out, key) {
            continue;
        }
        out.push(format!("--{key}").into());
        out.push(value.into());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        let e = parse("# comment\nsamples = 32\ngrid 400  # trailing\n\n--seed=7\n").unwrap();
        assert_eq!(
            e,
            vec![
                ("samples".into(), "32".into()),
                ("grid".into(), "400".into()),
                ("seed".into(), "7".into())
            ]
        );
        assert!(parse("= 3").is_err());
    }
}
