//! Flat `key=value` defaults merged under the command line.

use std::ffi::OsString;
use std::path::Path;

use clap::parser::ValueSource;
use clap::{ArgAction, ArgMatches, Command};
use nomlab::{Error, Result};

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse(text: &str, path: &Path) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or_default().trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::input(format!("{}:{}: expected key=value", path.display(), i + 1)))?;
        out.push((k.trim().replace('_', "-"), v.trim().to_owned()));
    }
    Ok(out)
}

/// Appends a flag for every config entry the command line left unset.
/// Keys name long flags of the subcommand; unknown keys are an error.
pub fn merge(
    argv: &[OsString],
    command: &Command,
    matches: &ArgMatches,
    entries: &[(String, String)],
) -> Result<Vec<OsString>> {
    let Some((name, sub_matches)) = matches.subcommand() else {
        return Ok(argv.to_vec());
    };
    let sub = command.find_subcommand(name).expect("matched subcommand exists");
    let mut extra: Vec<OsString> = Vec::new();
    for (key, value) in entries {
        let arg = sub
            .get_arguments()
            .find(|a| a.get_long() == Some(key.as_str()))
            .ok_or_else(|| Error::input(format!("config key `{key}` is not an option of `{name}`")))?;
        if sub_matches.value_source(arg.get_id().as_str()) == Some(ValueSource::CommandLine) {
            continue;
        }
        let flag = OsString::from(format!("--{key}"));
        match arg.get_action() {
            ArgAction::SetTrue => {
                let on: bool = value
                    .parse()
                    .map_err(|_| Error::input(format!("config key `{key}` expects true or false, got `{value}`")))?;
                if on {
                    extra.push(flag);
                }
            }
            ArgAction::Append => {
                for v in value.split(',').map(str::trim).filter(|v| !v.is_empty()) {
                    extra.push(flag.clone());
                    extra.push(v.into());
                }
            }
            _ => {
                extra.push(flag);
                extra.push(value.into());
            }
        }
    }
    let mut out = argv.to_vec();
    out.extend(extra);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_underscores() {
        let got = parse("# defaults\nper_length = 10\n\nseed=3 # fixed\n", Path::new("c")).unwrap();
        assert_eq!(got, vec![("per-length".into(), "10".into()), ("seed".into(), "3".into())]);
        assert!(parse("seed 3", Path::new("c")).is_err());
    }
}
