//! Output and manifest bookkeeping for one invocation.

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{ArgMatches, Command};
use nomlab::eval::report::Manifest;
use nomlab::io::{bytes_digest, file_digest, write_file};
use nomlab::{Error, Result};

pub struct Run {
    pub manifest: Manifest,
    manifest_path: Option<PathBuf>,
}

/// Every argument of the subcommand with its resolved value, defaults
/// included.
pub fn resolved_config(command: &Command, matches: &ArgMatches) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    for id in matches.ids().filter(|id| command.get_arguments().any(|a| a.get_id() == *id)) {
        let Ok(Some(raw)) = matches.try_get_raw(id.as_str()) else { continue };
        let values: Vec<String> = raw.map(|v| v.to_string_lossy().into_owned()).collect();
        out.insert(id.as_str().to_owned(), values.join(","));
    }
    out
}

impl Run {
    pub fn new(command: &Command, matches: &ArgMatches) -> Run {
        let manifest = Manifest {
            tool: "nomlab".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.get_name().into(),
            config: resolved_config(command, matches),
            ..Manifest::default()
        };
        Run { manifest, manifest_path: None }
    }

    /// Where the manifest goes: an explicit path, else next to `out`.
    pub fn manifest_at(&mut self, explicit: Option<&Path>, out: Option<&Path>) {
        self.manifest_path = explicit.map(Path::to_path_buf).or_else(|| {
            out.map(|o| {
                let mut name = o.as_os_str().to_owned();
                name.push(".manifest.json");
                PathBuf::from(name)
            })
        });
    }

    pub fn input(&mut self, path: &Path) -> Result<()> {
        self.manifest.inputs.insert(path.display().to_string(), file_digest(path)?);
        Ok(())
    }

    pub fn inputs<'a>(&mut self, paths: impl IntoIterator<Item = &'a Path>) -> Result<()> {
        for p in paths {
            self.input(p)?;
        }
        Ok(())
    }

    /// Writes `body` to `out`, or to standard output when `out` is absent.
    pub fn output(&mut self, out: Option<&Path>, body: &str) -> Result<()> {
        let key = match out {
            Some(path) => {
                write_file(path, body.as_bytes())?;
                path.display().to_string()
            }
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(body.as_bytes())
                    .and_then(|()| stdout.flush())
                    .map_err(|e| Error::Io { path: "<stdout>".into(), line: 0, source: e })?;
                "-".to_owned()
            }
        };
        self.manifest.outputs.insert(key, bytes_digest(body.as_bytes()));
        Ok(())
    }

    pub fn finish(self) -> Result<()> {
        if let Some(path) = &self.manifest_path {
            let body = serde_json::to_string_pretty(&self.manifest).expect("manifest serializes") + "\n";
            write_file(path, body.as_bytes())?;
        }
        Ok(())
    }
}
