//! File helpers shared by the loaders: transparent gzip, line reading with
//! positions, digests.

use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use flate2::read::MultiGzDecoder;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub(crate) fn io_error(path: &Path, line: usize, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        line,
        source,
    }
}

pub(crate) fn parse_error(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn is_gz(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "gz")
}

/// Opens `path` for buffered reading, decompressing `.gz` files.
pub fn open_reader(path: &Path) -> Result<Box<dyn BufRead + Send>> {
    let file = File::open(path).map_err(|e| io_error(path, 0, e))?;
    if is_gz(path) {
        Ok(Box::new(BufReader::new(MultiGzDecoder::new(file))))
    } else {
        Ok(Box::new(BufReader::new(file)))
    }
}

/// Non-empty, trimmed lines of a text file, skipping `#` comments.
pub fn read_lines(path: &Path) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for (i, line) in open_reader(path)?.lines().enumerate() {
        let line = line.map_err(|e| io_error(path, i + 1, e))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        out.push(line.to_owned());
    }
    Ok(out)
}

/// Calls `f(line_number, line)` for every line; `f` may reject a line with a message.
pub(crate) fn for_each_line(
    path: &Path,
    f: impl FnMut(usize, &str) -> std::result::Result<(), String>,
) -> Result<()> {
    for_each_line_in(open_reader(path)?, path, f)
}

/// As [`for_each_line`], over an already opened reader; `path` labels errors.
pub(crate) fn for_each_line_in(
    reader: impl BufRead,
    path: &Path,
    mut f: impl FnMut(usize, &str) -> std::result::Result<(), String>,
) -> Result<()> {
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| io_error(path, i + 1, e))?;
        f(i + 1, &line).map_err(|m| parse_error(path, i + 1, m))?;
    }
    Ok(())
}

/// Writes `contents` to `path`, creating parent directories.
pub fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| io_error(parent, 0, e))?;
    }
    let mut file = File::create(path).map_err(|e| io_error(path, 0, e))?;
    file.write_all(contents).map_err(|e| io_error(path, 0, e))
}

/// Hex SHA-256 of the raw bytes of a file.
pub fn file_digest(path: &Path) -> Result<String> {
    let mut file = File::open(path).map_err(|e| io_error(path, 0, e))?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 1 << 16];
    loop {
        let n = file.read(&mut buf).map_err(|e| io_error(path, 0, e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex_string(&hasher.finalize()))
}

pub fn bytes_digest(bytes: &[u8]) -> String {
    hex_string(&Sha256::digest(bytes))
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
