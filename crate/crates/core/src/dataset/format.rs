//! Checksummed line-delimited JSON files.
//!
//! Every artifact is a sequence of JSON lines followed by a trailer
//! `{"checksum":"<sha256 hex>"}` covering all preceding bytes.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::DatasetError;
use crate::grammar::hex_digest;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Trailer {
    checksum: String,
}

#[derive(Default)]
pub(crate) struct LineWriter {
    buf: Vec<u8>,
}

impl LineWriter {
    pub(crate) fn push<T: Serialize>(&mut self, value: &T) {
        serde_json::to_writer(&mut self.buf, value).expect("in-memory JSON serialization");
        self.buf.push(b'\n');
    }

    pub(crate) fn finish(mut self) -> Vec<u8> {
        let checksum = sha256_hex(&self.buf);
        self.push(&Trailer { checksum });
        self.buf
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex_digest(bytes)
}

/// Checks the trailer and returns the content lines (1-based line numbers
/// are index + 1).
pub(crate) fn verified_lines(bytes: &[u8]) -> Result<Vec<&str>, DatasetError> {
    if bytes.is_empty() {
        return Err(DatasetError::Truncated("file is empty".into()));
    }
    if bytes.last() != Some(&b'\n') {
        return Err(DatasetError::Truncated("last line is incomplete".into()));
    }
    let body_end = bytes.len() - 1;
    let start = bytes[..body_end].iter().rposition(|&b| b == b'\n').map_or(0, |p| p + 1);
    let trailer: Trailer = serde_json::from_slice(&bytes[start..body_end])
        .map_err(|_| DatasetError::Truncated("checksum trailer missing".into()))?;
    let computed = sha256_hex(&bytes[..start]);
    if computed != trailer.checksum {
        return Err(DatasetError::Checksum { recorded: trailer.checksum, computed });
    }
    let text = std::str::from_utf8(&bytes[..start])
        .map_err(|e| DatasetError::Corrupt { line: 0, message: e.to_string() })?;
    Ok(text.lines().collect())
}

pub(crate) fn parse_line<'a, T: Deserialize<'a>>(line: &'a str, number: usize) -> Result<T, DatasetError> {
    serde_json::from_str(line).map_err(|e| DatasetError::Corrupt { line: number, message: e.to_string() })
}

/// Rejects files written by another format version before parsing the rest
/// of the header.
pub(crate) fn check_version(line: &str) -> Result<(), DatasetError> {
    #[derive(Deserialize)]
    struct Probe {
        format_version: u32,
    }
    let probe: Probe = parse_line(line, 1)?;
    if probe.format_version != FORMAT_VERSION {
        return Err(DatasetError::VersionMismatch { found: probe.format_version, expected: FORMAT_VERSION });
    }
    Ok(())
}

pub(crate) fn check_vocabulary(found: &str) -> Result<(), DatasetError> {
    let expected = crate::grammar::vocabulary_hash();
    if found != expected {
        return Err(DatasetError::VocabularyMismatch { found: found.to_string(), expected });
    }
    Ok(())
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<(), DatasetError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| DatasetError::io(dir, e))?;
    }
    fs::write(path, bytes).map_err(|e| DatasetError::io(path, e))
}

pub(crate) fn read_file(path: &Path) -> Result<Vec<u8>, DatasetError> {
    fs::read(path).map_err(|e| DatasetError::io(path, e))
}

/// SHA-256 of a whole file.
pub fn file_checksum(path: impl AsRef<Path>) -> Result<String, DatasetError> {
    Ok(sha256_hex(&read_file(path.as_ref())?))
}
