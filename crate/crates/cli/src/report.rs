use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::Failure;

#[derive(Debug, Clone, Serialize)]
pub struct FileDigest {
    pub path: PathBuf,
    pub sha256: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// What a command produced, before the common envelope is added.
pub struct Outcome {
    pub status: Status,
    pub payload: Value,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    /// Lines for the text rendering; the JSON payload is flattened when
    /// empty.
    pub text: Vec<String>,
}

impl Outcome {
    pub fn new(pass: bool, payload: impl Serialize) -> Outcome {
        Outcome {
            status: if pass { Status::Pass } else { Status::Fail },
            payload: serde_json::to_value(payload).expect("payload serializes"),
            inputs: Vec::new(),
            outputs: Vec::new(),
            text: Vec::new(),
        }
    }
}

#[derive(Serialize)]
pub struct Report<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub config: &'a Value,
    pub inputs: &'a [FileDigest],
    pub outputs: &'a [FileDigest],
    pub status: Status,
    pub payload: &'a Value,
    pub elapsed_ms: u128,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Reads a file and records its digest.
pub fn read_input(path: &Path, inputs: &mut Vec<FileDigest>) -> Result<String, Failure> {
    let bytes = fs::read(path).map_err(|e| Failure(format!("cannot read {}: {e}", path.display())))?;
    inputs.push(FileDigest {
        path: path.to_path_buf(),
        sha256: sha256_hex(&bytes),
    });
    String::from_utf8(bytes).map_err(|_| Failure(format!("{} is not UTF-8", path.display())))
}

pub fn write_output(path: &Path, text: &str) -> Result<FileDigest, Failure> {
    fs::write(path, text).map_err(|e| Failure(format!("cannot write {}: {e}", path.display())))?;
    Ok(FileDigest {
        path: path.to_path_buf(),
        sha256: sha256_hex(text.as_bytes()),
    })
}

pub fn render_text(report: &Report, lines: &[String]) -> String {
    let mut out = String::new();
    let status = match report.status {
        Status::Pass => "PASS",
        Status::Fail => "FAIL",
    };
    let _ = writeln!(out, "{} {status}", report.command);
    if lines.is_empty() {
        if let Value::Object(map) = report.payload {
            for (k, v) in map {
                let _ = writeln!(out, "  {k}: {}", scalar(v));
            }
        }
    } else {
        for l in lines {
            let _ = writeln!(out, "  {l}");
        }
    }
    for d in report.inputs.iter().chain(report.outputs) {
        let _ = writeln!(out, "  {} sha256={}", d.path.display(), d.sha256);
    }
    out
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_of_known_input() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }

    #[test]
    fn text_rendering_flattens_payload() {
        let payload = serde_json::json!({ "name": "x", "count": 3 });
        let config = Value::Null;
        let inputs = [FileDigest { path: "in.txt".into(), sha256: "00".into() }];
        let report = Report {
            tool: "isoembed",
            version: "0",
            command: "demo",
            config: &config,
            inputs: &inputs,
            outputs: &[],
            status: Status::Fail,
            payload: &payload,
            elapsed_ms: 0,
        };
        assert_eq!(render_text(&report, &[]), "demo FAIL\n  count: 3\n  name: x\n  in.txt sha256=00\n");
        assert_eq!(render_text(&report, &["row".into()]), "demo FAIL\n  row\n  in.txt sha256=00\n");
    }
}
