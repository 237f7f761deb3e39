use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use simid_core::Error;

use crate::{Format, Mode};

pub struct Context {
    pub format: Format,
    pub output: Option<PathBuf>,
    pub mode: Mode,
    pub tolerance: f64,
}

/// Exit class of a failed run.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, unreadable or malformed input (exit 2).
    Usage(String),
    /// The inputs are well formed but the operation fails (exit 1).
    Domain(String),
}

pub type CliResult<T> = Result<T, Failure>;

/// Classifies a core error raised while handling `context`.
pub fn classify(context: &str, e: Error) -> Failure {
    let msg = if context.is_empty() { e.to_string() } else { format!("{context}: {e}") };
    match e {
        Error::Parse { .. }
        | Error::InvalidNodeName(_)
        | Error::UnknownNode(_)
        | Error::UnknownState { .. }
        | Error::DuplicateNode(_)
        | Error::SelfLoop(_)
        | Error::DuplicateEdge(..)
        | Error::InvalidQuery(_) => Failure::Usage(msg),
        _ => Failure::Domain(msg),
    }
}

#[derive(Debug, Serialize)]
pub struct Input {
    pub path: String,
    pub sha256: String,
}

/// An input file read into memory, with its content hash.
pub struct Loaded {
    pub path: String,
    pub text: String,
    pub sha256: String,
}

impl Loaded {
    pub fn read(path: &Path) -> CliResult<Self> {
        let bytes = fs::read(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        let sha256 = hex::encode(Sha256::digest(&bytes));
        let text = String::from_utf8(bytes).map_err(|_| Failure::Usage(format!("{}: not UTF-8", path.display())))?;
        Ok(Loaded {
            path: path.display().to_string(),
            text,
            sha256,
        })
    }

    pub fn input(&self) -> Input {
        Input {
            path: self.path.clone(),
            sha256: self.sha256.clone(),
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Serialize)]
struct Document<'a, R: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    mode: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    tolerance: Option<f64>,
    inputs: &'a [Input],
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    report: &'a R,
}

pub struct Emit<'a, R> {
    pub command: &'a str,
    pub inputs: Vec<Input>,
    pub seed: Option<u64>,
    pub report: &'a R,
    pub text: String,
}

impl Context {
    pub fn emit<R: Serialize>(&self, e: Emit<'_, R>) -> CliResult<()> {
        let body = match self.format {
            Format::Text => e.text,
            Format::Json => {
                let doc = Document {
                    tool: "simid",
                    version: env!("CARGO_PKG_VERSION"),
                    command: e.command,
                    mode: match self.mode {
                        Mode::Exact => "exact",
                        Mode::Float => "float",
                    },
                    tolerance: (self.mode == Mode::Float).then_some(self.tolerance),
                    inputs: &e.inputs,
                    seed: e.seed,
                    report: e.report,
                };
                let mut s = serde_json::to_string_pretty(&doc).map_err(|e| Failure::Domain(e.to_string()))?;
                s.push('\n');
                s
            }
        };
        match &self.output {
            Some(path) => fs::write(path, body).map_err(|err| Failure::Usage(format!("{}: {err}", path.display()))),
            None => std::io::stdout()
                .write_all(body.as_bytes())
                .map_err(|err| Failure::Domain(err.to_string())),
        }
    }
}
