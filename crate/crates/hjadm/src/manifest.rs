use std::collections::BTreeMap;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::output::{write_atomic, FileRecord};

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Error,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorClass {
    /// Bad input: unreadable or invalid config, impossible request.
    Config,
    /// The numerics failed: CFL, NaN, node cap, evaluation.
    Numerical,
    Io,
}

impl ErrorClass {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorClass::Config | ErrorClass::Io => 1,
            ErrorClass::Numerical => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub class: ErrorClass,
    pub message: String,
    pub exit_code: i32,
}

impl ErrorRecord {
    pub fn new(class: ErrorClass, message: impl Into<String>) -> ErrorRecord {
        ErrorRecord {
            class,
            message: message.into(),
            exit_code: class.exit_code(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    /// The resolved configuration, defaults included; null if it never
    /// loaded.
    pub config: Value,
    pub stages: Vec<StageTiming>,
    pub files: Vec<FileRecord>,
    /// Headline numbers of the run, such as `t_star`.
    pub summary: BTreeMap<String, Value>,
    pub status: Status,
    pub error: Option<ErrorRecord>,
}

impl Manifest {
    pub fn new(subcommand: &str, config: Value) -> Manifest {
        Manifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            subcommand: subcommand.to_string(),
            config,
            stages: Vec::new(),
            files: Vec::new(),
            summary: BTreeMap::new(),
            status: Status::Ok,
            error: None,
        }
    }

    pub fn fail(&mut self, error: ErrorRecord) {
        self.status = Status::Error;
        self.error = Some(error);
    }

    pub fn exit_code(&self) -> i32 {
        self.error.as_ref().map_or(0, |e| e.exit_code)
    }

    pub fn write(&self, dir: &Path) -> io::Result<()> {
        let mut bytes = serde_json::to_vec_pretty(self)?;
        bytes.push(b'\n');
        write_atomic(&dir.join(MANIFEST_NAME), &bytes)
    }

    pub fn read(dir: &Path) -> io::Result<Manifest> {
        let bytes = std::fs::read(dir.join(MANIFEST_NAME))?;
        Ok(serde_json::from_slice(&bytes)?)
    }
}
