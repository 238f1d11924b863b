use std::fmt;

use thiserror::Error;

use crate::machine::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty string")]
    EmptyString,

    #[error("invalid character {0:?} in bit string (expected '0' or '1')")]
    InvalidBit(char),

    #[error("truth table value {0} out of range (expected 0..=15)")]
    TruthTableRange(u32),

    #[error("invalid machine: {}", Violations(.0))]
    InvalidMachine(Vec<Violation>),

    #[error("machine size must be at least 1")]
    ZeroSize,

    #[error("glue slot (node {node}, port {port}) out of range for a machine of size {size}")]
    InvalidSlot { node: usize, port: u8, size: usize },

    #[error("bag is empty")]
    EmptyBag,

    #[error("seed bag empty; increase budget")]
    SeedBagEmpty,

    #[error("min ratio {0} outside [0, 1]")]
    InvalidThreshold(f64),

    #[error("trial count must be at least 1")]
    ZeroTrials,

    #[error("unsupported format version {found} (this build reads version {supported})")]
    UnsupportedVersion { found: u64, supported: u64 },

    #[error("malformed document: {0}")]
    Json(serde_json::Error),

    #[error("{0}")]
    Document(String),

    #[error("entry {entry}: {message}")]
    Entry { entry: usize, message: String },
}

struct Violations<'a>(&'a [Violation]);

impl fmt::Display for Violations<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

// Message already embeds the JSON error, so it is not exposed as a source.
impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e)
    }
}
