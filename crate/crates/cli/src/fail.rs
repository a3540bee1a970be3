use std::fmt;

/// An error together with the process exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

pub type Outcome<T> = Result<T, Failure>;

pub const USAGE: u8 = 1;
pub const CONFIG: u8 = 2;
pub const PRECONDITION: u8 = 3;
pub const CHECKPOINT: u8 = 4;

impl Failure {
    pub fn new(code: u8, msg: impl fmt::Display) -> Self {
        Failure { code, error: anyhow::anyhow!("{msg}") }
    }

    pub fn usage(msg: impl fmt::Display) -> Self {
        Self::new(USAGE, msg)
    }

    pub fn config(msg: impl fmt::Display) -> Self {
        Self::new(CONFIG, msg)
    }

    pub fn precondition(msg: impl fmt::Display) -> Self {
        Self::new(PRECONDITION, msg)
    }
}

/// I/O on output files; a failed write is reported as a usage problem
/// (usually a bad --out path).
impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { code: USAGE, error: anyhow::Error::new(e).context("writing output") }
    }
}
