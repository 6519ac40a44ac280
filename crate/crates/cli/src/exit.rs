//! Exit codes and the mapping from library errors onto them.

use std::fmt;

use cantorhull::Error;

pub const SUCCESS: u8 = 0;
pub const CONFIG: u8 = 2;
pub const STALL: u8 = 3;
pub const PRECISION: u8 = 4;
pub const VERIFY: u8 = 5;
pub const IO: u8 = 6;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Failure::new(CONFIG, message)
    }

    pub fn io(context: impl fmt::Display, e: std::io::Error) -> Self {
        Failure::new(IO, format!("{context}: {e}"))
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::ConstructionStall { .. } => STALL,
            Error::PrecisionExhausted { .. } => PRECISION,
            Error::Io(_) => IO,
            _ => CONFIG,
        };
        Failure::new(code, e.to_string())
    }
}
