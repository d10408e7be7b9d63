use std::fmt;
use std::process::ExitCode;

use dyadic_riesz::Error;

/// Bad parameters or malformed input; exit status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// Result deviates from the golden file; exit status 3.
#[derive(Debug)]
pub struct GoldenMismatch(pub Vec<String>);

impl fmt::Display for GoldenMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "golden mismatch: {}", self.0.join("; "))
    }
}

impl std::error::Error for GoldenMismatch {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Maps library errors on caller input to usage errors.
pub fn lib(e: Error) -> anyhow::Error {
    match e {
        Error::InvalidInput(_) | Error::DimensionMismatch { .. } => usage(e.to_string()),
        Error::Resource(_) => anyhow::Error::new(e),
    }
}

pub fn exit_code(err: &anyhow::Error) -> ExitCode {
    if err.downcast_ref::<GoldenMismatch>().is_some() {
        ExitCode::from(3)
    } else if err.downcast_ref::<UsageError>().is_some() {
        ExitCode::from(2)
    } else {
        ExitCode::from(1)
    }
}
