use std::process::ExitCode;

use serde::Serialize;
use serde_json::json;

#[derive(Debug)]
pub enum CliError {
    Core(reachbound::Error),
    Usage(String),
    Config(String),
    Io(String),
    /// Soundness check failed; the report has already been written.
    Assertion(String),
}

impl From<reachbound::Error> for CliError {
    fn from(e: reachbound::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.kind(),
            CliError::Usage(_) => "Usage",
            CliError::Config(_) => "Config",
            CliError::Io(_) => "Io",
            CliError::Assertion(_) => "AssertionFailed",
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Core(e) => e.to_string(),
            CliError::Usage(m) | CliError::Config(m) | CliError::Io(m) | CliError::Assertion(m) => m.clone(),
        }
    }

    /// 2: the input is well formed but the math does not apply;
    /// 3: the input or config could not be read; 4: a soundness check failed.
    pub fn exit_code(&self) -> u8 {
        use reachbound::Error as E;
        match self {
            CliError::Core(E::Syntax { .. } | E::DegreeOverflow { .. } | E::DimensionMismatch { .. } | E::InvalidInput(_)) => 3,
            CliError::Core(_) => 2,
            CliError::Usage(_) | CliError::Config(_) | CliError::Io(_) => 3,
            CliError::Assertion(_) => 4,
        }
    }
}

pub fn fail(e: &CliError) -> ExitCode {
    let body = json!({
        "error": e.kind(),
        "message": e.message(),
        "exit_code": e.exit_code(),
    });
    eprintln!("{body}");
    ExitCode::from(e.exit_code())
}

/// Common wrapper of every JSON report.
#[derive(Serialize)]
pub struct Envelope<'a, C: Serialize, R: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub seed: u64,
    pub config: &'a C,
    pub result: &'a R,
}

impl<'a, C: Serialize, R: Serialize> Envelope<'a, C, R> {
    pub fn new(command: &'a str, seed: u64, config: &'a C, result: &'a R) -> Self {
        Envelope {
            tool: "reachbound",
            version: env!("CARGO_PKG_VERSION"),
            command,
            seed,
            config,
            result,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serializable")
    }
}

/// Formats a value the way the JSON side does: non-finite as `inf`.
pub fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}
