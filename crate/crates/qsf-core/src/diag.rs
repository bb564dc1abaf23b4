//! Diagnostics for contract parsing, validation and deployment.
//!
//! Codes form a documented closed set (see `docs/spec-extension.md`). Every
//! failure anywhere in the pipeline renders to the same stable line format,
//! `severity CODE location: message`, so CI logs stay grep-able.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Severity::Error => f.write_str("error"),
            Severity::Warning => f.write_str("warning"),
        }
    }
}

/// The closed diagnostic code set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DiagCode {
    /// Input is not valid YAML.
    QSF001,
    /// Document skeleton problems: missing/invalid `openapi`, `info`, `paths`.
    QSF002,
    /// Endpoint missing (or malformed) `x-quantum` binding.
    QSF003,
    /// `x-quantum` has zero or multiple circuit sources, or a bad `code-format`.
    QSF004,
    /// Invalid `default-shots` value.
    QSF005,
    /// Unsupported HTTP method (only POST is accepted).
    QSF006,
    /// Unknown `x-quantum` key (warning; forward compatibility).
    QSF007,
    /// Invalid endpoint path (templating or reserved characters).
    QSF008,
    /// Missing or invalid `operationId`.
    QSF009,
    /// Unreachable circuit source URL.
    QSF010,
    /// Circuit ingestion failure (bad Quirk JSON, unsupported gate, QASM error).
    QSF011,
    /// Duplicate (path, method) pair.
    QSF012,
    /// Circuit not representable in the emitted source subset.
    QSF013,
    /// Deployment port range exhausted.
    QSF014,
    /// Service instance failed to launch.
    QSF015,
}

impl DiagCode {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagCode::QSF001 => "QSF001",
            DiagCode::QSF002 => "QSF002",
            DiagCode::QSF003 => "QSF003",
            DiagCode::QSF004 => "QSF004",
            DiagCode::QSF005 => "QSF005",
            DiagCode::QSF006 => "QSF006",
            DiagCode::QSF007 => "QSF007",
            DiagCode::QSF008 => "QSF008",
            DiagCode::QSF009 => "QSF009",
            DiagCode::QSF010 => "QSF010",
            DiagCode::QSF011 => "QSF011",
            DiagCode::QSF012 => "QSF012",
            DiagCode::QSF013 => "QSF013",
            DiagCode::QSF014 => "QSF014",
            DiagCode::QSF015 => "QSF015",
        }
    }
}

impl fmt::Display for DiagCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One finding, attached to a document location such as
/// `paths./bell.post.x-quantum`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub code: DiagCode,
    pub severity: Severity,
    pub message: String,
    pub location: String,
}

impl Diagnostic {
    pub fn error(code: DiagCode, location: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            code,
            severity: Severity::Error,
            message: message.into(),
            location: location.into(),
        }
    }

    pub fn warning(
        code: DiagCode,
        location: impl Into<String>,
        message: impl Into<String>,
    ) -> Self {
        Self {
            code,
            severity: Severity::Warning,
            message: message.into(),
            location: location.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {}: {}",
            self.severity, self.code, self.location, self.message
        )
    }
}

/// True when any diagnostic in the batch is an error.
pub fn has_errors(diagnostics: &[Diagnostic]) -> bool {
    diagnostics.iter().any(Diagnostic::is_error)
}

/// Renders a batch one-per-line in document order.
pub fn render_batch(diagnostics: &[Diagnostic]) -> String {
    let mut out = String::new();
    for d in diagnostics {
        out.push_str(&d.to_string());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_format_is_stable() {
        let d = Diagnostic::error(
            DiagCode::QSF004,
            "paths./bell.post.x-quantum",
            "two sources set",
        );
        assert_eq!(
            d.to_string(),
            "error QSF004 paths./bell.post.x-quantum: two sources set"
        );
    }

    #[test]
    fn serializes_code_and_severity_as_text() {
        let d = Diagnostic::warning(
            DiagCode::QSF007,
            "paths./a.post.x-quantum.extra",
            "unknown key",
        );
        let json = serde_json::to_string(&d).unwrap();
        assert!(json.contains(r#""code":"QSF007""#), "{json}");
        assert!(json.contains(r#""severity":"warning""#), "{json}");
        let back: Diagnostic = serde_json::from_str(&json).unwrap();
        assert_eq!(back, d);
    }
}
