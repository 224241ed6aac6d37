use std::fmt;
use std::path::PathBuf;

use serde::Serialize;

/// Location of a piece of source text. Lines and columns are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SourceSpan {
    pub file: PathBuf,
    pub line: usize,
    pub column: usize,
    pub length: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    /// Short name of the violated rule, e.g. `same-variable comparison`.
    pub rule: String,
    pub message: String,
    pub span: Option<SourceSpan>,
}

impl Diagnostic {
    pub fn error(rule: &str, message: impl Into<String>, span: Option<SourceSpan>) -> Diagnostic {
        Diagnostic { severity: Severity::Error, rule: rule.to_string(), message: message.into(), span }
    }

    pub fn warning(rule: &str, message: impl Into<String>, span: Option<SourceSpan>) -> Diagnostic {
        Diagnostic { severity: Severity::Warning, rule: rule.to_string(), message: message.into(), span }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        if let Some(span) = &self.span {
            write!(f, "{}:{}:{}: ", span.file.display(), span.line, span.column)?;
        }
        write!(f, "{sev}[{}]: {}", self.rule, self.message)
    }
}
