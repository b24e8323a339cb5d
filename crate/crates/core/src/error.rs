use std::fmt;

use thiserror::Error;

/// Errors raised by the model constructors and the Fock-space oracle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SalhiError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    Invalid(ValidationReport),

    #[error("Fock cutoff insufficient: tail population {tail:.3e} at n_max = {n_max}; need n_max >= {required}")]
    CutoffInsufficient {
        n_max: usize,
        tail: f64,
        required: usize,
    },
}

/// One violated invariant, tagged with the dotted path of the offending field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

/// Aggregated validation failure. Never empty when returned as an error.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn push(&mut self, field: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation {
            field: field.into(),
            message: message.into(),
        });
    }

    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    /// True if any violation mentions `needle` in its field or message.
    pub fn mentions(&self, needle: &str) -> bool {
        self.violations
            .iter()
            .any(|v| v.field.contains(needle) || v.message.contains(needle))
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl From<ValidationReport> for SalhiError {
    fn from(report: ValidationReport) -> Self {
        SalhiError::Invalid(report)
    }
}
