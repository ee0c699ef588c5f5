//! Error and validation types shared by every module.

use std::fmt;

use serde::Serialize;

/// Category of a single validation failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IssueKind {
    NonPositiveParameter,
    DimensionOutOfRange,
    DivergentRegime,
    InvalidValue,
}

/// One invariant violation, located by a dotted field path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Issue {
    pub path: String,
    pub kind: IssueKind,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {:?}: {}", self.path, self.kind, self.message)
    }
}

/// Every violation found while validating a configuration.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ValidationErrors(pub Vec<Issue>);

impl ValidationErrors {
    pub fn has(&self, kind: IssueKind) -> bool {
        self.0.iter().any(|i| i.kind == kind)
    }
}

impl fmt::Display for ValidationErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, issue) in self.0.iter().enumerate() {
            if n > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{issue}")?;
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Invalid(ValidationErrors),
    #[error("non-positive parameter `{0}`")]
    NonPositiveParameter(String),
    #[error("dimension out of range: {0}")]
    DimensionOutOfRange(String),
    #[error("divergent regime: {0}")]
    DivergentRegime(String),
    #[error("invalid noise kernel: gamma0 = {gamma0} is smaller than |gamma_r| = {gamma_r}")]
    InvalidKernel { gamma0: f64, gamma_r: f64 },
    #[error("quadrature did not converge: estimate {value}, error {abs_error:e} above tolerance {tolerance:e}")]
    QuadratureNotConverged { value: f64, abs_error: f64, tolerance: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Collects issues while walking a configuration tree.
#[derive(Debug, Default)]
pub struct Validator {
    issues: Vec<Issue>,
}

impl Validator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, path: &str, kind: IssueKind, message: impl Into<String>) {
        self.issues.push(Issue {
            path: path.to_string(),
            kind,
            message: message.into(),
        });
    }

    /// Requires a finite, strictly positive value.
    pub fn positive(&mut self, path: &str, value: f64) {
        if !(value.is_finite() && value > 0.0) {
            self.push(
                path,
                IssueKind::NonPositiveParameter,
                format!("must be finite and > 0, got {value}"),
            );
        }
    }

    /// Requires a finite, non-negative value.
    pub fn non_negative(&mut self, path: &str, value: f64) {
        if !(value.is_finite() && value >= 0.0) {
            self.push(
                path,
                IssueKind::NonPositiveParameter,
                format!("must be finite and >= 0, got {value}"),
            );
        }
    }

    pub fn finite(&mut self, path: &str, value: f64) {
        if !value.is_finite() {
            self.push(path, IssueKind::InvalidValue, format!("must be finite, got {value}"));
        }
    }

    pub fn finish(self) -> Result<(), ValidationErrors> {
        if self.issues.is_empty() {
            Ok(())
        } else {
            Err(ValidationErrors(self.issues))
        }
    }
}

/// Joins a parent path and a field name.
pub fn join(parent: &str, field: &str) -> String {
    if parent.is_empty() {
        field.to_string()
    } else {
        format!("{parent}.{field}")
    }
}

/// Types whose invariants can be checked and reported with field paths.
pub trait Validate {
    fn check(&self, path: &str, v: &mut Validator);

    fn validate(&self) -> Result<(), ValidationErrors> {
        let mut v = Validator::new();
        self.check("", &mut v);
        v.finish()
    }
}

impl From<ValidationErrors> for Error {
    fn from(e: ValidationErrors) -> Self {
        Error::Invalid(e)
    }
}
