use serde::Serialize;
use std::fmt;

/// A validation finding tied to a location in a scenario or catalog document,
/// e.g. `weapon_systems[3].da`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub path: String,
    pub message: String,
}

impl Diagnostic {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

/// Formats a diagnostic list one per line.
pub fn join(diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("\n")
}

/// Pushes a diagnostic unless `v` lies in [0, 1].
pub(crate) fn check_unit(out: &mut Vec<Diagnostic>, path: impl Into<String>, v: f64) {
    if !(0.0..=1.0).contains(&v) {
        out.push(Diagnostic::new(path, format!("value {v} outside [0, 1]")));
    }
}

/// Pushes a diagnostic unless `v` is finite and strictly positive.
pub(crate) fn check_positive(out: &mut Vec<Diagnostic>, path: impl Into<String>, v: f64) {
    if !(v.is_finite() && v > 0.0) {
        out.push(Diagnostic::new(path, format!("value {v} must be positive")));
    }
}
