use std::fmt;
use std::process::ExitCode;

use rotor_interferometer::Error as EngineError;

/// Failure category, one exit code each.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Category {
    Usage,
    Validation,
    Truncation,
    NonConvergence,
    Analysis,
    Io,
}

impl Category {
    pub fn code(self) -> u8 {
        match self {
            Category::Usage => 2,
            Category::Validation => 3,
            Category::Truncation => 4,
            Category::NonConvergence => 5,
            Category::Analysis => 6,
            Category::Io => 7,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Category::Usage => "usage",
            Category::Validation => "validation",
            Category::Truncation => "truncation",
            Category::NonConvergence => "non-convergence",
            Category::Analysis => "analysis",
            Category::Io => "io",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CliError {
    pub category: Category,
    pub message: String,
}

impl CliError {
    pub fn new(category: Category, message: impl Into<String>) -> Self {
        Self {
            category,
            message: message.into(),
        }
    }

    pub fn validation(message: impl Into<String>) -> Self {
        Self::new(Category::Validation, message)
    }

    pub fn io(context: &str, err: std::io::Error) -> Self {
        Self::new(Category::Io, format!("{context}: {err}"))
    }

    /// One-line JSON for stderr.
    pub fn to_json(&self) -> String {
        serde_json::json!({
            "error": {
                "category": self.category.name(),
                "exit_code": self.category.code(),
                "message": self.message,
            }
        })
        .to_string()
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.category.code())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.category.name(), self.message)
    }
}

impl std::error::Error for CliError {}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        let category = match e {
            EngineError::InvalidParameter(_) => Category::Validation,
            EngineError::Truncation { .. } => Category::Truncation,
            EngineError::NonConvergence { .. } | EngineError::GridResolution(_) => {
                Category::NonConvergence
            }
            EngineError::SingularCoefficient { .. }
            | EngineError::PeakNotBracketed(_)
            | EngineError::Multimodal(_)
            | EngineError::NoInteriorMinimum(_)
            | EngineError::InsufficientData(_) => Category::Analysis,
        };
        Self::new(category, e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_are_distinct() {
        let all = [
            Category::Usage,
            Category::Validation,
            Category::Truncation,
            Category::NonConvergence,
            Category::Analysis,
            Category::Io,
        ];
        let mut codes: Vec<u8> = all.iter().map(|c| c.code()).collect();
        codes.sort_unstable();
        codes.dedup();
        assert_eq!(codes.len(), all.len());
        assert!(!codes.contains(&0) && !codes.contains(&1));
    }

    #[test]
    fn engine_errors_map_to_categories() {
        let t = EngineError::Truncation {
            edge_population: 1e-3,
            limit: 1e-12,
            half_width: 10,
        };
        assert_eq!(CliError::from(t).category, Category::Truncation);
        let e = CliError::from(EngineError::Multimodal("two peaks".into()));
        assert_eq!(e.category, Category::Analysis);
        let v: serde_json::Value = serde_json::from_str(&e.to_json()).unwrap();
        assert_eq!(v["error"]["exit_code"], 6);
    }
}
