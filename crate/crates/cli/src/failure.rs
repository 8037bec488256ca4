//! Process-level error classification.
//!
//! Every command maps its failures onto a small set of exit codes so that
//! scripts can distinguish bad input from bad models from bad rules:
//!
//! | code | class                                             |
//! |------|---------------------------------------------------|
//! | 0    | success                                           |
//! | 1    | internal failure or a case-study value mismatch   |
//! | 2    | parse errors: files, CSV cells, flags, config     |
//! | 3    | model errors: rank deficiency, too few rows       |
//! | 4    | rule errors: malformed or inapplicable constraint |
//!
//! Argument-syntax errors reported by the flag parser itself also exit
//! with code 2, so "could not make sense of the input" is uniformly 2.

use quasireg_core::Error as CoreError;

/// A classified failure carrying the process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

pub const EXIT_OTHER: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_MODEL: i32 = 3;
pub const EXIT_RULE: i32 = 4;

impl Failure {
    pub fn parse(message: impl Into<String>) -> Self {
        Failure { code: EXIT_PARSE, message: message.into() }
    }

    pub fn model(message: impl Into<String>) -> Self {
        Failure { code: EXIT_MODEL, message: message.into() }
    }

    pub fn rule(message: impl Into<String>) -> Self {
        Failure { code: EXIT_RULE, message: message.into() }
    }

    pub fn other(message: impl Into<String>) -> Self {
        Failure { code: EXIT_OTHER, message: message.into() }
    }

    /// Classify an error escaping the numeric core: rank/degrees-of-freedom
    /// problems are model errors, rejected selection rules are rule errors,
    /// anything else is internal.
    pub fn from_core(err: CoreError) -> Self {
        let code = match &err {
            CoreError::RankDeficient(_) | CoreError::InsufficientDof { .. } => EXIT_MODEL,
            CoreError::InvalidRule(_) => EXIT_RULE,
            _ => EXIT_OTHER,
        };
        Failure { code, message: err.to_string() }
    }

    /// Classify a core error raised while interpreting user-supplied data
    /// or parameters, where the root cause is the input itself.
    pub fn parse_from_core(err: CoreError) -> Self {
        Failure::parse(err.to_string())
    }

    /// Classify a core error raised while interpreting a constraint rule.
    pub fn rule_from_core(err: CoreError) -> Self {
        Failure::rule(err.to_string())
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for Failure {}
