use std::fmt;

use crate::tree::FactorViolation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Malformed,
    VertexOutOfRange,
    DuplicateEdge,
    SelfLoop,
    CountMismatch,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ParseErrorKind::Malformed => "malformed line",
            ParseErrorKind::VertexOutOfRange => "vertex id out of range",
            ParseErrorKind::DuplicateEdge => "duplicate edge",
            ParseErrorKind::SelfLoop => "self-loop",
            ParseErrorKind::CountMismatch => "edge count mismatch",
        };
        f.write_str(s)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{n} is not divisible by {t}")]
    Divisibility { n: usize, t: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{kind} at line {line}: {detail}")]
    Parse {
        line: usize,
        kind: ParseErrorKind,
        detail: String,
    },

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("unbalanced bipartite pair: {0}")]
    UnbalancedPair(String),

    #[error("invalid matching: {0}")]
    InvalidMatching(String),

    #[error("factor failed verification: {0}")]
    Unverified(FactorViolation),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, kind: ParseErrorKind, detail: impl Into<String>) -> Self {
        Error::Parse {
            line,
            kind,
            detail: detail.into(),
        }
    }
}

pub(crate) fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )))
    }
}

pub(crate) fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "probability must lie in [0, 1], got {p}"
        )))
    }
}
