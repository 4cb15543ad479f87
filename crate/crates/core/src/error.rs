use std::fmt;

use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A certified comparison could not be resolved before the precision cap.
    #[error("comparison undecided at precision cap of {cap} bits")]
    Undecided { cap: u32 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),

    /// The system fails one or more of the technical conditions on forms, constants and exponents.
    #[error("system violates {} condition(s): {}", .0.len(), ViolationList(.0))]
    InvalidSystem(Vec<Violation>),

    #[error("subspace closure exceeded the cap of {cap} subspaces")]
    ClosureCap { cap: usize },

    /// A theorem-backed invariant failed on concrete data.
    #[error("invariant violated: {0}")]
    Violation(String),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// One failed condition reported by system validation.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct Violation {
    pub condition: ViolationKind,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Shape,
    MissingInfinitePlace,
    DuplicatePlace,
    IrrationalFiniteCoefficient,
    CoefficientHeight,
    CoefficientDegree,
    DistinctForms,
    DependentForms,
    ConstantProduct,
    ExponentSum,
    DeltaRange,
    MaxExponent,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}: {}", self.condition, self.detail)
    }
}

struct ViolationList<'a>(&'a [Violation]);

impl fmt::Display for ViolationList<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}
