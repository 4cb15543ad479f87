//! Exact arithmetic for gap principles, interval coverings and exceptional subspaces of
//! systems of Diophantine inequalities.

pub mod arith;
pub mod bounds;
pub mod config;
pub mod error;
pub mod filtration;
pub mod gap;
pub mod linalg;
pub mod report;
pub mod roth;
pub mod systems;

pub use arith::{AlgebraicReal, NfElem, NumberField, Place, Rational, Real, RealEnclosure};
pub use error::{Error, Result};
