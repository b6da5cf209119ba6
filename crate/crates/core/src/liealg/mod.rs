//! Lie algebras given by structure equations.

mod algebra;
mod derivation;
mod structure;

pub use algebra::LieAlgebra;
pub(crate) use algebra::unit;
pub use derivation::DerivationSpace;
pub use structure::{Levi, RadicalInfo, StructureFlags};
