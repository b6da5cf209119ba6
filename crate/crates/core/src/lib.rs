//! Exterior calculus on Lie algebras with closed G₂- and SU(3)-structures.
//!
//! The core types are generic over a [`Scalar`] backend: exact
//! [`Rational`]s for everything multilinear, and `f64` for computations
//! that need roots or transcendental functions. Concrete aliases for the
//! common instantiations live at the crate root.

pub mod catalog;
pub mod error;
pub mod exterior;
pub mod flow;
pub mod g2;
pub mod json;
pub mod liealg;
pub mod linalg;
pub mod scalar;
pub mod su3;

pub use error::{Error, Result};
pub use exterior::{Endo, KForm, MetricData};
pub use g2::G2Structure;
pub use liealg::{DerivationSpace, LieAlgebra};
pub use scalar::{parse_rational, q, Rational, Real, Scalar};
pub use su3::Su3Structure;

pub type QForm = KForm<Rational>;
pub type FForm = KForm<f64>;
pub type QEndo = Endo<Rational>;
pub type FEndo = Endo<f64>;
pub type QLieAlgebra = LieAlgebra<Rational>;
pub type FLieAlgebra = LieAlgebra<f64>;
pub type FG2Structure = G2Structure<f64>;
pub type QG2Structure = G2Structure<Rational>;
