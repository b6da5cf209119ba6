//! Alternating forms on `ℝⁿ`, endomorphism actions, and metric operations.

pub(crate) mod basis;
mod endo;
mod form;
mod metric;

pub use basis::{binomial, monomial_label, MAX_DIM};
pub use endo::Endo;
pub use form::KForm;
pub use metric::MetricData;
