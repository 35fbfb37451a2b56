//! Arithmetic of rigid Calabi-Yau threefolds built from CM elliptic curves.

pub mod analytic;
pub mod arith;
pub mod cm_curves;
mod error;
pub mod jacobian;
pub mod lseries;
pub mod orbifold_hodge;
pub mod quad_fields;

pub use error::{Error, Result};
pub use num_complex;
