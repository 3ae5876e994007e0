#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod algebra;
pub mod error;
pub mod exec;
pub mod gates4;
pub mod lindblad;
pub mod linalg;
pub mod liouville;
pub mod oracle;
pub mod propagator;
pub mod random;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
