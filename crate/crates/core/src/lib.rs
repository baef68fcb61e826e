//! Matrix representation of multi-degree B-spline bases.
//!
//! A multi-degree (MD) spline space is described by [`MDSpace`]. Its B-spline
//! type basis is expressed as `N = M * N0`, where `N0` is the basis of a space
//! that is easy to evaluate: the associated `C^0` space (reverse knot
//! insertion), the conventional degree-`m` space (reverse degree elevation) or
//! a mix of both. All coefficients are computed from ratios of integrals, so
//! the stable paths perform no subtractions.

pub mod assembler;
pub mod c0;
pub mod cli;
pub mod error;
pub mod eval;
pub mod experiment;
pub mod join;
pub mod legacy;
pub mod matrix;
pub mod oracle;
pub mod par;
pub mod presets;
pub mod rde;
pub mod scalar;
pub mod spaces;

pub use assembler::{build, RepMatrixBundle, SectionChoice, Strategy};
pub use c0::{BasisValues, C0Basis, Side};
pub use error::{Error, Result};
pub use eval::{eval_basis, eval_spline, greville, Evaluator};
pub use par::Execution;
pub use matrix::Matrix;
pub use scalar::{Rational, Scalar};
pub use spaces::{MDSpace, SpaceDescription};
