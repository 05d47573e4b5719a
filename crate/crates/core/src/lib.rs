//! Pseudoinverse products `A+B`, `A+AB` and `AA+B` computed in the storage of
//! `A` and `B`.
//!
//! The entry point is [`factor`], a rank-revealing LU factorization
//! `PA = LU` written over `A`. The factored storage then feeds one of the
//! compact pipelines in [`schemes`]:
//!
//! ```
//! use compact_pinv::{factor, pinv_apply, Matrix, PivotPolicy};
//!
//! let a = Matrix::<f64>::from_rows(&[[2.0, 0.0], [0.0, 0.0]]);
//! let mut f = factor(a, &PivotPolicy::default()).unwrap();
//! let mut b = Matrix::identity(2);
//! let mut g = Matrix::zeros(2, 2);
//! pinv_apply(&mut f, &mut b, &mut g).unwrap();
//! assert_eq!(g, Matrix::from_rows(&[[0.5, 0.0], [0.0, 0.0]]));
//! ```
//!
//! [`oracle`] holds slow, independent reference routines used to check the
//! compact code, and [`matio`] the plain-text matrix format used by the CLI.

#![allow(clippy::needless_range_loop)]

pub mod corpus;
pub mod error;
pub mod lu;
pub mod matio;
pub mod matrix;
pub mod oracle;
pub mod scalar;
pub mod schemes;

pub use error::{Error, Result};
pub use lu::{factor, FactorState, Factorization, PivotPolicy, PivotRule};
pub use matrix::Matrix;
pub use num_complex::Complex64;
pub use scalar::Scalar;
pub use schemes::{
    apply_col_projector, apply_row_projector, pinv_apply, prepare_col_projector, prepare_row_projector,
    PreparedProjector, ProjectorKind,
};
