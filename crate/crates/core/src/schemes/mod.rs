//! Compact schemes for `A+B`, `A+AB` and `AA+B` on top of [`crate::lu`].
//!
//! None of the pipelines allocate: intermediates overwrite the pivot block
//! of the factored storage and selected rows of the data matrix `B`, and
//! results go to a caller-provided buffer (or back into `B` for the in-place
//! projector variants).

pub mod hfs;
pub mod pinv;
pub mod projector;


pub use hfs::{hfs_factor, hfs_solve, TriangleLayout};
pub use pinv::pinv_apply;
pub use projector::{
    apply_col_projector, apply_col_projector_in_place, apply_row_projector, apply_row_projector_in_place,
    prepare_col_projector, prepare_row_projector, PreparedProjector, ProjectorKind,
};
