//! Reusable orthogonal projectors `A+A` and `AA+`.
//!
//! Preparation rewrites the factored storage once; every later application
//! only reads it.
//!
//! * `A+A = U* (UU*)^-1 U`. The lower pivot triangle is replaced by the
//!   `LDL*` factor of `UU*`; `U` itself is untouched.
//! * `AA+ = P* L (L*L)^-1 L* P`, which is unchanged when `L` is replaced by
//!   `LQ` for invertible `Q`. Taking `Q` as the reciprocal pivots gives `L`
//!   an implicit unit diagonal, freeing the upper pivot triangle (and the
//!   diagonal) to hold the transposed `LDL*` factor of `L*L`.

use crate::error::{Error, Result};
use crate::lu::{FactorState, Factorization};
use crate::matrix::{Matrix, Store};
use crate::scalar::Scalar;

use super::hfs::{self, Tri, TriangleLayout};
use super::pinv::write_uu_star;

/// Which projector a [`PreparedProjector`] applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectorKind {
    /// `A+A`, acting on `n x p` data.
    Column,
    /// `AA+`, acting on `m x p` data.
    Row,
}

/// A factorization advanced to the prepare-once projector state.
///
/// Applications borrow it immutably, so one prepared projector can serve
/// concurrent applications on disjoint buffers.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedProjector<T> {
    f: Factorization<T>,
}

impl<T: Scalar> PreparedProjector<T> {
    pub fn kind(&self) -> ProjectorKind {
        match self.f.state {
            FactorState::RowProjector => ProjectorKind::Row,
            _ => ProjectorKind::Column,
        }
    }

    pub fn rank(&self) -> usize {
        self.f.rank
    }

    pub fn factorization(&self) -> &Factorization<T> {
        &self.f
    }

    pub fn into_factorization(self) -> Factorization<T> {
        self.f
    }

    /// Rows of the data this projector acts on.
    pub fn dim(&self) -> usize {
        match self.kind() {
            ProjectorKind::Column => self.f.cols(),
            ProjectorKind::Row => self.f.rows(),
        }
    }

    pub fn apply(&self, b: &mut Matrix<T>, g: &mut Matrix<T>) -> Result<()> {
        match self.kind() {
            ProjectorKind::Column => apply_col_projector(self, b, g),
            ProjectorKind::Row => apply_row_projector(self, b, g),
        }
    }

    /// Applies the projector and leaves the result in `b`.
    pub fn apply_in_place(&self, b: &mut Matrix<T>) -> Result<()> {
        match self.kind() {
            ProjectorKind::Column => apply_col_projector_in_place(self, b),
            ProjectorKind::Row => apply_row_projector_in_place(self, b),
        }
    }
}

/// Prepares `f` for repeated `A+A` applications.
pub fn prepare_col_projector<T: Scalar>(mut f: Factorization<T>) -> Result<PreparedProjector<T>> {
    f.expect_state(FactorState::Raw)?;
    let (_, n) = f.a.shape();
    let r = f.rank;
    let Factorization { a, rho, gamma, .. } = &mut f;
    prepare_col_kernel(a, &rho[..], &gamma[..r], n)?;
    f.state = FactorState::ColProjector;
    Ok(PreparedProjector { f })
}

pub(crate) fn prepare_col_kernel<T: Scalar, S: Store<T>>(
    a: &mut S,
    rho: &[usize],
    gamma: &[usize],
    n: usize,
) -> Result<()> {
    let r = gamma.len();
    a.mark("col-gram-u");
    write_uu_star(a, rho, gamma, n);
    hfs::factor_kernel(
        a,
        Tri {
            rho,
            gamma,
            layout: TriangleLayout::Lower,
        },
        r,
    )
}

/// Prepares `f` for repeated `AA+` applications.
pub fn prepare_row_projector<T: Scalar>(mut f: Factorization<T>) -> Result<PreparedProjector<T>> {
    f.expect_state(FactorState::Raw)?;
    let r = f.rank;
    let Factorization { a, rho, gamma, .. } = &mut f;
    prepare_row_kernel(a, &rho[..], &gamma[..r])?;
    f.state = FactorState::RowProjector;
    Ok(PreparedProjector { f })
}

pub(crate) fn prepare_row_kernel<T: Scalar, S: Store<T>>(a: &mut S, rho: &[usize], gamma: &[usize]) -> Result<()> {
    let r = gamma.len();
    let m = rho.len();

    // L <- LQ with Q = diag(1 / pivot).
    a.mark("row-rescale");
    for i in 0..r {
        let pivot = a.at(rho[i], gamma[i]);
        for k in i + 1..m {
            let v = a.at(rho[k], gamma[i]) / pivot;
            a.put(rho[k], gamma[i], v);
        }
    }

    // Upper pivot triangle <- upper triangle of L*L, reading L with its
    // implicit unit diagonal.
    a.mark("row-gram-l");
    for i in 0..r {
        for j in i..r {
            let mut s = if j == i { T::one() } else { a.at(rho[j], gamma[i]) };
            for k in j + 1..m {
                s += a.at(rho[k], gamma[i]) * a.at(rho[k], gamma[j]).conj();
            }
            a.put(rho[i], gamma[j], s);
        }
    }

    hfs::factor_kernel(
        a,
        Tri {
            rho,
            gamma,
            layout: TriangleLayout::Transposed,
        },
        r,
    )
}

fn check_apply<T: Scalar>(
    pp: &PreparedProjector<T>,
    expected: FactorState,
    b: &Matrix<T>,
    g: Option<&Matrix<T>>,
) -> Result<()> {
    pp.f.expect_state(expected)?;
    let dim = pp.dim();
    let ok = b.rows() == dim && g.is_none_or(|g| g.shape() == b.shape());
    if ok {
        Ok(())
    } else {
        Err(Error::ShapeMismatch(format!(
            "projector acts on {dim}xp data; got B {}x{}{}",
            b.rows(),
            b.cols(),
            g.map(|g| format!(" and G {}x{}", g.rows(), g.cols()))
                .unwrap_or_default()
        )))
    }
}

/// `g = A+A b`. Rows `gamma[0..r)` of `b` are left holding `(UU*)^-1 U b`.
pub fn apply_col_projector<T: Scalar>(pp: &PreparedProjector<T>, b: &mut Matrix<T>, g: &mut Matrix<T>) -> Result<()> {
    check_apply(pp, FactorState::ColProjector, b, Some(g))?;
    let f = &pp.f;
    let p = b.cols();
    apply_col_kernel(&f.a, &f.rho, f.pivot_columns(), f.cols(), p, b, Output::Separate(g))
}

/// `b <- A+A b`, expanding the result in place.
pub fn apply_col_projector_in_place<T: Scalar>(pp: &PreparedProjector<T>, b: &mut Matrix<T>) -> Result<()> {
    check_apply(pp, FactorState::ColProjector, b, None)?;
    let f = &pp.f;
    let p = b.cols();
    apply_col_kernel::<T, _, _, Matrix<T>>(&f.a, &f.rho, f.pivot_columns(), f.cols(), p, b, Output::InPlace)
}

/// `g = AA+ b`. Rows `rho[0..r)` of `b` are left holding `(L*L)^-1 L* P b`.
pub fn apply_row_projector<T: Scalar>(pp: &PreparedProjector<T>, b: &mut Matrix<T>, g: &mut Matrix<T>) -> Result<()> {
    check_apply(pp, FactorState::RowProjector, b, Some(g))?;
    let f = &pp.f;
    let p = b.cols();
    apply_row_kernel(&f.a, &f.rho, f.pivot_columns(), p, b, Output::Separate(g))
}

/// `b <- AA+ b`, expanding the result in place.
pub fn apply_row_projector_in_place<T: Scalar>(pp: &PreparedProjector<T>, b: &mut Matrix<T>) -> Result<()> {
    check_apply(pp, FactorState::RowProjector, b, None)?;
    let f = &pp.f;
    let p = b.cols();
    apply_row_kernel::<T, _, _, Matrix<T>>(&f.a, &f.rho, f.pivot_columns(), p, b, Output::InPlace)
}

/// Destination of the final expansion step.
pub(crate) enum Output<'a, G> {
    Separate(&'a mut G),
    /// Overwrite the data buffer, visiting output rows in descending order so
    /// that every source row is consumed before it is overwritten.
    InPlace,
}

pub(crate) fn apply_col_kernel<T: Scalar, S: Store<T>, B: Store<T>, G: Store<T>>(
    a: &S,
    rho: &[usize],
    gamma: &[usize],
    n: usize,
    p: usize,
    b: &mut B,
    mut out: Output<'_, G>,
) -> Result<()> {
    let r = gamma.len();
    let tri = Tri {
        rho,
        gamma,
        layout: TriangleLayout::Lower,
    };
    hfs::check_solvable(a, tri, r)?;
    if let Output::Separate(g) = &mut out {
        g.mark("col-expand");
    }
    for q in 0..p {
        b.mark("col-c");
        // C = U B into rows gamma[i].
        for i in 0..r {
            let gi = gamma[i];
            let mut s = b.at(gi, q);
            for j in gi + 1..n {
                s += a.at(rho[i], j) * b.at(j, q);
            }
            b.put(gi, q, s);
        }
        b.mark("col-solve");
        hfs::solve_column(a, tri, r, b, gamma, q);
        b.mark("col-expand");
        // G = U* D.
        let expand = |b: &B, i: usize| {
            let mut s = T::zero();
            for k in 0..r {
                let gk = gamma[k];
                if i == gk {
                    s += b.at(gk, q);
                } else if i > gk {
                    s += b.at(gk, q) * a.at(rho[k], i).conj();
                } else {
                    break;
                }
            }
            s
        };
        match &mut out {
            Output::Separate(g) => {
                for i in 0..n {
                    g.put(i, q, expand(b, i));
                }
            }
            Output::InPlace => {
                for i in (0..n).rev() {
                    let v = expand(b, i);
                    b.put(i, q, v);
                }
            }
        }
    }
    Ok(())
}

pub(crate) fn apply_row_kernel<T: Scalar, S: Store<T>, B: Store<T>, G: Store<T>>(
    a: &S,
    rho: &[usize],
    gamma: &[usize],
    p: usize,
    b: &mut B,
    mut out: Output<'_, G>,
) -> Result<()> {
    let r = gamma.len();
    let m = rho.len();
    let tri = Tri {
        rho,
        gamma,
        layout: TriangleLayout::Transposed,
    };
    hfs::check_solvable(a, tri, r)?;
    if let Output::Separate(g) = &mut out {
        g.mark("row-expand");
    }
    for q in 0..p {
        b.mark("row-c");
        // C = L* P B into rows rho[i].
        for i in 0..r {
            let mut s = b.at(rho[i], q);
            for k in i + 1..m {
                s += a.at(rho[k], gamma[i]).conj() * b.at(rho[k], q);
            }
            b.put(rho[i], q, s);
        }
        b.mark("row-solve");
        hfs::solve_column(a, tri, r, b, &rho[..r], q);
        b.mark("row-expand");
        // G = P* L D.
        let expand = |b: &B, i: usize| {
            let mut s = T::zero();
            for k in 0..r.min(i + 1) {
                if i == k {
                    s += b.at(rho[k], q);
                } else {
                    s += b.at(rho[k], q) * a.at(rho[i], gamma[k]);
                }
            }
            s
        };
        match &mut out {
            Output::Separate(g) => {
                for i in 0..m {
                    g.put(rho[i], q, expand(b, i));
                }
            }
            Output::InPlace => {
                for i in (0..m).rev() {
                    let v = expand(b, i);
                    b.put(rho[i], q, v);
                }
            }
        }
    }
    Ok(())
}
