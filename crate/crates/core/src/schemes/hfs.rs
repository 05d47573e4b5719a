//! In-place `LDL*` factorization and solve of a Hermitian positive definite
//! `r x r` matrix stored inside the pivot block of a factored matrix.
//!
//! The triangle lives at positions indexed through the factorization's `rho`
//! and `gamma` arrays. Entry `T[j][i]` (`j >= i`) of the lower triangle sits at
//! `(rho[j], gamma[i])` for [`TriangleLayout::Lower`] and at
//! `(rho[i], gamma[j])` for [`TriangleLayout::Transposed`]. After factoring,
//! the strictly lower positions hold the unit lower factor and the diagonal
//! positions hold `D`.

use crate::error::{Error, Result};
use crate::matrix::{Matrix, Store};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriangleLayout {
    Lower,
    Transposed,
}

/// Index view of the triangle inside the pivot block.
#[derive(Clone, Copy)]
pub(crate) struct Tri<'a> {
    pub(crate) rho: &'a [usize],
    pub(crate) gamma: &'a [usize],
    pub(crate) layout: TriangleLayout,
}

impl Tri<'_> {
    /// Storage position of `T[j][i]`, `j >= i`.
    #[inline(always)]
    pub(crate) fn pos(&self, j: usize, i: usize) -> (usize, usize) {
        match self.layout {
            TriangleLayout::Lower => (self.rho[j], self.gamma[i]),
            TriangleLayout::Transposed => (self.rho[i], self.gamma[j]),
        }
    }

    #[inline(always)]
    fn get<T: Scalar, S: Store<T>>(&self, a: &S, j: usize, i: usize) -> T {
        let (r, c) = self.pos(j, i);
        a.at(r, c)
    }
}

fn check_diagonal<T: Scalar>(d: T, index: usize) -> Result<()> {
    let re = d.re();
    let bad = !d.is_finite() || re <= 0.0 || (T::IS_COMPLEX && d.im().abs() > T::UNIT.sqrt() * re);
    if bad {
        Err(Error::NumericBreakdown {
            index,
            value: format!("{d:?}"),
        })
    } else {
        Ok(())
    }
}

pub(crate) fn factor_kernel<T: Scalar, S: Store<T>>(a: &mut S, tri: Tri<'_>, r: usize) -> Result<()> {
    a.mark("hfs-factor");
    for i in 0..r {
        let mut d = tri.get(a, i, i);
        for k in 0..i {
            let lik = tri.get(a, i, k);
            d -= lik * lik.conj() * tri.get(a, k, k);
        }
        let (di, dj) = tri.pos(i, i);
        a.put(di, dj, d);
        check_diagonal(d, i)?;
        for j in i + 1..r {
            let mut v = tri.get(a, j, i);
            for k in 0..i {
                v -= tri.get(a, j, k) * tri.get(a, i, k).conj() * tri.get(a, k, k);
            }
            let (pr, pc) = tri.pos(j, i);
            a.put(pr, pc, v / d);
        }
    }
    Ok(())
}

pub(crate) fn check_solvable<T: Scalar, S: Store<T>>(a: &S, tri: Tri<'_>, r: usize) -> Result<()> {
    match (0..r).find(|&i| tri.get(a, i, i).is_zero()) {
        Some(index) => Err(Error::DivideByZero { index }),
        None => Ok(()),
    }
}

/// Forward substitution, diagonal scaling and back substitution on column `q`
/// of `b`, restricted to rows `b_rows[0..r)`.
#[inline]
pub(crate) fn solve_column<T: Scalar, S: Store<T>, B: Store<T>>(
    a: &S,
    tri: Tri<'_>,
    r: usize,
    b: &mut B,
    b_rows: &[usize],
    q: usize,
) {
    for i in 0..r {
        let mut v = b.at(b_rows[i], q);
        for k in 0..i {
            v -= tri.get(a, i, k) * b.at(b_rows[k], q);
        }
        b.put(b_rows[i], q, v);
    }
    for i in 0..r {
        let v = b.at(b_rows[i], q) / tri.get(a, i, i);
        b.put(b_rows[i], q, v);
    }
    for i in (0..r).rev() {
        let mut v = b.at(b_rows[i], q);
        for k in i + 1..r {
            v -= tri.get(a, k, i).conj() * b.at(b_rows[k], q);
        }
        b.put(b_rows[i], q, v);
    }
}

fn validate(a_shape: (usize, usize), rho: &[usize], gamma: &[usize]) -> Result<usize> {
    let r = gamma.len();
    if rho.len() < r {
        return Err(Error::ShapeMismatch(format!(
            "need at least {r} row indices, got {}",
            rho.len()
        )));
    }
    if rho[..r].iter().any(|&i| i >= a_shape.0) || gamma.iter().any(|&j| j >= a_shape.1) {
        return Err(Error::ShapeMismatch("triangle index out of range".into()));
    }
    Ok(r)
}

/// Factors the Hermitian matrix whose lower triangle occupies the pivot
/// block of `a`. The block size is `gamma.len()`.
///
/// Fails with `NumericBreakdown` when a computed diagonal entry is not
/// positive.
pub fn hfs_factor<T: Scalar>(a: &mut Matrix<T>, rho: &[usize], gamma: &[usize], layout: TriangleLayout) -> Result<()> {
    let r = validate(a.shape(), rho, gamma)?;
    factor_kernel(a, Tri { rho, gamma, layout }, r)
}

/// Replaces rows `b_rows` of every column of `b` by `H^-1` times their
/// contents, using a block already processed by [`hfs_factor`].
pub fn hfs_solve<T: Scalar>(
    a: &Matrix<T>,
    rho: &[usize],
    gamma: &[usize],
    layout: TriangleLayout,
    b: &mut Matrix<T>,
    b_rows: &[usize],
) -> Result<()> {
    let r = validate(a.shape(), rho, gamma)?;
    if b_rows.len() < r || b_rows[..r].iter().any(|&i| i >= b.rows()) {
        return Err(Error::ShapeMismatch("right-hand side rows out of range".into()));
    }
    let tri = Tri { rho, gamma, layout };
    check_solvable(a, tri, r)?;
    for q in 0..b.cols() {
        solve_column(a, tri, r, b, b_rows, q);
    }
    Ok(())
}
