//! Reference routines for validating the compact code paths.
//!
//! Nothing here shares code with [`crate::lu`] or [`crate::schemes`]: the
//! rank decomposition comes from a separate reduced-row-echelon elimination
//! and the Gram inverses from Gauss-Jordan on freshly allocated copies. Speed
//! is not a concern.

mod exact;

pub use exact::exact_rank;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// Max-norm residuals of the four Moore-Penrose conditions.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct OracleReport {
    /// `|AXA - A|`
    pub residual_axa: f64,
    /// `|XAX - X|`
    pub residual_xax: f64,
    /// `|(AX)* - AX|`
    pub residual_ax_herm: f64,
    /// `|(XA)* - XA|`
    pub residual_xa_herm: f64,
}

impl OracleReport {
    pub fn max(&self) -> f64 {
        self.residual_axa
            .max(self.residual_xax)
            .max(self.residual_ax_herm)
            .max(self.residual_xa_herm)
    }

    pub fn as_array(&self) -> [f64; 4] {
        [
            self.residual_axa,
            self.residual_xax,
            self.residual_ax_herm,
            self.residual_xa_herm,
        ]
    }
}

/// Checks the Moore-Penrose conditions for `x` as a pseudoinverse of `a`.
pub fn mp_check<T: Scalar>(a: &Matrix<T>, x: &Matrix<T>) -> Result<OracleReport> {
    if x.rows() != a.cols() || x.cols() != a.rows() {
        return Err(Error::ShapeMismatch(format!(
            "X must be {}x{} for A {}x{}, got {}x{}",
            a.cols(),
            a.rows(),
            a.rows(),
            a.cols(),
            x.rows(),
            x.cols()
        )));
    }
    let ax = a.matmul(x)?;
    let xa = x.matmul(a)?;
    Ok(OracleReport {
        residual_axa: ax.matmul(a)?.max_abs_diff(a),
        residual_xax: xa.matmul(x)?.max_abs_diff(x),
        residual_ax_herm: ax.adjoint().max_abs_diff(&ax),
        residual_xa_herm: xa.adjoint().max_abs_diff(&xa),
    })
}

/// Full-rank factors `A = C R` with `C` the pivot columns of `A` and `R` the
/// nonzero rows of its reduced row echelon form.
struct RankFactors<T> {
    c: Matrix<T>,
    r: Matrix<T>,
}

fn rank_factors<T: Scalar>(a: &Matrix<T>) -> Option<RankFactors<T>> {
    let (m, n) = a.shape();
    let tol = 1e-10 * a.max_abs().max(f64::MIN_POSITIVE) * (m.max(n) as f64);
    let mut w: Vec<Vec<T>> = (0..m).map(|i| a.row(i).to_vec()).collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        if row == m {
            break;
        }
        let (best, mag) =
            (row..m)
                .map(|i| (i, w[i][col].modulus()))
                .fold((row, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if mag <= tol {
            for wi in w.iter_mut().skip(row) {
                wi[col] = T::zero();
            }
            continue;
        }
        w.swap(row, best);
        let inv = T::one() / w[row][col];
        for v in w[row].iter_mut() {
            *v *= inv;
        }
        let prow = w[row].clone();
        for (i, wi) in w.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let factor = wi[col];
            if factor.is_zero() {
                continue;
            }
            for (v, pv) in wi.iter_mut().zip(&prow) {
                *v -= factor * *pv;
            }
        }
        pivots.push(col);
        row += 1;
    }
    if pivots.is_empty() {
        return None;
    }
    let rank = pivots.len();
    Some(RankFactors {
        c: Matrix::from_fn(m, rank, |i, k| a[(i, pivots[k])]),
        r: Matrix::from_fn(rank, n, |k, j| w[k][j]),
    })
}

/// Inverse of a square matrix by Gauss-Jordan with partial pivoting.
fn gauss_jordan_inverse<T: Scalar>(h: &Matrix<T>) -> Option<Matrix<T>> {
    let n = h.rows();
    let mut w: Vec<Vec<T>> = (0..n)
        .map(|i| {
            let mut row = h.row(i).to_vec();
            row.extend((0..n).map(|j| if i == j { T::one() } else { T::zero() }));
            row
        })
        .collect();
    for col in 0..n {
        let best = (col..n).max_by(|&x, &y| w[x][col].modulus().total_cmp(&w[y][col].modulus()))?;
        if w[best][col].is_zero() {
            return None;
        }
        w.swap(col, best);
        let inv = T::one() / w[col][col];
        for v in w[col].iter_mut() {
            *v *= inv;
        }
        let prow = w[col].clone();
        for (i, wi) in w.iter_mut().enumerate() {
            if i != col {
                let factor = wi[col];
                for (v, pv) in wi.iter_mut().zip(&prow) {
                    *v -= factor * *pv;
                }
            }
        }
    }
    Some(Matrix::from_fn(n, n, |i, j| w[i][n + j]))
}

fn one_norm<T: Scalar>(h: &Matrix<T>) -> f64 {
    (0..h.cols())
        .map(|j| (0..h.rows()).map(|i| h[(i, j)].modulus()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Reference pseudoinverse `R* (RR*)^-1 (C*C)^-1 C*` from an independent
/// rank decomposition. A numerically zero matrix gives the `n x m` zero.
pub fn oracle_pinv<T: Scalar>(a: &Matrix<T>) -> Matrix<T> {
    let (m, n) = a.shape();
    let Some(RankFactors { c, r }) = rank_factors(a) else {
        return Matrix::zeros(n, m);
    };
    let ch = c.adjoint();
    let rh = r.adjoint();
    let (Some(cc_inv), Some(rr_inv)) = (
        gauss_jordan_inverse(&ch.matmul(&c).expect("shapes")),
        gauss_jordan_inverse(&r.matmul(&rh).expect("shapes")),
    ) else {
        return Matrix::zeros(n, m);
    };
    let left = rh.matmul(&rr_inv).expect("shapes");
    let right = cc_inv.matmul(&ch).expect("shapes");
    left.matmul(&right).expect("shapes")
}

/// Rough condition number over the nonzero singular values:
/// `sqrt(k1(C*C) * k1(RR*))` for the rank decomposition `A = C R`.
///
/// Returns infinity for a numerically zero matrix.
pub fn condition_estimate<T: Scalar>(a: &Matrix<T>) -> f64 {
    let Some(RankFactors { c, r }) = rank_factors(a) else {
        return f64::INFINITY;
    };
    let cc = c.adjoint().matmul(&c).expect("shapes");
    let rr = r.matmul(&r.adjoint()).expect("shapes");
    match (gauss_jordan_inverse(&cc), gauss_jordan_inverse(&rr)) {
        (Some(ci), Some(ri)) => (one_norm(&cc) * one_norm(&ci) * one_norm(&rr) * one_norm(&ri)).sqrt(),
        _ => f64::INFINITY,
    }
}

/// Numerical rank seen by the reference elimination.
pub fn oracle_rank<T: Scalar>(a: &Matrix<T>) -> usize {
    rank_factors(a).map_or(0, |f| f.c.cols())
}
