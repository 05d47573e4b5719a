//! `G = A+ B` computed through the factored storage of `A`.
//!
//! With `PA = LU` of rank `r`, `A+ = U* (UU*)^-1 (L*L)^-1 L* P`. The pipeline
//! keeps every intermediate inside `B` (rows `rho[0..r)`) and the pivot block
//! of `A`:
//!
//! 1. `C = L* P B` into rows `rho[i]` of `B`;
//! 2. lower triangle of `L*L` over the lower pivot triangle;
//! 3. `D = (L*L)^-1 C` by `LDL*` factor and solve;
//! 4. lower triangle of `UU*` over the same triangle;
//! 5. `F = (UU*)^-1 D` likewise;
//! 6. `G = U* F`.
//!
//! Steps 2 and 4 overwrite the leading `r` rows of `L`, so the factorization
//! is left in the [`FactorState::Consumed`] state.

use crate::error::{Error, Result};
use crate::lu::{FactorState, Factorization};
use crate::matrix::{Matrix, Store};
use crate::scalar::Scalar;

use super::hfs::{self, Tri, TriangleLayout};

/// Writes `A+ B` into `g` (`n x p`) and consumes `f`.
///
/// `b` (`m x p`) is used as workspace; afterwards its rows `rho[0..r)` hold
/// `(UU*)^-1 (L*L)^-1 L* P B`. A rank-zero factorization yields `g = 0`.
pub fn pinv_apply<T: Scalar>(f: &mut Factorization<T>, b: &mut Matrix<T>, g: &mut Matrix<T>) -> Result<()> {
    f.expect_state(FactorState::Raw)?;
    let (m, n) = f.a.shape();
    if b.rows() != m || g.rows() != n || g.cols() != b.cols() {
        return Err(Error::ShapeMismatch(format!(
            "A+B for A {m}x{n} needs B {m}xp and G {n}xp, got B {}x{} and G {}x{}",
            b.rows(),
            b.cols(),
            g.rows(),
            g.cols()
        )));
    }
    let r = f.rank;
    let Factorization { a, rho, gamma, .. } = f;
    let result = pinv_kernel(a, &rho[..], &gamma[..r], n, b.cols(), b, g);
    f.state = FactorState::Consumed;
    result
}

pub(crate) fn pinv_kernel<T: Scalar, S: Store<T>, B: Store<T>, G: Store<T>>(
    a: &mut S,
    rho: &[usize],
    gamma: &[usize],
    n: usize,
    p: usize,
    b: &mut B,
    g: &mut G,
) -> Result<()> {
    let r = gamma.len();
    let m = rho.len();
    if r == 0 {
        g.mark("zero");
        for i in 0..n {
            for q in 0..p {
                g.put(i, q, T::zero());
            }
        }
        return Ok(());
    }
    let tri = Tri {
        rho,
        gamma,
        layout: TriangleLayout::Lower,
    };

    // Step 1: C = L* P B.
    b.mark("pinv-c");
    for i in 0..r {
        for q in 0..p {
            let mut s = T::zero();
            for k in i..m {
                s += a.at(rho[k], gamma[i]).conj() * b.at(rho[k], q);
            }
            b.put(rho[i], q, s);
        }
    }

    // Step 2: lower triangle of L*L, entry (j, i) = sum_k conj(L[k][j]) L[k][i].
    a.mark("pinv-gram-l");
    for i in 0..r {
        for j in i..r {
            let mut s = T::zero();
            for k in j..m {
                s += a.at(rho[k], gamma[j]).conj() * a.at(rho[k], gamma[i]);
            }
            a.put(rho[j], gamma[i], s);
        }
    }

    // Step 3: D = (L*L)^-1 C.
    hfs::factor_kernel(a, tri, r)?;
    hfs::check_solvable(a, tri, r)?;
    b.mark("pinv-solve-l");
    for q in 0..p {
        hfs::solve_column(a, tri, r, b, &rho[..r], q);
    }

    // Step 4: lower triangle of UU*.
    a.mark("pinv-gram-u");
    write_uu_star(a, rho, gamma, n);

    // Step 5: F = (UU*)^-1 D.
    hfs::factor_kernel(a, tri, r)?;
    hfs::check_solvable(a, tri, r)?;
    b.mark("pinv-solve-u");
    for q in 0..p {
        hfs::solve_column(a, tri, r, b, &rho[..r], q);
    }

    // Step 6: G = U* F.
    a.mark("pinv-g");
    g.mark("pinv-g");
    for q in 0..p {
        for i in 0..n {
            let mut s = T::zero();
            for k in 0..r {
                let gk = gamma[k];
                if i == gk {
                    s += b.at(rho[k], q);
                } else if i > gk {
                    s += b.at(rho[k], q) * a.at(rho[k], i).conj();
                }
            }
            g.put(i, q, s);
        }
    }
    Ok(())
}

/// Overwrites the lower pivot triangle with the lower triangle of `UU*`,
/// reading `U` from the upper part of each pivot row.
pub(crate) fn write_uu_star<T: Scalar, S: Store<T>>(a: &mut S, rho: &[usize], gamma: &[usize], n: usize) {
    let r = gamma.len();
    for i in 0..r {
        for j in i..r {
            let mut s = if j > i { a.at(rho[i], gamma[j]).conj() } else { T::one() };
            for k in gamma[j] + 1..n {
                s += a.at(rho[j], k) * a.at(rho[i], k).conj();
            }
            a.put(rho[j], gamma[i], s);
        }
    }
}
