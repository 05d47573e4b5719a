//! Rank-revealing LU factorization `PA = LU` computed in place.
//!
//! Columns are processed left to right. For each column the entries of the
//! not-yet-pivoted rows are eliminated against the pivots found so far; the
//! candidate with the largest magnitude relative to its row's max-norm becomes
//! the next pivot, provided the [`PivotPolicy`] accepts it as nonzero. Columns
//! without an accepted candidate are skipped, so `U` comes out in echelon form
//! with its leading ones at the pivot columns `gamma[0..r)`.
//!
//! With `rho` the row permutation, the factors are read from the overwritten
//! storage as
//!
//! ```text
//! L[p][q] = A[rho[p]][gamma[q]]            p >= q  (zero above)
//! U[p][q] = 1 if q == gamma[p],  A[rho[p]][q] if q > gamma[p],  0 otherwise
//! ```

pub mod pivot;

use crate::error::{Error, Result};
use crate::matrix::{Matrix, Store};
use crate::scalar::Scalar;

pub use pivot::{
    phi, pivot_accept, AcceptContext, Candidate, CoarseBound, FineBound, Magnitudes, PivotPolicy, PivotRule,
    DEFAULT_EPS,
};

use pivot::CoarseTracker;

/// Which in-place preparation the factored storage currently holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorState {
    /// Plain `L`/`U` as left by [`factor`].
    Raw,
    /// The pseudoinverse pipeline ran and destroyed the leading rows of `L`.
    Consumed,
    /// Prepared for repeated `A+A` applications.
    ColProjector,
    /// Prepared for repeated `AA+` applications.
    RowProjector,
}

/// Factored matrix together with its permutation and pivot columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Factorization<T> {
    pub(crate) a: Matrix<T>,
    pub(crate) rho: Vec<usize>,
    pub(crate) gamma: Vec<usize>,
    pub(crate) rank: usize,
    pub(crate) state: FactorState,
}

impl<T: Scalar> Factorization<T> {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rows(&self) -> usize {
        self.a.rows()
    }

    pub fn cols(&self) -> usize {
        self.a.cols()
    }

    /// Row permutation: row `i` of `PA` is row `rho[i]` of `A`.
    pub fn permutation(&self) -> &[usize] {
        &self.rho
    }

    /// Pivot columns `gamma[0..r)`, strictly increasing.
    pub fn pivot_columns(&self) -> &[usize] {
        &self.gamma[..self.rank]
    }

    pub fn state(&self) -> FactorState {
        self.state
    }

    /// The overwritten storage.
    pub fn storage(&self) -> &Matrix<T> {
        &self.a
    }

    pub fn is_rank_zero(&self) -> bool {
        self.rank == 0
    }

    pub(crate) fn expect_state(&self, expected: FactorState) -> Result<()> {
        if self.state == expected {
            Ok(())
        } else {
            Err(Error::WrongState {
                expected,
                found: self.state,
            })
        }
    }

    /// Freshly allocated `m x r` lower trapezoidal factor.
    pub fn extract_l(&self) -> Result<Matrix<T>> {
        self.expect_state(FactorState::Raw)?;
        if self.rank == 0 {
            return Err(Error::RankZero);
        }
        Ok(Matrix::from_fn(self.rows(), self.rank, |p, q| {
            if p >= q {
                self.a[(self.rho[p], self.gamma[q])]
            } else {
                T::zero()
            }
        }))
    }

    /// Freshly allocated `r x n` upper echelon factor.
    pub fn extract_u(&self) -> Result<Matrix<T>> {
        self.expect_state(FactorState::Raw)?;
        if self.rank == 0 {
            return Err(Error::RankZero);
        }
        Ok(Matrix::from_fn(self.rank, self.cols(), |p, q| {
            let g = self.gamma[p];
            if q == g {
                T::one()
            } else if q > g {
                self.a[(self.rho[p], q)]
            } else {
                T::zero()
            }
        }))
    }
}

/// Max-norm of each row.
fn row_norms<T: Scalar>(a: &Matrix<T>) -> Vec<f64> {
    (0..a.rows())
        .map(|i| a.row(i).iter().fold(0.0f64, |m, x| m.max(x.modulus())))
        .collect()
}

/// Factors `a` in place.
///
/// A matrix whose every candidate is rejected yields `rank() == 0`; that is
/// not an error, and the downstream schemes then produce zero results.
pub fn factor<T: Scalar>(mut a: Matrix<T>, policy: &PivotPolicy) -> Result<Factorization<T>> {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return Err(Error::Empty);
    }
    a.check_finite()?;
    let norms = row_norms(&a);
    let tracker = match policy.rule {
        PivotRule::Coarse => Some(CoarseTracker::new(a.as_slice(), m.min(n), policy.unit)),
        _ => None,
    };
    let (rho, gamma, rank) = factor_kernel(&mut a, m, n, policy, &norms, tracker);
    Ok(Factorization {
        a,
        rho,
        gamma,
        rank,
        state: FactorState::Raw,
    })
}

pub(crate) fn factor_kernel<T: Scalar, S: Store<T>>(
    a: &mut S,
    m: usize,
    n: usize,
    policy: &PivotPolicy,
    norms: &[f64],
    mut tracker: Option<CoarseTracker>,
) -> (Vec<usize>, Vec<usize>, usize) {
    let mut rho: Vec<usize> = (0..m).collect();
    let mut gamma = vec![n; n];
    let mut r = 0usize;
    let fine = matches!(policy.rule, PivotRule::Fine);
    a.mark("factor");

    for col in 0..n {
        let mut best = 0.0f64;
        let mut pivot = r;
        for i in r..m {
            let row = rho[i];
            if norms[row] <= 0.0 {
                continue;
            }
            let before = a.at(row, col);
            let mut acc = before;
            let mut bound = FineBound::seed(before);
            for k in 0..r {
                let l = a.at(row, gamma[k]);
                let u = a.at(rho[k], col);
                acc -= l * u;
                if fine {
                    bound.add(l, u);
                }
            }
            if r > 0 {
                a.put(row, col, acc);
            }
            if let Some(t) = tracker.as_mut() {
                t.observe(acc);
            }
            let cand = Candidate {
                value: acc,
                scaled: acc.modulus() / norms[row],
            };
            let ctx = match (policy.rule, tracker.as_ref()) {
                (PivotRule::Fine, _) => AcceptContext::Fine(bound),
                (PivotRule::Coarse, Some(t)) => AcceptContext::Coarse(t.bound()),
                _ => AcceptContext::Simple,
            };
            if pivot_accept(policy, &cand, &ctx) && best < cand.scaled {
                best = cand.scaled;
                pivot = i;
            }
        }

        if best > 0.0 {
            gamma[r] = col;
            rho.swap(pivot, r);
            let prow = rho[r];
            let pval = a.at(prow, col);
            for j in col + 1..n {
                let mut acc = a.at(prow, j);
                for k in 0..r {
                    acc -= a.at(prow, gamma[k]) * a.at(rho[k], j);
                }
                acc /= pval;
                a.put(prow, j, acc);
                if let Some(t) = tracker.as_mut() {
                    t.observe(acc);
                }
            }
            r += 1;
        }
    }
    (rho, gamma, r)
}
