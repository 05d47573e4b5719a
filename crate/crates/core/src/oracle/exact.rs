use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Zero};

use crate::matrix::Matrix;
use crate::scalar::Scalar;

type Exact = Complex<BigRational>;

fn to_exact(x: f64) -> BigRational {
    BigRational::from_f64(x).unwrap_or_else(|| BigRational::from_integer(BigInt::zero()))
}

/// Exact rank by rational Gaussian elimination.
///
/// Every finite `f64` is a dyadic rational, so the entries are converted
/// without loss and the result is the true rank of the stored matrix.
pub fn exact_rank<T: Scalar>(a: &Matrix<T>) -> usize {
    let (m, n) = a.shape();
    let mut w: Vec<Vec<Exact>> = (0..m)
        .map(|i| {
            a.row(i)
                .iter()
                .map(|x| Complex::new(to_exact(x.re()), to_exact(x.im())))
                .collect()
        })
        .collect();
    let mut rank = 0;
    for col in 0..n {
        let Some(p) = (rank..m).find(|&i| !w[i][col].is_zero()) else {
            continue;
        };
        w.swap(rank, p);
        let pivot = w[rank][col].clone();
        for i in rank + 1..m {
            if w[i][col].is_zero() {
                continue;
            }
            let factor = &w[i][col] / &pivot;
            for j in col..n {
                let delta = &factor * &w[rank][j];
                w[i][j] = &w[i][j] - delta;
            }
        }
        rank += 1;
        if rank == m {
            break;
        }
    }
    rank
}
