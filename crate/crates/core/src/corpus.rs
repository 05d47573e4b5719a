//! Test and benchmark matrices.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// The 5x7 rank-4 worked example used by `demo` and the golden tests.
pub fn worked_example() -> Matrix<f64> {
    Matrix::from_rows(&[
        [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0],
        [7.0, 6.0, 5.0, 4.0, 3.0, 2.0, 1.0],
        [1.0, 2.0, 3.0, 4.0, 3.0, 2.0, 1.0],
        [1.0, 7.0, 1.0, 7.0, 1.0, 7.0, 1.0],
        [7.0, 1.0, 7.0, 1.0, 7.0, 1.0, 7.0],
    ])
}

fn random_int_entry<T: Scalar, R: Rng + ?Sized>(rng: &mut R, bound: i32) -> T {
    let re = rng.gen_range(-bound..=bound) as f64;
    let im = if T::IS_COMPLEX {
        rng.gen_range(-bound..=bound) as f64
    } else {
        0.0
    };
    T::from_parts(re, im)
}

fn random_unit<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> T {
    let choices: &[(f64, f64)] = if T::IS_COMPLEX {
        &[(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)]
    } else {
        &[(1.0, 0.0), (-1.0, 0.0)]
    };
    let (re, im) = choices[rng.gen_range(0..choices.len())];
    T::from_parts(re, im)
}

fn within<T: Scalar>(row: &[T], bound: i32) -> bool {
    let b = bound as f64;
    row.iter().all(|x| x.re().abs() <= b && x.im().abs() <= b)
}

fn low_rank_rows<T: Scalar, R: Rng + ?Sized>(rng: &mut R, m: usize, n: usize, rank: usize, bound: i32) -> Matrix<T> {
    let basis: Vec<Vec<T>> = (0..rank)
        .map(|_| (0..n).map(|_| random_int_entry(rng, bound)).collect())
        .collect();
    let mut rows = basis.clone();
    while rows.len() < m {
        if rng.gen_bool(0.1) {
            rows.push(vec![T::zero(); n]);
            continue;
        }
        let mut row = None;
        for _ in 0..8 {
            let terms = rng.gen_range(1..=rank.min(3));
            let mut cand = vec![T::zero(); n];
            for _ in 0..terms {
                let c: T = random_unit(rng);
                let src = &basis[rng.gen_range(0..rank)];
                for (x, y) in cand.iter_mut().zip(src) {
                    *x += c * *y;
                }
            }
            if within(&cand, bound) {
                row = Some(cand);
                break;
            }
        }
        let row = row.unwrap_or_else(|| {
            let c: T = random_unit(rng);
            basis[rng.gen_range(0..rank)].iter().map(|&y| c * y).collect()
        });
        rows.push(row);
    }
    rows.shuffle(rng);
    Matrix::from_fn(m, n, |i, j| rows[i][j])
}

/// Random `m x n` integer matrix of rank at most `rank` with entries (real
/// and imaginary parts) in `[-bound, bound]`.
///
/// Dependent rows are small integer (or Gaussian integer) combinations of
/// `rank` random rows; half of the draws are built transposed so that
/// column dependencies appear too. The exact rank can fall below `rank` when
/// the random basis happens to be dependent.
pub fn random_low_rank<T: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    m: usize,
    n: usize,
    rank: usize,
    bound: i32,
) -> Matrix<T> {
    assert!(rank >= 1 && rank <= m.min(n));
    if rng.gen_bool(0.5) {
        low_rank_rows::<T, R>(rng, n, m, rank, bound).adjoint()
    } else {
        low_rank_rows(rng, m, n, rank, bound)
    }
}

/// Random `m x n` matrix of rank at most `rank`, built as the product of
/// random `m x rank` and `rank x n` integer factors with entries in
/// `[-bound, bound]`.
pub fn random_product<T: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    m: usize,
    n: usize,
    rank: usize,
    bound: i32,
) -> Matrix<T> {
    let x = Matrix::from_fn(m, rank, |_, _| random_int_entry::<T, R>(rng, bound));
    let y = Matrix::from_fn(rank, n, |_, _| random_int_entry::<T, R>(rng, bound));
    x.matmul(&y).expect("inner dimensions agree")
}

/// Random dense matrix with entries (real and imaginary parts) uniform in
/// `[-1, 1)`.
pub fn random_dense<T: Scalar, R: Rng + ?Sized>(rng: &mut R, m: usize, n: usize) -> Matrix<T> {
    Matrix::from_fn(m, n, |_, _| {
        let re = rng.gen_range(-1.0..1.0);
        let im = if T::IS_COMPLEX { rng.gen_range(-1.0..1.0) } else { 0.0 };
        T::from_parts(re, im)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::exact_rank;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn low_rank_respects_bounds_and_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let (m, n) = (rng.gen_range(1..=8), rng.gen_range(1..=8));
            let k = rng.gen_range(1..=m.min(n));
            let a: Matrix<Complex64> = random_low_rank(&mut rng, m, n, k, 10);
            assert_eq!(a.shape(), (m, n));
            assert!(within(a.as_slice(), 10));
            assert!(exact_rank(&a) <= k);
        }
    }

    #[test]
    fn product_rank_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a: Matrix<f64> = random_product(&mut rng, 6, 4, 2, 5);
        assert!(exact_rank(&a) <= 2);
    }
}
