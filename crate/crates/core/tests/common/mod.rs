#![allow(dead_code)]

use compact_pinv::corpus::random_low_rank;
use compact_pinv::oracle::{condition_estimate, exact_rank};
use compact_pinv::{factor, pinv_apply, Matrix, PivotPolicy, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Reference factors of the worked example, rounded to five decimals.
pub const GOLDEN_RANK: usize = 4;
pub const GOLDEN_RHO: [usize; 5] = [1, 3, 2, 0, 4];
pub const GOLDEN_GAMMA: [usize; 4] = [0, 1, 2, 4];
pub const GOLDEN_TOL: f64 = 5e-6;

pub const GOLDEN_L: [[f64; 4]; 5] = [
    [7.0, 0.0, 0.0, 0.0],
    [1.0, 6.14286, 0.0, 0.0],
    [1.0, 1.14286, 2.23256, 0.0],
    [1.0, 1.14286, 2.23256, 2.0],
    [7.0, -5.0, 2.23256, 2.0],
];

pub const GOLDEN_U: [[f64; 7]; 4] = [
    [1.0, 0.85714, 0.71429, 0.57143, 0.42857, 0.28571, 0.14286],
    [0.0, 1.0, 0.04651, 1.04651, 0.09302, 1.09302, 0.13953],
    [0.0, 0.0, 1.0, 1.0, 1.10417, 0.20833, 0.31250],
    [0.0, 0.0, 0.0, 0.0, 1.0, 2.0, 3.0],
];

pub const GOLDEN_PINV: [[f64; 5]; 7] = [
    [-0.02388, 0.08326, -0.15, 0.01719, 0.04219],
    [-0.01071, 0.06071, -0.10, 0.05833, -0.00833],
    [-0.03192, 0.00379, 0.15, -0.04323, 0.01510],
    [-0.01875, -0.01875, 0.20, -0.00208, -0.03542],
    [0.00379, -0.03192, 0.15, -0.04323, 0.01510],
    [0.06071, -0.01071, -0.10, 0.05833, -0.00833],
    [0.08326, -0.02388, -0.15, 0.01719, 0.04219],
];

pub fn golden<const C: usize>(rows: &[[f64; C]]) -> Matrix<f64> {
    Matrix::from_rows(rows)
}

pub fn policies() -> [PivotPolicy; 3] {
    [PivotPolicy::simple(1e-12), PivotPolicy::fine(), PivotPolicy::coarse()]
}

/// Condition ceiling above which corpus draws are discarded.
pub const MAX_COND: f64 = 1e8;

/// Random low-rank integer matrices with entries in [-10, 10], nonzero and
/// reasonably conditioned.
pub fn corpus<T: Scalar>(seed: u64, count: usize, max_dim: usize) -> Vec<Matrix<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let (m, n) = (rng.gen_range(1..=max_dim), rng.gen_range(1..=max_dim));
        let k = rng.gen_range(1..=m.min(n));
        let a: Matrix<T> = random_low_rank(&mut rng, m, n, k, 10);
        if exact_rank(&a) == 0 || condition_estimate(&a) > MAX_COND {
            continue;
        }
        out.push(a);
    }
    out
}

/// `A+` through the compact pipeline with `B = I`. Returns it with the rank.
pub fn compact_pinv<T: Scalar>(a: &Matrix<T>, policy: &PivotPolicy) -> (Matrix<T>, usize) {
    let mut f = factor(a.clone(), policy).unwrap();
    let r = f.rank();
    let mut b = Matrix::identity(a.rows());
    let mut g = Matrix::zeros(a.cols(), a.rows());
    pinv_apply(&mut f, &mut b, &mut g).unwrap();
    (g, r)
}

/// One low-rank draw of the given shape.
pub fn corpus_at<T: Scalar, R: Rng>(rng: &mut R, m: usize, n: usize, rank: usize) -> Matrix<T> {
    random_low_rank(rng, m, n, rank.max(1), 10)
}
