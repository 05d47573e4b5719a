//! Pivot acceptance under floating point.
//!
//! During elimination a candidate pivot is the freshly updated entry
//! `a - sum_k l_k u_k`. Whether that machine value stands for an exact-arithmetic
//! nonzero is decided by one of three rules:
//!
//! * **simple**: the scaled magnitude must exceed a fixed `eps`;
//! * **fine**: the computed value must exceed the inner-product rounding bound
//!   `phi(K) * (|a| + sum_k |l_k||u_k|)`, with `K` the number of nonzero
//!   products (real and imaginary parts bounded separately for complex data);
//! * **coarse**: the computed value must exceed a global bound built from the
//!   running maximum entry magnitude, so no per-entry sums are needed.
//!
//! with `phi(a) = a*u / (1 - a*u)` and `u` the unit roundoff. The coarse bound
//! dominates the fine one, so coarse acceptance implies fine acceptance.

use crate::scalar::Scalar;

/// `eps` used by the simple rule unless overridden.
pub const DEFAULT_EPS: f64 = 1e-12;

/// `phi(a) = a*u / (1 - a*u)`. Requires `a*u < 1`.
#[inline]
pub fn phi(count: f64, unit: f64) -> f64 {
    let au = count * unit;
    debug_assert!(au < 1.0, "phi undefined for a*u >= 1");
    au / (1.0 - au)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PivotRule {
    Simple { eps: f64 },
    Fine,
    Coarse,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PivotPolicy {
    pub rule: PivotRule,
    /// Machine unit `u`.
    pub unit: f64,
}

impl PivotPolicy {
    pub fn simple(eps: f64) -> Self {
        assert!(eps >= 0.0, "simple pivot threshold must be nonnegative");
        Self {
            rule: PivotRule::Simple { eps },
            unit: crate::scalar::UNIT_ROUNDOFF_F64,
        }
    }

    pub fn fine() -> Self {
        Self {
            rule: PivotRule::Fine,
            unit: crate::scalar::UNIT_ROUNDOFF_F64,
        }
    }

    pub fn coarse() -> Self {
        Self {
            rule: PivotRule::Coarse,
            unit: crate::scalar::UNIT_ROUNDOFF_F64,
        }
    }

    /// Replaces the machine unit. A constant larger than the unit roundoff
    /// makes the fine and coarse rules filter small noise as if it were zero.
    pub fn with_unit(mut self, unit: f64) -> Self {
        assert!(unit > 0.0 && unit < 1.0);
        self.unit = unit;
        self
    }

    pub fn name(&self) -> &'static str {
        match self.rule {
            PivotRule::Simple { .. } => "simple",
            PivotRule::Fine => "fine",
            PivotRule::Coarse => "coarse",
        }
    }
}

impl Default for PivotPolicy {
    fn default() -> Self {
        Self::simple(DEFAULT_EPS)
    }
}

/// Candidate pivot: the computed entry and its row-scaled magnitude.
#[derive(Debug, Clone, Copy)]
pub struct Candidate<T> {
    pub value: T,
    pub scaled: f64,
}

/// Magnitude sums and nonzero-pair counts gathered while evaluating the
/// elimination inner product, split into real- and imaginary-part bounds.
///
/// For real data only the `re` half is populated.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FineBound {
    pub sum_re: f64,
    pub count_re: u32,
    pub sum_im: f64,
    pub count_im: u32,
}

impl FineBound {
    /// Starts from the entry value before elimination.
    #[inline]
    pub fn seed<T: Scalar>(a: T) -> Self {
        let (ar, ai) = (a.re(), a.im());
        Self {
            sum_re: ar.abs(),
            count_re: (ar != 0.0) as u32,
            sum_im: ai.abs(),
            count_im: (ai != 0.0) as u32,
        }
    }

    /// Adds the product `l * u`. Pairs with a zero factor are not counted.
    #[inline]
    pub fn add<T: Scalar>(&mut self, l: T, u: T) {
        let (lr, li, ur, ui) = (l.re(), l.im(), u.re(), u.im());
        self.sum_re += lr.abs() * ur.abs();
        self.count_re += (lr != 0.0 && ur != 0.0) as u32;
        if T::IS_COMPLEX {
            self.sum_re += li.abs() * ui.abs();
            self.count_re += (li != 0.0 && ui != 0.0) as u32;
            self.sum_im += lr.abs() * ui.abs() + li.abs() * ur.abs();
            self.count_im += (lr != 0.0 && ui != 0.0) as u32 + (li != 0.0 && ur != 0.0) as u32;
        }
    }
}

/// Running maxima of `|x|`, `|Re x|` and `|Im x|` over the working storage.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Magnitudes {
    pub abs: f64,
    pub re: f64,
    pub im: f64,
}

impl Magnitudes {
    /// Folds `x` in; returns true if any maximum grew.
    #[inline]
    pub fn observe<T: Scalar>(&mut self, x: T) -> bool {
        let mut grew = false;
        let a = x.modulus();
        if a > self.abs {
            self.abs = a;
            grew = true;
        }
        let r = x.re().abs();
        if r > self.re {
            self.re = r;
            grew = true;
        }
        let i = x.im().abs();
        if i > self.im {
            self.im = i;
            grew = true;
        }
        grew
    }
}

/// Cached right-hand sides of the coarse test.
///
/// Real data compares `|x|` against `rhs_re`; complex data compares
/// `|Re x|` against `rhs_re` and `|Im x|` against `rhs_im`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CoarseBound {
    pub rhs_re: f64,
    pub rhs_im: f64,
}

impl CoarseBound {
    /// `kappa = min(m, n)`.
    pub fn new<T: Scalar>(mu: &Magnitudes, kappa: usize, unit: f64) -> Self {
        let k = kappa as f64;
        if T::IS_COMPLEX {
            let f = phi(2.0 * (k + 1.0), unit);
            // The real-part term uses the |Re| maximum; this keeps the bound
            // above the fine one.
            Self {
                rhs_re: f * (mu.re + k * mu.re * mu.re + k * mu.im * mu.im),
                rhs_im: f * (mu.im + 2.0 * k * mu.im * mu.re),
            }
        } else {
            Self {
                rhs_re: phi(k + 1.0, unit) * (mu.abs + k * mu.abs * mu.abs),
                rhs_im: 0.0,
            }
        }
    }
}

/// Per-policy evidence accompanying a candidate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AcceptContext {
    Simple,
    Fine(FineBound),
    Coarse(CoarseBound),
}

/// Decides whether a candidate pivot is treated as nonzero.
///
/// A context that does not match the policy's rule is rejected.
pub fn pivot_accept<T: Scalar>(policy: &PivotPolicy, cand: &Candidate<T>, ctx: &AcceptContext) -> bool {
    match (policy.rule, ctx) {
        (PivotRule::Simple { eps }, _) => cand.scaled > eps,
        (PivotRule::Fine, AcceptContext::Fine(b)) => {
            let re_ok = cand.value.re().abs() > phi(b.count_re as f64, policy.unit) * b.sum_re;
            if T::IS_COMPLEX {
                re_ok || cand.value.im().abs() > phi(b.count_im as f64, policy.unit) * b.sum_im
            } else {
                re_ok
            }
        }
        (PivotRule::Coarse, AcceptContext::Coarse(b)) => {
            if T::IS_COMPLEX {
                cand.value.re().abs() > b.rhs_re || cand.value.im().abs() > b.rhs_im
            } else {
                cand.value.modulus() > b.rhs_re
            }
        }
        _ => {
            debug_assert!(false, "context {ctx:?} does not match rule {:?}", policy.rule);
            false
        }
    }
}

/// Coarse bound cache, refreshed only when a running maximum grows.
#[derive(Debug, Clone)]
pub(crate) struct CoarseTracker {
    mu: Magnitudes,
    bound: CoarseBound,
    kappa: usize,
    unit: f64,
}

impl CoarseTracker {
    pub(crate) fn new<T: Scalar>(data: &[T], kappa: usize, unit: f64) -> Self {
        let mut mu = Magnitudes::default();
        for &x in data {
            mu.observe(x);
        }
        Self {
            mu,
            bound: CoarseBound::new::<T>(&mu, kappa, unit),
            kappa,
            unit,
        }
    }

    #[inline]
    pub(crate) fn observe<T: Scalar>(&mut self, x: T) {
        if self.mu.observe(x) {
            self.bound = CoarseBound::new::<T>(&self.mu, self.kappa, self.unit);
        }
    }

    #[inline]
    pub(crate) fn bound(&self) -> CoarseBound {
        self.bound
    }
}
