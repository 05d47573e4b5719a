//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::alloc::{GlobalAlloc, Layout, System};
use std::cell::Cell;
use std::time::{Duration, Instant};

use common::*;
use compact_pinv::corpus::{random_dense, worked_example};
use compact_pinv::lu::{pivot_accept, AcceptContext, Candidate, CoarseBound, FineBound, Magnitudes};
use compact_pinv::oracle::{exact_rank, mp_check, oracle_pinv};
use compact_pinv::scalar::UNIT_ROUNDOFF_F64;
use compact_pinv::{
    factor, pinv_apply, prepare_col_projector, prepare_row_projector, Complex64, Matrix, PivotPolicy, Scalar,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Counting;

thread_local! {
    static ALLOC_BYTES: Cell<usize> = const { Cell::new(0) };
    static ALLOC_CALLS: Cell<usize> = const { Cell::new(0) };
}

fn note(size: usize) {
    let _ = ALLOC_BYTES.try_with(|b| b.set(b.get() + size));
    let _ = ALLOC_CALLS.try_with(|c| c.set(c.get() + 1));
}

unsafe impl GlobalAlloc for Counting {
    unsafe fn alloc(&self, layout: Layout) -> *mut u8 {
        note(layout.size());
        System.alloc(layout)
    }

    unsafe fn alloc_zeroed(&self, layout: Layout) -> *mut u8 {
        note(layout.size());
        System.alloc_zeroed(layout)
    }

    unsafe fn realloc(&self, ptr: *mut u8, layout: Layout, new_size: usize) -> *mut u8 {
        note(new_size);
        System.realloc(ptr, layout, new_size)
    }

    unsafe fn dealloc(&self, ptr: *mut u8, layout: Layout) {
        System.dealloc(ptr, layout)
    }
}

#[global_allocator]
static GLOBAL: Counting = Counting;

/// Bytes and calls allocated on this thread while running `f`.
fn audited<R>(f: impl FnOnce() -> R) -> (R, usize, usize) {
    let (b0, c0) = (ALLOC_BYTES.with(Cell::get), ALLOC_CALLS.with(Cell::get));
    let out = f();
    let (b1, c1) = (ALLOC_BYTES.with(Cell::get), ALLOC_CALLS.with(Cell::get));
    (out, b1 - b0, c1 - c0)
}

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn golden_factorization() -> Outcome {
    let f = factor(worked_example(), &PivotPolicy::default()).map_err(|e| e.to_string())?;
    if f.rank() != GOLDEN_RANK || f.permutation() != GOLDEN_RHO || f.pivot_columns() != GOLDEN_GAMMA {
        return Err(format!(
            "r={} rho={:?} gamma={:?}",
            f.rank(),
            f.permutation(),
            f.pivot_columns()
        ));
    }
    let dl = f.extract_l().unwrap().max_abs_diff(&golden(&GOLDEN_L));
    let du = f.extract_u().unwrap().max_abs_diff(&golden(&GOLDEN_U));
    let msg = format!("r=4, rho and gamma match; max|L-Lref|={dl:.1e}, max|U-Uref|={du:.1e}");
    if dl < GOLDEN_TOL && du < GOLDEN_TOL {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn golden_pinv() -> Outcome {
    let (g, _) = compact_pinv(&worked_example(), &PivotPolicy::default());
    let d = g.max_abs_diff(&golden(&GOLDEN_PINV));
    let msg = format!("max|X-Xref|={d:.1e}");
    if d < GOLDEN_TOL {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn golden_residuals() -> Outcome {
    let a = worked_example();
    let (x, _) = compact_pinv(&a, &PivotPolicy::default());

    let row = prepare_row_projector(factor(a.clone(), &PivotPolicy::default()).unwrap()).map_err(|e| e.to_string())?;
    let mut b = a.clone();
    let mut g = Matrix::zeros(5, 7);
    row.apply(&mut b, &mut g).map_err(|e| e.to_string())?;
    let r1 = g.max_abs_diff(&a);

    let col = prepare_col_projector(factor(a, &PivotPolicy::default()).unwrap()).map_err(|e| e.to_string())?;
    let mut b = x.clone();
    let mut g = Matrix::zeros(7, 5);
    col.apply(&mut b, &mut g).map_err(|e| e.to_string())?;
    let r2 = g.max_abs_diff(&x);

    let msg = format!("max|A-AA+A|={r1:.2e}, max|A+-A+AA+|={r2:.2e}");
    if r1 < 1e-13 && r2 < 1e-13 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn policy_agreement() -> Outcome {
    let runs: Vec<_> = policies()
        .iter()
        .map(|p| factor(worked_example(), p).unwrap())
        .collect();
    let bits =
        |f: &compact_pinv::Factorization<f64>| f.storage().as_slice().iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    let base = &runs[0];
    for (f, p) in runs.iter().zip(policies()).skip(1) {
        if f.rank() != base.rank()
            || f.permutation() != base.permutation()
            || f.pivot_columns() != base.pivot_columns()
            || bits(f) != bits(base)
        {
            return Err(format!("{} differs from simple", p.name()));
        }
    }
    Ok("simple, fine and coarse give identical rho, gamma, r and storage bits".into())
}

#[derive(Default)]
struct SuiteStats {
    cases: usize,
    mp_fail: usize,
    oracle_fail: usize,
    rank_mismatch: [usize; 3],
    worst_mp: f64,
    worst_oracle: f64,
    examples: Vec<String>,
}

fn run_property_case<T: Scalar>(a: &Matrix<T>, s: &mut SuiteStats) {
    s.cases += 1;
    let exact = exact_rank(a);
    for (k, policy) in policies().iter().enumerate() {
        let r = factor(a.clone(), policy).unwrap().rank();
        if r != exact {
            s.rank_mismatch[k] += 1;
            if s.examples.len() < 4 {
                let kind = if T::IS_COMPLEX { "complex" } else { "real" };
                s.examples.push(format!(
                    "{kind} {}x{} {}: r={r} exact={exact}",
                    a.rows(),
                    a.cols(),
                    policy.name()
                ));
            }
        }
    }
    let (g, _) = compact_pinv(a, &PivotPolicy::default());
    let scale = 1.0 + a.max_abs();
    let mp = mp_check(a, &g).unwrap().max() / scale;
    s.worst_mp = s.worst_mp.max(mp);
    if mp >= 1e-10 {
        s.mp_fail += 1;
    }
    let o = oracle_pinv(a);
    let rel = g.max_abs_diff(&o) / o.max_abs().max(f64::MIN_POSITIVE);
    s.worst_oracle = s.worst_oracle.max(rel);
    if rel >= 1e-9 {
        s.oracle_fail += 1;
    }
}

fn property_suite() -> Outcome {
    let start = Instant::now();
    let mut s = SuiteStats::default();
    for a in corpus::<f64>(0x5eed_0001, 250, 12) {
        run_property_case(&a, &mut s);
    }
    for a in corpus::<Complex64>(0x5eed_0002, 250, 12) {
        run_property_case(&a, &mut s);
    }
    let elapsed = start.elapsed();
    let [rs, rf, rc] = s.rank_mismatch;
    let msg = format!(
        "{} cases in {:.1}s; worst MP/(1+|A|)={:.1e}, worst oracle rel={:.1e}; \
         rank mismatches simple={rs} fine={rf} coarse={rc}{}",
        s.cases,
        elapsed.as_secs_f64(),
        s.worst_mp,
        s.worst_oracle,
        if s.examples.is_empty() {
            String::new()
        } else {
            format!(" [{}]", s.examples.join("; "))
        }
    );
    if s.mp_fail == 0 && s.oracle_fail == 0 && s.rank_mismatch == [0; 3] && elapsed < Duration::from_secs(30) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn projector_case<T: Scalar>(a: &Matrix<T>, worst: &mut f64) -> Result<(), String> {
    let pps = [
        prepare_col_projector(factor(a.clone(), &PivotPolicy::default()).unwrap()).unwrap(),
        prepare_row_projector(factor(a.clone(), &PivotPolicy::default()).unwrap()).unwrap(),
    ];
    for pp in &pps {
        let d = pp.dim();
        let mut p = Matrix::identity(d);
        let mut g = Matrix::zeros(d, d);
        pp.apply(&mut p, &mut g).unwrap();
        let mut p2 = g.clone();
        let mut g2 = Matrix::zeros(d, d);
        pp.apply(&mut p2, &mut g2).unwrap();
        let e = g2.max_abs_diff(&g).max(g.adjoint().max_abs_diff(&g));
        *worst = worst.max(e);
        if e >= 1e-12 {
            return Err(format!("{:?} {}x{}: error {e:.1e}", pp.kind(), a.rows(), a.cols()));
        }
        let mut again = Matrix::identity(d);
        let mut g3 = Matrix::zeros(d, d);
        pp.apply(&mut again, &mut g3).unwrap();
        if g3 != g {
            return Err(format!("{:?}: repeated apply differs", pp.kind()));
        }
    }
    Ok(())
}

fn projector_properties() -> Outcome {
    let mut worst = 0.0;
    for a in corpus::<f64>(0x9a0_0001, 100, 12) {
        projector_case(&a, &mut worst)?;
    }
    for a in corpus::<Complex64>(0x9a0_0002, 100, 12) {
        projector_case(&a, &mut worst)?;
    }
    Ok(format!(
        "200 cases; worst idempotence/Hermitian error {worst:.1e}; repeats bit-identical"
    ))
}

/// Runs every pipeline at two sizes and requires the bytes allocated inside
/// the pipeline calls to stay within a linear budget in m + n + p.
fn allocation_audit() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut report = Vec::new();
    for (m, n, p) in [(20, 30, 10), (80, 120, 40)] {
        let a: Matrix<f64> = common::corpus_at(&mut rng, m, n, m.min(n) / 2);
        let budget = 16 * (m + n + p) * std::mem::size_of::<usize>();
        let mut worst = 0;
        let mut check = |name: &str, bytes: usize| -> Result<(), String> {
            worst = worst.max(bytes);
            if bytes > budget {
                Err(format!("{name} at {m}x{n}, p={p}: {bytes} bytes (budget {budget})"))
            } else {
                Ok(())
            }
        };

        let f = factor(a.clone(), &PivotPolicy::default()).unwrap();
        let mut f1 = f.clone();
        let mut b: Matrix<f64> = random_dense(&mut rng, m, p);
        let mut g = Matrix::zeros(n, p);
        let (res, bytes, _) = audited(|| pinv_apply(&mut f1, &mut b, &mut g));
        res.map_err(|e| e.to_string())?;
        check("pinv_apply", bytes)?;

        let f2 = f.clone();
        let (col, bytes, _) = audited(|| prepare_col_projector(f2));
        check("prepare_col_projector", bytes)?;
        let col = col.unwrap();
        let mut b: Matrix<f64> = random_dense(&mut rng, n, p);
        let mut g = Matrix::zeros(n, p);
        let (_, bytes, _) = audited(|| col.apply(&mut b, &mut g).unwrap());
        check("col apply", bytes)?;
        let (_, bytes, _) = audited(|| col.apply_in_place(&mut b).unwrap());
        check("col apply in place", bytes)?;

        let f2 = f.clone();
        let (row, bytes, _) = audited(|| prepare_row_projector(f2));
        check("prepare_row_projector", bytes)?;
        let row = row.unwrap();
        let mut b: Matrix<f64> = random_dense(&mut rng, m, p);
        let mut g = Matrix::zeros(m, p);
        let (_, bytes, _) = audited(|| row.apply(&mut b, &mut g).unwrap());
        check("row apply", bytes)?;
        let (_, bytes, _) = audited(|| row.apply_in_place(&mut b).unwrap());
        check("row apply in place", bytes)?;

        let a2 = a.clone();
        let (_, bytes, _) = audited(|| factor(a2, &PivotPolicy::coarse()).unwrap());
        check("factor", bytes)?;
        report.push(format!("{m}x{n},p={p}: max {worst} B"));
    }
    Ok(format!("pipeline allocations within O(m+n+p): {}", report.join(", ")))
}

fn monotonicity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc0a75e);
    let unit = UNIT_ROUNDOFF_F64;
    let (mut both, mut coarse_only, mut fine_only) = (0, 0, 0);
    let total = 10_000;
    for trial in 0..total {
        let complex = trial % 2 == 1;
        let kappa = rng.gen_range(1..=12usize);
        let r = rng.gen_range(0..kappa);
        let scale = 10f64.powi(rng.gen_range(-3..=3));
        let draw = |rng: &mut ChaCha8Rng| -> Complex64 {
            let zero = rng.gen_bool(0.15);
            let re = if zero { 0.0 } else { rng.gen_range(-1.0..1.0) * scale };
            let im = if complex && !rng.gen_bool(0.15) {
                rng.gen_range(-1.0..1.0) * scale
            } else {
                0.0
            };
            Complex64::new(re, im)
        };
        let before = draw(&mut rng);
        let pairs: Vec<(Complex64, Complex64)> = (0..r).map(|_| (draw(&mut rng), draw(&mut rng))).collect();
        // Candidates near the rounding threshold so both outcomes occur.
        let tiny = 10f64.powf(rng.gen_range(-17.0..-11.0)) * scale.max(scale * scale);
        let value = Complex64::new(
            rng.gen_range(-1.0..1.0) * tiny,
            if complex { rng.gen_range(-1.0..1.0) * tiny } else { 0.0 },
        );

        let mut mu = Magnitudes::default();
        for x in std::iter::once(before)
            .chain(std::iter::once(value))
            .chain(pairs.iter().flat_map(|&(l, u)| [l, u]))
        {
            mu.observe(x);
        }
        let slack = 1.0 + rng.gen_range(0.0..0.5);
        mu.abs *= slack;
        mu.re *= slack;
        mu.im *= slack;

        let (fine_ok, coarse_ok) = if complex {
            contexts::<Complex64>(before, &pairs, value, &mu, kappa, unit)
        } else {
            contexts::<f64>(before, &pairs, value, &mu, kappa, unit)
        };
        match (coarse_ok, fine_ok) {
            (true, true) => both += 1,
            (true, false) => coarse_only += 1,
            (false, true) => fine_only += 1,
            _ => {}
        }
    }
    let msg = format!("{total} contexts: coarse&fine={both}, fine only={fine_only}, coarse without fine={coarse_only}");
    if coarse_only == 0 && both > 0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn contexts<T: Scalar>(
    before: Complex64,
    pairs: &[(Complex64, Complex64)],
    value: Complex64,
    mu: &Magnitudes,
    kappa: usize,
    unit: f64,
) -> (bool, bool) {
    let conv = |z: Complex64| T::from_parts(z.re, z.im);
    let mut fb = FineBound::seed(conv(before));
    for &(l, u) in pairs {
        fb.add(conv(l), conv(u));
    }
    let cand = Candidate {
        value: conv(value),
        scaled: value.norm(),
    };
    let fine = pivot_accept(&PivotPolicy::fine(), &cand, &AcceptContext::Fine(fb));
    let cb = CoarseBound::new::<T>(mu, kappa, unit);
    let coarse = pivot_accept(&PivotPolicy::coarse(), &cand, &AcceptContext::Coarse(cb));
    (fine, coarse)
}

fn timing() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mats: Vec<Matrix<f64>> = (0..6).map(|_| random_dense(&mut rng, 80, 80)).collect();
    let time = |p: &PivotPolicy| {
        let t = Instant::now();
        for a in &mats {
            std::hint::black_box(factor(a.clone(), p).unwrap());
        }
        t.elapsed().as_secs_f64()
    };
    let simple = time(&PivotPolicy::default());
    let fine = time(&PivotPolicy::fine());
    let coarse = time(&PivotPolicy::coarse());
    Ok(format!(
        "informational only: fine/simple={:.2}, coarse/simple={:.2} on 80x80 dense",
        fine / simple,
        coarse / simple
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("golden factorization", golden_factorization),
        ("golden pseudoinverse", golden_pinv),
        ("worked example residuals", golden_residuals),
        ("policy agreement", policy_agreement),
        ("random property suite", property_suite),
        ("projector properties", projector_properties),
        ("compact storage", allocation_audit),
        ("coarse implies fine", monotonicity),
        ("policy timing ratio", timing),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(msg) => println!("PASS {} {name}: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {} {name}: {msg}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
