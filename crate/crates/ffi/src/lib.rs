//! C interface to `compact-pinv`.
//!
//! Matrices and factorizations cross the boundary as opaque handles created
//! and destroyed by this library. Every fallible call returns a [`CpStatus`];
//! the codes agree with the command-line exit statuses. A description of the
//! most recent failure on the calling thread is available from
//! [`cp_last_error`].
//!
//! Data is row-major. Complex data is interleaved `re, im` pairs.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use compact_pinv::matio::AnyMatrix;
use compact_pinv::{
    factor, pinv_apply, prepare_col_projector, prepare_row_projector, Complex64, Error, FactorState, Factorization,
    Matrix, PivotPolicy, PreparedProjector, Scalar,
};

/// Result of a call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CpStatus {
    Ok = 0,
    /// Malformed input: bad dimensions, shape mismatch, mixed fields,
    /// non-finite entries or a buffer of the wrong length.
    InvalidInput = 2,
    /// The Gram matrix lost positive definiteness.
    NumericBreakdown = 3,
    /// The factorization is not in the state the call requires.
    WrongState = 4,
    /// A required pointer argument was NULL.
    NullPointer = 5,
    /// Internal panic caught at the boundary.
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CpPivot {
    Simple = 0,
    Fine = 1,
    Coarse = 2,
}

/// What the storage of a [`CpFactor`] currently holds.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CpState {
    Raw = 0,
    Consumed = 1,
    ColProjector = 2,
    RowProjector = 3,
    /// A preparation failed part way; the handle can only be freed.
    Invalid = 4,
}

/// Opaque dense matrix, real or complex.
pub struct CpMatrix {
    inner: AnyMatrix,
}

/// Opaque factorization, possibly prepared as a projector.
pub struct CpFactor {
    inner: Fac,
}

enum Stage<T> {
    Factored(Factorization<T>),
    Prepared(PreparedProjector<T>),
    Lost,
}

enum Fac {
    Real(Stage<f64>),
    Complex(Stage<Complex64>),
}

enum Fail {
    Lib(Error),
    Null(&'static str),
    Input(String),
    Lost,
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(fail: Fail) -> CpStatus {
    let (status, msg) = match fail {
        Fail::Lib(e) => {
            let s = match e.exit_code() {
                3 => CpStatus::NumericBreakdown,
                4 => CpStatus::WrongState,
                _ => CpStatus::InvalidInput,
            };
            (s, e.to_string())
        }
        Fail::Null(what) => (CpStatus::NullPointer, format!("{what} is NULL")),
        Fail::Input(msg) => (CpStatus::InvalidInput, msg),
        Fail::Lost => (
            CpStatus::WrongState,
            "factorization was invalidated by a failed preparation".into(),
        ),
    };
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> CpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CpStatus::Ok,
        Ok(Err(fail)) => status_of(fail),
        Err(_) => {
            set_error("internal panic".into());
            CpStatus::Panic
        }
    }
}

unsafe fn as_ref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(what))
}

unsafe fn as_mut<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null(what))
}

fn field_mismatch() -> Fail {
    Fail::Input("operands must all be real or all complex".into())
}

/// Message for the last failed call on this thread, or NULL. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

fn new_matrix(rows: usize, cols: usize, build: impl FnOnce(usize) -> AnyMatrix) -> *mut CpMatrix {
    let mut out = ptr::null_mut();
    let status = guard(|| {
        if rows == 0 || cols == 0 {
            return Err(Error::Empty.into());
        }
        let len = rows
            .checked_mul(cols)
            .ok_or_else(|| Fail::Input(format!("{rows}x{cols} is too large")))?;
        out = Box::into_raw(Box::new(CpMatrix { inner: build(len) }));
        Ok(())
    });
    if status != CpStatus::Ok {
        return ptr::null_mut();
    }
    out
}

/// Creates a real `rows x cols` matrix from `rows * cols` row-major values,
/// or zeros when `data` is NULL. Returns NULL on failure.
///
/// # Safety
/// `data` must be NULL or point to `rows * cols` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn cp_matrix_new_real(rows: usize, cols: usize, data: *const f64) -> *mut CpMatrix {
    new_matrix(rows, cols, |len| {
        let m = if data.is_null() {
            Matrix::zeros(rows, cols)
        } else {
            let v = std::slice::from_raw_parts(data, len).to_vec();
            Matrix::new(rows, cols, v).expect("length checked")
        };
        AnyMatrix::Real(m)
    })
}

/// Creates a complex `rows x cols` matrix from `2 * rows * cols` interleaved
/// values, or zeros when `data` is NULL. Returns NULL on failure.
///
/// # Safety
/// `data` must be NULL or point to `2 * rows * cols` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn cp_matrix_new_complex(rows: usize, cols: usize, data: *const f64) -> *mut CpMatrix {
    new_matrix(rows, cols, |len| {
        let m = if data.is_null() {
            Matrix::zeros(rows, cols)
        } else {
            let raw = std::slice::from_raw_parts(data, 2 * len);
            let v = raw.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect();
            Matrix::new(rows, cols, v).expect("length checked")
        };
        AnyMatrix::Complex(m)
    })
}

/// # Safety
/// `m` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cp_matrix_free(m: *mut CpMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// # Safety
/// `m` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cp_matrix_rows(m: *const CpMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.inner.shape().0)
}

/// # Safety
/// `m` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cp_matrix_cols(m: *const CpMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.inner.shape().1)
}

/// # Safety
/// `m` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cp_matrix_is_complex(m: *const CpMatrix) -> bool {
    m.as_ref().is_some_and(|m| m.inner.is_complex())
}

/// Copies the entries into `out`, which must hold exactly `rows * cols`
/// doubles (twice that for complex).
///
/// # Safety
/// `m` must be a live handle and `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn cp_matrix_copy_out(m: *const CpMatrix, out: *mut f64, len: usize) -> CpStatus {
    guard(|| {
        let m = as_ref(m, "matrix")?;
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        let (r, c) = m.inner.shape();
        let need = r * c * if m.inner.is_complex() { 2 } else { 1 };
        if len != need {
            return Err(Fail::Input(format!("buffer holds {len} doubles, need {need}")));
        }
        let dst = std::slice::from_raw_parts_mut(out, len);
        match &m.inner {
            AnyMatrix::Real(a) => dst.copy_from_slice(a.as_slice()),
            AnyMatrix::Complex(a) => {
                for (d, z) in dst.chunks_exact_mut(2).zip(a.as_slice()) {
                    d[0] = z.re;
                    d[1] = z.im;
                }
            }
        }
        Ok(())
    })
}

fn policy(pivot: CpPivot, eps: f64) -> PivotPolicy {
    match pivot {
        CpPivot::Simple => PivotPolicy::simple(eps),
        CpPivot::Fine => PivotPolicy::fine(),
        CpPivot::Coarse => PivotPolicy::coarse(),
    }
}

/// Factors a copy of `a`. On success `*out` receives a new handle; rank zero
/// is not a failure. `eps` is used only by the simple policy.
///
/// # Safety
/// `a` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn cp_factorize(
    a: *const CpMatrix,
    pivot: CpPivot,
    eps: f64,
    out: *mut *mut CpFactor,
) -> CpStatus {
    guard(|| {
        let a = as_ref(a, "a")?;
        let out = as_mut(out, "out")?;
        *out = ptr::null_mut();
        let p = policy(pivot, eps);
        let inner = match &a.inner {
            AnyMatrix::Real(m) => Fac::Real(Stage::Factored(factor(m.clone(), &p)?)),
            AnyMatrix::Complex(m) => Fac::Complex(Stage::Factored(factor(m.clone(), &p)?)),
        };
        *out = Box::into_raw(Box::new(CpFactor { inner }));
        Ok(())
    })
}

/// # Safety
/// `f` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cp_factor_free(f: *mut CpFactor) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

fn factorization<T: Scalar>(s: &Stage<T>) -> Option<&Factorization<T>> {
    match s {
        Stage::Factored(f) => Some(f),
        Stage::Prepared(p) => Some(p.factorization()),
        Stage::Lost => None,
    }
}

/// Borrowed view of the factorization fields shared by both fields.
struct View<'a> {
    rank: usize,
    rows: usize,
    cols: usize,
    rho: &'a [usize],
    gamma: &'a [usize],
    state: FactorState,
}

fn view(f: &CpFactor) -> Option<View<'_>> {
    fn v<T: Scalar>(f: &Factorization<T>) -> View<'_> {
        View {
            rank: f.rank(),
            rows: f.rows(),
            cols: f.cols(),
            rho: f.permutation(),
            gamma: f.pivot_columns(),
            state: f.state(),
        }
    }
    match &f.inner {
        Fac::Real(s) => factorization(s).map(v),
        Fac::Complex(s) => factorization(s).map(v),
    }
}

/// # Safety
/// `f` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cp_factor_rank(f: *const CpFactor) -> usize {
    f.as_ref().and_then(view).map_or(0, |v| v.rank)
}

/// # Safety
/// `f` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cp_factor_rows(f: *const CpFactor) -> usize {
    f.as_ref().and_then(view).map_or(0, |v| v.rows)
}

/// # Safety
/// `f` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cp_factor_cols(f: *const CpFactor) -> usize {
    f.as_ref().and_then(view).map_or(0, |v| v.cols)
}

/// # Safety
/// `f` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cp_factor_state(f: *const CpFactor) -> CpState {
    match f.as_ref().and_then(view).map(|v| v.state) {
        Some(FactorState::Raw) => CpState::Raw,
        Some(FactorState::Consumed) => CpState::Consumed,
        Some(FactorState::ColProjector) => CpState::ColProjector,
        Some(FactorState::RowProjector) => CpState::RowProjector,
        None => CpState::Invalid,
    }
}

unsafe fn copy_indices(src: &[usize], out: *mut usize, len: usize) -> Result<(), Fail> {
    if len != src.len() {
        return Err(Fail::Input(format!("buffer holds {len} indices, need {}", src.len())));
    }
    if len > 0 {
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        std::slice::from_raw_parts_mut(out, len).copy_from_slice(src);
    }
    Ok(())
}

/// Copies the row permutation (`rows` entries): row `i` of `PA` is row
/// `out[i]` of `A`.
///
/// # Safety
/// `f` must be a live handle and `out` must point to `len` writable values.
#[no_mangle]
pub unsafe extern "C" fn cp_factor_permutation(f: *const CpFactor, out: *mut usize, len: usize) -> CpStatus {
    guard(|| {
        let v = view(as_ref(f, "factor")?).ok_or(Fail::Lost)?;
        copy_indices(v.rho, out, len)
    })
}

/// Copies the `rank` pivot columns.
///
/// # Safety
/// `f` must be a live handle and `out` must point to `len` writable values.
#[no_mangle]
pub unsafe extern "C" fn cp_factor_pivot_columns(f: *const CpFactor, out: *mut usize, len: usize) -> CpStatus {
    guard(|| {
        let v = view(as_ref(f, "factor")?).ok_or(Fail::Lost)?;
        copy_indices(v.gamma, out, len)
    })
}

/// Computes `g = A+ b`. `b` (rows x p) is overwritten with intermediates and
/// `g` must be cols x p. The factorization is consumed: later calls on it
/// report `CP_STATUS_WRONG_STATE`.
///
/// # Safety
/// All three arguments must be live, distinct handles.
#[no_mangle]
pub unsafe extern "C" fn cp_pinv_apply(f: *mut CpFactor, b: *mut CpMatrix, g: *mut CpMatrix) -> CpStatus {
    guard(|| {
        let f = as_mut(f, "factor")?;
        let b = as_mut(b, "b")?;
        let g = as_mut(g, "g")?;
        match (&mut f.inner, &mut b.inner, &mut g.inner) {
            (Fac::Real(s), AnyMatrix::Real(b), AnyMatrix::Real(g)) => pinv_stage(s, b, g),
            (Fac::Complex(s), AnyMatrix::Complex(b), AnyMatrix::Complex(g)) => pinv_stage(s, b, g),
            _ => Err(field_mismatch()),
        }
    })
}

fn pinv_stage<T: Scalar>(s: &mut Stage<T>, b: &mut Matrix<T>, g: &mut Matrix<T>) -> Result<(), Fail> {
    match s {
        Stage::Factored(f) => Ok(pinv_apply(f, b, g)?),
        Stage::Prepared(p) => Err(Error::WrongState {
            expected: FactorState::Raw,
            found: p.factorization().state(),
        }
        .into()),
        Stage::Lost => Err(Fail::Lost),
    }
}

fn prepare_stage<T: Scalar>(s: &mut Stage<T>, row: bool) -> Result<(), Fail> {
    let f = match std::mem::replace(s, Stage::Lost) {
        Stage::Factored(f) if f.state() == FactorState::Raw => f,
        Stage::Factored(f) => {
            let found = f.state();
            *s = Stage::Factored(f);
            return Err(Error::WrongState {
                expected: FactorState::Raw,
                found,
            }
            .into());
        }
        Stage::Prepared(p) => {
            let found = p.factorization().state();
            *s = Stage::Prepared(p);
            return Err(Error::WrongState {
                expected: FactorState::Raw,
                found,
            }
            .into());
        }
        Stage::Lost => return Err(Fail::Lost),
    };
    let prepared = if row {
        prepare_row_projector(f)?
    } else {
        prepare_col_projector(f)?
    };
    *s = Stage::Prepared(prepared);
    Ok(())
}

unsafe fn prepare(f: *mut CpFactor, row: bool) -> CpStatus {
    guard(|| match &mut as_mut(f, "factor")?.inner {
        Fac::Real(s) => prepare_stage(s, row),
        Fac::Complex(s) => prepare_stage(s, row),
    })
}

/// Turns a raw factorization into a reusable `A+A` projector.
///
/// # Safety
/// `f` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cp_prepare_col_projector(f: *mut CpFactor) -> CpStatus {
    prepare(f, false)
}

/// Turns a raw factorization into a reusable `AA+` projector.
///
/// # Safety
/// `f` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cp_prepare_row_projector(f: *mut CpFactor) -> CpStatus {
    prepare(f, true)
}

fn apply_stage<T: Scalar>(s: &Stage<T>, b: &mut Matrix<T>, g: Option<&mut Matrix<T>>) -> Result<(), Fail> {
    match s {
        Stage::Prepared(p) => match g {
            Some(g) => Ok(p.apply(b, g)?),
            None => Ok(p.apply_in_place(b)?),
        },
        Stage::Factored(f) => Err(Error::WrongState {
            expected: FactorState::ColProjector,
            found: f.state(),
        }
        .into()),
        Stage::Lost => Err(Fail::Lost),
    }
}

/// Applies a prepared projector to `b` (dim x p). With `g` NULL the result
/// overwrites `b`; otherwise it goes to `g` (dim x p) and `b` holds
/// intermediates.
///
/// # Safety
/// `f` and `b` must be live handles; `g` must be NULL or a live handle
/// distinct from `b`.
#[no_mangle]
pub unsafe extern "C" fn cp_projector_apply(f: *const CpFactor, b: *mut CpMatrix, g: *mut CpMatrix) -> CpStatus {
    guard(|| {
        let f = as_ref(f, "factor")?;
        let b = as_mut(b, "b")?;
        let g = g.as_mut().map(|g| &mut g.inner);
        match (&f.inner, &mut b.inner, g) {
            (Fac::Real(s), AnyMatrix::Real(b), None) => apply_stage(s, b, None),
            (Fac::Real(s), AnyMatrix::Real(b), Some(AnyMatrix::Real(g))) => apply_stage(s, b, Some(g)),
            (Fac::Complex(s), AnyMatrix::Complex(b), None) => apply_stage(s, b, None),
            (Fac::Complex(s), AnyMatrix::Complex(b), Some(AnyMatrix::Complex(g))) => apply_stage(s, b, Some(g)),
            _ => Err(field_mismatch()),
        }
    })
}
