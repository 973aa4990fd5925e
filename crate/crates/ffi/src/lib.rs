//! C ABI over `ergodic_dirac`.
//!
//! Objects cross the boundary as opaque handles created by `ed_*_new` style
//! constructors and released with the matching `ed_*_free`. Every fallible
//! call returns an [`EdStatus`]; on failure a message is kept per thread and
//! can be read with [`ed_last_error_message`]. Strings returned by the library
//! must be released with [`ed_string_free`].

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use libc::{c_char, c_int};

use ergodic_dirac::clifford::{build_clifford, CliffordRep, Sign};
use ergodic_dirac::dirac::{assemble_dirac, BlockDiracOperator, SpectralData};
use ergodic_dirac::linalg::C64;
use ergodic_dirac::nctorus::{adjoint, cyclic_cocycle_2d, multiply, FourierElement, ThetaMatrix, TruncatedGNS};
use ergodic_dirac::summability::{sigma_sequence, Verdict};
use ergodic_dirac::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    RadiusExceedsTruncation = 4,
    EmptyInterior = 5,
    SignMismatch = 6,
    RelationFailed = 7,
    MultiplicityBound = 8,
    NoConvergence = 9,
    Parse = 10,
    InvalidUtf8 = 11,
    OutOfRange = 12,
    Panic = 13,
}

impl From<&Error> for EdStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidArgument(_) => EdStatus::InvalidArgument,
            Error::DimensionMismatch { .. } => EdStatus::DimensionMismatch,
            Error::RadiusExceedsTruncation { .. } => EdStatus::RadiusExceedsTruncation,
            Error::EmptyInterior { .. } => EdStatus::EmptyInterior,
            Error::SignMismatch { .. } => EdStatus::SignMismatch,
            Error::RelationFailed { .. } => EdStatus::RelationFailed,
            Error::MultiplicityBound { .. } => EdStatus::MultiplicityBound,
            Error::NoConvergence(_) => EdStatus::NoConvergence,
            Error::Parse(_) => EdStatus::Parse,
        }
    }
}

/// Summability verdict codes.
pub const ED_VERDICT_PLATEAU: c_int = 0;
pub const ED_VERDICT_GROWING: c_int = 1;
pub const ED_VERDICT_INCONCLUSIVE: c_int = 2;

pub struct EdClifford(CliffordRep);
pub struct EdTheta(ThetaMatrix);
pub struct EdElement(FourierElement);
pub struct EdDirac(BlockDiracOperator);
pub struct EdSpectrum(SpectralData);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

struct Failure(EdStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(EdStatus::from(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(EdStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> EdStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => EdStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("panic inside ergodic-dirac".into());
            EdStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn store<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(EdStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    let c = CString::new(s).map_err(|e| Failure(EdStatus::InvalidArgument, e.to_string()))?;
    *out = c.into_raw();
    Ok(())
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = value;
    Ok(())
}

fn sign_from_int(v: c_int) -> Result<Sign, Failure> {
    match v {
        1 => Ok(Sign::Plus),
        -1 => Ok(Sign::Minus),
        other => Err(Failure(
            EdStatus::InvalidArgument,
            format!("sign must be +1 or -1, got {other}"),
        )),
    }
}

fn sign_to_int(s: Sign) -> c_int {
    match s {
        Sign::Plus => 1,
        Sign::Minus => -1,
    }
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn ed_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ed_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

// Clifford modules

/// Builds `Cl(n)` with the given branch (`+1` or `-1`).
///
/// # Safety
/// `out` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn ed_clifford_new(n: usize, branch: c_int, out: *mut *mut EdClifford) -> EdStatus {
    guard(|| {
        let rep = build_clifford(n, sign_from_int(branch)?)?;
        store(out, EdClifford(rep))
    })
}

/// # Safety
/// `h` must be NULL or a handle from [`ed_clifford_new`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ed_clifford_free(h: *mut EdClifford) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Spinor dimension `2^m`, or 0 for a NULL handle.
///
/// # Safety
/// `h` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ed_clifford_dim(h: *const EdClifford) -> usize {
    h.as_ref().map_or(0, |c| c.0.dim())
}

/// Writes `ε_J`, `ε_D` as `±1`; `ε_γ` is `±1` for even n and 0 for odd n.
///
/// # Safety
/// `h` must be a live handle; the output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn ed_clifford_signs(
    h: *const EdClifford,
    eps_j: *mut c_int,
    eps_d: *mut c_int,
    eps_gamma: *mut c_int,
) -> EdStatus {
    guard(|| {
        let signs = borrow(h, "clifford handle")?.0.signs();
        write(eps_j, sign_to_int(signs.eps_j))?;
        write(eps_d, sign_to_int(signs.eps_d))?;
        write(eps_gamma, signs.eps_gamma.map_or(0, sign_to_int))
    })
}

/// # Safety
/// `h` must be a live handle; `out` receives a string for [`ed_string_free`].
#[no_mangle]
pub unsafe extern "C" fn ed_clifford_to_json(h: *const EdClifford, out: *mut *mut c_char) -> EdStatus {
    guard(|| {
        let json = borrow(h, "clifford handle")?.0.to_json()?;
        write_string(out, json)
    })
}

// Deformation matrices

/// `n × n` antisymmetric matrix from `n²` row-major entries.
///
/// # Safety
/// `entries` must point to `n * n` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ed_theta_new(n: usize, entries: *const f64, out: *mut *mut EdTheta) -> EdStatus {
    guard(|| {
        let len = n
            .checked_mul(n)
            .ok_or_else(|| Failure(EdStatus::OutOfRange, "n too large".into()))?;
        let data = slice(entries, len, "theta entries")?.to_vec();
        store(out, EdTheta(ThetaMatrix::from_row_major(n, data)?))
    })
}

/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ed_theta_from_json(json: *const c_char, out: *mut *mut EdTheta) -> EdStatus {
    guard(|| {
        let theta = ThetaMatrix::from_json(text(json, "theta json")?)?;
        store(out, EdTheta(theta))
    })
}

/// # Safety
/// `h` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ed_theta_free(h: *mut EdTheta) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Hex fingerprint of the entries.
///
/// # Safety
/// `h` must be a live handle; `out` receives a string for [`ed_string_free`].
#[no_mangle]
pub unsafe extern "C" fn ed_theta_fingerprint(h: *const EdTheta, out: *mut *mut c_char) -> EdStatus {
    guard(|| write_string(out, borrow(h, "theta handle")?.0.fingerprint()))
}

// Algebra elements

/// The zero element of the rank-`n` torus.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ed_element_new(n: usize, out: *mut *mut EdElement) -> EdStatus {
    guard(|| {
        if n == 0 {
            return Err(Failure(EdStatus::InvalidArgument, "rank must be positive".into()));
        }
        store(out, EdElement(FourierElement::zero(n)))
    })
}

/// # Safety
/// `h` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ed_element_free(h: *mut EdElement) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Adds `(re + i·im)·U^p`.
///
/// # Safety
/// `h` must be a live handle; `p` must point to `len` readable integers.
#[no_mangle]
pub unsafe extern "C" fn ed_element_add_term(
    h: *mut EdElement,
    p: *const i64,
    len: usize,
    re: f64,
    im: f64,
) -> EdStatus {
    guard(|| {
        let el = h.as_mut().ok_or_else(|| null("element handle"))?;
        let p = slice(p, len, "exponent")?.to_vec();
        if p.len() != el.0.n() {
            return Err(Error::DimensionMismatch {
                expected: el.0.n(),
                actual: p.len(),
            }
            .into());
        }
        el.0 = el.0.add(&FourierElement::monomial(p, C64::new(re, im)));
        Ok(())
    })
}

/// Coefficient of `U^p`.
///
/// # Safety
/// `h` must be a live handle; `p` must point to `len` integers; `re`, `im` writable.
#[no_mangle]
pub unsafe extern "C" fn ed_element_coeff(
    h: *const EdElement,
    p: *const i64,
    len: usize,
    re: *mut f64,
    im: *mut f64,
) -> EdStatus {
    guard(|| {
        let el = borrow(h, "element handle")?;
        let p = slice(p, len, "exponent")?;
        if p.len() != el.0.n() {
            return Err(Error::DimensionMismatch {
                expected: el.0.n(),
                actual: p.len(),
            }
            .into());
        }
        let c = el.0.coeff(p);
        write(re, c.re)?;
        write(im, c.im)
    })
}

/// `a·b` in the algebra deformed by `theta`.
///
/// # Safety
/// All handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ed_element_multiply(
    a: *const EdElement,
    b: *const EdElement,
    theta: *const EdTheta,
    out: *mut *mut EdElement,
) -> EdStatus {
    guard(|| {
        let prod = multiply(&borrow(a, "a")?.0, &borrow(b, "b")?.0, &borrow(theta, "theta")?.0)?;
        store(out, EdElement(prod))
    })
}

/// # Safety
/// All handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ed_element_adjoint(
    a: *const EdElement,
    theta: *const EdTheta,
    out: *mut *mut EdElement,
) -> EdStatus {
    guard(|| {
        let adj = adjoint(&borrow(a, "a")?.0, &borrow(theta, "theta")?.0)?;
        store(out, EdElement(adj))
    })
}

/// # Safety
/// `h` must be a live handle; `out` receives a string for [`ed_string_free`].
#[no_mangle]
pub unsafe extern "C" fn ed_element_to_json(h: *const EdElement, out: *mut *mut c_char) -> EdStatus {
    guard(|| write_string(out, borrow(h, "element handle")?.0.to_json()?))
}

/// The cyclic 2-cocycle on the two-dimensional torus.
///
/// # Safety
/// All handles must be live; `re`, `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ed_cyclic_cocycle_2d(
    a0: *const EdElement,
    a1: *const EdElement,
    a2: *const EdElement,
    theta: *const EdTheta,
    re: *mut f64,
    im: *mut f64,
) -> EdStatus {
    guard(|| {
        let v = cyclic_cocycle_2d(
            &borrow(a0, "a0")?.0,
            &borrow(a1, "a1")?.0,
            &borrow(a2, "a2")?.0,
            &borrow(theta, "theta")?.0,
        )?;
        write(re, v.re)?;
        write(im, v.im)
    })
}

// Dirac operators and spectra

/// `D = Σ_{j ∈ active} ∂_j ⊗ F_j` on the box `|p_j| ≤ radius`; `active`
/// holds 0-based directions in increasing order.
///
/// # Safety
/// `cliff` must be live; `active` must point to `active_len` readable entries.
#[no_mangle]
pub unsafe extern "C" fn ed_dirac_new(
    cliff: *const EdClifford,
    n_alg: usize,
    radius: i64,
    active: *const usize,
    active_len: usize,
    out: *mut *mut EdDirac,
) -> EdStatus {
    guard(|| {
        let gns = TruncatedGNS::new(n_alg, radius)?;
        let active = slice(active, active_len, "active directions")?;
        let d = assemble_dirac(&borrow(cliff, "clifford handle")?.0, &gns, active)?;
        store(out, EdDirac(d))
    })
}

/// # Safety
/// `h` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ed_dirac_free(h: *mut EdDirac) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Dimension of `ℋ₀ ⊗ S`, or 0 for a NULL handle.
///
/// # Safety
/// `h` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ed_dirac_dim(h: *const EdDirac) -> usize {
    h.as_ref().map_or(0, |d| d.0.dim())
}

/// # Safety
/// `h` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ed_dirac_spectrum(h: *const EdDirac, out: *mut *mut EdSpectrum) -> EdStatus {
    guard(|| {
        let spec = borrow(h, "dirac handle")?.0.spectrum()?;
        store(out, EdSpectrum(spec))
    })
}

/// # Safety
/// `h` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ed_spectrum_free(h: *mut EdSpectrum) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Number of distinct eigenvalues, or 0 for a NULL handle.
///
/// # Safety
/// `h` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ed_spectrum_len(h: *const EdSpectrum) -> usize {
    h.as_ref().map_or(0, |s| s.0.eigenvalues().len())
}

/// The `index`-th distinct eigenvalue (ascending) and its multiplicity.
///
/// # Safety
/// `h` must be live; `value` and `multiplicity` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ed_spectrum_get(
    h: *const EdSpectrum,
    index: usize,
    value: *mut f64,
    multiplicity: *mut usize,
) -> EdStatus {
    guard(|| {
        let s = borrow(h, "spectrum handle")?;
        let &(v, m) = s.0.eigenvalues().get(index).ok_or_else(|| {
            Failure(
                EdStatus::OutOfRange,
                format!("index {index} beyond {} eigenvalues", s.0.eigenvalues().len()),
            )
        })?;
        write(value, v)?;
        write(multiplicity, m)
    })
}

/// Total multiplicity of `|λ| < 1e-9`, or 0 for a NULL handle.
///
/// # Safety
/// `h` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ed_spectrum_kernel_multiplicity(h: *const EdSpectrum) -> usize {
    h.as_ref().map_or(0, |s| s.0.kernel_multiplicity())
}

/// CSV with columns `value,multiplicity`.
///
/// # Safety
/// `h` must be live; `out` receives a string for [`ed_string_free`].
#[no_mangle]
pub unsafe extern "C" fn ed_spectrum_to_csv(h: *const EdSpectrum, out: *mut *mut c_char) -> EdStatus {
    guard(|| write_string(out, borrow(h, "spectrum handle")?.0.to_csv()))
}

/// Dixmier partial-sum estimate: writes the tail spread of `r_k` and one of
/// the `ED_VERDICT_*` codes.
///
/// # Safety
/// `h` must be live; `tail_spread` and `verdict` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ed_spectrum_summability(
    h: *const EdSpectrum,
    exponent: u32,
    tail_spread: *mut f64,
    verdict: *mut c_int,
) -> EdStatus {
    guard(|| {
        let report = sigma_sequence(&borrow(h, "spectrum handle")?.0, exponent)?;
        write(tail_spread, report.tail_spread)?;
        write(
            verdict,
            match report.verdict {
                Verdict::Plateau => ED_VERDICT_PLATEAU,
                Verdict::Growing => ED_VERDICT_GROWING,
                Verdict::Inconclusive => ED_VERDICT_INCONCLUSIVE,
            },
        )
    })
}
