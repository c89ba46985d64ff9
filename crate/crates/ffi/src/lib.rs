//! C ABI over `iwasawa-core`.
//!
//! Spectra live behind the opaque [`IwSpectrum`] handle. Every fallible call
//! returns an [`IwStatus`] and writes results through out-pointers; on failure
//! [`iw_last_error`] describes the cause. Strings returned by the library are
//! NUL-terminated and must be released with [`iw_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use iwasawa_core::asymptotics::{graded_average, AsymptoticsError};
use iwasawa_core::cli::{self, CliError, OutputFormat};
use iwasawa_core::padic::{one_plus_p_pow_minus_one_valuation, PadicValuation};
use iwasawa_core::spectra::{eigenspace_charpoly, euler_characteristic, total_lambda};
use iwasawa_core::{sphere_order, EigenspaceKey, FiniteSpectrumData, KDegree, OddPrime};

/// Stands for an infinite valuation, i.e. a `Z_p` summand.
pub const IW_INFINITE: u64 = u64::MAX;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IwStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidPrime = 2,
    InvalidInput = 3,
    ParseError = 4,
    InfiniteOrder = 5,
    TorsionPresent = 6,
    Internal = 7,
}

/// Opaque handle to a finite spectrum's homology data.
pub struct IwSpectrum {
    inner: FiniteSpectrumData,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl Into<String>) {
    let message = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(message).expect("no interior NUL"));
}

struct Failure(IwStatus, String);

impl Failure {
    fn new(status: IwStatus, message: impl ToString) -> Self {
        Failure(status, message.to_string())
    }
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> IwStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => IwStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            IwStatus::Internal
        }
    }
}

fn prime(p: u64) -> Result<OddPrime, Failure> {
    OddPrime::new(p).map_err(|e| Failure::new(IwStatus::InvalidPrime, e))
}

unsafe fn handle_ref<'a>(handle: *const IwSpectrum) -> Result<&'a FiniteSpectrumData, Failure> {
    handle.as_ref().map(|s| &s.inner).ok_or_else(|| Failure::new(IwStatus::NullPointer, "null spectrum handle"))
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::new(IwStatus::NullPointer, "null output pointer"));
    }
    out.write(value);
    Ok(())
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s).expect("no interior NUL").into_raw()
}

fn valuation_code(v: PadicValuation) -> u64 {
    v.finite().unwrap_or(IW_INFINITE)
}

fn asymptotics_failure(e: AsymptoticsError) -> Failure {
    let status = match e {
        AsymptoticsError::InfiniteOrderInWindow(_) => IwStatus::InfiniteOrder,
        AsymptoticsError::K1(_) => IwStatus::TorsionPresent,
        _ => IwStatus::InvalidInput,
    };
    Failure::new(status, e)
}

/// Message for the most recent failure on this thread. Owned by the library;
/// valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn iw_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds a torsion-free spectrum with rank `ranks[k]` in degree `degrees[k]`.
///
/// # Safety
/// `degrees` and `ranks` must point to `len` readable elements (or be null
/// when `len` is 0); `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iw_spectrum_new(
    p: u64,
    degrees: *const i64,
    ranks: *const u64,
    len: usize,
    out: *mut *mut IwSpectrum,
) -> IwStatus {
    guard(|| {
        let q = prime(p)?;
        let (degrees, ranks) = if len == 0 {
            (&[][..], &[][..])
        } else if degrees.is_null() || ranks.is_null() {
            return Err(Failure::new(IwStatus::NullPointer, "null degree or rank array"));
        } else {
            (std::slice::from_raw_parts(degrees, len), std::slice::from_raw_parts(ranks, len))
        };
        let inner = FiniteSpectrumData::new(q, degrees.iter().copied().zip(ranks.iter().copied()), [])
            .map_err(|e| Failure::new(IwStatus::InvalidInput, e))?;
        write(out, Box::into_raw(Box::new(IwSpectrum { inner })))
    })
}

/// Parses a spectrum description in the CLI's JSON format.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iw_spectrum_from_json(json: *const c_char, out: *mut *mut IwSpectrum) -> IwStatus {
    guard(|| {
        if json.is_null() {
            return Err(Failure::new(IwStatus::NullPointer, "null json"));
        }
        let text = CStr::from_ptr(json).to_str().map_err(|e| Failure::new(IwStatus::ParseError, e))?;
        let named = cli::parse_spectrum(text, "spectrum", None).map_err(|e| {
            let status = match e {
                CliError::InvalidPrime(_) => IwStatus::InvalidPrime,
                _ => IwStatus::ParseError,
            };
            Failure::new(status, e)
        })?;
        write(out, Box::into_raw(Box::new(IwSpectrum { inner: named.data })))
    })
}

/// Marks `degree` as carrying p-torsion.
///
/// # Safety
/// `spectrum` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn iw_spectrum_add_torsion(spectrum: *mut IwSpectrum, degree: i64) -> IwStatus {
    guard(|| {
        let s = spectrum.as_mut().ok_or_else(|| Failure::new(IwStatus::NullPointer, "null spectrum handle"))?;
        s.inner = s.inner.clone().with_torsion([degree]);
        Ok(())
    })
}

/// # Safety
/// `spectrum` must come from this library and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn iw_spectrum_free(spectrum: *mut IwSpectrum) {
    if !spectrum.is_null() {
        drop(Box::from_raw(spectrum));
    }
}

/// # Safety
/// `spectrum` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iw_euler_characteristic(spectrum: *const IwSpectrum, out: *mut i64) -> IwStatus {
    guard(|| write(out, euler_characteristic(handle_ref(spectrum)?)))
}

/// # Safety
/// `spectrum` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iw_total_lambda(spectrum: *const IwSpectrum, out: *mut i64) -> IwStatus {
    guard(|| write(out, total_lambda(handle_ref(spectrum)?)))
}

/// λ of `ε_j KU^k(X)`; `k_degree` is 0 or -1, `j` is reduced mod `p - 1`.
///
/// # Safety
/// `spectrum` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iw_eigenspace_lambda(
    spectrum: *const IwSpectrum,
    k_degree: i32,
    j: i64,
    out: *mut u64,
) -> IwStatus {
    guard(|| {
        let x = handle_ref(spectrum)?;
        let degree = match k_degree {
            0 => KDegree::Zero,
            -1 => KDegree::MinusOne,
            other => return Err(Failure::new(IwStatus::InvalidInput, format!("K-theory degree {other} is not 0 or -1"))),
        };
        write(out, eigenspace_charpoly(x, EigenspaceKey::new(x.prime(), degree, j)).degree())
    })
}

/// Exponent `k` with `|π_t L_{K(1)}S^0| = p^k`, or [`IW_INFINITE`].
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iw_sphere_order(p: u64, t: i64, out: *mut u64) -> IwStatus {
    guard(|| write(out, valuation_code(sphere_order(prime(p)?, t).exponent)))
}

/// `v_p((1+p)^n - 1)` for `n != 0`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iw_valuation_one_plus_p_pow(p: u64, n: i64, out: *mut u64) -> IwStatus {
    guard(|| {
        let v = one_plus_p_pow_minus_one_valuation(prime(p)?, n).map_err(|e| Failure::new(IwStatus::InvalidInput, e))?;
        write(out, valuation_code(v))
    })
}

/// Main conjecture records for `m_lo <= m <= m_hi` as CSV with columns
/// `m,side,lhs_val,rhs_val,in_window,match`. `all_match` is set when every
/// in-window record matches.
///
/// # Safety
/// `spectrum` must be a live handle; `csv` and `all_match` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iw_imc_report_csv(
    spectrum: *const IwSpectrum,
    m_lo: i64,
    m_hi: i64,
    csv: *mut *mut c_char,
    all_match: *mut bool,
) -> IwStatus {
    guard(|| {
        let x = handle_ref(spectrum)?;
        if m_lo > m_hi {
            return Err(Failure::new(IwStatus::InvalidInput, "empty m range"));
        }
        if csv.is_null() || all_match.is_null() {
            return Err(Failure::new(IwStatus::NullPointer, "null output pointer"));
        }
        let named = cli::NamedSpectrum { name: String::new(), data: x.clone() };
        let report = cli::imc_report(&named, m_lo..=m_hi);
        let text = cli::render_imc(&report, OutputFormat::Csv).map_err(|e| Failure::new(IwStatus::Internal, e))?;
        write(all_match, report.report.all_in_window_match())?;
        write(csv, c_string(text))
    })
}

/// `(1/n) Σ_{j=m+1}^{m+n} (-1)^j |π_j|` as an exact fraction, e.g. `"-3/2"`.
///
/// # Safety
/// `spectrum` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iw_graded_average(
    spectrum: *const IwSpectrum,
    m: i64,
    n: u64,
    out: *mut *mut c_char,
) -> IwStatus {
    guard(|| {
        let avg = graded_average(handle_ref(spectrum)?, m, n).map_err(asymptotics_failure)?;
        write(out, c_string(avg.value.to_string()))
    })
}

/// # Safety
/// `s` must come from this library and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn iw_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
