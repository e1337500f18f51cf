//! C ABI over `upg-core`. Every call returns an [`UpgStatus`]; on failure the
//! message is available from [`upg_last_error`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use upg::ct::{load_ct, CtData, CtError};
use upg::invariants::{parse_order, InvariantError, SpecialChain};
use upg::report::{chain_for, compare, invariants_report, Comparison, ReportOptions};
use upg::verify::{verify_conjugator, OuterAuto};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpgStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidCt = 4,
    InvalidOrder = 5,
    ComputationFailed = 6,
    Panic = 7,
}

/// Opaque handle to a validated CT.
pub struct UpgCt {
    ct: CtData,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(s));
}

type Res<T> = Result<T, (UpgStatus, String)>;

fn guard(f: impl FnOnce() -> Res<()>) -> UpgStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => UpgStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            UpgStatus::Panic
        }
    }
}

fn ct_err(e: CtError) -> (UpgStatus, String) {
    let status = match e {
        CtError::Parse { .. } | CtError::Graph(_) => UpgStatus::ParseError,
        _ => UpgStatus::InvalidCt,
    };
    (status, e.to_string())
}

fn inv_err(e: InvariantError) -> (UpgStatus, String) {
    let status = match e {
        InvariantError::InvalidTotalOrder(_) => UpgStatus::InvalidOrder,
        _ => UpgStatus::ComputationFailed,
    };
    (status, e.to_string())
}

/// # Safety
/// `p` is null or a valid NUL-terminated string.
unsafe fn text<'a>(p: *const c_char) -> Res<&'a str> {
    if p.is_null() {
        return Err((UpgStatus::NullArgument, "null string argument".into()));
    }
    CStr::from_ptr(p).to_str().map_err(|e| (UpgStatus::InvalidUtf8, e.to_string()))
}

/// # Safety
/// `p` is null or a valid NUL-terminated string.
unsafe fn opt_text<'a>(p: *const c_char) -> Res<Option<&'a str>> {
    if p.is_null() {
        Ok(None)
    } else {
        text(p).map(Some)
    }
}

/// # Safety
/// `h` is null or a live handle from [`upg_ct_load`].
unsafe fn handle<'a>(h: *const UpgCt) -> Res<&'a CtData> {
    h.as_ref().map(|h| &h.ct).ok_or((UpgStatus::NullArgument, "null handle".into()))
}

fn out_ptr<T>(p: *mut T) -> Res<()> {
    if p.is_null() {
        Err((UpgStatus::NullArgument, "null output pointer".into()))
    } else {
        Ok(())
    }
}

fn chain(ct: &CtData, order: Option<&str>) -> Res<SpecialChain> {
    let order = order.map(|o| parse_order(ct, o)).transpose().map_err(inv_err)?;
    chain_for(ct, order.as_deref()).map_err(inv_err)
}

fn into_c(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map_or(ptr::null_mut(), CString::into_raw)
}

/// Parses and validates CT text, storing a new handle in `out`.
///
/// # Safety
/// `text_ptr` is a NUL-terminated string and `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn upg_ct_load(text_ptr: *const c_char, out: *mut *mut UpgCt) -> UpgStatus {
    guard(|| {
        out_ptr(out)?;
        let ct = load_ct(text(text_ptr)?).map_err(ct_err)?;
        *out = Box::into_raw(Box::new(UpgCt { ct }));
        Ok(())
    })
}

/// # Safety
/// `h` is null or a handle from [`upg_ct_load`] that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn upg_ct_free(h: *mut UpgCt) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// # Safety
/// `h` is a live handle and `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn upg_ct_rank(h: *const UpgCt, out: *mut usize) -> UpgStatus {
    guard(|| {
        out_ptr(out)?;
        *out = handle(h)?.rank();
        Ok(())
    })
}

/// Length of `f^k_#(E)` for the edge named `edge`.
///
/// # Safety
/// `h` is a live handle, `edge` a NUL-terminated string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn upg_iterate_length(
    h: *const UpgCt,
    edge: *const c_char,
    k: usize,
    out: *mut usize,
) -> UpgStatus {
    guard(|| {
        out_ptr(out)?;
        let ct = handle(h)?;
        let name = text(edge)?;
        let e = ct.edge(name).ok_or((UpgStatus::ParseError, format!("unknown edge {name}")))?;
        *out = ct.iterate_length(e as i32 + 1, k);
        Ok(())
    })
}

/// Invariant report as text or JSON. `chain` may be null for the default order.
/// The string in `out` must be released with [`upg_string_free`].
///
/// # Safety
/// `h` is a live handle, `chain` null or NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn upg_report(
    h: *const UpgCt,
    chain: *const c_char,
    depth: usize,
    json: bool,
    out: *mut *mut c_char,
) -> UpgStatus {
    guard(|| {
        out_ptr(out)?;
        let ct = handle(h)?;
        let order = opt_text(chain)?.map(|o| parse_order(ct, o)).transpose().map_err(inv_err)?;
        let r = invariants_report(ct, &ReportOptions { order, depth, special: vec![] }).map_err(inv_err)?;
        *out = into_c(if json { r.to_json() } else { r.to_text() });
        Ok(())
    })
}

/// Writes "indistinguishable", "distinguished at <component>" or
/// "undetermined: <reason>" to `out`; free it with [`upg_string_free`].
///
/// # Safety
/// `a`, `b` are live handles, chains null or NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn upg_compare(
    a: *const UpgCt,
    b: *const UpgCt,
    chain_a: *const c_char,
    chain_b: *const c_char,
    out: *mut *mut c_char,
) -> UpgStatus {
    guard(|| {
        out_ptr(out)?;
        let (x, y) = (handle(a)?, handle(b)?);
        let res = compare(x, &chain(x, opt_text(chain_a)?)?, y, &chain(y, opt_text(chain_b)?)?);
        *out = into_c(match res.result {
            Comparison::Indistinguishable => "indistinguishable".to_string(),
            Comparison::Distinguished(c) => format!("distinguished at {c}"),
            Comparison::Undetermined(e) => format!("undetermined: {e}"),
        });
        Ok(())
    })
}

/// Sets `out` to whether `theta` conjugates the automorphism of `phi` to that of `psi`.
///
/// # Safety
/// `phi`, `psi` are live handles, `theta` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn upg_verify_conjugator(
    phi: *const UpgCt,
    psi: *const UpgCt,
    theta: *const c_char,
    out: *mut bool,
) -> UpgStatus {
    guard(|| {
        out_ptr(out)?;
        let (x, y) = (handle(phi)?, handle(psi)?);
        let parse = |e: upg::verify::VerifyError| (UpgStatus::ParseError, e.to_string());
        let t = OuterAuto::parse(text(theta)?, x.rank()).map_err(parse)?;
        let f = OuterAuto::new(x.automorphism()).map_err(parse)?;
        let g = OuterAuto::new(y.automorphism()).map_err(parse)?;
        *out = verify_conjugator(&f, &g, &t).map_err(|e| (UpgStatus::ComputationFailed, e.to_string()))?;
        Ok(())
    })
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn upg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` is null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn upg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
