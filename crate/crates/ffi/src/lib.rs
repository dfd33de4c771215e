//! C ABI over `cmverify`.
//!
//! Every entry point returns a [`CmvStatus`]; results go through out-pointers.
//! On any status other than `CMV_STATUS_OK` or `CMV_STATUS_VIOLATION` a message is stored in
//! a thread-local slot readable with [`cmv_last_error_message`]. Strings handed
//! out by the library must be released with [`cmv_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use cmverify::cmdeg::{estimate_cm_degree, DegreeSearch};
use cmverify::{cli, inequalities, laurent, specfun, Error, WorkingPrecision};
use rug::Float;

/// Status codes; the first four match the command-line exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmvStatus {
    Ok = 0,
    /// The check ran and found a mathematical violation.
    Violation = 1,
    /// Bad argument or out-of-domain input.
    Usage = 2,
    /// A tolerance, series or bracket could not be met.
    Numeric = 3,
    NullPointer = 4,
    InvalidUtf8 = 5,
    Panic = 6,
}

/// Opaque evaluation context holding the working precision.
pub struct CmvContext {
    prec: WorkingPrecision,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    let c = CString::new(text).expect("interior NULs removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

fn status_of(e: &Error) -> CmvStatus {
    match e {
        Error::Domain { .. } | Error::Argument { .. } | Error::Unsupported { .. } => CmvStatus::Usage,
        Error::NumericFailure { .. } | Error::Bracket(_) => CmvStatus::Numeric,
    }
}

/// Runs `f`, turning panics and errors into a status plus last-error message.
fn guard<F>(f: F) -> CmvStatus
where
    F: FnOnce() -> Result<CmvStatus, (CmvStatus, String)>,
{
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => status,
        Ok(Err((status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            CmvStatus::Panic
        }
    }
}

fn core_err(e: Error) -> (CmvStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(name: &str) -> (CmvStatus, String) {
    (CmvStatus::NullPointer, format!("{name} is null"))
}

/// # Safety
/// `ctx` must be null or a live pointer from [`cmv_context_new`].
unsafe fn context<'a>(ctx: *const CmvContext) -> Result<&'a CmvContext, (CmvStatus, String)> {
    // SAFETY: guaranteed by the caller.
    unsafe { ctx.as_ref() }.ok_or_else(|| null("ctx"))
}

/// # Safety
/// `s` must be null or a NUL-terminated string.
unsafe fn text<'a>(s: *const c_char, name: &str) -> Result<&'a str, (CmvStatus, String)> {
    if s.is_null() {
        return Err(null(name));
    }
    // SAFETY: non-null and NUL-terminated per the caller.
    unsafe { CStr::from_ptr(s) }
        .to_str()
        .map_err(|_| (CmvStatus::InvalidUtf8, format!("{name} is not valid UTF-8")))
}

fn positive(prec: WorkingPrecision, x: f64, name: &str) -> Result<Float, (CmvStatus, String)> {
    if !(x.is_finite() && x > 0.0) {
        return Err((CmvStatus::Usage, format!("{name} must be > 0")));
    }
    Ok(prec.float(x))
}

/// # Safety
/// `out` must be null or valid for one write.
unsafe fn write_f64(out: *mut f64, v: &Float) -> Result<CmvStatus, (CmvStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    // SAFETY: non-null and writable per the caller.
    unsafe { *out = v.to_f64() };
    Ok(CmvStatus::Ok)
}

/// # Safety
/// `out` must be null or valid for one pointer write.
unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<CmvStatus, (CmvStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    let c = CString::new(s).map_err(|_| (CmvStatus::Panic, "string contains NUL".to_string()))?;
    // SAFETY: non-null and writable per the caller.
    unsafe { *out = c.into_raw() };
    Ok(CmvStatus::Ok)
}

/// Creates a context working at `digits` significant digits (30..=200).
/// Returns null on invalid `digits`; see [`cmv_last_error_message`].
#[no_mangle]
pub extern "C" fn cmv_context_new(digits: u32) -> *mut CmvContext {
    clear_last_error();
    match WorkingPrecision::new(digits) {
        Ok(prec) => Box::into_raw(Box::new(CmvContext { prec })),
        Err(e) => {
            set_last_error(e.to_string());
            std::ptr::null_mut()
        }
    }
}

/// # Safety
/// `ctx` must be null or a pointer from [`cmv_context_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cmv_context_free(ctx: *mut CmvContext) {
    if !ctx.is_null() {
        // SAFETY: allocated by `cmv_context_new` and owned by the caller.
        drop(unsafe { Box::from_raw(ctx) });
    }
}

/// Digits of `ctx`, or 0 for a null context.
///
/// # Safety
/// `ctx` must be null or a live context.
#[no_mangle]
pub unsafe extern "C" fn cmv_context_digits(ctx: *const CmvContext) -> u32 {
    // SAFETY: guaranteed by the caller.
    unsafe { ctx.as_ref() }.map_or(0, |c| c.prec.digits())
}

/// `psi^(n)(t)` for `n >= 1`, `t > 0`.
///
/// # Safety
/// `ctx` must be a live context and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cmv_polygamma(ctx: *const CmvContext, n: u32, t: f64, out: *mut f64) -> CmvStatus {
    guard(|| {
        let prec = unsafe { context(ctx) }?.prec;
        let t = positive(prec, t, "t")?;
        let v = specfun::polygamma(n, &t, prec).map_err(core_err)?;
        unsafe { write_f64(out, &v) }
    })
}

/// `h(t) = e^(1/t) - psi'(t)` for `i = 0`, otherwise its `i`-th derivative.
///
/// # Safety
/// `ctx` must be a live context and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cmv_h(ctx: *const CmvContext, i: u32, t: f64, out: *mut f64) -> CmvStatus {
    guard(|| {
        let prec = unsafe { context(ctx) }?.prec;
        let t = positive(prec, t, "t")?;
        let v = laurent::h_nth_derivative(i, &t, prec).map_err(core_err)?;
        unsafe { write_f64(out, &v) }
    })
}

/// Remainder `H_k(z) = e^(1/z) - sum_{m<=k} z^-m / m!` for `z > 0`.
///
/// # Safety
/// `ctx` must be a live context and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cmv_remainder_hk(ctx: *const CmvContext, k: u32, z: f64, out: *mut f64) -> CmvStatus {
    guard(|| {
        let prec = unsafe { context(ctx) }?.prec;
        let z = positive(prec, z, "z")?;
        let v = laurent::remainder_hk(k, &z, prec).map_err(core_err)?;
        unsafe { write_f64(out, &v) }
    })
}

/// Modified Bessel function `I_nu(z)` for integer `nu` and `z >= 0`.
///
/// # Safety
/// `ctx` must be a live context and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cmv_bessel_i(ctx: *const CmvContext, nu: u32, z: f64, out: *mut f64) -> CmvStatus {
    guard(|| {
        let prec = unsafe { context(ctx) }?.prec;
        if !(z.is_finite() && z >= 0.0) {
            return Err((CmvStatus::Usage, "z must be >= 0".to_string()));
        }
        let v = specfun::bessel_i(nu, &prec.float(z), prec).map_err(core_err)?;
        unsafe { write_f64(out, &v) }
    })
}

/// Margin of `I_1(t) > (t/2)^3 / (1 - e^(-(t/2)^2))` at `t > 0`.
/// Returns `CMV_STATUS_VIOLATION` if the margin is not above the noise floor.
///
/// # Safety
/// `ctx` must be a live context and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cmv_bessel_margin(ctx: *const CmvContext, t: f64, out: *mut f64) -> CmvStatus {
    guard(|| {
        let prec = unsafe { context(ctx) }?.prec;
        let t = positive(prec, t, "t")?;
        let v = inequalities::bessel_margin(&t, prec).map_err(core_err)?;
        unsafe { write_f64(out, &v) }?;
        Ok(if v > prec.noise_floor() { CmvStatus::Ok } else { CmvStatus::Violation })
    })
}

/// Brackets the completely monotonic degree of `H_k` with default search settings.
/// Returns `CMV_STATUS_VIOLATION` if the bracket misses `k + 1`.
///
/// # Safety
/// `ctx` must be a live context; `r_lo` and `r_hi` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cmv_degree(ctx: *const CmvContext, k: u32, r_lo: *mut f64, r_hi: *mut f64) -> CmvStatus {
    guard(|| {
        let prec = unsafe { context(ctx) }?.prec;
        if r_lo.is_null() || r_hi.is_null() {
            return Err(null("r_lo/r_hi"));
        }
        let est = estimate_cm_degree(k, &DegreeSearch::for_remainder(k), prec).map_err(core_err)?;
        // SAFETY: both checked non-null; writable per the caller.
        unsafe {
            *r_lo = est.r_lo;
            *r_hi = est.r_hi;
        }
        Ok(if est.contains(f64::from(k) + 1.0) { CmvStatus::Ok } else { CmvStatus::Violation })
    })
}

/// Evaluates a named function at the decimal point `t` and returns the value
/// as a decimal string with the context's digits. `function` is one of the
/// `eval --fn` names of the command-line tool; `param` fills `k`, `n` or `i`
/// as that function requires.
///
/// # Safety
/// `ctx` must be a live context, `function` and `t` NUL-terminated strings,
/// and `out` valid for one pointer write. Free `*out` with [`cmv_string_free`].
#[no_mangle]
pub unsafe extern "C" fn cmv_eval_decimal(
    ctx: *const CmvContext,
    function: *const c_char,
    t: *const c_char,
    param: u32,
    out: *mut *mut c_char,
) -> CmvStatus {
    guard(|| {
        let prec = unsafe { context(ctx) }?.prec;
        let function = unsafe { text(function, "function") }?;
        let t = unsafe { text(t, "t") }?;
        let param = param.to_string();
        let digits = prec.digits().to_string();
        let mut args = vec!["cmverify", "eval", "--fn", function, "--t", t, "--digits", &digits];
        for flag in ["--k", "--n", "--i"] {
            args.push(flag);
            args.push(&param);
        }
        let outcome = cli::run(args);
        match outcome.report.and_then(|r| r.results.into_iter().next()) {
            Some(record) if outcome.exit_code == cli::EXIT_PASS => unsafe { write_string(out, record.value) },
            _ => Err((exit_status(outcome.exit_code), outcome.stderr.trim().to_string())),
        }
    })
}

fn exit_status(code: i32) -> CmvStatus {
    match code {
        cli::EXIT_PASS => CmvStatus::Ok,
        cli::EXIT_VIOLATION => CmvStatus::Violation,
        cli::EXIT_USAGE => CmvStatus::Usage,
        _ => CmvStatus::Numeric,
    }
}

/// Runs the command-line tool in-process. `argv` excludes the program name.
/// `*report` receives the report text (or the diagnostic on usage errors);
/// `*exit_code` receives the tool's exit code, also reflected in the status.
///
/// # Safety
/// `argv` must point to `argc` NUL-terminated strings; `report` and
/// `exit_code` must be valid for writes. Free `*report` with [`cmv_string_free`].
#[no_mangle]
pub unsafe extern "C" fn cmv_run(
    argc: usize,
    argv: *const *const c_char,
    report: *mut *mut c_char,
    exit_code: *mut i32,
) -> CmvStatus {
    guard(|| {
        if argv.is_null() && argc > 0 {
            return Err(null("argv"));
        }
        if exit_code.is_null() {
            return Err(null("exit_code"));
        }
        let mut args = vec!["cmverify".to_string()];
        for j in 0..argc {
            // SAFETY: `argv` holds `argc` entries per the caller.
            let arg = unsafe { *argv.add(j) };
            args.push(unsafe { text(arg, "argv entry") }?.to_string());
        }
        let outcome = cli::run(args);
        let body = if outcome.stdout.is_empty() { outcome.stderr.clone() } else { outcome.stdout.clone() };
        unsafe { write_string(report, body) }?;
        // SAFETY: checked non-null above.
        unsafe { *exit_code = outcome.exit_code };
        let status = exit_status(outcome.exit_code);
        if status != CmvStatus::Ok && status != CmvStatus::Violation {
            set_last_error(outcome.stderr.trim().to_string());
        }
        Ok(status)
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cmv_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: produced by `CString::into_raw` in this crate.
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Message for the last failing call on this thread, or null.
/// The pointer stays valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn cmv_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}
