//! C ABI over `rframes`.
//!
//! Every fallible function returns an `RF_*` status code. Results are written through
//! out-pointers; on failure the out-pointers are left untouched and a description is
//! available from [`rf_last_error_message`] on the same thread.
//!
//! Banks and frame reports are opaque handles owned by the caller and released with the
//! matching `*_free` function. Array lengths are element counts. Channel indices are
//! 0-based.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rframes::filterbank::{channel_energies, identify_period, AnalysisCoefficients};
use rframes::frame::{frame_report, FrameReport};
use rframes::recovery::{
    denoise, detect_support_set, recover_missing, recover_missing_periodic, snr_of, CoefficientSet,
};
use rframes::{analyze, Channel, Error, RamanujanFilterBank, Signal};

pub const RF_OK: i32 = 0;
/// A required pointer argument was null.
pub const RF_ERR_NULL: i32 = 1;
/// Invalid input: lengths, divisibility, index ranges, or a bank without the required structure.
pub const RF_ERR_PRECONDITION: i32 = 2;
/// The optimisation step failed or a numerical check did not pass.
pub const RF_ERR_SOLVER: i32 = 3;
pub const RF_ERR_IO: i32 = 4;
/// The output buffer is shorter than the result. The required length is in the message.
pub const RF_ERR_BUFFER_TOO_SMALL: i32 = 5;
/// A panic was caught at the boundary.
pub const RF_ERR_PANIC: i32 = 6;

/// Opaque Ramanujan filter bank.
pub struct RfBank {
    inner: RamanujanFilterBank,
}

/// Opaque polyphase frame report of a uniform bank.
pub struct RfFrameReport {
    inner: FrameReport,
    json: CString,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

enum Fail {
    Null(&'static str),
    Buffer { need: usize, got: usize },
    Core(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

type FfiResult = std::result::Result<(), Fail>;

fn guard(f: impl FnOnce() -> FfiResult) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RF_OK,
        Ok(Err(Fail::Null(name))) => {
            set_last_error(format!("null pointer: {name}"));
            RF_ERR_NULL
        }
        Ok(Err(Fail::Buffer { need, got })) => {
            set_last_error(format!("output buffer holds {got} elements, {need} required"));
            RF_ERR_BUFFER_TOO_SMALL
        }
        Ok(Err(Fail::Core(e))) => {
            let code = e.exit_code();
            set_last_error(e.to_string());
            code
        }
        Err(_) => {
            set_last_error("panic in rframes".to_string());
            RF_ERR_PANIC
        }
    }
}

unsafe fn slice<'a, T>(p: *const T, len: usize, name: &'static str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Fail::Null(name));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn write_out<T: Copy>(values: &[T], out: *mut T, out_len: usize) -> FfiResult {
    if out_len < values.len() {
        return Err(Fail::Buffer {
            need: values.len(),
            got: out_len,
        });
    }
    if values.is_empty() {
        return Ok(());
    }
    if out.is_null() {
        return Err(Fail::Null("out"));
    }
    ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
    Ok(())
}

unsafe fn set<T>(out: *mut T, v: T) -> FfiResult {
    if out.is_null() {
        return Err(Fail::Null("out"));
    }
    out.write(v);
    Ok(())
}

unsafe fn bank_ref<'a>(bank: *const RfBank) -> Result<&'a RamanujanFilterBank, Fail> {
    bank.as_ref().map(|b| &b.inner).ok_or(Fail::Null("bank"))
}

unsafe fn signal(x: *const f64, len: usize, name: &'static str) -> Result<Signal, Fail> {
    Ok(Signal::new(slice(x, len, name)?.to_vec())?)
}

unsafe fn pairs(k: *const usize, i: *const usize, len: usize) -> Result<CoefficientSet, Fail> {
    let ks = slice(k, len, "pairs_k")?;
    let is = slice(i, len, "pairs_i")?;
    Ok(CoefficientSet::new(ks.iter().copied().zip(is.iter().copied())))
}

/// Message for the last failed call on this thread, or null if none failed yet.
///
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn rf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Euler's totient of `q`.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rf_totient(q: usize, out: *mut usize) -> i32 {
    guard(|| set(out, rframes::number_theory::totient(q)?))
}

/// Writes `c_q(0..n)` to `out`.
///
/// # Safety
/// `out` must be valid for `out_len` writes.
#[no_mangle]
pub unsafe extern "C" fn rf_ramanujan_sum(q: usize, n: usize, out: *mut i64, out_len: usize) -> i32 {
    guard(|| write_out(&rframes::number_theory::ramanujan_sum(q, n)?.values, out, out_len))
}

/// Creates the uniform bank on length `n` with decimation `p` for every divisor channel.
///
/// # Safety
/// `out` must be valid for one write. The handle must be released with [`rf_bank_free`].
#[no_mangle]
pub unsafe extern "C" fn rf_bank_new_uniform(n: usize, p: usize, out: *mut *mut RfBank) -> i32 {
    guard(|| {
        let bank = RamanujanFilterBank::uniform(n, p)?;
        set(out, Box::into_raw(Box::new(RfBank { inner: bank })))
    })
}

/// Creates a bank with channels `(qs[j], ps[j])`.
///
/// # Safety
/// `qs` and `ps` must be valid for `len` reads and `out` for one write. The handle must be
/// released with [`rf_bank_free`].
#[no_mangle]
pub unsafe extern "C" fn rf_bank_new(
    n: usize,
    qs: *const usize,
    ps: *const usize,
    len: usize,
    out: *mut *mut RfBank,
) -> i32 {
    guard(|| {
        let qs = slice(qs, len, "qs")?;
        let ps = slice(ps, len, "ps")?;
        let channels = qs.iter().zip(ps).map(|(&q, &p)| Channel { q, p }).collect();
        let bank = RamanujanFilterBank::new(n, channels)?;
        set(out, Box::into_raw(Box::new(RfBank { inner: bank })))
    })
}

/// Releases a bank. Null is ignored.
///
/// # Safety
/// `bank` must come from one of the `rf_bank_new*` functions and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn rf_bank_free(bank: *mut RfBank) {
    if !bank.is_null() {
        drop(Box::from_raw(bank));
    }
}

/// Number of channels, or 0 for a null handle.
///
/// # Safety
/// `bank` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rf_bank_num_channels(bank: *const RfBank) -> usize {
    bank.as_ref().map_or(0, |b| b.inner.num_channels())
}

/// Total number of analysis coefficients, or 0 for a null handle.
///
/// # Safety
/// `bank` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rf_bank_total_coefficients(bank: *const RfBank) -> usize {
    bank.as_ref().map_or(0, |b| b.inner.total_coefficients())
}

/// Analysis coefficients of `x`, channel after channel.
///
/// # Safety
/// `bank` must be a live handle, `x` valid for `len` reads and `out` for `out_len` writes.
#[no_mangle]
pub unsafe extern "C" fn rf_bank_analyze(
    bank: *const RfBank,
    x: *const f64,
    len: usize,
    out: *mut f64,
    out_len: usize,
) -> i32 {
    guard(|| {
        let bank = bank_ref(bank)?;
        let y = analyze(&signal(x, len, "x")?, bank)?;
        write_out(&y.flatten(), out, out_len)
    })
}

/// Reconstructs a signal from flat coefficients with the tight bound `a`.
///
/// Fails with `RF_ERR_PRECONDITION` if the bank is not tight or `a` is not its bound.
///
/// # Safety
/// `bank` must be a live handle, `coeffs` valid for `coeffs_len` reads and `out` for
/// `out_len` writes.
#[no_mangle]
pub unsafe extern "C" fn rf_bank_synthesize(
    bank: *const RfBank,
    coeffs: *const f64,
    coeffs_len: usize,
    a: f64,
    out: *mut f64,
    out_len: usize,
) -> i32 {
    guard(|| {
        let bank = bank_ref(bank)?;
        let c = AnalysisCoefficients::from_flat(bank, slice(coeffs, coeffs_len, "coeffs")?)?;
        let x = rframes::synthesize(&c, bank, a)?;
        write_out(x.values(), out, out_len)
    })
}

/// Energy of `x` in each channel, in channel order.
///
/// # Safety
/// `bank` must be a live handle, `x` valid for `len` reads and `out` for `out_len` writes.
#[no_mangle]
pub unsafe extern "C" fn rf_bank_channel_energies(
    bank: *const RfBank,
    x: *const f64,
    len: usize,
    out: *mut f64,
    out_len: usize,
) -> i32 {
    guard(|| {
        let bank = bank_ref(bank)?;
        let e = channel_energies(&signal(x, len, "x")?, bank)?;
        write_out(&e.energies, out, out_len)
    })
}

/// Polyphase frame analysis of a uniform bank.
///
/// # Safety
/// `bank` must be a live handle and `out` valid for one write. The report must be released
/// with [`rf_frame_report_free`].
#[no_mangle]
pub unsafe extern "C" fn rf_frame_report_new(bank: *const RfBank, out: *mut *mut RfFrameReport) -> i32 {
    guard(|| {
        let r = frame_report(bank_ref(bank)?)?;
        let json = rframes::io::to_json_string(&r)?;
        let json = CString::new(json).map_err(|e| Error::Numerical(e.to_string()))?;
        set(out, Box::into_raw(Box::new(RfFrameReport { inner: r, json })))
    })
}

/// Lower and upper frame bounds.
///
/// # Safety
/// `report` must be a live handle; `a` and `b` must be valid for one write each.
#[no_mangle]
pub unsafe extern "C" fn rf_frame_report_bounds(report: *const RfFrameReport, a: *mut f64, b: *mut f64) -> i32 {
    guard(|| {
        let r = report.as_ref().ok_or(Fail::Null("report"))?;
        if b.is_null() {
            return Err(Fail::Null("b"));
        }
        set(a, r.inner.a)?;
        set(b, r.inner.b)
    })
}

/// Writes 1 if the bank is a tight frame, 0 otherwise.
///
/// # Safety
/// `report` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rf_frame_report_is_tight(report: *const RfFrameReport, out: *mut i32) -> i32 {
    guard(|| {
        let r = report.as_ref().ok_or(Fail::Null("report"))?;
        set(out, i32::from(r.inner.tight))
    })
}

/// JSON form of the report. The string is owned by the report.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rf_frame_report_json(report: *const RfFrameReport) -> *const c_char {
    report.as_ref().map_or(ptr::null(), |r| r.json.as_ptr())
}

/// Releases a frame report. Null is ignored.
///
/// # Safety
/// `report` must come from [`rf_frame_report_new`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn rf_frame_report_free(report: *mut RfFrameReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Period of `x` from the responding channels of the `p = 1` bank.
///
/// # Safety
/// `x` must be valid for `len` reads and `period` for one write.
#[no_mangle]
pub unsafe extern "C" fn rf_identify_period(x: *const f64, len: usize, zero_tol: f64, period: *mut usize) -> i32 {
    guard(|| {
        let est = identify_period(&signal(x, len, "x")?, zero_tol)?;
        set(period, est.period)
    })
}

/// Recovers a signal from `observed = T_J x`, where `J` is every coefficient except the
/// `missing_len` pairs `(missing_k[j], missing_i[j])`.
///
/// With `periods_len > 0` the estimate is constrained to the subspaces `S_q` of the given
/// divisors.
///
/// # Safety
/// `bank` must be a live handle. `observed` must be valid for `len` reads, the pair arrays
/// for `missing_len` reads, `periods` for `periods_len` reads and `out` for `out_len` writes.
#[no_mangle]
pub unsafe extern "C" fn rf_recover_missing(
    bank: *const RfBank,
    observed: *const f64,
    len: usize,
    missing_k: *const usize,
    missing_i: *const usize,
    missing_len: usize,
    periods: *const usize,
    periods_len: usize,
    out: *mut f64,
    out_len: usize,
) -> i32 {
    guard(|| {
        let bank = bank_ref(bank)?;
        let obs = signal(observed, len, "observed")?;
        let missing = pairs(missing_k, missing_i, missing_len)?;
        missing.validate(bank)?;
        let j = missing.complement(bank);
        let periods = slice(periods, periods_len, "periods")?;
        let rec = if periods.is_empty() {
            recover_missing(&obs, &j, bank)?
        } else {
            recover_missing_periodic(&obs, &j, bank, periods)?
        };
        write_out(rec.signal.values(), out, out_len)
    })
}

/// Denoises `y` against sparse noise. Active coefficients are detected with `threshold`
/// relative to the strongest channel.
///
/// # Safety
/// `bank` must be a live handle, `y` valid for `len` reads and `out` for `out_len` writes.
#[no_mangle]
pub unsafe extern "C" fn rf_denoise(
    bank: *const RfBank,
    y: *const f64,
    len: usize,
    threshold: f64,
    out: *mut f64,
    out_len: usize,
) -> i32 {
    guard(|| {
        let bank = bank_ref(bank)?;
        let y = signal(y, len, "y")?;
        let est = detect_support_set(&y, bank, threshold)?;
        let d = denoise(&y, &est.set, bank)?;
        write_out(d.signal.values(), out, out_len)
    })
}

/// Like [`rf_denoise`] with an explicit support set `M` of coefficient pairs.
///
/// # Safety
/// As for [`rf_denoise`]; the pair arrays must be valid for `m_len` reads.
#[no_mangle]
pub unsafe extern "C" fn rf_denoise_with_support(
    bank: *const RfBank,
    y: *const f64,
    len: usize,
    m_k: *const usize,
    m_i: *const usize,
    m_len: usize,
    out: *mut f64,
    out_len: usize,
) -> i32 {
    guard(|| {
        let bank = bank_ref(bank)?;
        let y = signal(y, len, "y")?;
        let m = pairs(m_k, m_i, m_len)?;
        m.validate(bank)?;
        let d = denoise(&y, &m, bank)?;
        write_out(d.signal.values(), out, out_len)
    })
}

/// SNR in dB of `estimate` as an approximation of `x`.
///
/// # Safety
/// `x` and `estimate` must be valid for `len` reads and `out` for one write.
#[no_mangle]
pub unsafe extern "C" fn rf_snr_db(x: *const f64, estimate: *const f64, len: usize, out: *mut f64) -> i32 {
    guard(|| {
        let v = snr_of(&signal(x, len, "x")?, &signal(estimate, len, "estimate")?)?;
        set(out, v)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CStr;

    #[test]
    fn null_out_pointer_is_reported() {
        let rc = unsafe { rf_totient(10, ptr::null_mut()) };
        assert_eq!(rc, RF_ERR_NULL);
        let msg = unsafe { CStr::from_ptr(rf_last_error_message()) };
        assert!(msg.to_str().unwrap().contains("null"));
    }

    #[test]
    fn short_buffer_is_reported() {
        let mut out = [0i64; 2];
        let rc = unsafe { rf_ramanujan_sum(4, 4, out.as_mut_ptr(), out.len()) };
        assert_eq!(rc, RF_ERR_BUFFER_TOO_SMALL);
    }
}
