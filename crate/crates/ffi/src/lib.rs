//! C interface to `bic-core`.
//!
//! Every fallible function returns a [`BicStatus`]; on failure the message
//! is available from [`bic_last_error`] on the same thread. Objects are
//! opaque handles released with their `_free` function; strings returned
//! by the library are released with [`bic_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use bic_core::channel::ChannelParams;
use bic_core::entropy::{sliding_window_check, JointPMF};
use bic_core::region::{corner_list, tightness_report, RatePoint, TightnessReport, Verdict};
use bic_core::schemes::{build_corner_scheme, Corner, CornerKind, LinearScheme, Setup};
use bic_core::{cli, verify, Error, Rational};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BicStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    ConstructionFailed = 4,
    IoError = 5,
    Internal = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BicSetup {
    R0RL = 0,
    RLRM = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BicVerdict {
    TightProven = 0,
    TightIfConjecture = 1,
    Gap = 2,
}

/// Reduced fraction, `den > 0`.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BicRational {
    pub num: i64,
    pub den: i64,
}

/// Rate pair normalized by n: `(R_L, R_0)` or `(R_M, R_L)`.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BicPoint {
    pub x: BicRational,
    pub y: BicRational,
}

/// Computed rate region of one instance.
pub struct BicRegion {
    setup: Setup,
    params: ChannelParams,
    corners: Vec<RatePoint>,
    report: TightnessReport,
}

/// A linear scheme.
pub struct BicScheme {
    scheme: LinearScheme,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(status: BicStatus, msg: &str) -> BicStatus {
    set_error(msg);
    status
}

fn from_error(e: &Error) -> BicStatus {
    let status = match e {
        Error::Parse { .. } => BicStatus::ParseError,
        Error::ConstructionFailed(_) => BicStatus::ConstructionFailed,
        Error::Io(_) => BicStatus::IoError,
        _ => BicStatus::InvalidArgument,
    };
    fail(status, &e.to_string())
}

/// Runs `f`, turning errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), BicStatus>) -> BicStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            BicStatus::Ok
        }
        Ok(Err(status)) => status,
        Err(_) => fail(BicStatus::Internal, "internal panic"),
    }
}

fn rational(r: &Rational) -> Result<BicRational, BicStatus> {
    match (i64::try_from(*r.numer()), i64::try_from(*r.denom())) {
        (Ok(num), Ok(den)) => Ok(BicRational { num, den }),
        _ => Err(fail(BicStatus::Internal, "rational does not fit in 64 bits")),
    }
}

fn point(p: &RatePoint) -> Result<BicPoint, BicStatus> {
    Ok(BicPoint {
        x: rational(&p.x)?,
        y: rational(&p.y)?,
    })
}

fn setup_of(s: BicSetup) -> Setup {
    match s {
        BicSetup::R0RL => Setup::R0RL,
        BicSetup::RLRM => Setup::RLRM,
    }
}

fn check<T>(r: Result<T, Error>) -> Result<T, BicStatus> {
    r.map_err(|e| from_error(&e))
}

fn non_null<T>(p: *const T) -> Result<(), BicStatus> {
    if p.is_null() {
        Err(fail(BicStatus::NullPointer, "null pointer argument"))
    } else {
        Ok(())
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, BicStatus> {
    non_null(s)?;
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(BicStatus::InvalidArgument, "string is not UTF-8"))
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

/// Message of the last failed call on this thread; empty after success.
/// The pointer stays valid until the next library call on this thread.
#[no_mangle]
pub extern "C" fn bic_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn bic_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Computes inner hull, outer bounds and tightness for one instance.
///
/// # Safety
/// `out` must be a valid pointer; on success it receives a handle to be
/// released with [`bic_region_free`].
#[no_mangle]
pub unsafe extern "C" fn bic_region_compute(
    setup: BicSetup,
    subcarriers: u32,
    interfered: u32,
    n: u32,
    k: u32,
    out: *mut *mut BicRegion,
) -> BicStatus {
    guard(|| {
        non_null(out)?;
        let params = check(ChannelParams::new(
            n as usize,
            k as usize,
            subcarriers as usize,
            interfered as usize,
            bic_core::field::DEFAULT_DEGREE,
        ))?;
        let setup = setup_of(setup);
        let (m, l, a) = (params.subcarriers(), params.interfered(), params.alpha());
        let corners = check(bic_core::region::inner_corners(setup, m, l, a))?;
        let report = check(tightness_report(setup, m, l, a))?;
        *out = Box::into_raw(Box::new(BicRegion {
            setup,
            params,
            corners,
            report,
        }));
        Ok(())
    })
}

/// # Safety
/// `region` must be null or a handle from [`bic_region_compute`].
#[no_mangle]
pub unsafe extern "C" fn bic_region_free(region: *mut BicRegion) {
    if !region.is_null() {
        drop(Box::from_raw(region));
    }
}

/// # Safety
/// `region` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bic_region_verdict(region: *const BicRegion, out: *mut BicVerdict) -> BicStatus {
    guard(|| {
        non_null(region)?;
        non_null(out)?;
        *out = match (*region).report.verdict {
            Verdict::TightProven => BicVerdict::TightProven,
            Verdict::TightIfConjecture => BicVerdict::TightIfConjecture,
            Verdict::Gap => BicVerdict::Gap,
        };
        Ok(())
    })
}

/// Number of distinct achievable corner points; 0 for a null handle.
///
/// # Safety
/// `region` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bic_region_corner_count(region: *const BicRegion) -> usize {
    region.as_ref().map_or(0, |r| r.corners.len())
}

/// # Safety
/// `region` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bic_region_corner(region: *const BicRegion, index: usize, out: *mut BicPoint) -> BicStatus {
    guard(|| {
        non_null(region)?;
        non_null(out)?;
        let r = &*region;
        let p = r
            .corners
            .get(index)
            .ok_or_else(|| fail(BicStatus::InvalidArgument, "corner index out of range"))?;
        *out = point(p)?;
        Ok(())
    })
}

/// The region as JSON (same record as the command-line tool), or null on
/// failure. Release with [`bic_string_free`].
///
/// # Safety
/// `region` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bic_region_to_json(region: *const BicRegion, include_conjectured: bool) -> *mut c_char {
    let Some(r) = region.as_ref() else {
        set_error("null pointer argument");
        return ptr::null_mut();
    };
    match catch_unwind(|| cli::region_json(r.setup, &r.params, include_conjectured)) {
        Ok(Ok(s)) => to_c_string(s),
        Ok(Err(e)) => {
            from_error(&e);
            ptr::null_mut()
        }
        Err(_) => {
            set_error("internal panic");
            ptr::null_mut()
        }
    }
}

/// Builds and certifies the named corner construction (for example
/// `"erasure-all"`).
///
/// # Safety
/// `corner` must be a NUL-terminated string and `out` a valid pointer; on
/// success `*out` must be released with [`bic_scheme_free`].
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn bic_scheme_build(
    setup: BicSetup,
    corner: *const c_char,
    subcarriers: u32,
    interfered: u32,
    n: u32,
    k: u32,
    field_degree: u8,
    seed: u64,
    out: *mut *mut BicScheme,
) -> BicStatus {
    guard(|| {
        non_null(out)?;
        let kind: CornerKind = check(read_str(corner)?.parse())?;
        let corner = check(Corner::new(setup_of(setup), kind))?;
        let params = check(ChannelParams::new(
            n as usize,
            k as usize,
            subcarriers as usize,
            interfered as usize,
            field_degree,
        ))?;
        let scheme = check(build_corner_scheme(&params, corner, seed))?;
        *out = Box::into_raw(Box::new(BicScheme { scheme }));
        Ok(())
    })
}

/// Parses the text scheme format.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bic_scheme_parse(text: *const c_char, out: *mut *mut BicScheme) -> BicStatus {
    guard(|| {
        non_null(out)?;
        let scheme = check(LinearScheme::from_text(read_str(text)?))?;
        *out = Box::into_raw(Box::new(BicScheme { scheme }));
        Ok(())
    })
}

/// The scheme in the text format, or null for a null handle.
///
/// # Safety
/// `scheme` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bic_scheme_serialize(scheme: *const BicScheme) -> *mut c_char {
    match scheme.as_ref() {
        Some(s) => to_c_string(s.scheme.to_text()),
        None => {
            set_error("null pointer argument");
            ptr::null_mut()
        }
    }
}

/// Checks decodability on every receiver configuration.
///
/// # Safety
/// `scheme` must be a live handle and `passed` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bic_scheme_verify(scheme: *const BicScheme, passed: *mut bool) -> BicStatus {
    guard(|| {
        non_null(scheme)?;
        non_null(passed)?;
        *passed = verify(&(*scheme).scheme).passed();
        Ok(())
    })
}

/// Normalized rate pair in the coordinates of `setup`.
///
/// # Safety
/// `scheme` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bic_scheme_rate(scheme: *const BicScheme, setup: BicSetup, out: *mut BicPoint) -> BicStatus {
    guard(|| {
        non_null(scheme)?;
        non_null(out)?;
        *out = point(&(*scheme).scheme.rate_point(setup_of(setup)))?;
        Ok(())
    })
}

/// # Safety
/// `scheme` must be null or a handle from this library.
#[no_mangle]
pub unsafe extern "C" fn bic_scheme_free(scheme: *mut BicScheme) {
    if !scheme.is_null() {
        drop(Box::from_raw(scheme));
    }
}

/// Number of corner families achievable at `alpha = k/n`; 0 on invalid
/// arguments.
#[no_mangle]
pub extern "C" fn bic_corner_family_count(setup: BicSetup, subcarriers: u32, interfered: u32, n: u32, k: u32) -> usize {
    if n == 0 {
        return 0;
    }
    let alpha = Rational::new(k as i128, n as i128);
    corner_list(setup_of(setup), subcarriers as usize, interfered as usize, alpha).map_or(0, |v| v.len())
}

/// Sliding-window entropy check of a joint pmf given as row-major
/// probabilities (last variable fastest). `chain_out`, if non-null, must
/// hold `variables` doubles and receives the normalized window sums.
///
/// # Safety
/// `alphabets` must point to `variables` sizes, `probs` to `probs_len`
/// doubles, and `holds` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bic_sliding_window_check(
    alphabets: *const usize,
    variables: usize,
    probs: *const f64,
    probs_len: usize,
    holds: *mut bool,
    chain_out: *mut f64,
) -> BicStatus {
    guard(|| {
        non_null(alphabets)?;
        non_null(probs)?;
        non_null(holds)?;
        let sizes = std::slice::from_raw_parts(alphabets, variables).to_vec();
        let p = std::slice::from_raw_parts(probs, probs_len).to_vec();
        let pmf = check(JointPMF::new(sizes, p))?;
        let result = check(sliding_window_check(&pmf))?;
        *holds = result.holds;
        if !chain_out.is_null() {
            ptr::copy_nonoverlapping(result.chain.as_ptr(), chain_out, result.chain.len());
        }
        Ok(())
    })
}
