//! C interface to `srv-bv`.
//!
//! Curves and match results are opaque handles created by `srvbv_*_new` or
//! the computing functions and released with the matching `*_free`. Every
//! fallible function returns an [`SrvStatus`]; on failure a description is
//! available from [`srvbv_last_error`] on the same thread. Arrays are passed as
//! pointer plus length, points row-major.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use srv_bv::matching::{correspondences, refine};
use srv_bv::{gtransform, io, relax, srvt, AcCurve, Error, GridConfig, MatchResult, Node, SbvCurve};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SrvStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidCurve = 3,
    DimensionMismatch = 4,
    NotContinuous = 5,
    ZeroLength = 6,
    BufferTooSmall = 7,
    Internal = 8,
    Panic = 9,
}

/// Opaque curve handle.
pub struct SrvCurve(SbvCurve);

/// Opaque result of a shape-distance computation.
pub struct SrvMatch(MatchResult);

/// Grid settings for [`srvbv_shape_distance`]; see [`srvbv_grid_config_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SrvGridConfig {
    pub n1: usize,
    pub n2: usize,
    pub window: usize,
    pub refine_rounds: usize,
    pub refine_factor: usize,
    pub convergence_tol: f64,
    pub constant_speed: bool,
}

impl From<SrvGridConfig> for GridConfig {
    fn from(c: SrvGridConfig) -> Self {
        GridConfig {
            n1: c.n1,
            n2: c.n2,
            window: c.window,
            refine_rounds: c.refine_rounds,
            refine_factor: c.refine_factor,
            convergence_tol: c.convergence_tol,
            constant_speed: c.constant_speed,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> SrvStatus {
    match e {
        Error::DimensionMismatch { .. } => SrvStatus::DimensionMismatch,
        Error::InvalidCurve(_) => SrvStatus::InvalidCurve,
        Error::NotAbsolutelyContinuous => SrvStatus::NotContinuous,
        Error::ZeroLength => SrvStatus::ZeroLength,
        Error::Internal(_) => SrvStatus::Internal,
        _ => SrvStatus::InvalidArgument,
    }
}

struct Fail(SrvStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> SrvStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SrvStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            SrvStatus::Panic
        }
    }
}

unsafe fn get<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref()
        .ok_or_else(|| Fail(SrvStatus::NullPointer, format!("{what} is null")))
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Fail(SrvStatus::NullPointer, format!("{what} is null")));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(SrvStatus::NullPointer, "output pointer is null".into()));
    }
    out.write(value);
    Ok(())
}

fn continuous(c: &SbvCurve) -> Result<AcCurve, Fail> {
    AcCurve::try_from(c.clone()).map_err(Fail::from)
}

/// Message of the last failed call on this thread; empty if none. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn srvbv_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn srvbv_grid_config_default() -> SrvGridConfig {
    let d = GridConfig::default();
    SrvGridConfig {
        n1: d.n1,
        n2: d.n2,
        window: d.window,
        refine_rounds: d.refine_rounds,
        refine_factor: d.refine_factor,
        convergence_tol: d.convergence_tol,
        constant_speed: d.constant_speed,
    }
}

/// Builds a curve from `n` parameters and `n × dim` left values. `right` may
/// be null for a continuous curve; otherwise it holds the right values.
///
/// # Safety
/// `ts` must point to `n` doubles, `left` (and `right` if non-null) to
/// `n * dim` doubles, `out` to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn srvbv_curve_new(
    dim: usize,
    n: usize,
    ts: *const f64,
    left: *const f64,
    right: *const f64,
    out: *mut *mut SrvCurve,
) -> SrvStatus {
    guard(|| {
        let len = n
            .checked_mul(dim)
            .ok_or_else(|| Fail(SrvStatus::InvalidArgument, "size overflow".into()))?;
        let ts = slice(ts, n, "ts")?;
        let left = slice(left, len, "left")?;
        let right = if right.is_null() { left } else { slice(right, len, "right")? };
        let nodes = (0..n)
            .map(|i| {
                let l = left[i * dim..(i + 1) * dim].to_vec();
                let r = right[i * dim..(i + 1) * dim].to_vec();
                Node::jump(ts[i], l, r)
            })
            .collect();
        let c = SbvCurve::new(dim, nodes)?;
        put(out, Box::into_raw(Box::new(SrvCurve(c))))
    })
}

/// Parses a curve file.
///
/// # Safety
/// `json` must be a NUL-terminated string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn srvbv_curve_from_json(json: *const c_char, out: *mut *mut SrvCurve) -> SrvStatus {
    guard(|| {
        if json.is_null() {
            return Err(Fail(SrvStatus::NullPointer, "json is null".into()));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|_| Fail(SrvStatus::InvalidArgument, "json is not UTF-8".into()))?;
        let c = io::parse_curve(text)?;
        put(out, Box::into_raw(Box::new(SrvCurve(c))))
    })
}

/// Serialises a curve; release the string with [`srvbv_string_free`].
///
/// # Safety
/// `curve` must be a live handle, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn srvbv_curve_to_json(curve: *const SrvCurve, out: *mut *mut c_char) -> SrvStatus {
    guard(|| {
        let c = get(curve, "curve")?;
        let s = CString::new(io::curve_to_json(&c.0))
            .map_err(|_| Fail(SrvStatus::Internal, "NUL in JSON".into()))?;
        put(out, s.into_raw())
    })
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn srvbv_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `curve` must come from this library or be null; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn srvbv_curve_free(curve: *mut SrvCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

/// Dimension of the curve, 0 for a null handle.
///
/// # Safety
/// `curve` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn srvbv_curve_dimension(curve: *const SrvCurve) -> usize {
    curve.as_ref().map_or(0, |c| c.0.dimension())
}

/// # Safety
/// `curve` must be a live handle, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn srvbv_curve_length(curve: *const SrvCurve, out: *mut f64) -> SrvStatus {
    guard(|| put(out, get(curve, "curve")?.0.length()))
}

unsafe fn binary(
    a: *const SrvCurve,
    b: *const SrvCurve,
    out: *mut f64,
    f: impl FnOnce(&SbvCurve, &SbvCurve) -> Result<f64, Fail>,
) -> SrvStatus {
    guard(|| {
        let v = f(&get(a, "first curve")?.0, &get(b, "second curve")?.0)?;
        put(out, v)
    })
}

/// Relaxed similarity `Ŝ`.
///
/// # Safety
/// `a`, `b` must be live handles, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn srvbv_s_hat(a: *const SrvCurve, b: *const SrvCurve, out: *mut f64) -> SrvStatus {
    binary(a, b, out, |x, y| Ok(relax::s_hat(x, y)?))
}

/// Squared relaxed distance `d̂ = len₁ + len₂ - 2Ŝ`.
///
/// # Safety
/// `a`, `b` must be live handles, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn srvbv_d_hat(a: *const SrvCurve, b: *const SrvCurve, out: *mut f64) -> SrvStatus {
    binary(a, b, out, |x, y| Ok(relax::d_hat(x, y)?))
}

/// SRV distance of two continuous curves.
///
/// # Safety
/// `a`, `b` must be live handles, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn srvbv_distance(a: *const SrvCurve, b: *const SrvCurve, out: *mut f64) -> SrvStatus {
    binary(a, b, out, |x, y| Ok(srvt::distance(&continuous(x)?, &continuous(y)?)?))
}

/// Scale-invariant angle between the transforms of two continuous curves.
///
/// # Safety
/// `a`, `b` must be live handles, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn srvbv_scale_invariant_distance(
    a: *const SrvCurve,
    b: *const SrvCurve,
    out: *mut f64,
) -> SrvStatus {
    binary(a, b, out, |x, y| {
        Ok(srvt::scale_invariant_distance(&continuous(x)?, &continuous(y)?)?)
    })
}

/// `G(c)` as a new handle; `alpha` receives `α` unless null.
///
/// # Safety
/// `curve` must be a live handle, `out` writable, `alpha` writable or null.
#[no_mangle]
pub unsafe extern "C" fn srvbv_g_transform(
    curve: *const SrvCurve,
    out: *mut *mut SrvCurve,
    alpha: *mut f64,
) -> SrvStatus {
    guard(|| {
        let e = gtransform::jump_embedding(&get(curve, "curve")?.0)?;
        if !alpha.is_null() {
            alpha.write(e.alpha);
        }
        put(out, Box::into_raw(Box::new(SrvCurve(e.g.into_sbv()))))
    })
}

/// Shape distance with refinement. `cfg` may be null for the defaults.
///
/// # Safety
/// `a`, `b` must be live handles, `cfg` readable or null, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn srvbv_shape_distance(
    a: *const SrvCurve,
    b: *const SrvCurve,
    cfg: *const SrvGridConfig,
    out: *mut *mut SrvMatch,
) -> SrvStatus {
    guard(|| {
        let cfg: GridConfig = match cfg.as_ref() {
            Some(c) => (*c).into(),
            None => GridConfig::default(),
        };
        let m = refine(&get(a, "first curve")?.0, &get(b, "second curve")?.0, &cfg)?;
        put(out, Box::into_raw(Box::new(SrvMatch(m))))
    })
}

/// # Safety
/// `m` must come from this library or be null; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn srvbv_match_free(m: *mut SrvMatch) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// # Safety
/// `m` must be a live handle, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn srvbv_match_s_star(m: *const SrvMatch, out: *mut f64) -> SrvStatus {
    guard(|| put(out, get(m, "match")?.0.s_star))
}

/// # Safety
/// `m` must be a live handle, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn srvbv_match_d_shape(m: *const SrvMatch, out: *mut f64) -> SrvStatus {
    guard(|| put(out, get(m, "match")?.0.d_shape))
}

/// Knots of `ψ₁` (`which = 1`), `ψ₂` (2), `φ₁` (3) or `φ₂` (4).
///
/// `count` always receives the number of knots. With null `xs`/`ys` only the
/// count is reported; otherwise both arrays need room for `capacity` doubles
/// and [`SrvStatus::BufferTooSmall`] is returned if that is not enough.
///
/// # Safety
/// `m` must be a live handle, `count` writable, `xs`/`ys` writable for
/// `capacity` doubles or both null.
#[no_mangle]
pub unsafe extern "C" fn srvbv_match_knots(
    m: *const SrvMatch,
    which: u32,
    xs: *mut f64,
    ys: *mut f64,
    capacity: usize,
    count: *mut usize,
) -> SrvStatus {
    guard(|| {
        let m = &get(m, "match")?.0;
        let r = match which {
            1 => Some(&m.psi1),
            2 => Some(&m.psi2),
            3 => m.phi1.as_ref(),
            4 => m.phi2.as_ref(),
            _ => return Err(Fail(SrvStatus::InvalidArgument, format!("unknown map {which}"))),
        }
        .ok_or_else(|| Fail(SrvStatus::InvalidArgument, "map not available".into()))?;
        let knots = r.knots();
        put(count, knots.len())?;
        if xs.is_null() && ys.is_null() {
            return Ok(());
        }
        if xs.is_null() || ys.is_null() {
            return Err(Fail(SrvStatus::NullPointer, "one of xs, ys is null".into()));
        }
        if capacity < knots.len() {
            return Err(Fail(SrvStatus::BufferTooSmall, format!("need {} knots", knots.len())));
        }
        for (i, &(x, y)) in knots.iter().enumerate() {
            xs.add(i).write(x);
            ys.add(i).write(y);
        }
        Ok(())
    })
}

/// `k` correspondence pairs written as `k × 2 × dim` doubles: for each pair
/// the point on the first matched curve, then the point on the second.
///
/// # Safety
/// `m` must be a live handle and `points` writable for `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn srvbv_match_correspondences(
    m: *const SrvMatch,
    k: usize,
    points: *mut f64,
    capacity: usize,
) -> SrvStatus {
    guard(|| {
        let m = &get(m, "match")?.0;
        let dim = m.curve1.dimension();
        let need = k * 2 * dim;
        if points.is_null() {
            return Err(Fail(SrvStatus::NullPointer, "points is null".into()));
        }
        if capacity < need {
            return Err(Fail(SrvStatus::BufferTooSmall, format!("need {need} doubles")));
        }
        let mut at = points;
        for (p, q) in correspondences(m, k) {
            for v in p.iter().chain(&q) {
                at.write(*v);
                at = at.add(1);
            }
        }
        Ok(())
    })
}
