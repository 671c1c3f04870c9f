//! C ABI for `kerr-shadow`.
//!
//! Objects are opaque handles created by `ks_*_new` functions and released
//! with the matching `ks_*_free`. Every fallible call returns a
//! [`KsStatus`]; on failure `ks_last_error_message` describes the error
//! for the calling thread. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use kerr_shadow::bifurcation::{self, TrajectoryKind};
use kerr_shadow::geodesic::IntegratorControls;
use kerr_shadow::observer::{self, ObserverKind, ObserverSpec};
use kerr_shadow::raytracer::{self, ImagePlane, RenderOptions, RenderOutput, SceneConfig};
use kerr_shadow::shadow::{self, ShadowCurve};
use kerr_shadow::{KerrError, KerrParams};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidSpin = 2,
    SpinTooSmall = 3,
    Domain = 4,
    TimelikeViolation = 5,
    ErgosphereViolation = 6,
    StepFailure = 7,
    DegenerateRay = 8,
    ProjectionPole = 9,
    RenderFailed = 10,
    Config = 11,
    Io = 12,
    OutOfRange = 13,
    Panic = 14,
}

impl From<&KerrError> for KsStatus {
    fn from(e: &KerrError) -> Self {
        match e {
            KerrError::InvalidSpin(_) => KsStatus::InvalidSpin,
            KerrError::SpinTooSmall(..) => KsStatus::SpinTooSmall,
            KerrError::Domain(_) => KsStatus::Domain,
            KerrError::TimelikeViolation { .. } => KsStatus::TimelikeViolation,
            KerrError::ErgosphereViolation { .. } => KsStatus::ErgosphereViolation,
            KerrError::StepFailure { .. } => KsStatus::StepFailure,
            KerrError::DegenerateRay => KsStatus::DegenerateRay,
            KerrError::ProjectionPole => KsStatus::ProjectionPole,
            KerrError::RenderFailed { .. } => KsStatus::RenderFailed,
            KerrError::Config(_) => KsStatus::Config,
            KerrError::Io(_) => KsStatus::Io,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KsObserverKind {
    Zamo = 0,
    Static = 1,
    Carter = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KsTrajectoryKind {
    HorizonInfinity = 0,
    HorizonHorizon = 1,
    InfinityInfinity = 2,
    SphericalCritical = 3,
    Forbidden = 4,
}

/// One sample of a shadow boundary. `case_tag` is 1 when `r_c ≤ r₀` and
/// 2 otherwise.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct KsShadowSample {
    pub r_c: f64,
    pub alpha: f64,
    pub beta: f64,
    pub x: f64,
    pub y: f64,
    pub case_tag: u8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct KsRenderStats {
    pub pixels: usize,
    pub horizon: usize,
    pub escaped: usize,
    pub trapped: usize,
    pub degenerate: usize,
    pub failed: usize,
}

/// Spacetime handle.
pub struct KsParams(KerrParams);

/// Validated stationary observer in a given spacetime.
pub struct KsObserver {
    params: KerrParams,
    spec: ObserverSpec,
}

pub struct KsShadowCurve(ShadowCurve);

pub struct KsImage(RenderOutput);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior NUL");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: KsStatus, msg: impl Into<String>) -> KsStatus {
    set_error(msg.into());
    status
}

fn kerr_fail(e: KerrError) -> KsStatus {
    fail(KsStatus::from(&e), e.to_string())
}

/// Run `f`, turning panics into `KsStatus::Panic`.
fn guard(f: impl FnOnce() -> KsStatus) -> KsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(KsStatus::Panic, "internal panic"),
    }
}

unsafe fn put<T>(out: *mut T, value: T) -> KsStatus {
    if out.is_null() {
        return fail(KsStatus::NullPointer, "output pointer is null");
    }
    out.write(value);
    KsStatus::Ok
}

macro_rules! deref {
    ($p:expr) => {
        match $p.as_ref() {
            Some(v) => v,
            None => return fail(KsStatus::NullPointer, concat!(stringify!($p), " is null")),
        }
    };
}

/// Message for the last failed call on this thread, or NULL. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ks_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Static, NUL-terminated name of a status code.
#[no_mangle]
pub extern "C" fn ks_status_name(status: KsStatus) -> *const c_char {
    let s: &'static CStr = match status {
        KsStatus::Ok => c"ok",
        KsStatus::NullPointer => c"null pointer",
        KsStatus::InvalidSpin => c"invalid spin",
        KsStatus::SpinTooSmall => c"spin too small",
        KsStatus::Domain => c"domain error",
        KsStatus::TimelikeViolation => c"timelike violation",
        KsStatus::ErgosphereViolation => c"ergosphere violation",
        KsStatus::StepFailure => c"step failure",
        KsStatus::DegenerateRay => c"degenerate ray",
        KsStatus::ProjectionPole => c"projection pole",
        KsStatus::RenderFailed => c"render failed",
        KsStatus::Config => c"config error",
        KsStatus::Io => c"i/o error",
        KsStatus::OutOfRange => c"index out of range",
        KsStatus::Panic => c"internal panic",
    };
    s.as_ptr()
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ks_params_new(a: f64, out: *mut *mut KsParams) -> KsStatus {
    guard(|| match KerrParams::new(a) {
        Ok(p) => put(out, Box::into_raw(Box::new(KsParams(p)))),
        Err(e) => kerr_fail(e),
    })
}

/// # Safety
/// `p` must come from `ks_params_new` and not have been freed; NULL is a no-op.
#[no_mangle]
pub unsafe extern "C" fn ks_params_free(p: *mut KsParams) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Outer horizon radius.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ks_params_horizon(p: *const KsParams, out: *mut f64) -> KsStatus {
    guard(|| put(out, deref!(p).0.horizon()))
}

/// Radii of the prograde and retrograde equatorial photon orbits.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ks_photon_ring_radii(p: *const KsParams, r1: *mut f64, r2: *mut f64) -> KsStatus {
    guard(|| {
        let (a, b) = bifurcation::photon_ring_radii(&deref!(p).0);
        match put(r1, a) {
            KsStatus::Ok => put(r2, b),
            s => s,
        }
    })
}

/// `(λ, η)` of the spherical photon orbit at radius `r_c`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ks_critical_point(
    p: *const KsParams,
    r_c: f64,
    lambda: *mut f64,
    eta: *mut f64,
) -> KsStatus {
    guard(|| match bifurcation::sigma_r(r_c, &deref!(p).0) {
        Ok(c) => match put(lambda, c.lambda) {
            KsStatus::Ok => put(eta, c.eta),
            s => s,
        },
        Err(e) => kerr_fail(e),
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ks_classify(
    p: *const KsParams,
    lambda: f64,
    eta: f64,
    r_start: f64,
    kind: *mut KsTrajectoryKind,
    vortical: *mut bool,
) -> KsStatus {
    guard(|| {
        let c = bifurcation::classify(lambda, eta, r_start, &deref!(p).0);
        let k = match c.kind {
            TrajectoryKind::HorizonInfinity => KsTrajectoryKind::HorizonInfinity,
            TrajectoryKind::HorizonHorizon => KsTrajectoryKind::HorizonHorizon,
            TrajectoryKind::InfinityInfinity => KsTrajectoryKind::InfinityInfinity,
            TrajectoryKind::SphericalCritical => KsTrajectoryKind::SphericalCritical,
            TrajectoryKind::Forbidden => KsTrajectoryKind::Forbidden,
        };
        match put(kind, k) {
            KsStatus::Ok => put(vortical, c.vortical),
            s => s,
        }
    })
}

/// Admissible angular-velocity interval `(Ω₋, Ω₊)` at a position.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ks_omega_bounds(
    p: *const KsParams,
    r0: f64,
    theta0: f64,
    lower: *mut f64,
    upper: *mut f64,
) -> KsStatus {
    guard(|| match observer::omega_bounds(r0, theta0, &deref!(p).0) {
        Ok((lo, hi)) => match put(lower, lo) {
            KsStatus::Ok => put(upper, hi),
            s => s,
        },
        Err(e) => kerr_fail(e),
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ks_observer_new(
    p: *const KsParams,
    r0: f64,
    theta0: f64,
    omega: f64,
    phi0: f64,
    out: *mut *mut KsObserver,
) -> KsStatus {
    guard(|| {
        let params = deref!(p).0;
        match ObserverSpec::new(r0, theta0, omega, phi0, &params) {
            Ok(spec) => put(out, Box::into_raw(Box::new(KsObserver { params, spec }))),
            Err(e) => kerr_fail(e),
        }
    })
}

/// Observer of a named family, with `φ₀ = 0`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ks_observer_named(
    p: *const KsParams,
    kind: KsObserverKind,
    r0: f64,
    theta0: f64,
    out: *mut *mut KsObserver,
) -> KsStatus {
    guard(|| {
        let params = deref!(p).0;
        let kind = match kind {
            KsObserverKind::Zamo => ObserverKind::Zamo,
            KsObserverKind::Static => ObserverKind::Static,
            KsObserverKind::Carter => ObserverKind::Carter,
        };
        match observer::named_observer(kind, r0, theta0, &params) {
            Ok(spec) => put(out, Box::into_raw(Box::new(KsObserver { params, spec }))),
            Err(e) => kerr_fail(e),
        }
    })
}

/// # Safety
/// `o` must come from `ks_observer_new`/`ks_observer_named`; NULL is a no-op.
#[no_mangle]
pub unsafe extern "C" fn ks_observer_free(o: *mut KsObserver) {
    if !o.is_null() {
        drop(Box::from_raw(o));
    }
}

/// The observer's angular velocity.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ks_observer_omega(o: *const KsObserver, out: *mut f64) -> KsStatus {
    guard(|| put(out, deref!(o).spec.omega))
}

/// Time component `u₀` of the four-velocity.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ks_observer_u0(o: *const KsObserver, out: *mut f64) -> KsStatus {
    guard(|| {
        let o = deref!(o);
        match observer::u_time_component(&o.spec, &o.params) {
            Ok(u) => put(out, u),
            Err(e) => kerr_fail(e),
        }
    })
}

/// Sample the shadow boundary with `n` radii per branch.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ks_shadow_curve_new(o: *const KsObserver, n: usize, out: *mut *mut KsShadowCurve) -> KsStatus {
    guard(|| {
        let o = deref!(o);
        if o.params.a() < bifurcation::MIN_SPIN {
            return kerr_fail(KerrError::SpinTooSmall(o.params.a(), bifurcation::MIN_SPIN));
        }
        match shadow::shadow_curve(&o.spec, &o.params, n) {
            Ok(c) => put(out, Box::into_raw(Box::new(KsShadowCurve(c)))),
            Err(e) => kerr_fail(e),
        }
    })
}

/// # Safety
/// `c` must come from `ks_shadow_curve_new`; NULL is a no-op.
#[no_mangle]
pub unsafe extern "C" fn ks_shadow_curve_free(c: *mut KsShadowCurve) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Number of samples; 0 for NULL.
///
/// # Safety
/// `c` must be NULL or valid.
#[no_mangle]
pub unsafe extern "C" fn ks_shadow_curve_len(c: *const KsShadowCurve) -> usize {
    c.as_ref().map_or(0, |c| c.0.samples.len())
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ks_shadow_curve_sample(
    c: *const KsShadowCurve,
    index: usize,
    out: *mut KsShadowSample,
) -> KsStatus {
    guard(|| {
        let c = deref!(c);
        let Some(s) = c.0.samples.get(index) else {
            return fail(KsStatus::OutOfRange, format!("sample {index} of {}", c.0.samples.len()));
        };
        put(out, KsShadowSample { r_c: s.r_c, alpha: s.alpha, beta: s.beta, x: s.x, y: s.y, case_tag: s.case.tag() })
    })
}

/// Ray-trace a `width × height` image of the plane window
/// `[-extent, extent]²` with the default scene and integrator settings.
/// `workers = 0` uses all cores; the result does not depend on it.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ks_render(
    o: *const KsObserver,
    width: usize,
    height: usize,
    extent: f64,
    workers: usize,
    flat: bool,
    out: *mut *mut KsImage,
) -> KsStatus {
    guard(|| {
        let o = deref!(o);
        let plane = ImagePlane { width, height, extent };
        let options = RenderOptions { workers, flat };
        match raytracer::render(
            &o.spec,
            &SceneConfig::default(),
            &plane,
            &o.params,
            &IntegratorControls::default(),
            options,
        ) {
            Ok(r) => put(out, Box::into_raw(Box::new(KsImage(r)))),
            Err(e) => kerr_fail(e),
        }
    })
}

/// # Safety
/// `img` must come from `ks_render`; NULL is a no-op.
#[no_mangle]
pub unsafe extern "C" fn ks_image_free(img: *mut KsImage) {
    if !img.is_null() {
        drop(Box::from_raw(img));
    }
}

/// Width, height and a borrowed pointer to `3·width·height` RGB bytes,
/// row-major from the top-left. The pointer lives as long as the handle.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ks_image_pixels(
    img: *const KsImage,
    width: *mut usize,
    height: *mut usize,
    data: *mut *const u8,
) -> KsStatus {
    guard(|| {
        let i = &deref!(img).0.image;
        for s in [put(width, i.width), put(height, i.height), put(data, i.data.as_ptr())] {
            if s != KsStatus::Ok {
                return s;
            }
        }
        KsStatus::Ok
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ks_image_stats(img: *const KsImage, out: *mut KsRenderStats) -> KsStatus {
    guard(|| {
        let s = deref!(img).0.stats;
        put(
            out,
            KsRenderStats {
                pixels: s.pixels,
                horizon: s.horizon,
                escaped: s.escaped,
                trapped: s.trapped,
                degenerate: s.degenerate,
                failed: s.failed,
            },
        )
    })
}

/// Write the image as binary PPM to a UTF-8 path.
///
/// # Safety
/// `img` must be valid and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ks_image_write_ppm(img: *const KsImage, path: *const c_char) -> KsStatus {
    guard(|| {
        let img = deref!(img);
        if path.is_null() {
            return fail(KsStatus::NullPointer, "path is null");
        }
        let Ok(path) = CStr::from_ptr(path).to_str() else {
            return fail(KsStatus::Io, "path is not valid UTF-8");
        };
        let written = std::fs::File::create(path).and_then(|f| {
            let mut w = std::io::BufWriter::new(f);
            raytracer::write_ppm(&mut w, &img.0.image)?;
            std::io::Write::flush(&mut w)
        });
        match written {
            Ok(()) => KsStatus::Ok,
            Err(e) => fail(KsStatus::Io, format!("{path}: {e}")),
        }
    })
}
