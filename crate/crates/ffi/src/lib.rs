//! C ABI for the `udw` library.
//!
//! Every fallible call returns a [`UdwStatus`]. On failure the message is
//! available from [`udw_last_error_message`] on the same thread. Handles are
//! opaque and must be released with [`udw_detector_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use udw::rates::{rate_analytic_vacuum, rate_quadrature_gaussian, Method, RateResult};
use udw::specfun::{bessel_k1_scaled, ell, hyp_u, EllArgs};
use udw::states::GaussianState;
use udw::templates::{template, template_oracle, template_sweep, TemplateQuery};
use udw::{Coupling, DetectorParams, Error, Medium, TemplateModel};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UdwStatus {
    Ok = 0,
    Domain = 1,
    Invalid = 2,
    Precondition = 3,
    NonConvergence = 4,
    NullPointer = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UdwModel {
    RelFirst = 0,
    RelSecondCorrected = 1,
    RelSecondRaw = 2,
    SemiRel = 3,
    NonRel = 4,
    Classical = 5,
}

impl From<UdwModel> for TemplateModel {
    fn from(m: UdwModel) -> Self {
        match m {
            UdwModel::RelFirst => TemplateModel::RelFirst,
            UdwModel::RelSecondCorrected => TemplateModel::RelSecondCorrected,
            UdwModel::RelSecondRaw => TemplateModel::RelSecondRaw,
            UdwModel::SemiRel => TemplateModel::SemiRel,
            UdwModel::NonRel => TemplateModel::NonRel,
            UdwModel::Classical => TemplateModel::Classical,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UdwMethod {
    Quadrature = 0,
    AnalyticVacuum = 1,
    Expansion = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UdwRateResult {
    pub rate: f64,
    pub abs_error_estimate: f64,
    pub method: UdwMethod,
}

impl From<RateResult> for UdwRateResult {
    fn from(r: RateResult) -> Self {
        Self {
            rate: r.rate,
            abs_error_estimate: r.abs_error_estimate,
            method: match r.method {
                Method::Quadrature => UdwMethod::Quadrature,
                Method::AnalyticVacuum => UdwMethod::AnalyticVacuum,
                Method::Expansion => UdwMethod::Expansion,
            },
        }
    }
}

/// A detector (rest mass, gap) in a medium with field speed ν.
pub struct UdwDetector {
    params: DetectorParams,
    medium: Medium,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> UdwStatus {
    match e.root() {
        Error::Domain(_) => UdwStatus::Domain,
        Error::Invalid(_) => UdwStatus::Invalid,
        Error::Precondition(_) => UdwStatus::Precondition,
        Error::NonConvergence { .. } => UdwStatus::NonConvergence,
        Error::AtGridPoint { .. } => UdwStatus::Domain,
    }
}

fn guard(f: impl FnOnce() -> Result<(), UdwStatus>) -> UdwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => UdwStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            UdwStatus::Panic
        }
    }
}

fn lift<T>(r: udw::Result<T>) -> Result<T, UdwStatus> {
    r.map_err(|e| {
        set_error(&e.to_string());
        status_of(&e)
    })
}

fn null() -> UdwStatus {
    set_error("null pointer argument");
    UdwStatus::NullPointer
}

unsafe fn detector<'a>(d: *const UdwDetector) -> Result<&'a UdwDetector, UdwStatus> {
    d.as_ref().ok_or_else(null)
}

unsafe fn write<T>(out: *mut T, v: T) -> Result<(), UdwStatus> {
    if out.is_null() {
        return Err(null());
    }
    out.write(v);
    Ok(())
}

/// Creates a validated detector. `*out` receives the handle.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn udw_detector_new(
    rest_mass: f64,
    gap: f64,
    nu: f64,
    out: *mut *mut UdwDetector,
) -> UdwStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let params = DetectorParams::new(rest_mass, gap);
        let medium = Medium::new(nu);
        lift(udw::physkit::validate(&params, &medium).into_result())?;
        out.write(Box::into_raw(Box::new(UdwDetector { params, medium })));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `d` must be null or a handle from [`udw_detector_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn udw_detector_free(d: *mut UdwDetector) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Closed-form template 𝒯(p).
///
/// # Safety
/// `d` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn udw_template(
    d: *const UdwDetector,
    model: UdwModel,
    p: f64,
    out: *mut f64,
) -> UdwStatus {
    guard(|| {
        let d = detector(d)?;
        let v = lift(template(&TemplateQuery::new(
            model.into(),
            d.params,
            d.medium,
            p,
        )))?;
        write(out, v)
    })
}

/// Template from the delta-resolved integral oracle.
///
/// # Safety
/// `d` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn udw_template_oracle(
    d: *const UdwDetector,
    model: UdwModel,
    p: f64,
    out: *mut f64,
) -> UdwStatus {
    guard(|| {
        let d = detector(d)?;
        let v = lift(template_oracle(&TemplateQuery::new(
            model.into(),
            d.params,
            d.medium,
            p,
        )))?;
        write(out, v)
    })
}

/// Templates over `n` strictly increasing momenta, written to `out[0..n]`.
///
/// # Safety
/// `p_grid` must be valid for `n` reads and `out` for `n` writes.
#[no_mangle]
pub unsafe extern "C" fn udw_template_sweep(
    d: *const UdwDetector,
    model: UdwModel,
    p_grid: *const f64,
    n: usize,
    out: *mut f64,
) -> UdwStatus {
    guard(|| {
        let d = detector(d)?;
        if n == 0 {
            return Ok(());
        }
        if p_grid.is_null() || out.is_null() {
            return Err(null());
        }
        let grid = std::slice::from_raw_parts(p_grid, n);
        let vals = lift(template_sweep(model.into(), &d.params, &d.medium, grid))?;
        let dst = std::slice::from_raw_parts_mut(out, n);
        for (o, (_, t)) in dst.iter_mut().zip(vals) {
            *o = t;
        }
        Ok(())
    })
}

/// Rate for a Gaussian state by adaptive quadrature.
///
/// # Safety
/// `d` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn udw_rate_quadrature(
    d: *const UdwDetector,
    model: UdwModel,
    width_l: f64,
    mean_momentum: f64,
    lambda: f64,
    rel_tol: f64,
    out: *mut UdwRateResult,
) -> UdwStatus {
    guard(|| {
        let d = detector(d)?;
        let state = lift(GaussianState::new(width_l, mean_momentum))?;
        let c = Coupling {
            lambda_first: lambda,
        };
        let r = lift(rate_quadrature_gaussian(
            model.into(),
            &d.params,
            &d.medium,
            &state,
            &c,
            rel_tol,
        ))?;
        write(out, r.into())
    })
}

/// Closed-form vacuum rate for a Gaussian state at rest.
///
/// # Safety
/// `d` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn udw_rate_analytic_vacuum(
    d: *const UdwDetector,
    model: UdwModel,
    width_l: f64,
    lambda: f64,
    out: *mut UdwRateResult,
) -> UdwStatus {
    guard(|| {
        let d = detector(d)?;
        let state = lift(GaussianState::at_rest(width_l))?;
        let c = Coupling {
            lambda_first: lambda,
        };
        let r = lift(rate_analytic_vacuum(
            model.into(),
            &d.params,
            &d.medium,
            &state,
            &c,
        ))?;
        write(out, r.into())
    })
}

/// Position-state overlap M·K₁(Mr)/((2π)²r).
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn udw_overlap_kernel(mass: f64, r: f64, out: *mut f64) -> UdwStatus {
    guard(|| {
        let v = lift(udw::localization::overlap_kernel(
            &udw::localization::OverlapQuery::new(mass, r),
        ))?;
        write(out, v)
    })
}

/// ℓ(a, b, c) with `c2 = c²`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn udw_ell(a: f64, b: f64, c2: f64, out: *mut f64) -> UdwStatus {
    guard(|| {
        let v = lift(ell(EllArgs::new(a, b, c2)))?;
        write(out, v)
    })
}

/// eˣK₁(x).
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn udw_bessel_k1_scaled(x: f64, out: *mut f64) -> UdwStatus {
    guard(|| {
        let v = lift(bessel_k1_scaled(x))?;
        write(out, v)
    })
}

/// Tricomi U(a, b, z).
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn udw_hyp_u(a: f64, b: f64, z: f64, out: *mut f64) -> UdwStatus {
    guard(|| {
        let v = lift(hyp_u(a, b, z))?;
        write(out, v)
    })
}

/// The last error message on this thread. Valid until the next failing call
/// on the same thread; never null.
#[no_mangle]
pub extern "C" fn udw_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// The library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn udw_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}
