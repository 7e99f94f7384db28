//! Spontaneous-emission rates Ṗ = (λ²/2π)∫d³p |ψ(p)|² 𝒯(p).

use std::cell::RefCell;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::physkit::{validate, Coupling, DetectorParams, Medium, TemplateModel};
use crate::quad::Integrator;
use crate::specfun::{bessel_k1_scaled, hyp_u};
use crate::states::{GaussianState, WeightFunction};
use crate::templates::{template, template_breakpoints, TemplateQuery};

pub const DEFAULT_REL_TOL: f64 = 1e-9;
pub const MAX_EVALS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Quadrature,
    AnalyticVacuum,
    Expansion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CouplingConvention {
    FirstQuantized,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateResult {
    pub rate: f64,
    pub abs_error_estimate: f64,
    pub model: TemplateModel,
    pub method: Method,
    pub params: DetectorParams,
    pub medium: Medium,
    /// `None` when the rate was computed for a custom weight.
    pub state: Option<GaussianState>,
    pub coupling: Coupling,
    pub convention: CouplingConvention,
}

impl RateResult {
    pub fn rel_error(&self) -> f64 {
        self.abs_error_estimate / self.rate.abs()
    }
}

/// Rate by adaptive quadrature of `w(p)·𝒯(p)` up to the state's truncation
/// radius at tail mass `rel_tol·1e-3`.
pub fn rate_quadrature<W: WeightFunction + ?Sized>(
    model: TemplateModel,
    params: &DetectorParams,
    medium: &Medium,
    state: &W,
    coupling: &Coupling,
    rel_tol: f64,
) -> Result<RateResult> {
    validate(params, medium).into_result()?;
    if !(1e-12..=1e-3).contains(&rel_tol) {
        return Err(Error::Precondition(format!(
            "rel_tol must lie in [1e-12, 1e-3], got {rel_tol}"
        )));
    }
    let p_max = state.truncation_radius(rel_tol * 1e-3);
    let mut pts = vec![0.0];
    pts.extend(state.breakpoints());
    pts.extend(template_breakpoints(model, params));
    pts.retain(|&p| (0.0..p_max).contains(&p));
    pts.push(p_max);
    pts.sort_by(f64::total_cmp);
    pts.dedup();

    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let integrand = |p: f64| {
        let w = state.weight(p);
        if w == 0.0 {
            return 0.0;
        }
        match template(&TemplateQuery::new(model, *params, *medium, p)) {
            Ok(t) => w * t,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    };
    let est = Integrator::new(0.0, rel_tol)
        .with_max_evals(MAX_EVALS)
        .integrate_with_breaks(integrand, &pts);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let pref = coupling.rate_prefactor();
    let est = est.map_err(|f| Error::NonConvergence {
        context: format!("{model} rate quadrature"),
        best: pref * f.best.value,
        abs_error: pref * f.best.abs_error,
        rel_tol,
    })?;
    Ok(RateResult {
        rate: pref * est.value,
        abs_error_estimate: pref * est.abs_error,
        model,
        method: Method::Quadrature,
        params: *params,
        medium: *medium,
        state: None,
        coupling: *coupling,
        convention: CouplingConvention::FirstQuantized,
    })
}

/// [`rate_quadrature`] for a Gaussian state, echoing the state in the result.
pub fn rate_quadrature_gaussian(
    model: TemplateModel,
    params: &DetectorParams,
    medium: &Medium,
    state: &GaussianState,
    coupling: &Coupling,
    rel_tol: f64,
) -> Result<RateResult> {
    let mut r = rate_quadrature(model, params, medium, state, coupling, rel_tol)?;
    r.state = Some(*state);
    Ok(r)
}

/// Closed-form vacuum rates for a Gaussian state at rest.
///
/// RelFirst: λ²L(M_e⁴−M_g⁴)/(8π^{3/2}√2 M_e²)·e^z K₁(z), z = L²M_e²/4.
/// RelSecondCorrected: λ²L(M_e⁴−M_g⁴)/(8π√2 M_e²)·U(½, 0, L²M_e²/2).
pub fn rate_analytic_vacuum(
    model: TemplateModel,
    params: &DetectorParams,
    medium: &Medium,
    state: &GaussianState,
    coupling: &Coupling,
) -> Result<RateResult> {
    validate(params, medium).into_result()?;
    if !medium.is_vacuum() {
        return Err(Error::Precondition(format!(
            "analytic rates need ν = 1, got {}",
            medium.nu
        )));
    }
    if state.mean_momentum != 0.0 {
        return Err(Error::Precondition(format!(
            "analytic rates need p_D = 0, got {}",
            state.mean_momentum
        )));
    }
    let l = state.width_l;
    let me = params.excited_mass();
    let lm = l * me;
    let lam2 = coupling.lambda_first * coupling.lambda_first;
    let base = lam2 * l * params.mass_quartic_gap() / (8.0 * 2f64.sqrt() * me * me);
    let rate = match model {
        TemplateModel::RelFirst => base / PI.powf(1.5) * bessel_k1_scaled(0.25 * lm * lm)?,
        TemplateModel::RelSecondCorrected => base / PI * hyp_u(0.5, 0.0, 0.5 * lm * lm)?,
        other => {
            return Err(Error::Precondition(format!(
                "no analytic vacuum rate for {other}"
            )));
        }
    };
    Ok(RateResult {
        rate,
        abs_error_estimate: 1e-12 * rate,
        model,
        method: Method::AnalyticVacuum,
        params: *params,
        medium: *medium,
        state: Some(*state),
        coupling: *coupling,
        convention: CouplingConvention::FirstQuantized,
    })
}

/// The m → 0 limit of the rate at fixed gap and fixed `L/λ_c`.
pub fn rate_limit_small_mass(
    model: TemplateModel,
    gap: f64,
    medium: &Medium,
    coupling: &Coupling,
) -> Result<f64> {
    if !(gap > 0.0) {
        return Err(Error::Domain(format!("gap must be > 0, got {gap}")));
    }
    let nu = medium.nu;
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(Error::Domain(format!("ν must lie in (0, 1], got {nu}")));
    }
    let pref = coupling.rate_prefactor();
    match model {
        TemplateModel::RelFirst => Ok(pref * gap * nu / ((1.0 + nu) * (1.0 + nu))),
        // Coincides with the first-quantized limit only at ν = 1.
        TemplateModel::RelSecondCorrected => Ok(pref * gap * nu / (2.0 * (1.0 + nu))),
        TemplateModel::SemiRel | TemplateModel::NonRel => Ok(0.0),
        other => Err(Error::Precondition(format!(
            "no small-mass limit defined for {other}"
        ))),
    }
}

/// Large-width expansion of the vacuum rates:
/// λ²(M_e⁴−M_g⁴)/(8πM_e³)·(1 ± (3/2)/(LM_e)²), `+` for RelFirst.
pub fn rate_expansion_large_l(
    model: TemplateModel,
    params: &DetectorParams,
    width_l: f64,
    order: u32,
    coupling: &Coupling,
) -> Result<f64> {
    let me = params.excited_mass();
    let lm = width_l * me;
    if !(lm > 10.0) {
        return Err(Error::Precondition(format!(
            "expansion needs L·M_e > 10, got {lm}"
        )));
    }
    if order > 2 {
        return Err(Error::Precondition(format!(
            "expansion order must be ≤ 2, got {order}"
        )));
    }
    let lam2 = coupling.lambda_first * coupling.lambda_first;
    let leading = lam2 * params.mass_quartic_gap() / (8.0 * PI * me * me * me);
    let c2 = match model {
        TemplateModel::RelFirst => 1.5,
        TemplateModel::RelSecondCorrected => -1.5,
        other => {
            return Err(Error::Precondition(format!(
                "no large-L expansion for {other}"
            )))
        }
    };
    Ok(if order == 2 {
        leading * (1.0 + c2 / (lm * lm))
    } else {
        leading
    })
}

/// 2|a − b|/(a + b).
pub fn fractional_difference(a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    2.0 * (a - b).abs() / (a + b)
}

/// Constants for the hydrogen-scale comparison.
pub mod hydrogen {
    /// Bohr radius in metres.
    pub const BOHR_RADIUS_M: f64 = 5.291_772_109_03e-11;
    /// ħc in MeV·fm.
    pub const HBAR_C_MEV_FM: f64 = 197.326_980_4;
    /// Hydrogen atom rest energy in MeV.
    pub const ATOM_REST_MEV: f64 = 938.783_066;
    /// Lyman-α transition energy in eV.
    pub const LYMAN_ALPHA_EV: f64 = 10.198_8;

    /// Reduced Compton wavelength of the atom in metres.
    pub fn compton_wavelength_m() -> f64 {
        HBAR_C_MEV_FM / ATOM_REST_MEV * 1e-15
    }

    /// Packet width in Compton units, L/λ_c = a₀·m.
    pub fn width_over_lambda_c() -> f64 {
        BOHR_RADIUS_M / compton_wavelength_m()
    }

    pub fn gap_over_m() -> f64 {
        LYMAN_ALPHA_EV * 1e-6 / ATOM_REST_MEV
    }
}
