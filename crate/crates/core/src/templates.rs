//! Template functions 𝒯(p) for every center-of-mass model, and a brute-force
//! oracle that resolves the energy delta in the emission integral numerically.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::physkit::{validate, DetectorParams, Medium, TemplateModel};
use crate::quad::Integrator;
use crate::specfun::{ell, EllArgs};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TemplateQuery {
    pub model: TemplateModel,
    pub params: DetectorParams,
    pub medium: Medium,
    pub p: f64,
}

impl TemplateQuery {
    pub const fn new(model: TemplateModel, params: DetectorParams, medium: Medium, p: f64) -> Self {
        Self {
            model,
            params,
            medium,
            p,
        }
    }

    fn check(&self) -> Result<()> {
        validate(&self.params, &self.medium).into_result()?;
        if !(self.p >= 0.0) || !self.p.is_finite() {
            return Err(Error::Domain(format!(
                "{}: momentum must be finite and ≥ 0, got {}",
                self.model, self.p
            )));
        }
        Ok(())
    }
}

/// Evaluates 𝒯(p) in closed form.
pub fn template(q: &TemplateQuery) -> Result<f64> {
    q.check()?;
    let TemplateQuery {
        model,
        params,
        medium,
        p,
    } = *q;
    let t = match model {
        TemplateModel::Classical => params.gap / medium.nu,
        TemplateModel::RelFirst
        | TemplateModel::RelSecondRaw
        | TemplateModel::RelSecondCorrected => {
            if medium.is_vacuum() {
                relativistic_vacuum(model, &params, p)
            } else {
                relativistic(model, &params, medium.nu, p)
            }
        }
        TemplateModel::SemiRel => {
            let mg = params.ground_mass();
            let eta = params.gap / params.excited_mass();
            let b = mg * medium.nu;
            contracted(
                p,
                b,
                mg * params.gap,
                eta,
                mg * medium.nu * medium.nu * params.gap,
            )
        }
        TemplateModel::NonRel => {
            let m = params.rest_mass;
            contracted(p, m * medium.nu, m * params.gap, 0.0, 0.0)
        }
    };
    if t.is_finite() && t >= 0.0 {
        Ok(t)
    } else {
        Err(Error::Domain(format!(
            "{model}: template evaluated to {t} at p={p}, {params:?}, {medium:?}"
        )))
    }
}

fn relativistic_vacuum(model: TemplateModel, params: &DetectorParams, p: f64) -> f64 {
    let me = params.excited_mass();
    let me2 = me * me;
    let ee = params.excited_energy(p);
    match model {
        TemplateModel::RelFirst => 0.25 * params.mass_quartic_gap() / (me2 * me2) * ee,
        TemplateModel::RelSecondRaw => 0.125 * params.mass_sq_gap() / me2 / ee,
        _ => 0.25 * params.mass_quartic_gap() / me2 / ee,
    }
}

/// Emission window `[k_lo, k_hi]` in the emitted wavenumber and its width over `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelWindow {
    pub k_lo: f64,
    pub k_hi: f64,
    pub width_over_p: f64,
    pub excited_energy: f64,
}

/// The window is bounded by the positive roots of `εk² + 2B±k − Δ = 0` with
/// `B± = νE_e ± p`. Every difference that could cancel is rewritten, so the
/// result is smooth down to `ε = 0` and `p = 0`.
pub fn relativistic_window(params: &DetectorParams, nu: f64, p: f64) -> RelWindow {
    let eps = (1.0 - nu) * (1.0 + nu);
    let delta = params.mass_sq_gap();
    let me = params.excited_mass();
    let ee = params.excited_energy(p);
    let bp = nu * ee + p;
    let bm = (nu * nu * me * me - eps * p * p) / bp;
    let rp = (bp * bp + eps * delta).sqrt();
    let rm = (bm * bm + eps * delta).sqrt();
    let k_lo = delta / (bp + rp);
    let (k_hi, width_over_p) = if bm >= 0.0 {
        let k_hi = delta / (bm + rm);
        let w = delta * (2.0 + 4.0 * nu * ee / (rp + rm)) / ((bm + rm) * (bp + rp));
        (k_hi, w)
    } else {
        let k_hi = (rm - bm) / eps;
        (k_hi, (k_hi - k_lo) / p)
    };
    RelWindow {
        k_lo,
        k_hi,
        width_over_p,
        excited_energy: ee,
    }
}

fn relativistic(model: TemplateModel, params: &DetectorParams, nu: f64, p: f64) -> f64 {
    let w = relativistic_window(params, nu, p);
    let ee = w.excited_energy;
    match model {
        TemplateModel::RelFirst => {
            let mg = params.ground_mass();
            // E_g is linear in k across the window; its mean is the endpoint average.
            let eg_mean = 0.5 * ((w.k_hi - p).hypot(mg) + (w.k_lo + p).hypot(mg));
            0.5 * nu * w.width_over_p * eg_mean
        }
        TemplateModel::RelSecondRaw => nu * w.width_over_p / (8.0 * ee),
        _ => params.mass_sq_sum() * nu * w.width_over_p / (4.0 * ee),
    }
}

// Contracted dispersions: 𝒯 = b(R₊ + R₋ − 2b)/(R₊ + R₋) while c² ≥ 0 and
// bR₋/p beyond the kink, with c² = 2M_gE − ηp² and b = M_gν.
// `floor` is the minimum over p of R₋², i.e. 2M_gE − b²η/(1−η).
fn contracted(p: f64, b: f64, mg_e: f64, eta: f64, shift: f64) -> f64 {
    let c2 = 2.0 * mg_e - eta * p * p;
    let one_m_eta = 1.0 - eta;
    let floor = 2.0 * mg_e - shift;
    let rp = (one_m_eta * p * p + 2.0 * p * b + b * b + 2.0 * mg_e).sqrt();
    let dm = p - b / one_m_eta;
    let rm = (one_m_eta * dm * dm + floor).sqrt();
    if c2 >= 0.0 {
        let x = if b >= p {
            c2 / (rm + b - p)
        } else {
            rm + p - b
        };
        b * (c2 / (rp + b + p) + x) / (rp + rm)
    } else {
        b * rm / p
    }
}

/// Momentum where the semi-relativistic template has a kink (`c² = 0`).
pub fn semi_rel_kink(params: &DetectorParams) -> f64 {
    (2.0 * params.ground_mass() * params.excited_mass()).sqrt()
}

/// Points where 𝒯 is not smooth, for seeding quadrature panels.
pub fn template_breakpoints(model: TemplateModel, params: &DetectorParams) -> Vec<f64> {
    match model {
        TemplateModel::SemiRel => vec![semi_rel_kink(params)],
        _ => Vec::new(),
    }
}

/// The ℓ-based forms, valid for `ν < 1` and `p > 0`. Used to cross-check
/// [`template`] away from its delicate limits.
pub fn template_via_ell(q: &TemplateQuery) -> Result<f64> {
    q.check()?;
    let TemplateQuery {
        model,
        params,
        medium,
        p,
    } = *q;
    let nu = medium.nu;
    if p == 0.0 {
        return Err(Error::Precondition("template_via_ell needs p > 0".into()));
    }
    let mg = params.ground_mass();
    let v = match model {
        TemplateModel::Classical => params.gap / nu,
        TemplateModel::RelFirst
        | TemplateModel::RelSecondRaw
        | TemplateModel::RelSecondCorrected => {
            if medium.is_vacuum() {
                return Err(Error::Precondition("template_via_ell needs ν < 1".into()));
            }
            let eps = medium.epsilon();
            let ee = params.excited_energy(p);
            let l = ell(EllArgs::new(nu * p, ee, -mg * mg * eps))?;
            match model {
                TemplateModel::RelFirst => {
                    nu / (eps * eps) * ((1.0 + nu * nu) * ee - ee / p * l - nu * nu * p * ee / l)
                }
                TemplateModel::RelSecondRaw => nu * (p - l) / (4.0 * eps * p * ee),
                _ => nu * params.mass_sq_sum() * (p - l) / (2.0 * eps * p * ee),
            }
        }
        TemplateModel::SemiRel => {
            let b = mg * nu;
            let c2 = 2.0 * mg * params.gap - p * p * (1.0 - mg / params.excited_mass());
            if c2 >= 0.0 {
                b / p * (p - ell(EllArgs::new(p, b, c2))?)
            } else {
                b * ((p - b) * (p - b) + c2).sqrt() / p
            }
        }
        TemplateModel::NonRel => {
            let b = params.rest_mass * nu;
            b / p * (p - ell(EllArgs::new(p, b, 2.0 * params.rest_mass * params.gap))?)
        }
    };
    Ok(v)
}

#[derive(Debug, Clone, Copy)]
enum Dispersion {
    Relativistic(f64),
    Galilean(f64),
}

impl Dispersion {
    fn mass(self) -> f64 {
        match self {
            Dispersion::Relativistic(m) | Dispersion::Galilean(m) => m,
        }
    }

    fn kinetic(self, q2: f64) -> f64 {
        match self {
            Dispersion::Relativistic(m) => q2 / ((q2 + m * m).sqrt() + m),
            Dispersion::Galilean(m) => q2 / (2.0 * m),
        }
    }

    fn q2_from_kinetic(self, t: f64) -> f64 {
        match self {
            Dispersion::Relativistic(m) => t * (t + 2.0 * m),
            Dispersion::Galilean(m) => 2.0 * m * t,
        }
    }

    /// dE/d(q²) at kinetic energy t.
    fn slope(self, t: f64) -> f64 {
        match self {
            Dispersion::Relativistic(m) => 0.5 / (m + t),
            Dispersion::Galilean(m) => 0.5 / m,
        }
    }
}

/// Re-derives 𝒯(p) by resolving the energy delta in the d³k integral.
///
/// Integration tolerance 1e-12; window edges are located by bisection to
/// machine resolution.
pub fn template_oracle(q: &TemplateQuery) -> Result<f64> {
    q.check()?;
    let TemplateQuery {
        model,
        params,
        medium,
        p,
    } = *q;
    let (exc, gnd, second) = match model {
        TemplateModel::RelFirst => (
            Dispersion::Relativistic(params.excited_mass()),
            Dispersion::Relativistic(params.ground_mass()),
            false,
        ),
        TemplateModel::RelSecondRaw | TemplateModel::RelSecondCorrected => (
            Dispersion::Relativistic(params.excited_mass()),
            Dispersion::Relativistic(params.ground_mass()),
            true,
        ),
        TemplateModel::SemiRel => (
            Dispersion::Galilean(params.excited_mass()),
            Dispersion::Galilean(params.ground_mass()),
            false,
        ),
        TemplateModel::NonRel => (
            Dispersion::Galilean(params.rest_mass),
            Dispersion::Galilean(params.rest_mass),
            false,
        ),
        TemplateModel::Classical => {
            return Err(Error::Precondition(
                "the oracle does not cover the classical model".into(),
            ))
        }
    };
    let nu = medium.nu;
    let t_avail = params.gap + exc.kinetic(p * p);
    let k_max = t_avail / nu;
    let q2 = |k: f64| gnd.q2_from_kinetic(t_avail - nu * k);
    let f_e2 = if second {
        2.0 * (exc.mass() + exc.kinetic(p * p))
    } else {
        1.0
    };
    let weight = |k: f64| {
        let t = t_avail - nu * k;
        let f_g2 = if second { 2.0 * (gnd.mass() + t) } else { 1.0 };
        1.0 / (gnd.slope(t) * f_g2)
    };
    let scale = if model == TemplateModel::RelSecondCorrected {
        2.0 * params.mass_sq_sum()
    } else {
        1.0
    };

    if p == 0.0 {
        // Photon and recoil momenta coincide: solve q²(k) = k².
        let k_star = bisect(|k| q2(k) - k * k, 0.0, k_max);
        let t = t_avail - nu * k_star;
        let f_g2 = if second { 2.0 * (gnd.mass() + t) } else { 1.0 };
        let de_dk = 2.0 * k_star * gnd.slope(t);
        return Ok(scale * nu * k_star / (f_e2 * f_g2 * (de_dk + nu)));
    }

    let cos_star = |k: f64| (k * k + p * p - q2(k)) / (2.0 * k * p);
    let windows = allowed_windows(cos_star, k_max);
    let integ = Integrator::new(0.0, 1e-12);
    let mut total = 0.0;
    for (lo, hi) in windows {
        let est = integ
            .integrate(weight, lo, hi)
            .map_err(|e| Error::NonConvergence {
                context: format!("{model} oracle at p={p}"),
                best: e.best.value,
                abs_error: e.best.abs_error,
                rel_tol: 1e-12,
            })?;
        total += est.value;
    }
    Ok(scale * nu / (4.0 * p * f_e2) * total)
}

// Root of a sign-changing function on [a, b] by bisection to adjacent floats.
fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let fa_pos = f(a) > 0.0;
    for _ in 0..2000 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if (f(m) > 0.0) == fa_pos {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

// Sub-intervals of (0, k_max] where |cos θ*| ≤ 1. cos θ*(k) is quasi-convex,
// so it is located by golden-section search on log k and each monotone branch
// is bisected for its ±1 crossings.
fn allowed_windows<F: Fn(f64) -> f64>(c: F, k_max: f64) -> Vec<(f64, f64)> {
    let lo_edge = k_max * 1e-200;
    let (mut a, mut b) = (lo_edge.ln(), k_max.ln());
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let cl = |x: f64| c(x.exp());
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (cl(x1), cl(x2));
    for _ in 0..400 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = cl(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = cl(x2);
        }
        if b - a < 1e-15 * a.abs().max(1.0) {
            break;
        }
    }
    let k_min = (0.5 * (a + b)).exp().clamp(lo_edge, k_max);
    let c_min = c(k_min);
    let mut out = Vec::new();
    if c_min > 1.0 {
        return out;
    }
    // Increasing branch.
    let hi = if c(k_max) >= 1.0 {
        bisect(|k| c(k) - 1.0, k_min, k_max)
    } else {
        k_max
    };
    let lo = if c_min < -1.0 {
        bisect(|k| c(k) + 1.0, k_min, hi)
    } else {
        k_min
    };
    if hi > lo {
        out.push((lo, hi));
    }
    // Decreasing branch, present when cos θ* → +∞ as k → 0.
    if k_min > lo_edge * 1.0001 && c(lo_edge) > 1.0 {
        let left_lo = bisect(|k| c(k) - 1.0, lo_edge, k_min);
        let left_hi = if c_min < -1.0 {
            bisect(|k| c(k) + 1.0, left_lo, k_min)
        } else {
            k_min
        };
        if let Some(last) = out.first_mut() {
            if (last.0 - left_hi).abs() <= f64::EPSILON * k_min {
                last.0 = left_lo;
                return out;
            }
        }
        if left_hi > left_lo {
            out.insert(0, (left_lo, left_hi));
        }
    }
    out
}

/// Pointwise [`template`] over an increasing grid, evaluated in parallel.
pub fn template_sweep(
    model: TemplateModel,
    params: &DetectorParams,
    medium: &Medium,
    p_grid: &[f64],
) -> Result<Vec<(f64, f64)>> {
    check_grid(p_grid)?;
    let vals: Vec<Result<f64>> = p_grid
        .par_iter()
        .map(|&p| template(&TemplateQuery::new(model, *params, *medium, p)))
        .collect();
    p_grid
        .iter()
        .zip(vals)
        .enumerate()
        .map(|(index, (&p, v))| {
            v.map(|t| (p, t)).map_err(|e| Error::AtGridPoint {
                index,
                value: p,
                source: Box::new(e),
            })
        })
        .collect()
}

fn check_grid(grid: &[f64]) -> Result<()> {
    for (i, &p) in grid.iter().enumerate() {
        if !(p >= 0.0) || !p.is_finite() {
            return Err(Error::Domain(format!(
                "grid point {i} is {p}; momenta must be finite and ≥ 0"
            )));
        }
        if i > 0 && p <= grid[i - 1] {
            return Err(Error::Domain(format!(
                "grid is not strictly increasing at index {i}"
            )));
        }
    }
    Ok(())
}

/// Interior local maxima of 𝒯 over the grid, refined by golden-section search.
pub fn find_interior_maxima(
    model: TemplateModel,
    params: &DetectorParams,
    medium: &Medium,
    p_grid: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let vals = template_sweep(model, params, medium, p_grid)?;
    let f = |p: f64| template(&TemplateQuery::new(model, *params, *medium, p));
    let mut out = Vec::new();
    for i in 1..vals.len().saturating_sub(1) {
        if vals[i].1 > vals[i - 1].1 && vals[i].1 >= vals[i + 1].1 {
            let (mut a, mut b) = (vals[i - 1].0, vals[i + 1].0);
            let g = 0.5 * (5f64.sqrt() - 1.0);
            for _ in 0..200 {
                let x1 = b - g * (b - a);
                let x2 = a + g * (b - a);
                if f(x1)? >= f(x2)? {
                    b = x2;
                } else {
                    a = x1;
                }
                if b - a <= 1e-12 * b {
                    break;
                }
            }
            let p = 0.5 * (a + b);
            out.push((p, f(p)?));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(model: TemplateModel, e: f64, nu: f64, p: f64) -> TemplateQuery {
        TemplateQuery::new(model, DetectorParams::compton(e), Medium::new(nu), p)
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn classical_is_gap_over_nu() {
        let v = template(&q(TemplateModel::Classical, 0.001, 0.5, 3.0)).unwrap();
        assert!((v - 0.002).abs() < 1e-18);
    }

    #[test]
    fn rel_first_vacuum_at_rest() {
        let v = template(&q(TemplateModel::RelFirst, 0.001, 1.0, 0.0)).unwrap();
        let expect = 0.25 * (1.0 - 1.0 / 1.001f64.powi(4)) * 1.001;
        assert!(rel(v, expect) < 1e-12);
        assert!((v - 9.98e-4).abs() < 1e-6);
    }

    #[test]
    fn general_path_meets_vacuum_closed_form() {
        for model in [
            TemplateModel::RelFirst,
            TemplateModel::RelSecondRaw,
            TemplateModel::RelSecondCorrected,
        ] {
            for p in [0.0, 1e-3, 1.0, 10.0, 1e3] {
                let a = template(&q(model, 0.01, 1.0, p)).unwrap();
                let b = template(&q(model, 0.01, 1.0 - 1e-12, p)).unwrap();
                let c = relativistic(model, &DetectorParams::compton(0.01), 1.0, p);
                // 𝒯 is steep in ν at large p, so only the exact-ν=1 path is compared there.
                if p <= 10.0 {
                    assert!(rel(b, a) < 1e-8, "{model} p={p}");
                }
                assert!(rel(c, a) < 1e-13, "{model} p={p}: {c} vs {a}");
            }
        }
    }

    #[test]
    fn stable_form_matches_ell_form_at_moderate_epsilon() {
        let nu = (1.0f64 - 1e-3).sqrt();
        for model in [
            TemplateModel::RelFirst,
            TemplateModel::RelSecondRaw,
            TemplateModel::RelSecondCorrected,
        ] {
            for p in [0.01, 0.5, 2.0] {
                let a = template(&q(model, 0.1, nu, p)).unwrap();
                let b = template_via_ell(&q(model, 0.1, nu, p)).unwrap();
                assert!(rel(a, b) < 1e-8, "{model} p={p}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn p_zero_is_the_limit() {
        for model in [
            TemplateModel::RelFirst,
            TemplateModel::RelSecondCorrected,
            TemplateModel::SemiRel,
            TemplateModel::NonRel,
        ] {
            let t0 = template(&q(model, 0.01, 0.7, 0.0)).unwrap();
            let mut prev = f64::INFINITY;
            for k in 2..=8 {
                let d = rel(template(&q(model, 0.01, 0.7, 10f64.powi(-k))).unwrap(), t0);
                assert!(d <= prev || d < 1e-14, "{model} k={k}");
                prev = d;
            }
            assert!(prev < 1e-12, "{model}");
        }
    }

    #[test]
    fn oracle_root_matches_closed_root() {
        let params = DetectorParams::compton(0.3);
        for nu in [0.1, 0.6, 1.0] {
            let (me, mg) = (params.excited_mass(), params.ground_mass());
            let eps = (1.0 - nu) * (1.0 + nu);
            let k_closed = if nu == 1.0 {
                (me * me - mg * mg) / (2.0 * me)
            } else {
                (-nu * me + (me * me - eps * mg * mg).sqrt()) / eps
            };
            let g = Dispersion::Relativistic(mg);
            let k = bisect(|k| g.q2_from_kinetic(0.3 - nu * k) - k * k, 0.0, 0.3 / nu);
            assert!(rel(k, k_closed) < 1e-12, "nu={nu}");
        }
    }

    #[test]
    fn oracle_examples() {
        let cases = [
            (TemplateModel::RelFirst, 0.001, 1.0, 0.0),
            (TemplateModel::RelFirst, 0.001, 0.9, 1.0),
            (TemplateModel::SemiRel, 0.001, 0.1, 0.05),
            (TemplateModel::SemiRel, 10.0, 0.1, 8.0),
            (TemplateModel::NonRel, 0.5, 0.5, 0.0),
            (TemplateModel::RelSecondCorrected, 1.0, 0.3, 30.0),
        ];
        for (m, e, nu, p) in cases {
            let a = template(&q(m, e, nu, p)).unwrap();
            let b = template_oracle(&q(m, e, nu, p)).unwrap();
            assert!(rel(a, b) < 1e-8, "{m} E={e} nu={nu} p={p}: {a} vs {b}");
        }
    }

    #[test]
    fn coupling_match_needs_vacuum() {
        let params = DetectorParams::compton(0.2);
        let a = template(&TemplateQuery::new(
            TemplateModel::RelFirst,
            params,
            Medium::vacuum(),
            0.0,
        ))
        .unwrap();
        let b = template(&TemplateQuery::new(
            TemplateModel::RelSecondCorrected,
            params,
            Medium::vacuum(),
            0.0,
        ))
        .unwrap();
        assert!(rel(a, b) < 1e-12);
        // In a medium the ratio is 2M_e(M_e − νk*)/(M_g² + M_e²).
        let nu = 0.5;
        let medium = Medium::new(nu);
        let a = template(&TemplateQuery::new(
            TemplateModel::RelFirst,
            params,
            medium,
            0.0,
        ))
        .unwrap();
        let b = template(&TemplateQuery::new(
            TemplateModel::RelSecondCorrected,
            params,
            medium,
            0.0,
        ))
        .unwrap();
        let w = relativistic_window(&params, nu, 0.0);
        let me = params.excited_mass();
        let ratio = 2.0 * me * (me - nu * w.k_lo) / params.mass_sq_sum();
        assert!(rel(a / b, ratio) < 1e-12);
        assert!((a / b - 1.0).abs() > 1e-3);
    }

    #[test]
    fn semi_rel_kink_is_continuous() {
        let params = DetectorParams::compton(2.0);
        let pk = semi_rel_kink(&params);
        let medium = Medium::new(0.4);
        let f = |p| {
            template(&TemplateQuery::new(
                TemplateModel::SemiRel,
                params,
                medium,
                p,
            ))
            .unwrap()
        };
        assert!(rel(f(pk * (1.0 - 1e-12)), f(pk * (1.0 + 1e-12))) < 1e-9);
    }

    #[test]
    fn sweep_examples() {
        let params = DetectorParams::compton(0.001);
        let out = template_sweep(
            TemplateModel::Classical,
            &params,
            &Medium::vacuum(),
            &[0.0, 1.0, 2.0],
        )
        .unwrap();
        assert_eq!(out, vec![(0.0, 0.001), (1.0, 0.001), (2.0, 0.001)]);
        assert!(
            template_sweep(TemplateModel::RelFirst, &params, &Medium::vacuum(), &[])
                .unwrap()
                .is_empty()
        );
        let grid: Vec<f64> = (0..1000)
            .map(|i| 10f64.powf(-3.0 + 4.0 * i as f64 / 999.0))
            .collect();
        let out =
            template_sweep(TemplateModel::RelFirst, &params, &Medium::vacuum(), &grid).unwrap();
        assert!(out.windows(2).all(|w| w[1].1 > w[0].1));
        let err = template_sweep(
            TemplateModel::RelFirst,
            &params,
            &Medium::vacuum(),
            &[1.0, 0.5],
        )
        .unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
        let err = template_sweep(
            TemplateModel::RelFirst,
            &DetectorParams::compton(-1.0),
            &Medium::vacuum(),
            &[1.0, 2.0],
        )
        .unwrap_err();
        assert!(matches!(err, Error::AtGridPoint { index: 0, .. }));
    }
}
