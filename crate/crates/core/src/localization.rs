//! Overlap ⟨x|y⟩ of second-quantized position states and its Compton-scale
//! expansion against Gaussian test functions.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{wynn_epsilon, Integrator};
use crate::specfun::{bessel_k1_scaled, ln_sinh_ratio};

/// Coefficient of `λ_c²/σ²` in the smeared overlap.
pub const C2: f64 = 0.75;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlapQuery {
    pub mass: f64,
    pub r: f64,
}

impl OverlapQuery {
    pub const fn new(mass: f64, r: f64) -> Self {
        Self { mass, r }
    }

    fn check(&self) -> Result<()> {
        if !(self.mass > 0.0) || !self.mass.is_finite() {
            return Err(Error::Domain(format!(
                "overlap mass must be > 0, got {}",
                self.mass
            )));
        }
        if !(self.r > 0.0) || !self.r.is_finite() {
            return Err(Error::Domain(format!(
                "separation must be > 0, got {}",
                self.r
            )));
        }
        Ok(())
    }
}

/// ln ⟨x|y⟩, finite for all `Mr`.
pub fn ln_overlap_kernel(q: &OverlapQuery) -> Result<f64> {
    q.check()?;
    let x = q.mass * q.r;
    Ok(q.mass.ln() - (4.0 * PI * PI * q.r).ln() - x + bessel_k1_scaled(x)?.ln())
}

/// ⟨x|y⟩ = M·K₁(Mr)/((2π)²r).
pub fn overlap_kernel(q: &OverlapQuery) -> Result<f64> {
    q.check()?;
    let x = q.mass * q.r;
    if x > 700.0 {
        return Ok(ln_overlap_kernel(q)?.exp());
    }
    Ok(q.mass / (4.0 * PI * PI * q.r) * bessel_k1_scaled(x)? * (-x).exp())
}

/// Fourier-integral value of the kernel with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleValue {
    pub value: f64,
    pub abs_error: f64,
}

/// Evaluates the kernel from its defining momentum integral.
///
/// After one integration by parts the radial integral is
/// `M²/((2π)²r²)·∫₀^∞ cos(pr)/(p²+M²)^{3/2} dp`. For `Mr > 1` the contour is
/// lifted to `Im p = M − 1/r`, which removes the `e^{−Mr}` cancellation; the
/// oscillatory tail is summed over half periods with Wynn acceleration.
pub fn overlap_fourier_oracle(q: &OverlapQuery, tol: f64) -> Result<OracleValue> {
    q.check()?;
    let (m, r) = (q.mass, q.r);
    let y = if m * r > 1.0 { m - 1.0 / r } else { 0.0 };
    let f = |t: f64| {
        let z = Complex64::new(t, y);
        let h = (z * z + m * m).powf(-1.5);
        let phase = Complex64::new((t * r).cos(), (t * r).sin());
        (phase * h).re
    };
    let half = PI / r;
    let t0 = 10.0 * m.max(1.0 / r);
    let n0 = (t0 / half).ceil().max(1.0) as usize;
    let integ = Integrator::new(0.0, 1e-3 * tol);
    let mut panels: Vec<f64> = (0..=n0).map(|i| i as f64 * half).collect();
    // Resolve the peak near t = 0 explicitly when it is narrower than a half period.
    let width = (m * m - y * y).sqrt();
    if width < half {
        panels.push(width);
        panels.push(0.1 * width);
        panels.sort_by(f64::total_cmp);
    }
    let fail = |what: &str, best: f64, err: f64| Error::NonConvergence {
        context: format!("overlap Fourier oracle {what} at M={m}, r={r}"),
        best,
        abs_error: err,
        rel_tol: tol,
    };
    let core = integ
        .integrate_with_breaks(f, &panels)
        .map_err(|e| fail("core", e.best.value, e.best.abs_error))?;

    // Pieces may straddle sign changes, so they are held to an absolute target.
    let tail_integ = Integrator::new(1e-3 * tol * core.value.abs(), 1e-3 * tol);
    let mut sums = vec![core.value];
    let mut quad_err = core.abs_error;
    let mut last: Option<f64> = None;
    let mut settled = 0;
    for n in n0..n0 + 4000 {
        let a = n as f64 * half;
        let piece = tail_integ
            .integrate(f, a, a + half)
            .map_err(|e| fail("tail", e.best.value, e.best.abs_error))?;
        quad_err += piece.abs_error;
        sums.push(sums.last().unwrap() + piece.value);
        if sums.len() < 6 {
            continue;
        }
        let window = &sums[sums.len().saturating_sub(40)..];
        let (est, _) = wynn_epsilon(window).unwrap();
        if let Some(prev) = last {
            if (est - prev).abs() <= 0.1 * tol * est.abs() {
                settled += 1;
                if settled >= 3 {
                    let scale = m * m / (4.0 * PI * PI * r * r) * (-y * r).exp();
                    return Ok(OracleValue {
                        value: scale * est,
                        abs_error: scale * ((est - prev).abs() + quad_err),
                    });
                }
            } else {
                settled = 0;
            }
        }
        last = Some(est);
    }
    Err(fail("acceleration", *sums.last().unwrap(), f64::NAN))
}

/// The two sides of the smeared Compton expansion for one `σ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmearedOverlap {
    pub mass: f64,
    pub sigma: f64,
    pub order: u32,
    /// First-quantized value ∫g_σ² = 1/(8π^{3/2}σ³).
    pub first_quantized: f64,
    /// (1/2M)·first_quantized·(1 − c₂λ_c²/σ²) truncated at `order`.
    pub predicted: f64,
    /// ∫∫g_σ(x)g_σ(y)⟨x|y⟩ by quadrature.
    pub integrated: f64,
    pub c2: f64,
}

impl SmearedOverlap {
    pub fn rel_difference(&self) -> f64 {
        (self.predicted - self.integrated).abs() / self.integrated
    }
}

/// Smears the kernel against two unit-normalized Gaussians of width `σ`
/// and compares with the expansion in `λ_c/σ = 1/(Mσ)`.
pub fn compton_expansion_coefficients(mass: f64, sigma: f64, order: u32) -> Result<SmearedOverlap> {
    if !(mass > 0.0) || !(sigma > 0.0) {
        return Err(Error::Domain(format!(
            "need M > 0 and σ > 0, got M={mass}, σ={sigma}"
        )));
    }
    if !(mass * sigma >= 10.0) {
        return Err(Error::Precondition(format!(
            "expansion needs σ/λ_c ≥ 10, got {}",
            mass * sigma
        )));
    }
    if order > 2 {
        return Err(Error::Precondition(format!(
            "expansion order must be ≤ 2, got {order}"
        )));
    }
    let first = 1.0 / (8.0 * PI.powf(1.5) * sigma.powi(3));
    let x = 1.0 / (mass * sigma);
    let predicted = first / (2.0 * mass) * if order == 2 { 1.0 - C2 * x * x } else { 1.0 };
    Ok(SmearedOverlap {
        mass,
        sigma,
        order,
        first_quantized: first,
        predicted,
        integrated: smeared_overlap(mass, sigma, 0.0)?,
        c2: C2,
    })
}

/// ∫∫ g_σ(x) g_σ(y − d) ⟨x|y⟩ d³x d³y for Gaussians whose centers are `d` apart.
pub fn smeared_overlap(mass: f64, sigma: f64, separation: f64) -> Result<f64> {
    if !(mass > 0.0) || !(sigma > 0.0) || !(separation >= 0.0) {
        return Err(Error::Domain(format!(
            "need M > 0, σ > 0, d ≥ 0, got M={mass}, σ={sigma}, d={separation}"
        )));
    }
    let s2 = sigma * sigma;
    let d = separation;
    let ln_norm = -1.5 * (4.0 * PI * s2).ln();
    // 4πu²⟨x|y⟩ = M·u·K₁(Mu)/π; g_σ ⋆ g_σ is a Gaussian of variance 2σ²,
    // averaged over directions of u.
    let f = |u: f64| {
        if u == 0.0 {
            return (ln_norm - d * d / (4.0 * s2)).exp() / PI;
        }
        let mu = mass * u;
        let x = u * d / (2.0 * s2);
        let ln_g = ln_norm - (u - d) * (u - d) / (4.0 * s2) - x + ln_sinh_ratio(x);
        mu / PI * bessel_k1_scaled(mu).unwrap_or(0.0) * (ln_g - mu).exp()
    };
    let u_end = (60.0 / mass).min(d + 15.0 * sigma);
    let mut pts = vec![0.0];
    for p in [1.0 / mass, 5.0 / mass, 20.0 / mass] {
        if p < u_end {
            pts.push(p);
        }
    }
    pts.push(u_end);
    let est = Integrator::new(0.0, 1e-13)
        .integrate_with_breaks(f, &pts)
        .map_err(|e| Error::NonConvergence {
            context: format!("smeared overlap at M={mass}, σ={sigma}, d={d}"),
            best: e.best.value,
            abs_error: e.best.abs_error,
            rel_tol: 1e-13,
        })?;
    Ok(est.value)
}
