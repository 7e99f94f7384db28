//! Initial wavepackets reduced to radial weights `w(p)` with `∫₀^∞ w dp = 1`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{ln_sinh_ratio, sinh_ratio};

/// Any isotropic momentum-space weight the rate integral can consume.
pub trait WeightFunction: Sync {
    /// Radial density in `|p|`, already integrated over directions.
    fn weight(&self, p: f64) -> f64;

    /// A momentum beyond which at most `tail_mass` of the weight lies.
    fn truncation_radius(&self, tail_mass: f64) -> f64;

    /// Interior points where the weight changes character (peaks, shoulders).
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// ψ(p) = (L²/2π)^{3/4} exp(−L²|p − p_D|²/4).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianState {
    pub width_l: f64,
    pub mean_momentum: f64,
}

impl GaussianState {
    pub fn new(width_l: f64, mean_momentum: f64) -> Result<Self> {
        if !(width_l > 0.0) || !width_l.is_finite() {
            return Err(Error::Domain(format!(
                "state width L must be > 0, got {width_l}"
            )));
        }
        if !(mean_momentum >= 0.0) || !mean_momentum.is_finite() {
            return Err(Error::Domain(format!(
                "mean momentum magnitude must be ≥ 0, got {mean_momentum}"
            )));
        }
        Ok(Self {
            width_l,
            mean_momentum,
        })
    }

    /// A state at rest.
    pub fn at_rest(width_l: f64) -> Result<Self> {
        Self::new(width_l, 0.0)
    }

    /// |ψ(p)|² at a 3-momentum.
    pub fn density(&self, p: [f64; 3]) -> f64 {
        let l2 = self.width_l * self.width_l;
        let d2 = (p[0] - self.mean_momentum).powi(2) + p[1] * p[1] + p[2] * p[2];
        (l2 / (2.0 * PI)).powf(1.5) * (-0.5 * l2 * d2).exp()
    }

    pub fn radial_weight(&self, p: f64) -> f64 {
        radial_weight(self, p)
    }
}

/// w(p) = (L²/2π)^{3/2}·4πp²·exp(−L²(p² + p_D²)/2)·sinh(x)/x, x = L²pp_D.
pub fn radial_weight(state: &GaussianState, p: f64) -> f64 {
    if p <= 0.0 {
        return 0.0;
    }
    let l2 = state.width_l * state.width_l;
    let pd = state.mean_momentum;
    let norm = (l2 / (2.0 * PI)).powf(1.5) * 4.0 * PI * p * p;
    let x = l2 * p * pd;
    if x > 700.0 {
        let d = p - pd;
        // exp(−L²(p²+p_D²)/2)·sinh(x)/x = exp(−L²(p−p_D)²/2 − x + ln(sinh x / x)).
        norm * (-0.5 * l2 * d * d - x + ln_sinh_ratio(x)).exp()
    } else {
        norm * (-0.5 * l2 * (p * p + pd * pd)).exp() * sinh_ratio(x)
    }
}

/// p_max = p_D + √(−2 ln tail)/L + 5/L.
pub fn truncation_radius(state: &GaussianState, tail_mass: f64) -> f64 {
    let tail = tail_mass.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON);
    state.mean_momentum + ((-2.0 * tail.ln()).sqrt() + 5.0) / state.width_l
}

impl WeightFunction for GaussianState {
    fn weight(&self, p: f64) -> f64 {
        radial_weight(self, p)
    }

    fn truncation_radius(&self, tail_mass: f64) -> f64 {
        truncation_radius(self, tail_mass)
    }

    fn breakpoints(&self) -> Vec<f64> {
        let l = self.width_l;
        let pd = self.mean_momentum;
        if pd == 0.0 {
            return vec![1.0 / l, 3.0 / l, 6.0 / l];
        }
        [-10.0, -7.0, -4.0, -2.0, 0.0, 2.0, 4.0, 7.0]
            .into_iter()
            .map(|k| pd + k / l)
            .filter(|&p| p > 0.0)
            .collect()
    }
}

/// A user-supplied isotropic weight with a declared truncation radius.
pub struct CustomWeight<F: Fn(f64) -> f64 + Sync> {
    pub f: F,
    pub p_max: f64,
    pub breaks: Vec<f64>,
}

impl<F: Fn(f64) -> f64 + Sync> WeightFunction for CustomWeight<F> {
    fn weight(&self, p: f64) -> f64 {
        (self.f)(p)
    }

    fn truncation_radius(&self, _tail_mass: f64) -> f64 {
        self.p_max
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.breaks.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::Integrator;

    fn integrate(state: &GaussianState, g: impl Fn(f64) -> f64) -> f64 {
        let mut pts = vec![0.0];
        pts.extend(state.breakpoints());
        pts.push(state.truncation_radius(1e-20));
        Integrator::new(0.0, 1e-13)
            .integrate_with_breaks(|p| state.weight(p) * g(p), &pts)
            .unwrap()
            .value
    }

    #[test]
    fn normalized() {
        for (l, pd) in [
            (1.0, 0.0),
            (1.0, 3.0),
            (0.01, 10.0),
            (100.0, 10.0),
            (100.0, 0.0),
        ] {
            let s = GaussianState::new(l, pd).unwrap();
            let n = integrate(&s, |_| 1.0);
            assert!((n - 1.0).abs() < 1e-10, "L={l} pD={pd}: {n}");
        }
    }

    #[test]
    fn second_moment() {
        // Each Cartesian component has variance 1/L².
        for l in [0.5, 1.0, 4.0] {
            let s = GaussianState::at_rest(l).unwrap();
            let m2 = integrate(&s, |p| p * p);
            assert!((m2 - 3.0 / (l * l)).abs() < 1e-10 * m2, "L={l}");
        }
        let s = GaussianState::new(1.0, 2.0).unwrap();
        assert!((integrate(&s, |p| p * p) - 7.0).abs() < 1e-9);
    }

    #[test]
    fn isotropic_limit() {
        let s0 = GaussianState::at_rest(1.3).unwrap();
        let s = GaussianState::new(1.3, 1e-6).unwrap();
        for i in 1..200 {
            let p = i as f64 * 0.05;
            let (a, b) = (radial_weight(&s0, p), radial_weight(&s, p));
            assert!((a - b).abs() <= 1e-8 * a, "p={p}");
        }
        assert_eq!(radial_weight(&s0, 0.0), 0.0);
    }

    #[test]
    fn log_space_path() {
        let s = GaussianState::new(1000.0, 1.0).unwrap();
        for p in [0.5, 0.999, 1.0, 1.001, 2.0] {
            let w = radial_weight(&s, p);
            assert!(w.is_finite() && w >= 0.0);
        }
        // Continuous across the switch at x = 700.
        let pd = 700f64.sqrt();
        let s = GaussianState::new(1.0, pd).unwrap();
        let a = radial_weight(&s, pd * (1.0 - 1e-12));
        let b = radial_weight(&s, pd * (1.0 + 1e-12));
        assert!(a > 0.0);
        assert!((a - b).abs() < 1e-9 * a);
    }

    #[test]
    fn truncation_examples() {
        let s = GaussianState::at_rest(1.0).unwrap();
        let pm = truncation_radius(&s, 1e-20);
        assert!((pm - (9.5971 + 5.0)).abs() < 1e-3);
        let tail = Integrator::new(1e-40, 1e-8)
            .integrate(|p| radial_weight(&s, p), pm, pm + 20.0)
            .unwrap()
            .value;
        assert!(tail <= 1e-20);
        let s10 = GaussianState::at_rest(10.0).unwrap();
        assert!((truncation_radius(&s10, 1e-20) * 10.0 - pm).abs() < 1e-12);
        let sd = GaussianState::new(1.0, 2.0).unwrap();
        assert!(truncation_radius(&sd, 1e-20) >= 2.0);
    }
}
