//! Scalar kernels: the auxiliary function ℓ, scaled K₁, Tricomi U, sinh(x)/x.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::Integrator;

/// Radicands more negative than this (relative) are logic errors.
pub const TOL_CLAMP: f64 = 1e-12;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Arguments of ℓ. `c2` is the signed square of `c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllArgs {
    pub a: f64,
    pub b: f64,
    pub c2: f64,
}

impl EllArgs {
    pub const fn new(a: f64, b: f64, c2: f64) -> Self {
        Self { a, b, c2 }
    }
}

/// ℓ(a, b, c) = ½(√((a+b)²+c²) − √((a−b)²+c²)), in its conjugate form.
pub fn ell(args: EllArgs) -> Result<f64> {
    let EllArgs { a, b, c2 } = args;
    if !(a >= 0.0 && b >= 0.0) || !c2.is_finite() {
        return Err(Error::Domain(format!(
            "ell needs a, b ≥ 0 and finite c2, got {args:?}"
        )));
    }
    let rp = radicand(a + b, c2, args)?;
    let rm = radicand(a - b, c2, args)?;
    if a == 0.0 || b == 0.0 {
        return Ok(0.0);
    }
    if c2 == 0.0 {
        return Ok(a.min(b));
    }
    let den = rp.sqrt() + rm.sqrt();
    if den == 0.0 {
        return Err(Error::Domain(format!(
            "ell: both radicands vanish for {args:?}"
        )));
    }
    Ok(2.0 * a * b / den)
}

fn radicand(s: f64, c2: f64, args: EllArgs) -> Result<f64> {
    let r = s * s + c2;
    if r >= 0.0 {
        return Ok(r);
    }
    let scale = (s * s).max(c2.abs()).max(f64::MIN_POSITIVE);
    if r >= -TOL_CLAMP * scale {
        Ok(0.0)
    } else {
        Err(Error::Domain(format!(
            "ell radicand {r:e} below clamp tolerance for a={}, b={}, c2={}",
            args.a, args.b, args.c2
        )))
    }
}

/// sinh(x)/x for x ≥ 0. Overflows to infinity past x ≈ 710; use
/// [`ln_sinh_ratio`] there.
pub fn sinh_ratio(x: f64) -> f64 {
    let x = x.abs();
    if x < 1e-4 {
        let x2 = x * x;
        1.0 + x2 / 6.0 * (1.0 + x2 / 20.0)
    } else {
        x.sinh() / x
    }
}

/// ln(sinh(x)/x), finite for every x ≥ 0.
pub fn ln_sinh_ratio(x: f64) -> f64 {
    let x = x.abs();
    if x <= 700.0 {
        sinh_ratio(x).ln()
    } else {
        x - (2.0 * x).ln() + (-(-2.0 * x).exp()).ln_1p()
    }
}

/// eˣ·K₁(x) for x > 0.
pub fn bessel_k1_scaled(x: f64) -> Result<f64> {
    if !(x > 0.0) || x.is_nan() {
        return Err(Error::Domain(format!(
            "bessel_k1_scaled needs x > 0, got {x}"
        )));
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    Ok(if x <= 2.0 {
        k1_series(x) * x.exp()
    } else {
        k1_scaled_cf(x)
    })
}

/// K₁(x) for x > 0; underflows to 0 for large x.
pub fn bessel_k1(x: f64) -> Result<f64> {
    if x > 0.0 && x <= 2.0 {
        return Ok(k1_series(x));
    }
    Ok(bessel_k1_scaled(x)? * (-x).exp())
}

// K₁(x) = 1/x + ln(x/2)·I₁(x) − (x/4)·Σ (ψ(k+1)+ψ(k+2)) (x²/4)ᵏ/(k!(k+1)!)
fn k1_series(x: f64) -> f64 {
    let y = 0.25 * x * x;
    let mut term = 1.0;
    let mut i1 = 0.0;
    let mut s = 0.0;
    let mut psi_k1 = -EULER_GAMMA;
    let mut psi_k2 = 1.0 - EULER_GAMMA;
    for k in 0..60 {
        i1 += term;
        s += (psi_k1 + psi_k2) * term;
        let kf = k as f64;
        term *= y / ((kf + 1.0) * (kf + 2.0));
        psi_k1 += 1.0 / (kf + 1.0);
        psi_k2 += 1.0 / (kf + 2.0);
        if term < 1e-18 * i1 {
            break;
        }
    }
    1.0 / x + (0.5 * x).ln() * (0.5 * x) * i1 - 0.25 * x * s
}

// Steed's continued fraction for K₀, then K₁ from the CF ratio.
fn k1_scaled_cf(x: f64) -> f64 {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut h = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..100_000 {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-17 {
            break;
        }
    }
    let h = a1 * h;
    let k0 = (PI / (2.0 * x)).sqrt() / s;
    k0 * (x + 0.5 - h) / x
}

/// ln Γ(x) for x > 0 (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = C[0];
    for (i, c) in C.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + G + 0.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        PI / ((PI * x).sin() * gamma(1.0 - x))
    } else {
        ln_gamma(x).exp()
    }
}

/// Confluent hypergeometric function of the second kind, U(a, b, z), for
/// a > 0 and z > 0.
pub fn hyp_u(a: f64, b: f64, z: f64) -> Result<f64> {
    if !(a > 0.0) || !(z > 0.0) || !b.is_finite() || !a.is_finite() {
        return Err(Error::Domain(format!(
            "hyp_u needs a > 0, z > 0, got a={a}, b={b}, z={z}"
        )));
    }
    if z.is_infinite() {
        return Ok(0.0);
    }
    if let Some(v) = hyp_u_asymptotic(a, b, z) {
        return Ok(v);
    }
    hyp_u_integral(a, b, z)
}

// z^{-a} Σ (a)ₖ(a−b+1)ₖ/k! (−1/z)ᵏ, truncated at the smallest term.
fn hyp_u_asymptotic(a: f64, b: f64, z: f64) -> Option<f64> {
    let c = a - b + 1.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..500 {
        let kf = k as f64;
        let next = -term * (a + kf) * (c + kf) / ((kf + 1.0) * z);
        if next == 0.0 {
            return Some(sum * z.powf(-a));
        }
        if next.abs() >= term.abs() {
            return None;
        }
        sum += next;
        term = next;
        if term.abs() < 1e-17 * sum.abs() {
            return Some(sum * z.powf(-a));
        }
    }
    None
}

// U = z^{−a}/Γ(a+1) ∫₀^∞ exp(−v^{1/a}) (1 + v^{1/a}/z)^{b−a−1} dv,
// from t = u/z, u = v^{1/a} in the Laplace representation.
fn hyp_u_integral(a: f64, b: f64, z: f64) -> Result<f64> {
    let inv_a = 1.0 / a;
    let expo = b - a - 1.0;
    let f = |v: f64| {
        let u = v.powf(inv_a);
        (-u + expo * (u / z).ln_1p()).exp()
    };
    // Past u = 60 the exponential wins over any moderate algebraic growth.
    let growth = expo.max(0.0);
    let u_end = 60.0 + growth * (10.0 + 2.0 * (60.0 / z).ln_1p());
    let v_end = u_end.powf(a);
    let mut breaks = vec![0.0];
    // The algebraic factor varies on the scale u ~ z.
    let v_z = z.powf(a);
    if v_z < v_end {
        for s in [1e-3, 1e-2, 0.1, 1.0, 10.0] {
            let v = s * v_z;
            if v < v_end && v > *breaks.last().unwrap() {
                breaks.push(v);
            }
        }
    }
    breaks.push(v_end);
    let est = Integrator::new(0.0, 1e-13)
        .integrate_with_breaks(f, &breaks)
        .map_err(|e| Error::NonConvergence {
            context: format!("hyp_u({a}, {b}, {z})"),
            best: e.best.value,
            abs_error: e.best.abs_error,
            rel_tol: 1e-13,
        })?;
    Ok(est.value * (-a * z.ln() - ln_gamma(a + 1.0)).exp())
}
