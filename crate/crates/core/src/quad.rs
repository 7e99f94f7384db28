//! Adaptive Gauss-Kronrod (10/21) quadrature and Wynn epsilon acceleration.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077958109831074,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

/// One 21-point Kronrod panel with its embedded 10-point Gauss estimate.
#[derive(Debug, Clone, Copy)]
pub struct Panel {
    pub a: f64,
    pub b: f64,
    pub value: f64,
    pub error: f64,
}

pub fn gk21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resk = fc * WGK[10];
    let mut resg = 0.0;
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * resk;
    let mut resasc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = resk * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut error = ((resk - resg) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Panel { a, b, value, error }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub abs_error: f64,
    pub evals: usize,
}

/// Returned when the tolerance was not met; carries the best estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadFailure {
    pub best: Estimate,
}

struct ByError(Panel);

impl PartialEq for ByError {
    fn eq(&self, other: &Self) -> bool {
        self.0.error == other.0.error
    }
}
impl Eq for ByError {}
impl PartialOrd for ByError {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for ByError {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.error.total_cmp(&other.0.error)
    }
}

/// Globally adaptive bisection driven by the largest panel error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integrator {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_evals: usize,
}

impl Default for Integrator {
    fn default() -> Self {
        Self {
            abs_tol: 0.0,
            rel_tol: 1e-10,
            max_evals: 1_000_000,
        }
    }
}

impl Integrator {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }

    pub fn with_max_evals(mut self, max_evals: usize) -> Self {
        self.max_evals = max_evals;
        self
    }

    pub fn integrate<F: FnMut(f64) -> f64>(
        &self,
        f: F,
        a: f64,
        b: f64,
    ) -> Result<Estimate, QuadFailure> {
        self.integrate_with_breaks(f, &[a, b])
    }

    /// Integrates over `[points[0], points[last]]`, seeding the panels at the
    /// given breakpoints. Points must be non-decreasing; repeated points are
    /// ignored.
    pub fn integrate_with_breaks<F: FnMut(f64) -> f64>(
        &self,
        mut f: F,
        points: &[f64],
    ) -> Result<Estimate, QuadFailure> {
        let mut heap = BinaryHeap::new();
        let mut done: Vec<Panel> = Vec::new();
        let mut evals = 0usize;
        for w in points.windows(2) {
            if w[1] > w[0] {
                heap.push(ByError(gk21(&mut f, w[0], w[1])));
                evals += 21;
            }
        }
        let exact = |heap: &BinaryHeap<ByError>, done: &[Panel]| {
            heap.iter()
                .map(|p| &p.0)
                .chain(done.iter())
                .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error))
        };
        let (mut value, mut error) = exact(&heap, &done);
        loop {
            let tol = self.abs_tol.max(self.rel_tol * value.abs());
            if error <= tol {
                // Running sums drift; confirm against a fresh summation.
                let (v, e) = exact(&heap, &done);
                value = v;
                error = e;
                if error <= self.abs_tol.max(self.rel_tol * value.abs()) {
                    return Ok(Estimate {
                        value,
                        abs_error: error,
                        evals,
                    });
                }
            }
            let best = Estimate {
                value,
                abs_error: error,
                evals,
            };
            if evals + 42 > self.max_evals || !value.is_finite() {
                let (v, e) = exact(&heap, &done);
                return Err(QuadFailure {
                    best: Estimate {
                        value: v,
                        abs_error: e,
                        evals,
                    },
                });
            }
            let worst = match heap.pop() {
                Some(p) => p.0,
                None => return Err(QuadFailure { best }),
            };
            let mid = 0.5 * (worst.a + worst.b);
            if !(mid > worst.a && mid < worst.b) {
                done.push(worst);
                continue;
            }
            let left = gk21(&mut f, worst.a, mid);
            let right = gk21(&mut f, mid, worst.b);
            evals += 42;
            value += left.value + right.value - worst.value;
            error += left.error + right.error - worst.error;
            // Panels that can no longer be refined only add noise to the heap.
            for p in [left, right] {
                if (p.b - p.a).abs() <= 4.0 * f64::EPSILON * p.a.abs().max(p.b.abs()) {
                    done.push(p);
                } else {
                    heap.push(ByError(p));
                }
            }
        }
    }

    /// Integrates over `[a, ∞)` through `x = a + t/(1 − t)`.
    pub fn integrate_to_infinity<F: FnMut(f64) -> f64>(
        &self,
        mut f: F,
        a: f64,
    ) -> Result<Estimate, QuadFailure> {
        self.integrate(
            |t| {
                if t >= 1.0 {
                    return 0.0;
                }
                let s = 1.0 - t;
                let v = f(a + t / s) / (s * s);
                if v.is_finite() {
                    v
                } else {
                    0.0
                }
            },
            0.0,
            1.0,
        )
    }
}

/// Wynn epsilon extrapolation of a sequence of partial sums.
///
/// Returns the extrapolated limit and a crude error estimate, or `None` when
/// fewer than three sums are available.
pub fn wynn_epsilon(sums: &[f64]) -> Option<(f64, f64)> {
    let n = sums.len();
    if n < 3 {
        return None;
    }
    let mut prev = vec![0.0; n + 1];
    let mut cur = sums.to_vec();
    let mut best = sums[n - 1];
    let mut err = (sums[n - 1] - sums[n - 2]).abs();
    let mut last_even = best;
    let mut k = 0;
    while cur.len() >= 2 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for j in 0..cur.len() - 1 {
            let d = cur[j + 1] - cur[j];
            if d == 0.0 {
                // The column has converged exactly.
                if k % 2 == 0 {
                    return Some((cur[j + 1], err.min((cur[j + 1] - last_even).abs())));
                }
                return Some((best, err));
            }
            next.push(prev[j + 1] + 1.0 / d);
        }
        k += 1;
        prev = cur;
        cur = next;
        if k % 2 == 0 && !cur.is_empty() {
            let m = cur.len();
            let est = cur[m - 1];
            if !est.is_finite() {
                break;
            }
            let e = (est - last_even).abs()
                + if m >= 2 {
                    (est - cur[m - 2]).abs()
                } else {
                    0.0
                };
            if e <= err {
                best = est;
                err = e;
            }
            last_even = est;
        }
    }
    Some((best, err))
}
