//! Acceptance checks 1–10. One PASS/FAIL line each; exits 1 if any fail.

use std::f64::consts::PI;
use std::process::ExitCode;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use udw::cli::{hydrogen_headline, preset_spec, run_sweep, Table};
use udw::localization::{
    compton_expansion_coefficients, overlap_fourier_oracle, overlap_kernel, OverlapQuery, C2,
};
use udw::rates::{rate_analytic_vacuum, rate_expansion_large_l, rate_quadrature_gaussian};
use udw::states::GaussianState;
use udw::templates::{find_interior_maxima, template, template_oracle, TemplateQuery};
use udw::{Coupling, DetectorParams, Medium, TemplateModel};

const NUS: [f64; 4] = [0.1, 0.5, 0.9, 1.0];
const REL: [TemplateModel; 2] = [TemplateModel::RelFirst, TemplateModel::RelSecondCorrected];
const CONTRACTED: [TemplateModel; 2] = [TemplateModel::SemiRel, TemplateModel::NonRel];

type Outcome = (bool, String);

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn log_uniform(rng: &mut StdRng, a: f64, b: f64) -> f64 {
    rng.gen_range(a.ln()..b.ln()).exp()
}

fn t(model: TemplateModel, e: f64, nu: f64, p: f64) -> udw::Result<f64> {
    template(&TemplateQuery::new(
        model,
        DetectorParams::compton(e),
        Medium::new(nu),
        p,
    ))
}

fn quad(
    model: TemplateModel,
    params: DetectorParams,
    nu: f64,
    state: GaussianState,
    c: &Coupling,
) -> udw::Result<f64> {
    Ok(rate_quadrature_gaussian(model, &params, &Medium::new(nu), &state, c, 1e-10)?.rate)
}

// A recoil-free detector emits at the single wavenumber where E = νk.
fn classical_oracle(e: f64, nu: f64) -> f64 {
    let (mut a, mut b) = (0.0, 2.0 * e / nu);
    while b - a > f64::EPSILON * b {
        let m = 0.5 * (a + b);
        if e - nu * m > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    let k = 0.5 * (a + b);
    nu * k / nu
}

fn oracle_equivalence() -> Outcome {
    let mut rng = StdRng::seed_from_u64(1);
    let (mut worst, mut at, mut n) = (0.0f64, String::new(), 0);
    for model in TemplateModel::ALL {
        for nu in NUS {
            for _ in 0..10 {
                let e = log_uniform(&mut rng, 1e-4, 10.0);
                let p = rng.gen_range(0.0..10.0);
                let q = TemplateQuery::new(model, DetectorParams::compton(e), Medium::new(nu), p);
                let got = template(&q);
                let want = if model == TemplateModel::Classical {
                    Ok(classical_oracle(e, nu))
                } else {
                    template_oracle(&q)
                };
                let d = match (got, want) {
                    (Ok(a), Ok(b)) => rel(a, b),
                    _ => f64::INFINITY,
                };
                n += 1;
                if d > worst || d.is_nan() {
                    worst = d;
                    at = format!("{model} nu={nu} E={e:.3e} p={p:.3}");
                }
            }
        }
    }
    (
        worst <= 1e-8,
        format!("{n} points, worst rel {worst:.2e} at {at} (tol 1e-8)"),
    )
}

fn vacuum_limit_continuity() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for model in REL {
        for p in [0.0, 1.0, 10.0] {
            let v1 = t(model, 0.001, 1.0, p).unwrap();
            let d: Vec<f64> = (2..=6)
                .map(|k| (t(model, 0.001, 1.0 - 10f64.powi(-k), p).unwrap() - v1).abs())
                .collect();
            let decreasing = d.windows(2).all(|w| w[1] < w[0]);
            let r6 = d[4] / v1;
            let pass = decreasing && r6 <= 1e-6;
            ok &= pass;
            if !pass {
                notes.push(format!(
                    "{model} p={p}: rel at k=6 {r6:.2e}, decreasing={decreasing}"
                ));
            }
        }
    }
    let detail = if notes.is_empty() {
        "decreasing in k=2..6, ≤ 1e-6 at k=6 for both models at p ∈ {0,1,10}".into()
    } else {
        notes.join("; ")
    };
    (ok, detail)
}

fn analytic_vs_quadrature() -> Outcome {
    let mut rng = StdRng::seed_from_u64(3);
    let mut worst = 0.0f64;
    let mut at = String::new();
    for _ in 0..20 {
        let e = log_uniform(&mut rng, 1e-4, 10.0);
        let l = log_uniform(&mut rng, 0.1, 100.0);
        let params = DetectorParams::compton(e);
        let s = GaussianState::at_rest(l).unwrap();
        for model in REL {
            let a = rate_analytic_vacuum(model, &params, &Medium::vacuum(), &s, &Coupling::unit())
                .map(|r| r.rate);
            let q = quad(model, params, 1.0, s, &Coupling::unit());
            let d = match (a, q) {
                (Ok(a), Ok(q)) => rel(a, q),
                _ => f64::INFINITY,
            };
            if d > worst {
                worst = d;
                at = format!("{model} E={e:.3e} L={l:.3}");
            }
        }
    }
    (
        worst <= 1e-6,
        format!("20 points × 2 models, worst rel {worst:.2e} at {at} (tol 1e-6)"),
    )
}

fn classical_identity() -> Outcome {
    let mut rng = StdRng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let e = log_uniform(&mut rng, 1e-4, 10.0);
        let nu = rng.gen_range(0.05..=1.0);
        let s =
            GaussianState::new(log_uniform(&mut rng, 0.05, 50.0), rng.gen_range(0.0..5.0)).unwrap();
        let lam = rng.gen_range(0.1..3.0);
        let c = Coupling::new(lam);
        let r = rate_quadrature_gaussian(
            TemplateModel::Classical,
            &DetectorParams::compton(e),
            &Medium::new(nu),
            &s,
            &c,
            1e-12,
        )
        .map(|r| r.rate)
        .unwrap_or(f64::NAN);
        let d = rel(r, lam * lam / (2.0 * PI) * e / nu);
        worst = if d.is_nan() {
            f64::INFINITY
        } else {
            worst.max(d)
        };
    }
    (
        worst <= 1e-12,
        format!("5 random states, worst rel {worst:.2e} (tol 1e-12)"),
    )
}

fn small_mass_limits() -> Outcome {
    // Fixed gap, width fixed in Compton units, m = 10⁻ᵏ.
    let gap = 1.0;
    let c = Coupling::unit();
    let mut ok = true;
    let mut notes = Vec::new();
    for nu in [0.5, 1.0] {
        let target = c.rate_prefactor() * gap * nu / ((nu + 1.0) * (nu + 1.0));
        for model in REL.into_iter().chain(CONTRACTED) {
            let limit = if model.is_relativistic() { target } else { 0.0 };
            let errs: Vec<f64> = (1..=4)
                .map(|k| {
                    let m = 10f64.powi(-k);
                    let r = quad(
                        model,
                        DetectorParams::compton(gap / m),
                        nu,
                        GaussianState::at_rest(1.0).unwrap(),
                        &c,
                    );
                    r.map(|r| (r * m - limit).abs() / target)
                        .unwrap_or(f64::NAN)
                })
                .collect();
            let pass = errs.windows(2).all(|w| w[1] < w[0]) && errs[3] * 10.0 <= errs[0];
            ok &= pass;
            notes.push(format!(
                "{} {model} nu={nu} dev k=1..4 {}",
                if pass { "ok" } else { "BAD" },
                errs.iter()
                    .map(|e| format!("{e:.1e}"))
                    .collect::<Vec<_>>()
                    .join("/")
            ));
        }
    }
    (ok, notes.join("; "))
}

fn large_l_expansion() -> Outcome {
    let lms = [50.0, 100.0, 200.0];
    let mut ok = true;
    let mut notes = Vec::new();
    for e in [0.001, 1.0] {
        let params = DetectorParams::compton(e);
        for (model, sign) in [
            (TemplateModel::RelFirst, 1.0),
            (TemplateModel::RelSecondCorrected, -1.0),
        ] {
            let mut errs = Vec::new();
            let mut coeff_ok = true;
            for lm in lms {
                let l = lm / params.excited_mass();
                let s = GaussianState::at_rest(l).unwrap();
                let r =
                    rate_analytic_vacuum(model, &params, &Medium::vacuum(), &s, &Coupling::unit())
                        .unwrap()
                        .rate;
                let e0 = rate_expansion_large_l(model, &params, l, 0, &Coupling::unit()).unwrap();
                let e2 = rate_expansion_large_l(model, &params, l, 2, &Coupling::unit()).unwrap();
                errs.push((r - e2).abs() / r);
                let c = (r / e0 - 1.0) * lm * lm;
                coeff_ok &= (c / (1.5 * sign) - 1.0).abs() <= 0.01;
            }
            let (xs, ys): (Vec<f64>, Vec<f64>) =
                lms.iter().zip(&errs).map(|(x, y)| (x.ln(), y.ln())).unzip();
            let order = -slope(&xs, &ys);
            let pass = order >= 3.8 && coeff_ok;
            ok &= pass;
            notes.push(format!(
                "{model} E={e}: order {order:.2}, C={:.2}, coefficient {}",
                errs[2] * 200f64.powi(4),
                if coeff_ok { "ok" } else { "off" }
            ));
        }
    }
    (ok, notes.join("; "))
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

fn hydrogen() -> Outcome {
    let h = match hydrogen_headline() {
        Ok(h) => h,
        Err(e) => return (false, e.to_string()),
    };
    let lm = h.l_times_excited_mass;
    let pred = 3.0 / (lm * lm);
    let f = h.fractional_difference;
    let pass = f >= pred / 3.0 && f <= pred * 3.0 && (1e-11..=1e-9).contains(&f);
    (
        pass,
        format!("L·M_e = {lm:.4e}, fractional difference {f:.4e}, 3/(LM_e)² = {pred:.4e}"),
    )
}

fn column<'a>(table: &'a Table, label: &str) -> impl Iterator<Item = f64> + 'a {
    let i = table
        .columns
        .iter()
        .position(|c| c == label)
        .unwrap_or_else(|| panic!("no column {label}"));
    table.rows.iter().map(move |r| r[i])
}

fn figure_shapes() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;

    // (a) small-p coincidence of all five templates.
    let fig1a = run_sweep(&preset_spec("fig1a", 1e-9).unwrap());
    let labels: Vec<&str> = TemplateModel::COMPARED.iter().map(|m| m.name()).collect();
    let mut spread = 0.0f64;
    let mut at = 0.0;
    for row in fig1a.rows.iter().filter(|r| r[0] <= 0.1) {
        let v: Vec<f64> = labels
            .iter()
            .map(|l| row[fig1a.columns.iter().position(|c| c == l).unwrap()])
            .collect();
        let (mx, mn) = v
            .iter()
            .fold((f64::MIN, f64::MAX), |(a, b), &x| (a.max(x), b.min(x)));
        let s = (mx - mn) / mn;
        if s > spread || s.is_nan() {
            spread = s;
            at = row[0];
        }
    }
    let a = spread <= 0.01;
    ok &= a;
    notes.push(format!(
        "(a) {} max pairwise spread {spread:.3e} at p={at:.3e}",
        pf(a)
    ));

    // (b) interior maximum at ν = 0.9.
    let grid: Vec<f64> = (0..400)
        .map(|i| 1e-3 * (1e4f64).powf(i as f64 / 399.0))
        .collect();
    let peaks = find_interior_maxima(
        TemplateModel::RelSecondCorrected,
        &DetectorParams::compton(0.001),
        &Medium::new(0.9),
        &grid,
    )
    .unwrap_or_default();
    let b = !peaks.is_empty();
    ok &= b;
    notes.push(match peaks.first() {
        Some((p, v)) => format!("(b) PASS maximum {v:.4e} at p={p:.4}"),
        None => "(b) FAIL no interior maximum".into(),
    });

    // (c) medium rates below vacuum rates.
    let mut c = true;
    let mut worst = f64::NEG_INFINITY;
    let mut where_ = String::new();
    for fig in ["fig3a", "fig3b"] {
        let tab = run_sweep(&preset_spec(fig, 1e-9).unwrap());
        for m in REL {
            let xs: Vec<f64> = column(&tab, tab.columns[0].as_str()).collect();
            let med: Vec<f64> = column(&tab, &format!("{}@nu=0.1", m.name())).collect();
            let vac: Vec<f64> = column(&tab, &format!("{}@nu=1", m.name())).collect();
            for ((x, a), b) in xs.iter().zip(&med).zip(&vac) {
                let excess = a / b - 1.0;
                if !(excess < 0.0) {
                    c = false;
                }
                if excess > worst || excess.is_nan() {
                    worst = excess;
                    where_ = format!("{fig} {m} E={x:.3e}");
                }
            }
        }
    }
    ok &= c;
    notes.push(format!(
        "(c) {} max medium/vacuum − 1 = {worst:.3e} at {where_}",
        pf(c)
    ));

    // (d) opposite monotonicity in L.
    let mut d = true;
    for (fig, m, up) in [
        ("fig5a", TemplateModel::RelFirst, false),
        ("fig5b", TemplateModel::RelSecondCorrected, true),
    ] {
        let tab = run_sweep(&preset_spec(fig, 1e-9).unwrap());
        let cols: Vec<Vec<f64>> = [0.1, 0.3, 1.0, 3.0, 10.0]
            .iter()
            .map(|l| column(&tab, &format!("{}@L={l}", m.name())).collect())
            .collect();
        for i in 0..tab.rows.len() {
            let v: Vec<f64> = cols.iter().map(|c| c[i]).collect();
            d &= v
                .windows(2)
                .all(|w| if up { w[1] > w[0] } else { w[1] < w[0] });
        }
    }
    ok &= d;
    notes.push(format!(
        "(d) {} RelFirst decreasing, RelSecondCorrected increasing in L",
        pf(d)
    ));

    // (e) contracted templates approach ν.
    let mut worst = 0.0f64;
    for m in CONTRACTED {
        for nu in NUS {
            let v = t(m, 0.001, nu, 1e3).unwrap_or(f64::NAN);
            worst = worst.max((v - nu).abs() / nu);
        }
    }
    let e = worst <= 1e-2;
    ok &= e;
    notes.push(format!("(e) {} max |𝒯 − ν|/ν at p=1e3 {worst:.3e}", pf(e)));

    (ok, notes.join("; "))
}

fn pf(b: bool) -> &'static str {
    if b {
        "PASS"
    } else {
        "FAIL"
    }
}

fn localization() -> Outcome {
    let mut worst = 0.0f64;
    for m in [0.5, 1.0, 3.0] {
        for i in 0..40 {
            let mr = 0.1 * 200f64.powf(i as f64 / 39.0);
            let q = OverlapQuery::new(m, mr / m);
            let d = match (overlap_kernel(&q), overlap_fourier_oracle(&q, 1e-10)) {
                (Ok(k), Ok(o)) => rel(o.value, k),
                _ => f64::INFINITY,
            };
            worst = worst.max(d);
        }
    }
    let kernel_ok = worst <= 1e-8;
    // Smeared overlap: remainder after c₂ is fourth order in λ_c/σ.
    let fourth = |ms: f64| {
        let e = compton_expansion_coefficients(1.0, ms, 2).unwrap();
        let x = 1.0 / ms;
        (e.integrated / (e.first_quantized / 2.0) - 1.0 + C2 * x * x) / x.powi(4)
    };
    let (f10, f100) = (fourth(10.0), fourth(100.0));
    let e10 = compton_expansion_coefficients(1.0, 10.0, 2)
        .unwrap()
        .rel_difference();
    let e100 = compton_expansion_coefficients(1.0, 100.0, 2)
        .unwrap()
        .rel_difference();
    let order = (e10 / e100).log10();
    let smear_ok = (order - 4.0).abs() <= 0.05 && (f100 / (45.0 / 32.0) - 1.0).abs() <= 0.01;
    (
        kernel_ok && smear_ok,
        format!(
            "kernel vs oracle worst rel {worst:.2e} on Mr ∈ [0.1, 20] (tol 1e-8); remainder order {order:.3}, fourth-order coefficient {f10:.4} (σ=10λ_c) {f100:.4} (σ=100λ_c) vs 45/32"
        ),
    )
}

fn coupling_matching() -> Outcome {
    let mut rng = StdRng::seed_from_u64(10);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let m = log_uniform(&mut rng, 1e-3, 1e3);
        let gap = m * log_uniform(&mut rng, 1e-6, 100.0);
        let params = DetectorParams::new(m, gap);
        let f = |model| template(&TemplateQuery::new(model, params, Medium::vacuum(), 0.0));
        let d = match (
            f(TemplateModel::RelFirst),
            f(TemplateModel::RelSecondCorrected),
        ) {
            (Ok(a), Ok(b)) => rel(a, b),
            _ => f64::INFINITY,
        };
        worst = worst.max(d);
    }
    (
        worst <= 1e-12,
        format!("100 random (m, E), worst rel {worst:.2e} (tol 1e-12)"),
    )
}

fn main() -> ExitCode {
    let checks: [(&str, fn() -> Outcome); 10] = [
        ("oracle equivalence", oracle_equivalence),
        ("vacuum-limit continuity", vacuum_limit_continuity),
        ("analytic vs quadrature rates", analytic_vs_quadrature),
        ("classical rate identity", classical_identity),
        ("small-mass limits", small_mass_limits),
        ("large-L expansion", large_l_expansion),
        ("hydrogen-scale headline", hydrogen),
        ("figure-shape properties", figure_shapes),
        ("localization kernel", localization),
        ("coupling matching", coupling_matching),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let (ok, detail) = check();
        failed += usize::from(!ok);
        println!("{} {:>2} {name}: {detail}", pf(ok), i + 1);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        checks.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
