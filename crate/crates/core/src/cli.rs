//! The `udw` command line: sweeps, comparisons and figure presets written as
//! CSV or JSON with a JSON manifest alongside.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::Error;
use crate::localization::{
    compton_expansion_coefficients, ln_overlap_kernel, overlap_kernel, OverlapQuery,
};
use crate::physkit::{Coupling, DetectorParams, Medium, TemplateModel};
use crate::rates::{
    fractional_difference, hydrogen, rate_analytic_vacuum, rate_quadrature_gaussian, RateResult,
    DEFAULT_REL_TOL,
};
use crate::states::GaussianState;
use crate::templates::{template, TemplateQuery};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const GIT_DESCRIBE: &str = env!("UDW_GIT_DESCRIBE");

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_NON_CONVERGENCE: i32 = 3;

pub const PRESETS: [&str; 10] = [
    "fig1a", "fig1b", "fig2a", "fig2b", "fig3a", "fig3b", "fig4a", "fig4b", "fig5a", "fig5b",
];

#[derive(Debug, Parser)]
#[command(name = "udw", version = VERSION, about = "Detector template functions and emission rates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Template functions over a momentum grid.
    Template(SweepArgs),
    /// Emission rates over E/m, L/λ_c or p_D/m.
    Rate(SweepArgs),
    /// Fractional difference between two models' rates.
    Compare(CompareArgs),
    /// Position-state overlap kernel, or its smeared expansion over σ.
    Overlap(OverlapArgs),
    /// Data for a named figure preset.
    Figure(FigureArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Comma-separated model names, or `all`.
    #[arg(long, default_value = "all")]
    pub model: String,
    #[arg(
        long = "E-over-m",
        default_value_t = 0.001,
        allow_negative_numbers = true
    )]
    pub e_over_m: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub nu: f64,
    /// Packet width in units of λ_c.
    #[arg(long = "L", default_value_t = 1.0, allow_negative_numbers = true)]
    pub l: f64,
    /// Mean packet momentum in units of m.
    #[arg(long = "pD", default_value_t = 0.0, allow_negative_numbers = true)]
    pub pd: f64,
    /// var:min:max:count[:linear|log]
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long = "rel-tol", default_value_t = DEFAULT_REL_TOL)]
    pub rel_tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Exactly two comma-separated model names.
    #[arg(long, default_value = "rel-first,rel-second")]
    pub model: String,
    #[arg(
        long = "E-over-m",
        default_value_t = 0.001,
        allow_negative_numbers = true
    )]
    pub e_over_m: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub nu: f64,
    #[arg(long = "L", default_value_t = 100.0, allow_negative_numbers = true)]
    pub l: f64,
    #[arg(long = "pD", default_value_t = 0.0, allow_negative_numbers = true)]
    pub pd: f64,
    /// Optional sweep, var:min:max:count[:linear|log].
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long = "rel-tol", default_value_t = DEFAULT_REL_TOL)]
    pub rel_tol: f64,
    /// `hydrogen` replaces E/m and L with hydrogen-atom values.
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OverlapArgs {
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub mass: f64,
    /// `r:...` for the kernel, `sigma:...` for the smeared expansion.
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    /// fig1a … fig5b, or `all`.
    #[arg(long)]
    pub preset: String,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long = "rel-tol", default_value_t = DEFAULT_REL_TOL)]
    pub rel_tol: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Run(#[from] Error),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{failed} of {total} values failed; see the manifest")]
    Rows {
        failed: usize,
        total: usize,
        code: i32,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => EXIT_USAGE,
            CliError::Run(e) => error_code(e),
            CliError::Rows { code, .. } => *code,
        }
    }
}

fn error_code(e: &Error) -> i32 {
    if e.is_non_convergence() {
        EXIT_NON_CONVERGENCE
    } else {
        EXIT_DOMAIN
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GridVar {
    #[serde(rename = "p_over_m")]
    P,
    #[serde(rename = "E_over_m")]
    EOverM,
    #[serde(rename = "L_over_lambda_c")]
    LOverLambdaC,
    #[serde(rename = "pD_over_m")]
    PdOverM,
    #[serde(rename = "Mr")]
    R,
    #[serde(rename = "sigma_over_lambda_c")]
    Sigma,
}

impl GridVar {
    pub fn column(self) -> &'static str {
        match self {
            GridVar::P => "p_over_m",
            GridVar::EOverM => "E_over_m",
            GridVar::LOverLambdaC => "L_over_lambda_c",
            GridVar::PdOverM => "pD_over_m",
            GridVar::R => "Mr",
            GridVar::Sigma => "sigma_over_lambda_c",
        }
    }
}

impl FromStr for GridVar {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "p" | "p_over_m" => GridVar::P,
            "E" | "E_over_m" => GridVar::EOverM,
            "L" | "L_over_lambda_c" => GridVar::LOverLambdaC,
            "pD" | "pD_over_m" => GridVar::PdOverM,
            "r" | "Mr" => GridVar::R,
            "sigma" | "sigma_over_lambda_c" => GridVar::Sigma,
            other => return Err(format!("unknown grid variable `{other}`")),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub var: GridVar,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl Grid {
    pub const fn new(var: GridVar, min: f64, max: f64, count: usize, spacing: Spacing) -> Self {
        Self {
            var,
            min,
            max,
            count,
            spacing,
        }
    }

    pub fn check(&self) -> Result<(), String> {
        if self.count == 0 {
            return Err("grid count must be ≥ 1".into());
        }
        if !self.min.is_finite() || !self.max.is_finite() {
            return Err("grid bounds must be finite".into());
        }
        if self.count > 1 && !(self.min < self.max) {
            return Err(format!(
                "grid needs min < max, got {} and {}",
                self.min, self.max
            ));
        }
        if self.spacing == Spacing::Log && !(self.min > 0.0) {
            return Err(format!("log spacing needs min > 0, got {}", self.min));
        }
        Ok(())
    }

    /// Grid points with both endpoints hit exactly.
    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let n = self.count - 1;
        (0..=n)
            .map(|i| {
                if i == 0 {
                    return self.min;
                }
                if i == n {
                    return self.max;
                }
                let t = i as f64 / n as f64;
                match self.spacing {
                    Spacing::Linear => self.min + t * (self.max - self.min),
                    Spacing::Log => (self.min.ln() + t * (self.max.ln() - self.min.ln())).exp(),
                }
            })
            .collect()
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if !(4..=5).contains(&parts.len()) {
            return Err(format!("grid `{s}` is not var:min:max:count[:spacing]"));
        }
        let num = |t: &str| {
            t.parse::<f64>()
                .map_err(|_| format!("bad grid bound `{t}`"))
        };
        let spacing = match parts.get(4).copied().unwrap_or("linear") {
            "lin" | "linear" => Spacing::Linear,
            "log" => Spacing::Log,
            other => return Err(format!("unknown spacing `{other}`; use linear or log")),
        };
        let g = Grid {
            var: parts[0].parse()?,
            min: num(parts[1])?,
            max: num(parts[2])?,
            count: parts[3]
                .parse()
                .map_err(|_| format!("bad grid count `{}`", parts[3]))?,
            spacing,
        };
        g.check()?;
        Ok(g)
    }
}

impl std::fmt::Display for Grid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let sp = match self.spacing {
            Spacing::Linear => "linear",
            Spacing::Log => "log",
        };
        write!(
            f,
            "{}:{}:{}:{}:{}",
            self.var.column(),
            self.min,
            self.max,
            self.count,
            sp
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepKind {
    Template,
    Rate,
}

/// One output column family: a model at fixed parameters, with the grid
/// variable overriding whichever parameter it names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub label: String,
    pub model: TemplateModel,
    pub e_over_m: f64,
    pub nu: f64,
    pub l_over_lambda_c: f64,
    pub pd_over_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub kind: SweepKind,
    pub grid: Grid,
    pub series: Vec<Series>,
    pub rel_tol: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CellFailure {
    pub row: usize,
    pub column: String,
    pub x: f64,
    pub code: i32,
    pub message: String,
}

/// A computed table; failed cells hold NaN.
#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub failures: Vec<CellFailure>,
    /// Computed values per row, not counting error columns.
    pub per_row: usize,
}

impl Table {
    fn exit_code(&self) -> i32 {
        self.failures
            .iter()
            .map(|f| f.code)
            .min()
            .unwrap_or(EXIT_OK)
    }

    fn cells(&self) -> usize {
        self.rows.len() * self.per_row
    }
}

pub fn parse_models(s: &str) -> Result<Vec<TemplateModel>, String> {
    if s.trim() == "all" {
        return Ok(TemplateModel::COMPARED.to_vec());
    }
    let mut out = Vec::new();
    for name in s.split(',').map(str::trim).filter(|n| !n.is_empty()) {
        let m: TemplateModel = name.parse().map_err(|e: Error| e.to_string())?;
        if !out.contains(&m) {
            out.push(m);
        }
    }
    if out.is_empty() {
        return Err("no models given".into());
    }
    Ok(out)
}

fn cell(
    kind: SweepKind,
    s: &Series,
    var: GridVar,
    x: f64,
    rel_tol: f64,
) -> crate::Result<(f64, f64)> {
    let (mut e, mut l, mut pd, mut p) = (s.e_over_m, s.l_over_lambda_c, s.pd_over_m, 0.0);
    match var {
        GridVar::P => p = x,
        GridVar::EOverM => e = x,
        GridVar::LOverLambdaC => l = x,
        GridVar::PdOverM => pd = x,
        GridVar::R | GridVar::Sigma => unreachable!("overlap grids are not model sweeps"),
    }
    let params = DetectorParams::compton(e);
    let medium = Medium::new(s.nu);
    match kind {
        SweepKind::Template => Ok((
            template(&TemplateQuery::new(s.model, params, medium, p))?,
            0.0,
        )),
        SweepKind::Rate => {
            let state = GaussianState::new(l, pd)?;
            let r = rate_quadrature_gaussian(
                s.model,
                &params,
                &medium,
                &state,
                &Coupling::unit(),
                rel_tol,
            )?;
            Ok((r.rate, r.abs_error_estimate))
        }
    }
}

/// Evaluates every cell in parallel; rows come back in grid order.
pub fn run_sweep(spec: &SweepSpec) -> Table {
    let xs = spec.grid.points();
    let mut columns = vec![spec.grid.var.column().to_string()];
    for s in &spec.series {
        columns.push(s.label.clone());
        if spec.kind == SweepKind::Rate {
            columns.push(format!("{}_abs_err", s.label));
        }
    }
    let evaluated: Vec<Vec<crate::Result<(f64, f64)>>> = xs
        .par_iter()
        .map(|&x| {
            spec.series
                .par_iter()
                .map(|s| cell(spec.kind, s, spec.grid.var, x, spec.rel_tol))
                .collect()
        })
        .collect();
    let mut rows = Vec::with_capacity(xs.len());
    let mut failures = Vec::new();
    for (i, (x, cells)) in xs.iter().zip(evaluated).enumerate() {
        let mut row = vec![*x];
        for (s, c) in spec.series.iter().zip(cells) {
            match c {
                Ok((v, err)) => {
                    row.push(v);
                    if spec.kind == SweepKind::Rate {
                        row.push(err);
                    }
                }
                Err(e) => {
                    row.push(f64::NAN);
                    if spec.kind == SweepKind::Rate {
                        row.push(f64::NAN);
                    }
                    failures.push(CellFailure {
                        row: i,
                        column: s.label.clone(),
                        x: *x,
                        code: error_code(&e),
                        message: e.to_string(),
                    });
                }
            }
        }
        rows.push(row);
    }
    Table {
        columns,
        rows,
        failures,
        per_row: spec.series.len(),
    }
}

/// `{:.16e}` with a fixed NaN sentinel.
pub fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{v:.16e}")
    }
}

fn json_float(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

pub fn render_csv(header: &[String], table: &Table) -> String {
    let mut s = String::new();
    for h in header {
        let _ = writeln!(s, "# {h}");
    }
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(&table.columns).expect("in-memory write");
    for row in &table.rows {
        w.write_record(row.iter().map(|&v| fmt_float(v)))
            .expect("in-memory write");
    }
    let body = w.into_inner().expect("in-memory flush");
    s.push_str(std::str::from_utf8(&body).expect("CSV is UTF-8"));
    s
}

pub fn render_json(header: &[String], table: &Table) -> String {
    let rows: Vec<Vec<Value>> = table
        .rows
        .iter()
        .map(|r| r.iter().map(|&v| json_float(v)).collect())
        .collect();
    let v = json!({ "header": header, "columns": table.columns, "rows": rows });
    let mut s = serde_json::to_string_pretty(&v).expect("table serializes");
    s.push('\n');
    s
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

fn write_file(path: &Path, body: &str) -> Result<(), CliError> {
    fs::write(path, body).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn emit(out: Option<&Path>, body: &str, manifest: Value) -> Result<(), CliError> {
    match out {
        Some(path) => {
            write_file(path, body)?;
            let mut m = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
            m.push('\n');
            write_file(&manifest_path(path), &m)
        }
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn base_manifest(subcommand: &str, rerun: Vec<String>) -> Value {
    json!({
        "tool": "udw",
        "version": VERSION,
        "git_describe": GIT_DESCRIBE,
        "subcommand": subcommand,
        "rerun": rerun,
    })
}

fn sweep_header(spec: &SweepSpec) -> Vec<String> {
    let kind = match spec.kind {
        SweepKind::Template => "template",
        SweepKind::Rate => "rate",
    };
    let mut h = vec![format!("udw {VERSION} {kind} sweep")];
    h.push(format!("grid={} rel_tol={:e}", spec.grid, spec.rel_tol));
    for s in &spec.series {
        h.push(format!(
            "series {}: model={} E_over_m={} nu={} L_over_lambda_c={} pD_over_m={}",
            s.label, s.model, s.e_over_m, s.nu, s.l_over_lambda_c, s.pd_over_m
        ));
    }
    if spec.kind == SweepKind::Template {
        h.push("units: template in m".into());
    } else {
        h.push("units: rate in lambda^2 m".into());
    }
    h
}

fn finish_table(
    spec: &SweepSpec,
    table: &Table,
    format: Format,
    out: Option<&Path>,
    rerun: Vec<String>,
    preset: Option<&str>,
) -> Result<(), CliError> {
    let header = sweep_header(spec);
    let body = match format {
        Format::Csv => render_csv(&header, table),
        Format::Json => render_json(&header, table),
    };
    let sub = match spec.kind {
        SweepKind::Template => "template",
        SweepKind::Rate => "rate",
    };
    let mut manifest = base_manifest(sub, rerun);
    manifest["spec"] = serde_json::to_value(spec).expect("spec serializes");
    manifest["format"] = json!(format.name());
    manifest["preset"] = json!(preset);
    manifest["failures"] = serde_json::to_value(&table.failures).expect("failures serialize");
    emit(out, &body, manifest)?;
    if table.failures.is_empty() {
        Ok(())
    } else {
        for f in &table.failures {
            eprintln!(
                "row {} ({}={}), {}: {}",
                f.row,
                spec.grid.var.column(),
                f.x,
                f.column,
                f.message
            );
        }
        Err(CliError::Rows {
            failed: table.failures.len(),
            total: table.cells(),
            code: table.exit_code(),
        })
    }
}

fn sweep_spec(kind: SweepKind, a: &SweepArgs) -> Result<SweepSpec, CliError> {
    let models = parse_models(&a.model).map_err(usage)?;
    let default_grid = match kind {
        SweepKind::Template => "p_over_m:1e-3:10:500:log",
        SweepKind::Rate => "E_over_m:1e-3:10:100:log",
    };
    let grid: Grid = a
        .grid
        .as_deref()
        .unwrap_or(default_grid)
        .parse()
        .map_err(usage)?;
    let allowed: &[GridVar] = match kind {
        SweepKind::Template => &[GridVar::P],
        SweepKind::Rate => &[GridVar::EOverM, GridVar::LOverLambdaC, GridVar::PdOverM],
    };
    if !allowed.contains(&grid.var) {
        return Err(usage(format!(
            "grid variable {} is not valid here",
            grid.var.column()
        )));
    }
    check_rel_tol(a.rel_tol)?;
    let series = models
        .into_iter()
        .map(|model| Series {
            label: model.name().to_string(),
            model,
            e_over_m: a.e_over_m,
            nu: a.nu,
            l_over_lambda_c: a.l,
            pd_over_m: a.pd,
        })
        .collect();
    Ok(SweepSpec {
        kind,
        grid,
        series,
        rel_tol: a.rel_tol,
    })
}

fn check_rel_tol(t: f64) -> Result<(), CliError> {
    if (1e-12..=1e-3).contains(&t) {
        Ok(())
    } else {
        Err(usage(format!(
            "--rel-tol must lie in [1e-12, 1e-3], got {t}"
        )))
    }
}

fn sweep_rerun(sub: &str, a: &SweepArgs, spec: &SweepSpec) -> Vec<String> {
    let models: Vec<&str> = spec.series.iter().map(|s| s.model.name()).collect();
    let mut v: Vec<String> = vec![
        "udw".into(),
        sub.into(),
        "--model".into(),
        models.join(","),
        "--E-over-m".into(),
        a.e_over_m.to_string(),
        "--nu".into(),
        a.nu.to_string(),
        "--L".into(),
        a.l.to_string(),
        "--pD".into(),
        a.pd.to_string(),
        "--grid".into(),
        spec.grid.to_string(),
        "--rel-tol".into(),
        format!("{:e}", a.rel_tol),
        "--format".into(),
        a.format.name().into(),
    ];
    if let Some(out) = &a.out {
        v.push("--out".into());
        v.push(out.display().to_string());
    }
    v
}

fn run_sweep_command(kind: SweepKind, a: &SweepArgs) -> Result<(), CliError> {
    let spec = sweep_spec(kind, a)?;
    let table = run_sweep(&spec);
    let sub = if kind == SweepKind::Template {
        "template"
    } else {
        "rate"
    };
    finish_table(
        &spec,
        &table,
        a.format,
        a.out.as_deref(),
        sweep_rerun(sub, a, &spec),
        None,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComparePoint {
    pub e_over_m: f64,
    pub nu: f64,
    pub l_over_lambda_c: f64,
    pub pd_over_m: f64,
    pub l_times_excited_mass: f64,
    pub rate_a: f64,
    pub rate_b: f64,
    pub fractional_difference: f64,
    pub expansion_prediction: f64,
}

/// Analytic vacuum rate when one exists for the model and state, otherwise quadrature.
pub fn best_rate(
    model: TemplateModel,
    params: &DetectorParams,
    medium: &Medium,
    state: &GaussianState,
    rel_tol: f64,
) -> crate::Result<RateResult> {
    let c = Coupling::unit();
    let analytic = medium.is_vacuum()
        && state.mean_momentum == 0.0
        && matches!(
            model,
            TemplateModel::RelFirst | TemplateModel::RelSecondCorrected
        );
    if analytic {
        rate_analytic_vacuum(model, params, medium, state, &c)
    } else {
        rate_quadrature_gaussian(model, params, medium, state, &c, rel_tol)
    }
}

pub fn compare_point(
    a: TemplateModel,
    b: TemplateModel,
    e: f64,
    nu: f64,
    l: f64,
    pd: f64,
    rel_tol: f64,
) -> crate::Result<ComparePoint> {
    let params = DetectorParams::compton(e);
    let medium = Medium::new(nu);
    let state = GaussianState::new(l, pd)?;
    let ra = best_rate(a, &params, &medium, &state, rel_tol)?.rate;
    let rb = if a == b {
        ra
    } else {
        best_rate(b, &params, &medium, &state, rel_tol)?.rate
    };
    let lm = l * params.excited_mass();
    Ok(ComparePoint {
        e_over_m: e,
        nu,
        l_over_lambda_c: l,
        pd_over_m: pd,
        l_times_excited_mass: lm,
        rate_a: ra,
        rate_b: rb,
        fractional_difference: fractional_difference(ra, rb),
        expansion_prediction: 3.0 / (lm * lm),
    })
}

/// The hydrogen-scale headline: RelFirst vs RelSecondCorrected at a₀ width
/// and the Lyman-α gap, in vacuum.
pub fn hydrogen_headline() -> crate::Result<ComparePoint> {
    compare_point(
        TemplateModel::RelFirst,
        TemplateModel::RelSecondCorrected,
        hydrogen::gap_over_m(),
        1.0,
        hydrogen::width_over_lambda_c(),
        0.0,
        DEFAULT_REL_TOL,
    )
}

fn run_compare(a: &CompareArgs) -> Result<(), CliError> {
    let models = parse_models(&a.model).map_err(usage)?;
    let (ma, mb) = match (a.model.split(',').count(), models.as_slice()) {
        (1, [m]) => (*m, *m),
        (2, [m]) => (*m, *m),
        (2, [m, n]) => (*m, *n),
        _ => return Err(usage("compare needs exactly two models")),
    };
    check_rel_tol(a.rel_tol)?;
    let (mut e, mut l) = (a.e_over_m, a.l);
    match a.preset.as_deref() {
        None => {}
        Some("hydrogen") => {
            e = hydrogen::gap_over_m();
            l = hydrogen::width_over_lambda_c();
            if a.nu != 1.0 || a.pd != 0.0 {
                return Err(usage("the hydrogen preset is a vacuum, p_D = 0 comparison"));
            }
        }
        Some(other) => return Err(usage(format!("unknown compare preset `{other}`"))),
    }
    let grid = match &a.grid {
        Some(g) => {
            let g: Grid = g.parse().map_err(usage)?;
            if !matches!(
                g.var,
                GridVar::EOverM | GridVar::LOverLambdaC | GridVar::PdOverM
            ) {
                return Err(usage(format!(
                    "grid variable {} is not valid here",
                    g.var.column()
                )));
            }
            Some(g)
        }
        None => None,
    };
    let xs = grid.map(|g| g.points()).unwrap_or_else(|| vec![f64::NAN]);
    let results: Vec<crate::Result<ComparePoint>> = xs
        .par_iter()
        .map(|&x| {
            let (mut e, mut l, mut pd) = (e, l, a.pd);
            match grid.map(|g| g.var) {
                Some(GridVar::EOverM) => e = x,
                Some(GridVar::LOverLambdaC) => l = x,
                Some(GridVar::PdOverM) => pd = x,
                _ => {}
            }
            compare_point(ma, mb, e, a.nu, l, pd, a.rel_tol)
        })
        .collect();
    let mut points = Vec::new();
    let mut failures = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(p) => points.push(serde_json::to_value(p).expect("point serializes")),
            Err(e) => {
                points.push(Value::Null);
                failures.push(CellFailure {
                    row: i,
                    column: "compare".into(),
                    x: xs[i],
                    code: error_code(&e),
                    message: e.to_string(),
                });
            }
        }
    }
    let headline = hydrogen_headline()?;
    let report = json!({
        "models": [ma.name(), mb.name()],
        "points": points,
        "hydrogen": {
            "L_over_lambda_c": headline.l_over_lambda_c,
            "E_over_m": headline.e_over_m,
            "L_times_excited_mass": headline.l_times_excited_mass,
            "rate_rel_first": headline.rate_a,
            "rate_rel_second": headline.rate_b,
            "fractional_difference": headline.fractional_difference,
            "expansion_prediction": headline.expansion_prediction,
        },
        "failures": failures,
    });
    let mut body = serde_json::to_string_pretty(&report).expect("report serializes");
    body.push('\n');
    let mut rerun: Vec<String> = vec![
        "udw".into(),
        "compare".into(),
        "--model".into(),
        format!("{},{}", ma.name(), mb.name()),
        "--E-over-m".into(),
        a.e_over_m.to_string(),
        "--nu".into(),
        a.nu.to_string(),
        "--L".into(),
        a.l.to_string(),
        "--pD".into(),
        a.pd.to_string(),
        "--rel-tol".into(),
        format!("{:e}", a.rel_tol),
    ];
    if let Some(g) = &grid {
        rerun.extend(["--grid".into(), g.to_string()]);
    }
    if let Some(p) = &a.preset {
        rerun.extend(["--preset".into(), p.clone()]);
    }
    if let Some(out) = &a.out {
        rerun.extend(["--out".into(), out.display().to_string()]);
    }
    emit(a.out.as_deref(), &body, base_manifest("compare", rerun))?;
    match failures.iter().map(|f| f.code).min() {
        None => Ok(()),
        Some(code) => Err(CliError::Rows {
            failed: failures.len(),
            total: xs.len(),
            code,
        }),
    }
}

fn run_overlap(a: &OverlapArgs) -> Result<(), CliError> {
    let grid: Grid = a
        .grid
        .as_deref()
        .unwrap_or("Mr:0.1:20:100:log")
        .parse()
        .map_err(usage)?;
    let xs = grid.points();
    let m = a.mass;
    let (columns, evaluated): (Vec<String>, Vec<crate::Result<Vec<f64>>>) = match grid.var {
        GridVar::R => (
            vec!["Mr".into(), "r".into(), "kernel".into(), "ln_kernel".into()],
            xs.par_iter()
                .map(|&x| {
                    let q = OverlapQuery::new(m, x / m);
                    Ok(vec![x / m, overlap_kernel(&q)?, ln_overlap_kernel(&q)?])
                })
                .collect(),
        ),
        GridVar::Sigma => (
            vec![
                "sigma_over_lambda_c".into(),
                "first_quantized".into(),
                "predicted".into(),
                "integrated".into(),
                "rel_difference".into(),
            ],
            xs.par_iter()
                .map(|&x| {
                    let s = compton_expansion_coefficients(m, x / m, 2)?;
                    Ok(vec![
                        s.first_quantized,
                        s.predicted,
                        s.integrated,
                        s.rel_difference(),
                    ])
                })
                .collect(),
        ),
        other => {
            return Err(usage(format!(
                "grid variable {} is not valid here",
                other.column()
            )))
        }
    };
    let width = columns.len() - 1;
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (i, (x, r)) in xs.iter().zip(evaluated).enumerate() {
        let mut row = vec![*x];
        match r {
            Ok(v) => row.extend(v),
            Err(e) => {
                row.extend(std::iter::repeat(f64::NAN).take(width));
                failures.push(CellFailure {
                    row: i,
                    column: "overlap".into(),
                    x: *x,
                    code: error_code(&e),
                    message: e.to_string(),
                });
            }
        }
        rows.push(row);
    }
    let table = Table {
        columns,
        rows,
        failures,
        per_row: 1,
    };
    let header = vec![
        format!("udw {VERSION} overlap"),
        format!("mass={m} grid={grid}"),
    ];
    let body = match a.format {
        Format::Csv => render_csv(&header, &table),
        Format::Json => render_json(&header, &table),
    };
    let mut rerun: Vec<String> = vec![
        "udw".into(),
        "overlap".into(),
        "--mass".into(),
        m.to_string(),
        "--grid".into(),
        grid.to_string(),
        "--format".into(),
        a.format.name().into(),
    ];
    if let Some(out) = &a.out {
        rerun.extend(["--out".into(), out.display().to_string()]);
    }
    let mut manifest = base_manifest("overlap", rerun);
    manifest["failures"] = serde_json::to_value(&table.failures).expect("failures serialize");
    emit(a.out.as_deref(), &body, manifest)?;
    if table.failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Rows {
            failed: table.failures.len(),
            total: table.cells(),
            code: table.exit_code(),
        })
    }
}

fn series(model: TemplateModel, label: String, e: f64, nu: f64, l: f64) -> Series {
    Series {
        label,
        model,
        e_over_m: e,
        nu,
        l_over_lambda_c: l,
        pd_over_m: 0.0,
    }
}

/// The sweep behind a figure preset.
pub fn preset_spec(name: &str, rel_tol: f64) -> Option<SweepSpec> {
    let p_grid = Grid::new(GridVar::P, 1e-3, 10.0, 500, Spacing::Log);
    let e_grid = Grid::new(GridVar::EOverM, 1e-3, 10.0, 100, Spacing::Log);
    let templates = |e: f64, nu: f64| SweepSpec {
        kind: SweepKind::Template,
        grid: p_grid,
        series: TemplateModel::COMPARED
            .iter()
            .map(|&m| series(m, m.name().into(), e, nu, 1.0))
            .collect(),
        rel_tol,
    };
    let rel = [TemplateModel::RelFirst, TemplateModel::RelSecondCorrected];
    let media = |l: f64| SweepSpec {
        kind: SweepKind::Rate,
        grid: e_grid,
        series: rel
            .iter()
            .flat_map(|&m| {
                [0.1, 1.0].map(|nu| series(m, format!("{}@nu={nu}", m.name()), 0.0, nu, l))
            })
            .collect(),
        rel_tol,
    };
    let vacuum_all = |l: f64| SweepSpec {
        kind: SweepKind::Rate,
        grid: e_grid,
        series: TemplateModel::COMPARED
            .iter()
            .map(|&m| series(m, m.name().into(), 0.0, 1.0, l))
            .collect(),
        rel_tol,
    };
    let widths = |m: TemplateModel| SweepSpec {
        kind: SweepKind::Rate,
        grid: e_grid,
        series: [0.1, 0.3, 1.0, 3.0, 10.0]
            .map(|l| series(m, format!("{}@L={l}", m.name()), 0.0, 1.0, l))
            .to_vec(),
        rel_tol,
    };
    Some(match name {
        "fig1a" => templates(0.001, 1.0),
        "fig1b" => templates(10.0, 1.0),
        "fig2a" => templates(0.001, 0.1),
        "fig2b" => templates(0.001, 0.9),
        "fig3a" => media(0.1),
        "fig3b" => media(10.0),
        "fig4a" => vacuum_all(0.1),
        "fig4b" => vacuum_all(10.0),
        "fig5a" => widths(TemplateModel::RelFirst),
        "fig5b" => widths(TemplateModel::RelSecondCorrected),
        _ => return None,
    })
}

fn run_figure(a: &FigureArgs) -> Result<(), CliError> {
    check_rel_tol(a.rel_tol)?;
    let names: Vec<&str> = if a.preset == "all" {
        PRESETS.to_vec()
    } else if PRESETS.contains(&a.preset.as_str()) {
        vec![a.preset.as_str()]
    } else {
        return Err(usage(format!(
            "unknown preset `{}`; expected one of {} or all",
            a.preset,
            PRESETS.join(", ")
        )));
    };
    fs::create_dir_all(&a.out).map_err(|source| CliError::Io {
        path: a.out.clone(),
        source,
    })?;
    let mut worst: Option<CliError> = None;
    for name in names {
        let spec = preset_spec(name, a.rel_tol).expect("preset exists");
        let table = run_sweep(&spec);
        let path = a.out.join(format!("{name}.csv"));
        let rerun = vec![
            "udw".into(),
            "figure".into(),
            "--preset".into(),
            name.into(),
            "--out".into(),
            a.out.display().to_string(),
            "--rel-tol".into(),
            format!("{:e}", a.rel_tol),
        ];
        if let Err(e) = finish_table(&spec, &table, Format::Csv, Some(&path), rerun, Some(name)) {
            match e {
                CliError::Rows { .. } => {
                    eprintln!("{name}: {e}");
                    if worst
                        .as_ref()
                        .map_or(true, |w| e.exit_code() < w.exit_code())
                    {
                        worst = Some(e);
                    }
                }
                other => return Err(other),
            }
        }
    }
    worst.map_or(Ok(()), Err)
}

fn thread_cap() -> Result<Option<usize>, CliError> {
    match std::env::var("UDW_THREADS") {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(usage(format!(
                "UDW_THREADS must be a positive integer, got `{s}`"
            ))),
        },
    }
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    let run = || match &cli.command {
        Command::Template(a) => run_sweep_command(SweepKind::Template, a),
        Command::Rate(a) => run_sweep_command(SweepKind::Rate, a),
        Command::Compare(a) => run_compare(a),
        Command::Overlap(a) => run_overlap(a),
        Command::Figure(a) => run_figure(a),
    };
    match thread_cap()? {
        None => run(),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| usage(format!("cannot build thread pool: {e}")))?;
            pool.install(run)
        }
    }
}

/// Parses `args` and runs, returning the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("udw: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g: Grid = "p:1e-3:10:5:log".parse().unwrap();
        let pts = g.points();
        assert_eq!(pts.len(), 5);
        assert_eq!(pts[0], 1e-3);
        assert_eq!(pts[4], 10.0);
        assert!((pts[2] - 0.1).abs() < 1e-15);
        assert_eq!(
            "E:0.5:0.5:1:linear".parse::<Grid>().unwrap().points(),
            vec![0.5]
        );
        for bad in [
            "p:0:1:5:log",
            "p:1:0:5:linear",
            "p:0:1:0:linear",
            "q:0:1:2:linear",
            "p:0:1",
            "p:0:1:2:cubic",
        ] {
            assert!(bad.parse::<Grid>().is_err(), "{bad}");
        }
        assert_eq!(
            "pD:0:2:3".parse::<Grid>().unwrap().points(),
            vec![0.0, 1.0, 2.0]
        );
        let g: Grid = "L:0.1:10:7:log".parse().unwrap();
        assert_eq!(g.to_string().parse::<Grid>().unwrap(), g);
    }

    #[test]
    fn model_lists() {
        assert_eq!(
            parse_models("all").unwrap(),
            TemplateModel::COMPARED.to_vec()
        );
        assert_eq!(
            parse_models("rel-first, non-rel").unwrap(),
            vec![TemplateModel::RelFirst, TemplateModel::NonRel]
        );
        assert!(parse_models("rel-third").is_err());
    }

    #[test]
    fn float_format() {
        assert_eq!(fmt_float(0.001), "1.0000000000000000e-3");
        assert_eq!(fmt_float(f64::NAN), "NaN");
        assert_eq!(fmt_float(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn every_preset_builds() {
        for p in PRESETS {
            let s = preset_spec(p, 1e-9).unwrap();
            assert!(!s.series.is_empty());
        }
        assert!(preset_spec("fig6", 1e-9).is_none());
    }

    #[test]
    fn reflexive_compare_is_zero() {
        let p = compare_point(
            TemplateModel::NonRel,
            TemplateModel::NonRel,
            0.01,
            0.5,
            2.0,
            0.3,
            1e-9,
        )
        .unwrap();
        assert_eq!(p.fractional_difference, 0.0);
    }

    #[test]
    fn failed_cells_become_nan() {
        let spec = SweepSpec {
            kind: SweepKind::Template,
            grid: Grid::new(GridVar::P, 0.0, 1.0, 2, Spacing::Linear),
            series: vec![series(
                TemplateModel::RelFirst,
                "bad".into(),
                -1.0,
                1.0,
                1.0,
            )],
            rel_tol: 1e-9,
        };
        let t = run_sweep(&spec);
        assert!(t.rows.iter().all(|r| r[1].is_nan()));
        assert_eq!(t.failures.len(), 2);
        assert_eq!(t.exit_code(), EXIT_DOMAIN);
    }
}
