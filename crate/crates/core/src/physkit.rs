//! Parameter types shared by every module. Natural units, ħ = c = 1.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rest mass `m` and internal gap `E` of a two-level detector.
///
/// The ground level has mass-energy `M_g = m`, the excited level `M_e = m + E`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorParams {
    pub rest_mass: f64,
    pub gap: f64,
}

impl DetectorParams {
    pub const fn new(rest_mass: f64, gap: f64) -> Self {
        Self { rest_mass, gap }
    }

    /// Constructs and validates against the vacuum.
    pub fn checked(rest_mass: f64, gap: f64) -> Result<Self> {
        let p = Self::new(rest_mass, gap);
        let report = validate(&p, &Medium::vacuum());
        if report.is_empty() {
            Ok(p)
        } else {
            Err(Error::Invalid(report))
        }
    }

    /// Compton units: `m = 1`, gap given as `E/m`.
    pub const fn compton(gap_over_m: f64) -> Self {
        Self::new(1.0, gap_over_m)
    }

    #[inline]
    pub fn ground_mass(&self) -> f64 {
        self.rest_mass
    }

    #[inline]
    pub fn excited_mass(&self) -> f64 {
        self.rest_mass + self.gap
    }

    pub fn compton_wavelength(&self) -> f64 {
        1.0 / self.rest_mass
    }

    /// `M_e² − M_g²` without cancellation.
    #[inline]
    pub fn mass_sq_gap(&self) -> f64 {
        self.gap * (2.0 * self.rest_mass + self.gap)
    }

    #[inline]
    pub fn mass_sq_sum(&self) -> f64 {
        let (g, e) = (self.ground_mass(), self.excited_mass());
        g * g + e * e
    }

    /// `M_e⁴ − M_g⁴` without cancellation.
    #[inline]
    pub fn mass_quartic_gap(&self) -> f64 {
        self.mass_sq_gap() * self.mass_sq_sum()
    }

    /// Energy of the excited level at momentum `p`, relativistic dispersion.
    #[inline]
    pub fn excited_energy(&self, p: f64) -> f64 {
        p.hypot(self.excited_mass())
    }
}

/// Field propagation speed; the field dispersion is `ω(k) = ν|k|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Medium {
    pub nu: f64,
}

impl Medium {
    pub const fn new(nu: f64) -> Self {
        Self { nu }
    }

    pub const fn vacuum() -> Self {
        Self { nu: 1.0 }
    }

    /// True only for `ν == 1` exactly.
    #[inline]
    pub fn is_vacuum(&self) -> bool {
        self.nu == 1.0
    }

    #[inline]
    pub fn omega(&self, k: f64) -> f64 {
        self.nu * k.abs()
    }

    /// `1 − ν²` evaluated as `(1 − ν)(1 + ν)`.
    #[inline]
    pub fn epsilon(&self) -> f64 {
        (1.0 - self.nu) * (1.0 + self.nu)
    }
}

/// Coupling strength, always stored in the first-quantized convention.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    pub lambda_first: f64,
}

impl Coupling {
    pub const fn new(lambda_first: f64) -> Self {
        Self { lambda_first }
    }

    pub const fn unit() -> Self {
        Self { lambda_first: 1.0 }
    }

    /// The second-quantized coupling matching the first-quantized one at `p = 0`.
    pub fn lambda_second(&self, params: &DetectorParams) -> f64 {
        (2.0 * params.mass_sq_sum()).sqrt() * self.lambda_first
    }

    /// `λ²/2π`, the prefactor of every rate.
    #[inline]
    pub fn rate_prefactor(&self) -> f64 {
        self.lambda_first * self.lambda_first / (2.0 * std::f64::consts::PI)
    }
}

impl Default for Coupling {
    fn default() -> Self {
        Self::unit()
    }
}

/// Center-of-mass model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TemplateModel {
    RelFirst,
    RelSecondCorrected,
    /// Second-quantized template without the coupling relation applied.
    /// Carries a different coupling dimension from every other model.
    RelSecondRaw,
    SemiRel,
    NonRel,
    Classical,
}

impl TemplateModel {
    /// The five models compared against each other in sweeps.
    pub const COMPARED: [TemplateModel; 5] = [
        TemplateModel::RelFirst,
        TemplateModel::RelSecondCorrected,
        TemplateModel::SemiRel,
        TemplateModel::NonRel,
        TemplateModel::Classical,
    ];

    pub const ALL: [TemplateModel; 6] = [
        TemplateModel::RelFirst,
        TemplateModel::RelSecondCorrected,
        TemplateModel::RelSecondRaw,
        TemplateModel::SemiRel,
        TemplateModel::NonRel,
        TemplateModel::Classical,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TemplateModel::RelFirst => "rel-first",
            TemplateModel::RelSecondCorrected => "rel-second",
            TemplateModel::RelSecondRaw => "rel-second-raw",
            TemplateModel::SemiRel => "semi-rel",
            TemplateModel::NonRel => "non-rel",
            TemplateModel::Classical => "classical",
        }
    }

    pub fn is_relativistic(self) -> bool {
        matches!(
            self,
            TemplateModel::RelFirst
                | TemplateModel::RelSecondCorrected
                | TemplateModel::RelSecondRaw
        )
    }

    /// False only for the raw second-quantized template, whose coupling has
    /// a different dimension.
    pub fn shares_coupling_dimension(self) -> bool {
        self != TemplateModel::RelSecondRaw
    }
}

impl fmt::Display for TemplateModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TemplateModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        let m = match key.as_str() {
            "rel-first" | "rel1" | "relfirst" => TemplateModel::RelFirst,
            "rel-second" | "rel2" | "rel-second-corrected" | "relsecondcorrected" => {
                TemplateModel::RelSecondCorrected
            }
            "rel-second-raw" | "rel2-raw" | "relsecondraw" => TemplateModel::RelSecondRaw,
            "semi-rel" | "semi" | "semirel" => TemplateModel::SemiRel,
            "non-rel" | "nonrel" | "non" => TemplateModel::NonRel,
            "classical" => TemplateModel::Classical,
            _ => return Err(Error::Domain(format!("unknown model '{s}'"))),
        };
        Ok(m)
    }
}

/// A violated invariant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub field: &'static str,
    pub message: String,
}

/// Every violated invariant of a parameter set; empty iff valid.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn is_valid(&self) -> bool {
        self.is_empty()
    }

    fn push(&mut self, field: &'static str, message: impl Into<String>) {
        self.violations.push(Violation {
            field,
            message: message.into(),
        });
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_empty() {
            Ok(())
        } else {
            Err(Error::Invalid(self))
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msgs: Vec<String> = self
            .violations
            .iter()
            .map(|v| format!("{}: {}", v.field, v.message))
            .collect();
        f.write_str(&msgs.join("; "))
    }
}

pub fn validate(params: &DetectorParams, medium: &Medium) -> ValidationReport {
    let mut r = ValidationReport::default();
    let m = params.rest_mass;
    let e = params.gap;
    let nu = medium.nu;
    if !m.is_finite() || m <= 0.0 {
        r.push("rest_mass", format!("m must be > 0 and finite, got {m}"));
    }
    if !e.is_finite() || e <= 0.0 {
        r.push("gap", format!("E must be > 0 and finite, got {e}"));
    }
    if !nu.is_finite() || nu <= 0.0 {
        r.push("nu", format!("ν must be > 0, got {nu}"));
    } else if nu > 1.0 {
        r.push("nu", format!("ν must be ≤ 1, got {nu}"));
    }
    r
}

/// Dimensionful inputs to be expressed in Compton units.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct DimensionalInputs {
    pub momentum: Option<f64>,
    pub width: Option<f64>,
    pub mean_momentum: Option<f64>,
}

/// Inputs rescaled so that `m = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComptonScaled {
    pub params: DetectorParams,
    pub p_over_m: Option<f64>,
    pub l_over_lambda_c: Option<f64>,
    pub pd_over_m: Option<f64>,
}

pub fn to_compton_units(
    params: &DetectorParams,
    inputs: &DimensionalInputs,
) -> Result<ComptonScaled> {
    let m = params.rest_mass;
    if !(m > 0.0) || !m.is_finite() {
        return Err(Error::Domain(format!(
            "rest mass must be positive to define Compton units, got {m}"
        )));
    }
    Ok(ComptonScaled {
        params: DetectorParams::new(1.0, params.gap / m),
        p_over_m: inputs.momentum.map(|p| p / m),
        l_over_lambda_c: inputs.width.map(|l| l * m),
        pd_over_m: inputs.mean_momentum.map(|p| p / m),
    })
}

/// Inverse of [`to_compton_units`] for a target rest mass `m`.
pub fn from_compton_units(scaled: &ComptonScaled, m: f64) -> (DetectorParams, DimensionalInputs) {
    (
        DetectorParams::new(m, scaled.params.gap * m),
        DimensionalInputs {
            momentum: scaled.p_over_m.map(|p| p * m),
            width: scaled.l_over_lambda_c.map(|l| l / m),
            mean_momentum: scaled.pd_over_m.map(|p| p * m),
        },
    )
}
