//! Unruh-DeWitt detector template functions and spontaneous-emission rates
//! for detectors whose center of mass is itself quantized.
//!
//! Everything is in natural units (ħ = c = 1). Rates are reported in the
//! first-quantized coupling convention.

pub mod cli;
pub mod error;
pub mod localization;
pub mod physkit;
pub mod quad;
pub mod rates;
pub mod specfun;
pub mod states;
pub mod templates;

pub use error::{Error, Result};
pub use physkit::{Coupling, DetectorParams, Medium, TemplateModel};
