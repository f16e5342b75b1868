//! JSON run configuration.
//!
//! Lengths may be given in metres (a bare number) or in wavelengths
//! (`{"wavelengths": 20}`). Everything is checked and resolved into library
//! types before a command computes anything.

use std::fs;
use std::path::{Path, PathBuf};

use nearfocus::fieldmap::GridSpec;
use nearfocus::multipath::{GrazingAngle, Ground, Polarization, TwoRaySetup};
use nearfocus::radiator::{ArrayGeometry, FocusStrategy};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const DEFAULT_FREQUENCY: f64 = 6e9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Length {
    Metres(f64),
    Wavelengths { wavelengths: f64 },
}

impl Length {
    pub fn metres(self, wavelength: f64) -> f64 {
        match self {
            Length::Metres(m) => m,
            Length::Wavelengths { wavelengths } => wavelengths * wavelength,
        }
    }

    pub fn wl(wavelengths: f64) -> Self {
        Length::Wavelengths { wavelengths }
    }
}

fn default_frequency() -> f64 {
    DEFAULT_FREQUENCY
}

fn yes() -> bool {
    true
}

fn one() -> usize {
    1
}

fn ninety_percent() -> f64 {
    0.9
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Hz; defaults to 6 GHz.
    #[serde(default = "default_frequency")]
    pub frequency: f64,
    /// Element spacing; defaults to half a wavelength.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spacing: Option<Length>,
    /// Where outputs go; defaults to the current directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phases: Option<ArrayBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fieldmap: Option<FieldmapBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<ProfileBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub converge: Option<ConvergeBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axial_ratio: Option<AxialRatioBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling: Option<CouplingBlock>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrayBlock {
    pub n_elements: usize,
    pub focus_z: Length,
    #[serde(default = "default_strategy")]
    pub strategy: FocusStrategy,
}

fn default_strategy() -> FocusStrategy {
    FocusStrategy::Ex
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridBlock {
    pub x_range: [Length; 2],
    pub z_range: [Length; 2],
    pub nx: usize,
    pub nz: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundBlock {
    pub tx_height: Length,
    /// Defaults to the array height.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rx_height: Option<Length>,
    pub ground: Ground,
    #[serde(default = "default_polarization")]
    pub polarization: Polarization,
    #[serde(default)]
    pub grazing_angle: GrazingAngle,
}

fn default_polarization() -> Polarization {
    Polarization::Horizontal
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalUnits {
    /// Element current in amperes.
    pub current: f64,
    /// Dipole length in metres.
    pub dipole_length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldmapBlock {
    pub n_elements: usize,
    pub focus_z: Length,
    #[serde(default = "default_strategy")]
    pub strategy: FocusStrategy,
    pub grid: GridBlock,
    /// Divide by the peak within ±2λ of the focus.
    #[serde(default = "yes")]
    pub normalize: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub physical_units: Option<PhysicalUnits>,
    /// Only used with `--ground`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground: Option<GroundBlock>,
}

fn default_span() -> Length {
    Length::wl(2.0)
}

fn default_step() -> Length {
    Length::wl(0.01)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileBlock {
    pub n_elements: usize,
    pub focus_z: Length,
    #[serde(default = "default_strategy")]
    pub strategy: FocusStrategy,
    #[serde(default = "default_span")]
    pub span: Length,
    #[serde(default = "default_step")]
    pub step: Length,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergeBlock {
    pub focus_z: Length,
    #[serde(default = "one")]
    pub n_min: usize,
    pub n_max: usize,
    #[serde(default = "one")]
    pub n_step: usize,
    #[serde(default = "ninety_percent")]
    pub threshold_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxialRatioBlock {
    pub focus_z: Vec<Length>,
    #[serde(default = "one")]
    pub n_min: usize,
    pub n_max: usize,
    #[serde(default = "one")]
    pub n_step: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingBlock {
    pub separation_start: Length,
    pub separation_stop: Length,
    pub count: usize,
}

impl RunConfig {
    pub fn from_path(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| {
            CliError::config("<file>", format!("cannot read {}: {e}", path.display()))
        })?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| {
            let message = e.to_string();
            let key = offending_key(&message).unwrap_or_else(|| "<document>".to_string());
            CliError::config(key, message)
        })
    }

    /// Frequency, wavelength and spacing after validation.
    pub fn base(&self) -> CliResult<Base> {
        if !(self.frequency > 0.0) || !self.frequency.is_finite() {
            return Err(CliError::config(
                "frequency",
                format!("must be a positive number of hertz, got {}", self.frequency),
            ));
        }
        let wavelength = nearfocus::wavelength_from_frequency(self.frequency);
        let spacing = match self.spacing {
            Some(s) => positive("spacing", s.metres(wavelength))?,
            None => 0.5 * wavelength,
        };
        Ok(Base {
            frequency: self.frequency,
            wavelength,
            spacing,
        })
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output_dir
            .clone()
            .unwrap_or_else(|| PathBuf::from("."))
    }
}

/// Pull a field name out of a serde_json message such as
/// "unknown field `nxx`, expected ..." or "missing field `nz`".
fn offending_key(message: &str) -> Option<String> {
    let start = message.find('`')? + 1;
    let len = message[start..].find('`')?;
    Some(message[start..start + len].to_string())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Base {
    pub frequency: f64,
    pub wavelength: f64,
    pub spacing: f64,
}

pub fn positive(key: &str, v: f64) -> CliResult<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::config(key, format!("must be positive, got {v}")))
    }
}

pub fn require<'a, T>(block: &'a Option<T>, key: &str) -> CliResult<&'a T> {
    block
        .as_ref()
        .ok_or_else(|| CliError::config(key, "block is required for this command"))
}

pub fn geometry(base: &Base, n: usize, key: &str) -> CliResult<ArrayGeometry> {
    if n == 0 {
        return Err(CliError::config(
            format!("{key}.n_elements"),
            "must be at least 1",
        ));
    }
    ArrayGeometry::new(n, base.spacing, base.wavelength)
        .map_err(CliError::at(&format!("{key}.n_elements")))
}

pub fn grid(base: &Base, g: &GridBlock, key: &str) -> CliResult<GridSpec> {
    let lam = base.wavelength;
    let xr = (g.x_range[0].metres(lam), g.x_range[1].metres(lam));
    let zr = (g.z_range[0].metres(lam), g.z_range[1].metres(lam));
    if g.nx == 0 {
        return Err(CliError::config(format!("{key}.nx"), "must be at least 1"));
    }
    if g.nz == 0 {
        return Err(CliError::config(format!("{key}.nz"), "must be at least 1"));
    }
    if (g.nx == 1) != (xr.0 == xr.1) || !(xr.0 <= xr.1) {
        return Err(CliError::config(
            format!("{key}.x_range"),
            "needs min < max (or min = max with nx = 1)",
        ));
    }
    if !(zr.0 > 0.0) {
        return Err(CliError::config(
            format!("{key}.z_range"),
            "must start in front of the array (z > 0)",
        ));
    }
    if (g.nz == 1) != (zr.0 == zr.1) || !(zr.0 <= zr.1) {
        return Err(CliError::config(
            format!("{key}.z_range"),
            "needs min < max (or min = max with nz = 1)",
        ));
    }
    GridSpec::new(xr, zr, g.nx, g.nz).map_err(CliError::at(key))
}

pub fn two_ray_setup(base: &Base, g: &GroundBlock, key: &str) -> CliResult<TwoRaySetup> {
    let lam = base.wavelength;
    let tx = positive(&format!("{key}.tx_height"), g.tx_height.metres(lam))?;
    let rx = match g.rx_height {
        Some(r) => positive(&format!("{key}.rx_height"), r.metres(lam))?,
        None => tx,
    };
    if let Ground::Dielectric { permittivity } = g.ground {
        if !(permittivity >= 1.0) || !permittivity.is_finite() {
            return Err(CliError::config(
                format!("{key}.ground.permittivity"),
                format!("must be at least 1, got {permittivity}"),
            ));
        }
    }
    let setup = TwoRaySetup {
        tx_height: tx,
        rx_height: rx,
        ground: g.ground,
        grazing_angle: g.grazing_angle,
    };
    setup.validate().map_err(CliError::at(key))?;
    Ok(setup)
}

/// `n_min, n_min + n_step, …, ≤ n_max`.
pub fn ladder(n_min: usize, n_max: usize, n_step: usize, key: &str) -> CliResult<Vec<usize>> {
    if n_min == 0 {
        return Err(CliError::config(
            format!("{key}.n_min"),
            "must be at least 1",
        ));
    }
    if n_step == 0 {
        return Err(CliError::config(
            format!("{key}.n_step"),
            "must be at least 1",
        ));
    }
    if n_max < n_min {
        return Err(CliError::config(
            format!("{key}.n_max"),
            format!("must be at least n_min ({n_min}), got {n_max}"),
        ));
    }
    Ok((n_min..=n_max).step_by(n_step).collect())
}
