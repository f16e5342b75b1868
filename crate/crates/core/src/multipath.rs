//! Two-ray ground reflection in the near field.
//!
//! The array sits at height `h_t` above a flat ground, the receiver plane at
//! `h_r`. Grid `z` is the horizontal range `L_g` and grid `x` the lateral
//! offset along the array. Each element contributes a direct ray and a ray
//! reflected off the ground, the latter weighted by the Fresnel-type
//! coefficient Γ(θ) of the chosen polarisation.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fieldmap::{evaluate_with, FieldMap, GridSpec};
use crate::radiator::{propagator, ArrayGeometry, Excitation};
use crate::SPEED_OF_LIGHT;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Ground {
    Dielectric {
        permittivity: f64,
    },
    /// Perfect conductor, the infinite-permittivity limit.
    Metal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarization {
    Horizontal,
    Vertical,
}

/// How the per-element reflection angle is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrazingAngle {
    /// `atan(√((h_t+h_r)² + x_n²) / √(L1² + x_n²))`.
    #[default]
    ElementRatio,
    /// `atan((h_t+h_r)/L_g)`, the angle of the specular ray itself.
    Specular,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoRayEnvironment {
    pub tx_height: f64,
    pub rx_height: f64,
    pub ground: Ground,
    pub horizontal_range: f64,
}

impl TwoRayEnvironment {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("tx_height", self.tx_height),
            ("rx_height", self.rx_height),
            ("horizontal_range", self.horizontal_range),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::domain(format!("{name} must be positive, got {v}")));
            }
        }
        validate_ground(&self.ground)
    }
}

fn validate_ground(ground: &Ground) -> Result<()> {
    if let Ground::Dielectric { permittivity } = *ground {
        if !(permittivity >= 1.0) || !permittivity.is_finite() {
            return Err(Error::domain(format!(
                "ground permittivity must be at least 1, got {permittivity}"
            )));
        }
    }
    Ok(())
}

/// Γ(θ) for a ray meeting the ground at grazing angle `theta`.
pub fn reflection_coefficient(
    theta: f64,
    ground: &Ground,
    polarization: Polarization,
) -> Result<f64> {
    if !(theta > 0.0 && theta <= FRAC_PI_2) {
        return Err(Error::domain(format!(
            "grazing angle must lie in (0, π/2], got {theta}"
        )));
    }
    validate_ground(ground)?;
    let eps = match *ground {
        Ground::Metal => {
            return Ok(match polarization {
                Polarization::Horizontal => -1.0,
                Polarization::Vertical => 1.0,
            })
        }
        Ground::Dielectric { permittivity } => permittivity,
    };
    // no contrast, no reflection; avoids a rounding residue from √(1 − cos²θ)
    if eps == 1.0 {
        return Ok(0.0);
    }
    let (s, c) = theta.sin_cos();
    let root = (eps - c * c).sqrt();
    let x = match polarization {
        Polarization::Horizontal => root,
        Polarization::Vertical => root / eps,
    };
    Ok((s - x) / (s + x))
}

/// Direct and reflected path bookkeeping for one element.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RayPair {
    pub los_length: f64,
    pub reflected_length: f64,
    pub path_diff: f64,
    pub phase_diff: f64,
    pub delay: f64,
    pub grazing_angle: f64,
}

fn grazing_angle(ht: f64, hr: f64, range: f64, offset: f64, convention: GrazingAngle) -> f64 {
    match convention {
        GrazingAngle::ElementRatio => {
            let l1_sq = (ht - hr) * (ht - hr) + range * range;
            let up = (ht + hr) * (ht + hr) + offset * offset;
            (up.sqrt() / (l1_sq + offset * offset).sqrt()).atan()
        }
        GrazingAngle::Specular => ((ht + hr) / range).atan(),
    }
}

/// Ray lengths for an element at lateral offset `element_offset`.
pub fn ray_geometry(
    env: &TwoRayEnvironment,
    wavelength: f64,
    element_offset: f64,
    convention: GrazingAngle,
) -> Result<RayPair> {
    env.validate()?;
    if !(wavelength > 0.0) {
        return Err(Error::domain("wavelength must be positive"));
    }
    let (ht, hr, lg) = (env.tx_height, env.rx_height, env.horizontal_range);
    let lateral = element_offset * element_offset;
    let los_length = ((ht - hr) * (ht - hr) + lg * lg + lateral).sqrt();
    let reflected_length = ((ht + hr) * (ht + hr) + lg * lg + lateral).sqrt();
    let path_diff = reflected_length - los_length;
    Ok(RayPair {
        los_length,
        reflected_length,
        path_diff,
        phase_diff: 2.0 * PI * path_diff / wavelength,
        delay: path_diff / SPEED_OF_LIGHT,
        grazing_angle: grazing_angle(ht, hr, lg, element_offset, convention),
    })
}

/// Heights, ground and angle convention for a two-ray map. The range comes
/// from each grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoRaySetup {
    pub tx_height: f64,
    pub rx_height: f64,
    pub ground: Ground,
    #[serde(default)]
    pub grazing_angle: GrazingAngle,
}

impl TwoRaySetup {
    pub fn validate(&self) -> Result<()> {
        TwoRayEnvironment {
            tx_height: self.tx_height,
            rx_height: self.rx_height,
            ground: self.ground,
            horizontal_range: 1.0,
        }
        .validate()
    }
}

/// Direct plus ground-reflected field over `grid`.
///
/// Horizontal polarisation fills the map's Ex channel with
/// `Σ w_n [ρ₁² G(ρ₁) + Γ ρ₂² G(ρ₂)]` and vertical polarisation fills Ez with
/// `Σ w_n |x_n| [ρ₁ G(ρ₁) + Γ ρ₂ G(ρ₂)]`, where `ρ₁² = (h_t−h_r)² + z²`,
/// `ρ₂² = (h_t+h_r)² + z²` and `G(ρ) = e^{−jkr}/r³` with `r² = ρ² + (x_n−x)²`.
/// Horizontal uses the excitation weights as given. Vertical uses the path
/// weights: the `|x_n|` factor already carries the sign compensation that the
/// Ez excitation would otherwise supply.
///
/// When Γ is exactly zero the reflected term is skipped, so a reflection-free
/// horizontal map at equal heights is bit-identical to the free-space Ex map.
pub fn two_ray_field(
    geom: &ArrayGeometry,
    excitation: &Excitation,
    setup: &TwoRaySetup,
    grid: &GridSpec,
    polarization: Polarization,
) -> Result<FieldMap> {
    setup.validate()?;
    if excitation.weights().len() != geom.n_elements() {
        return Err(Error::domain("excitation length does not match the array"));
    }
    let k = geom.wavenumber();
    let (ht, hr) = (setup.tx_height, setup.rx_height);
    let dh_los = ht - hr;
    let dh_ref = ht + hr;
    let weights: Vec<Complex64> = match polarization {
        Polarization::Horizontal => excitation.weights().to_vec(),
        Polarization::Vertical => excitation.path_weights(),
    };
    let zero = Complex64::new(0.0, 0.0);

    evaluate_with(grid, geom.wavelength(), |x, z| {
        let rho_los = dh_los * dh_los + z * z;
        let rho_ref = dh_ref * dh_ref + z * z;
        let mut acc = zero;
        for (&xn, &w) in geom.positions().iter().zip(&weights) {
            let theta = grazing_angle(ht, hr, z, xn, setup.grazing_angle);
            // θ from atan of a positive ratio is always in range
            let gamma = reflection_coefficient(theta, &setup.ground, polarization)
                .expect("grazing angle in (0, π/2)");
            let dx = xn - x;
            let term = match polarization {
                Polarization::Horizontal => {
                    let los = propagator(k, rho_los, dx) * rho_los;
                    if gamma == 0.0 {
                        los
                    } else {
                        los + propagator(k, rho_ref, dx) * (gamma * rho_ref)
                    }
                }
                Polarization::Vertical => {
                    let a = xn.abs();
                    let los = propagator(k, rho_los, dx) * (a * rho_los.sqrt());
                    if gamma == 0.0 {
                        los
                    } else {
                        los + propagator(k, rho_ref, dx) * (gamma * a * rho_ref.sqrt())
                    }
                }
            };
            acc += w * term;
        }
        match polarization {
            Polarization::Horizontal => (acc, zero),
            Polarization::Vertical => (zero, acc),
        }
    })
}
