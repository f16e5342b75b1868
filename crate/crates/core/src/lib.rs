//! Near-field focusing with collinear horizontal-dipole linear arrays.
//!
//! The crate models a line of x-directed Hertzian dipoles on `z = 0`, excited
//! with conjugate phases so that their fields add in phase at a focal point
//! on the array axis. Two excitation strategies are supported: one focuses
//! the x-polarised field and one focuses the z-polarised field. Around that
//! core sit:
//!
//! * [`aperture`]: continuous-aperture limits and closed-form beam profiles,
//!   plus the dipole mutual-impedance comparison.
//! * [`fieldmap`]: grid evaluation and focal-metric extraction.
//! * [`polarization`]: circular polarisation from two coincident arrays.
//! * [`multipath`]: the two-ray ground reflection model.
//! * [`specfun`]: the special functions and quadrature everything above uses.
//!
//! Field values are reported in normalised units (the constant element
//! prefactor is dropped) unless a caller asks for physical units.

// `!(x > 0.0)` is how validation rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod aperture;
pub mod error;
pub mod fieldmap;
pub mod multipath;
pub mod polarization;
pub mod radiator;
pub mod specfun;

pub use error::{Error, Result};

/// Nominal speed of light used to convert between frequency and wavelength.
///
/// 6 GHz maps to exactly 0.05 m, which is what the reference phase tables
/// and the 0.025 m half-wavelength spacing assume.
pub const SPEED_OF_LIGHT: f64 = 3.0e8;

/// Free-space wave impedance in ohms.
pub const FREE_SPACE_IMPEDANCE: f64 = 376.73;

/// Wavelength in metres for a frequency in hertz.
pub fn wavelength_from_frequency(frequency: f64) -> f64 {
    SPEED_OF_LIGHT / frequency
}
