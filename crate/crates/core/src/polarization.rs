//! Circular polarisation from two coincident arrays.
//!
//! One array is phased for Ex and the other for Ez. On axis the two focal
//! fields are already in quadrature, so the polarisation is circular enough
//! when their amplitude ratio stays within 2.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fieldmap::{evaluate_map, FieldMap, GridSpec};
use crate::radiator::{conjugate_phases, field_at_unchecked, ArrayGeometry, FocusStrategy};

/// Largest amplitude ratio still counted as circular.
pub const CP_AXIAL_RATIO_LIMIT: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxialRatioResult {
    pub n_elements: usize,
    pub focus_z: f64,
    pub ex_peak: f64,
    pub ez_peak: f64,
    /// `max/min` of the two peaks; infinite when one of them vanishes.
    pub axial_ratio: f64,
    pub is_cp: bool,
}

impl AxialRatioResult {
    pub fn from_peaks(n_elements: usize, focus_z: f64, ex_peak: f64, ez_peak: f64) -> Self {
        let (hi, lo) = if ex_peak >= ez_peak {
            (ex_peak, ez_peak)
        } else {
            (ez_peak, ex_peak)
        };
        let axial_ratio = if lo > 0.0 { hi / lo } else { f64::INFINITY };
        Self {
            n_elements,
            focus_z,
            ex_peak,
            ez_peak,
            axial_ratio,
            is_cp: axial_ratio <= CP_AXIAL_RATIO_LIMIT,
        }
    }

    pub fn axial_ratio_db(&self) -> f64 {
        20.0 * self.axial_ratio.log10()
    }
}

/// Focal |Ex| of the Ex-phased array against focal |Ez| of the Ez-phased
/// array, both sharing `geom`.
pub fn axial_ratio_at_focus(geom: &ArrayGeometry, focus_z: f64) -> Result<AxialRatioResult> {
    let ex = conjugate_phases(geom, focus_z, FocusStrategy::Ex)?;
    let ez = conjugate_phases(geom, focus_z, FocusStrategy::Ez)?;
    Ok(AxialRatioResult::from_peaks(
        geom.n_elements(),
        focus_z,
        field_at_unchecked(geom, &ex, 0.0, focus_z).ex.norm(),
        field_at_unchecked(geom, &ez, 0.0, focus_z).ez.norm(),
    ))
}

pub fn axial_ratio_sweep(
    spacing: f64,
    wavelength: f64,
    focus_z: f64,
    n_list: &[usize],
) -> Result<Vec<AxialRatioResult>> {
    n_list
        .par_iter()
        .map(|&n| axial_ratio_at_focus(&ArrayGeometry::new(n, spacing, wavelength)?, focus_z))
        .collect()
}

/// Smallest element count whose axial ratio is within the CP limit.
///
/// Doubles until the limit is met, then bisects. Odd and even counts place
/// elements differently, so the count just below the bisection result is
/// checked as well.
pub fn min_elements_for_cp(spacing: f64, wavelength: f64, focus_z: f64) -> Result<usize> {
    const MAX_ELEMENTS: usize = 1 << 24;
    let is_cp = |n: usize| -> Result<bool> {
        Ok(axial_ratio_at_focus(&ArrayGeometry::new(n, spacing, wavelength)?, focus_z)?.is_cp)
    };
    let mut hi = 1;
    while !is_cp(hi)? {
        hi *= 2;
        if hi > MAX_ELEMENTS {
            return Err(Error::domain(format!(
                "no array up to {MAX_ELEMENTS} elements reaches the CP limit"
            )));
        }
    }
    let mut lo = hi / 2;
    // invariant: !is_cp(lo) (or lo == 0), is_cp(hi)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if is_cp(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    while hi > 1 && is_cp(hi - 1)? {
        hi -= 1;
    }
    Ok(hi)
}

/// Ex of the Ex-phased array and Ez of the Ez-phased array on one grid.
/// `Component::Total` magnitudes of the result give the combined field.
pub fn cp_field_map(geom: &ArrayGeometry, focus_z: f64, grid: &GridSpec) -> Result<FieldMap> {
    let ex_map = evaluate_map(
        geom,
        &conjugate_phases(geom, focus_z, FocusStrategy::Ex)?,
        grid,
    )?;
    let ez_map = evaluate_map(
        geom,
        &conjugate_phases(geom, focus_z, FocusStrategy::Ez)?,
        grid,
    )?;
    FieldMap::from_samples(
        *grid,
        geom.wavelength(),
        ex_map.ex().to_vec(),
        ez_map.ez().to_vec(),
    )
}
