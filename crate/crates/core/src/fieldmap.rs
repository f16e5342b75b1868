//! Grid evaluation and focal-spot metrics.
//!
//! A [`FieldMap`] stores `(Ex, Ez)` on a rectangular `(x, z)` grid in
//! row-major order (`iz * nx + ix`). Maps are evaluated in parallel, but each
//! cell is an independent pure computation collected in index order, so the
//! result does not depend on the thread count.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radiator::{
    conjugate_phases, field_at_unchecked, parabolic_vertex, ArrayGeometry, Excitation, FieldSample,
    FocusStrategy,
};

/// Half-size, in wavelengths, of the window around the target focus used for
/// normalisation and peak search. Keeps the strong fields right next to the
/// array out of both.
pub const FOCAL_WINDOW_WAVELENGTHS: f64 = 2.0;

/// Rectangular sampling grid. An axis with a single sample must have equal
/// bounds; otherwise `min < max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_range: (f64, f64),
    pub z_range: (f64, f64),
    pub nx: usize,
    pub nz: usize,
}

impl GridSpec {
    pub fn new(x_range: (f64, f64), z_range: (f64, f64), nx: usize, nz: usize) -> Result<Self> {
        let g = Self {
            x_range,
            z_range,
            nx,
            nz,
        };
        g.validate()?;
        Ok(g)
    }

    /// A single point.
    pub fn point(x: f64, z: f64) -> Result<Self> {
        Self::new((x, x), (z, z), 1, 1)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, (lo, hi), n) in [("x", self.x_range, self.nx), ("z", self.z_range, self.nz)] {
            if !lo.is_finite() || !hi.is_finite() {
                return Err(Error::domain(format!("{name} range must be finite")));
            }
            match n {
                0 => return Err(Error::domain(format!("n{name} must be at least 1"))),
                1 if lo != hi => {
                    return Err(Error::domain(format!(
                        "n{name} = 1 needs equal {name} bounds, got [{lo}, {hi}]"
                    )))
                }
                1 => {}
                _ if !(lo < hi) => {
                    return Err(Error::domain(format!(
                        "{name} range must satisfy min < max, got [{lo}, {hi}]"
                    )))
                }
                _ => {}
            }
        }
        if !(self.z_range.0 > 0.0) {
            return Err(Error::domain(format!(
                "z range must lie in front of the array (z_min > 0), got {}",
                self.z_range.0
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nx * self.nz
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn x_at(&self, ix: usize) -> f64 {
        axis_value(self.x_range, self.nx, ix)
    }

    pub fn z_at(&self, iz: usize) -> f64 {
        axis_value(self.z_range, self.nz, iz)
    }

    pub fn dx(&self) -> f64 {
        axis_step(self.x_range, self.nx)
    }

    pub fn dz(&self) -> f64 {
        axis_step(self.z_range, self.nz)
    }

    /// `(x, z)` of cell `index` in row-major order.
    pub fn coords(&self, index: usize) -> (f64, f64) {
        (self.x_at(index % self.nx), self.z_at(index / self.nx))
    }
}

fn axis_value((lo, hi): (f64, f64), n: usize, i: usize) -> f64 {
    if n == 1 {
        lo
    } else if i == n - 1 {
        hi
    } else {
        lo + (hi - lo) * i as f64 / (n - 1) as f64
    }
}

fn axis_step((lo, hi): (f64, f64), n: usize) -> f64 {
    if n < 2 {
        0.0
    } else {
        (hi - lo) / (n - 1) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    None,
    PeakNearFocus,
}

/// Which magnitude a metric or normalisation looks at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Component {
    Ex,
    Ez,
    Total,
}

impl Component {
    pub fn magnitude(self, ex: Complex64, ez: Complex64) -> f64 {
        match self {
            Component::Ex => ex.norm(),
            Component::Ez => ez.norm(),
            Component::Total => (ex.norm_sqr() + ez.norm_sqr()).sqrt(),
        }
    }
}

impl From<FocusStrategy> for Component {
    fn from(s: FocusStrategy) -> Self {
        match s {
            FocusStrategy::Ex => Component::Ex,
            FocusStrategy::Ez => Component::Ez,
        }
    }
}

/// Sampled field over a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct FieldMap {
    grid: GridSpec,
    wavelength: f64,
    ex: Vec<Complex64>,
    ez: Vec<Complex64>,
    normalization: Normalization,
    peak_value: f64,
}

impl FieldMap {
    /// Assemble a map from precomputed samples.
    pub fn from_samples(
        grid: GridSpec,
        wavelength: f64,
        ex: Vec<Complex64>,
        ez: Vec<Complex64>,
    ) -> Result<Self> {
        grid.validate()?;
        if ex.len() != grid.len() || ez.len() != grid.len() {
            return Err(Error::domain(format!(
                "sample count {}/{} does not match the {}×{} grid",
                ex.len(),
                ez.len(),
                grid.nx,
                grid.nz
            )));
        }
        if !(wavelength > 0.0) {
            return Err(Error::domain("wavelength must be positive"));
        }
        Ok(Self {
            grid,
            wavelength,
            ex,
            ez,
            normalization: Normalization::None,
            peak_value: 1.0,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn ex(&self) -> &[Complex64] {
        &self.ex
    }

    pub fn ez(&self) -> &[Complex64] {
        &self.ez
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    /// Magnitude that was divided out by normalisation (1 for a raw map).
    pub fn peak_value(&self) -> f64 {
        self.peak_value
    }

    pub fn index(&self, ix: usize, iz: usize) -> usize {
        iz * self.grid.nx + ix
    }

    pub fn sample(&self, ix: usize, iz: usize) -> FieldSample {
        let i = self.index(ix, iz);
        FieldSample {
            ex: self.ex[i],
            ez: self.ez[i],
            x: self.grid.x_at(ix),
            z: self.grid.z_at(iz),
        }
    }

    pub fn magnitudes(&self, component: Component) -> Vec<f64> {
        self.ex
            .iter()
            .zip(&self.ez)
            .map(|(&a, &b)| component.magnitude(a, b))
            .collect()
    }

    /// Multiply every sample by `factor`.
    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            ex: self.ex.iter().map(|v| v * factor).collect(),
            ez: self.ez.iter().map(|v| v * factor).collect(),
            ..self.clone()
        }
    }

    /// Cell indices inside the focal window around `target`.
    fn window(&self, target: (f64, f64)) -> impl Iterator<Item = usize> + '_ {
        let half = FOCAL_WINDOW_WAVELENGTHS * self.wavelength;
        (0..self.grid.len()).filter(move |&i| {
            let (x, z) = self.grid.coords(i);
            (x - target.0).abs() <= half && (z - target.1).abs() <= half
        })
    }

    /// Divide by the largest `component` magnitude within ±2λ of `target`.
    /// Applying this to an already normalised map leaves it unchanged.
    pub fn normalized(&self, target: (f64, f64), component: Component) -> Result<Self> {
        let peak = self
            .window(target)
            .map(|i| component.magnitude(self.ex[i], self.ez[i]))
            .max_by(f64::total_cmp)
            .ok_or_else(|| Error::domain("no grid cell lies near the target focus"))?;
        if !(peak > 0.0) || !peak.is_finite() {
            return Err(Error::domain(format!(
                "cannot normalise by a focal peak of {peak}"
            )));
        }
        let inv = |v: &Complex64| v / peak;
        Ok(Self {
            grid: self.grid,
            wavelength: self.wavelength,
            ex: self.ex.iter().map(inv).collect(),
            ez: self.ez.iter().map(inv).collect(),
            normalization: Normalization::PeakNearFocus,
            peak_value: self.peak_value * peak,
        })
    }
}

/// Evaluate `f(x, z) → (Ex, Ez)` over every cell, in parallel.
pub(crate) fn evaluate_with<F>(grid: &GridSpec, wavelength: f64, f: F) -> Result<FieldMap>
where
    F: Fn(f64, f64) -> (Complex64, Complex64) + Sync,
{
    grid.validate()?;
    let samples: Vec<(Complex64, Complex64)> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let (x, z) = grid.coords(i);
            f(x, z)
        })
        .collect();
    let (ex, ez) = samples.into_iter().unzip();
    FieldMap::from_samples(*grid, wavelength, ex, ez)
}

/// Line-of-sight field of the array over `grid`.
pub fn evaluate_map(
    geom: &ArrayGeometry,
    excitation: &Excitation,
    grid: &GridSpec,
) -> Result<FieldMap> {
    if excitation.weights().len() != geom.n_elements() {
        return Err(Error::domain("excitation length does not match the array"));
    }
    evaluate_with(grid, geom.wavelength(), |x, z| {
        let s = field_at_unchecked(geom, excitation, x, z);
        (s.ex, s.ez)
    })
}

/// Focal-spot measurements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamMetrics {
    pub peak_pos: (f64, f64),
    pub peak_mag: f64,
    /// Half of the full half-power width.
    pub halfpower_width_one_sided: Option<f64>,
    pub halfpower_width_full: Option<f64>,
    pub halfpower_depth_one_sided: Option<f64>,
    pub halfpower_depth_full: Option<f64>,
    /// Largest local maximum on the width cut outside the main lobe, in dB
    /// relative to the peak. `None` when the cut has no secondary maximum.
    pub strongest_sidelobe_db: Option<f64>,
    /// Target z minus peak z; positive when the peak moved toward the array.
    pub focal_shift: f64,
    /// The peak sat on the edge of the searched region, so it may not be a
    /// true maximum.
    pub peak_on_boundary: bool,
}

/// A 1-D cut: sample positions and magnitudes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cut {
    pub coords: Vec<f64>,
    pub values: Vec<f64>,
}

impl Cut {
    fn argmax(&self) -> usize {
        self.values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap_or(0)
    }

    /// Parabolically refined position and value of the sample `i`.
    fn refine(&self, i: usize) -> (f64, f64) {
        let v = &self.values;
        if i == 0 || i + 1 >= v.len() {
            return (self.coords[i], v[i]);
        }
        let (off, val) = parabolic_vertex(v[i - 1], v[i], v[i + 1]);
        let step = if off >= 0.0 {
            self.coords[i + 1] - self.coords[i]
        } else {
            self.coords[i] - self.coords[i - 1]
        };
        (self.coords[i] + off * step, val)
    }

    /// Linearly interpolated crossings of `level` on either side of `i`.
    /// Each side gives the crossing position and the first index below `level`.
    fn crossings(&self, i: usize, level: f64) -> (Option<Crossing>, Option<Crossing>) {
        let v = &self.values;
        let c = &self.coords;
        let interp = |a: usize, b: usize| {
            let t = (v[a] - level) / (v[a] - v[b]);
            c[a] + t * (c[b] - c[a])
        };
        let right = (i + 1..v.len())
            .find(|&j| v[j] < level)
            .map(|j| (interp(j - 1, j), j));
        let left = (0..i)
            .rev()
            .find(|&j| v[j] < level)
            .map(|j| (interp(j + 1, j), j));
        (left, right)
    }
}

type Crossing = (f64, usize);

/// Indices of strict interior local maxima.
pub fn local_maxima(values: &[f64]) -> Vec<usize> {
    (1..values.len().saturating_sub(1))
        .filter(|&i| values[i] > values[i - 1] && values[i] >= values[i + 1])
        .collect()
}

/// Metrics from a width cut (along x) and a depth cut (along z) that both
/// pass through the peak.
pub fn metrics_from_cuts(width: &Cut, depth: &Cut, target_z: f64) -> Result<BeamMetrics> {
    if width.values.len() < 3 || depth.values.len() < 3 {
        return Err(Error::domain("cuts need at least three samples"));
    }
    if width.values.len() != width.coords.len() || depth.values.len() != depth.coords.len() {
        return Err(Error::domain("cut coordinates and values differ in length"));
    }
    let iw = width.argmax();
    let id = depth.argmax();
    let on_boundary =
        iw == 0 || iw + 1 == width.values.len() || id == 0 || id + 1 == depth.values.len();
    let (px, vx) = width.refine(iw);
    let (pz, vz) = depth.refine(id);
    let peak_mag = vx.max(vz);
    let level = peak_mag * FRAC_1_SQRT_2;

    let full = |cut: &Cut, i: usize| match cut.crossings(i, level) {
        (Some((l, _)), Some((r, _))) => Some(r - l),
        _ => None,
    };
    let width_full = full(width, iw);
    let depth_full = full(depth, id);

    let (l, r) = width.crossings(iw, level);
    let lo = l.map(|(_, j)| j).unwrap_or(0);
    let hi = r.map(|(_, j)| j).unwrap_or(width.values.len() - 1);
    let strongest_sidelobe_db = local_maxima(&width.values)
        .into_iter()
        .filter(|&j| j <= lo || j >= hi)
        .map(|j| width.values[j])
        .max_by(f64::total_cmp)
        .map(|v| 20.0 * (v / peak_mag).log10());

    Ok(BeamMetrics {
        peak_pos: (px, pz),
        peak_mag,
        halfpower_width_one_sided: width_full.map(|w| 0.5 * w),
        halfpower_width_full: width_full,
        halfpower_depth_one_sided: depth_full.map(|d| 0.5 * d),
        halfpower_depth_full: depth_full,
        strongest_sidelobe_db,
        focal_shift: target_z - pz,
        peak_on_boundary: on_boundary,
    })
}

/// Metrics from a finished map. The peak is the strongest cell within ±2λ
/// of `target_focus`; width and depth come from the row and column through
/// that cell.
pub fn extract_metrics(
    map: &FieldMap,
    component: Component,
    target_focus: (f64, f64),
) -> Result<BeamMetrics> {
    let g = map.grid();
    if g.nx < 3 || g.nz < 3 {
        return Err(Error::domain("metric extraction needs at least 3×3 cells"));
    }
    let mags = map.magnitudes(component);
    let best = map
        .window(target_focus)
        .max_by(|&a, &b| mags[a].total_cmp(&mags[b]))
        .ok_or_else(|| Error::domain("no grid cell lies near the target focus"))?;
    let (ix, iz) = (best % g.nx, best / g.nx);
    let width = Cut {
        coords: (0..g.nx).map(|i| g.x_at(i)).collect(),
        values: (0..g.nx).map(|i| mags[map.index(i, iz)]).collect(),
    };
    let depth = Cut {
        coords: (0..g.nz).map(|i| g.z_at(i)).collect(),
        values: (0..g.nz).map(|i| mags[map.index(ix, i)]).collect(),
    };
    let mut m = metrics_from_cuts(&width, &depth, target_focus.1)?;
    // a maximum on the window edge is not a maximum of the map
    let half = FOCAL_WINDOW_WAVELENGTHS * map.wavelength();
    let inside = |jx: usize, jz: usize| {
        (g.x_at(jx) - target_focus.0).abs() <= half && (g.z_at(jz) - target_focus.1).abs() <= half
    };
    let neighbours = [
        (ix.checked_sub(1), Some(iz)),
        (Some(ix + 1).filter(|&j| j < g.nx), Some(iz)),
        (Some(ix), iz.checked_sub(1)),
        (Some(ix), Some(iz + 1).filter(|&j| j < g.nz)),
    ];
    m.peak_on_boundary |= neighbours.iter().any(|n| match n {
        (Some(jx), Some(jz)) => !inside(*jx, *jz),
        _ => false,
    });
    Ok(m)
}

/// Width and depth cuts through the on-axis peak, sampled directly from the
/// array rather than from a stored map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutAnalysis {
    pub metrics: BeamMetrics,
    pub width: Cut,
    pub depth: Cut,
}

/// Locate the on-axis peak within `[target − span, target + span]`, then
/// sample a width cut through it over `x ∈ [−span, span]` and a depth cut
/// over `z ∈ [peak − span, peak + span]`, both with the given step.
pub fn cut_metrics(
    geom: &ArrayGeometry,
    excitation: &Excitation,
    component: Component,
    span: f64,
    step: f64,
) -> Result<CutAnalysis> {
    if !(span > 0.0) || !(step > 0.0) || step >= span {
        return Err(Error::domain(
            "cut span and step must be positive with step < span",
        ));
    }
    let z0 = excitation.focus_z();
    let half_n = (span / step).round() as usize;
    let offsets: Vec<f64> = (0..=2 * half_n)
        .map(|i| (i as f64 - half_n as f64) * step)
        .collect();
    let sample = |x: f64, z: f64| {
        let s = field_at_unchecked(geom, excitation, x, z);
        component.magnitude(s.ex, s.ez)
    };
    let floor = step.min(z0 * 1e-3);
    let axial_z: Vec<f64> = offsets.iter().map(|o| (z0 + o).max(floor)).collect();
    let axial = Cut {
        values: axial_z.par_iter().map(|&z| sample(0.0, z)).collect(),
        coords: axial_z,
    };
    let (z_peak, _) = axial.refine(axial.argmax());
    let width = Cut {
        values: offsets.par_iter().map(|&x| sample(x, z_peak)).collect(),
        coords: offsets.clone(),
    };
    let depth_z: Vec<f64> = offsets.iter().map(|o| (z_peak + o).max(floor)).collect();
    let depth = Cut {
        values: depth_z.par_iter().map(|&z| sample(0.0, z)).collect(),
        coords: depth_z,
    };
    let mut metrics = metrics_from_cuts(&width, &depth, z0)?;
    let ia = axial.argmax();
    metrics.peak_on_boundary |= ia == 0 || ia + 1 == axial.values.len();
    Ok(CutAnalysis {
        metrics,
        width,
        depth,
    })
}

/// Co-phased focal fields for one array size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergencePoint {
    pub n_elements: usize,
    pub peak_ex: f64,
    pub peak_ez: f64,
}

/// Focal |Ex| under Ex focusing and focal |Ez| under Ez focusing, for each
/// element count. In normalised units both tend to `2/d`.
pub fn convergence_sweep(
    focus_z: f64,
    spacing: f64,
    wavelength: f64,
    n_list: &[usize],
) -> Result<Vec<ConvergencePoint>> {
    if n_list.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::domain("element counts must be sorted ascending"));
    }
    n_list
        .par_iter()
        .map(|&n| {
            let geom = ArrayGeometry::new(n, spacing, wavelength)?;
            let ex = conjugate_phases(&geom, focus_z, FocusStrategy::Ex)?;
            let ez = conjugate_phases(&geom, focus_z, FocusStrategy::Ez)?;
            Ok(ConvergencePoint {
                n_elements: n,
                peak_ex: field_at_unchecked(&geom, &ex, 0.0, focus_z).ex.norm(),
                peak_ez: field_at_unchecked(&geom, &ez, 0.0, focus_z).ez.norm(),
            })
        })
        .collect()
}

/// First swept count whose peak reaches `threshold`.
pub fn first_reaching(
    sweep: &[ConvergencePoint],
    strategy: FocusStrategy,
    threshold: f64,
) -> Option<usize> {
    sweep
        .iter()
        .find(|p| match strategy {
            FocusStrategy::Ex => p.peak_ex >= threshold,
            FocusStrategy::Ez => p.peak_ez >= threshold,
        })
        .map(|p| p.n_elements)
}
