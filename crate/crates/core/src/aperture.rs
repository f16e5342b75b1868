//! Continuous-aperture analytics.
//!
//! Letting the element spacing shrink turns the array sums into integrals
//! over a line source of length `L`. Per unit source density the focal peak
//! of either polarisation tends to 2, and near the focus the field falls off
//! along x (width) and z (depth) following the closed forms below. The
//! integral forms they come from are exposed too so the approximations can
//! be checked numerically.
//!
//! The dipole mutual-impedance formulas used to compare collinear and
//! side-by-side arrangements also live here.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radiator::FocusStrategy;
use crate::specfun::{
    bessel_j1, cosine_integral, integrate, sinc, sine_integral, struve_h_minus1, QuadratureSpec,
};
use crate::FREE_SPACE_IMPEDANCE;

/// A line source of length `L` focused at `(0, z0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApertureSpec {
    length: f64,
    focus_z: f64,
    wavenumber: f64,
}

impl ApertureSpec {
    pub fn new(length: f64, focus_z: f64, wavenumber: f64) -> Result<Self> {
        for (name, v) in [
            ("length", length),
            ("focus_z", focus_z),
            ("wavenumber", wavenumber),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::domain(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self {
            length,
            focus_z,
            wavenumber,
        })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn focus_z(&self) -> f64 {
        self.focus_z
    }

    pub fn wavenumber(&self) -> f64 {
        self.wavenumber
    }

    pub fn wavelength(&self) -> f64 {
        2.0 * PI / self.wavenumber
    }

    /// `L / z0`, the only geometric parameter the focal peaks depend on.
    pub fn aspect(&self) -> f64 {
        self.length / self.focus_z
    }
}

/// Focal |Ex| of the continuous aperture: `2/√(4(z0/L)² + 1)`.
pub fn ex_aperture_peak(spec: &ApertureSpec) -> f64 {
    let q = spec.focus_z / spec.length;
    2.0 / (4.0 * q * q + 1.0).sqrt()
}

/// Focal |Ez| of the continuous aperture: `2(1 − 2/√(4 + (L/z0)²))`.
pub fn ez_aperture_peak(spec: &ApertureSpec) -> f64 {
    let a = spec.aspect();
    2.0 * (1.0 - 2.0 / (4.0 + a * a).sqrt())
}

pub fn aperture_peak(strategy: FocusStrategy, spec: &ApertureSpec) -> f64 {
    match strategy {
        FocusStrategy::Ex => ex_aperture_peak(spec),
        FocusStrategy::Ez => ez_aperture_peak(spec),
    }
}

/// Shortest aperture whose focal peak reaches `fraction · 2`.
pub fn required_length(strategy: FocusStrategy, focus_z: f64, fraction: f64) -> Result<f64> {
    if !(focus_z > 0.0) || !focus_z.is_finite() {
        return Err(Error::domain(format!(
            "focus distance must be positive, got {focus_z}"
        )));
    }
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::domain(format!(
            "threshold fraction must lie in (0, 1), got {fraction}"
        )));
    }
    Ok(match strategy {
        FocusStrategy::Ex => 2.0 * focus_z / (1.0 / (fraction * fraction) - 1.0).sqrt(),
        FocusStrategy::Ez => {
            let g = 1.0 - fraction;
            focus_z * (4.0 / (g * g) - 4.0).sqrt()
        }
    })
}

/// Element count covering `length` at the given spacing.
pub fn required_elements(length: f64, spacing: f64) -> Result<usize> {
    if !(length > 0.0) || !(spacing > 0.0) {
        return Err(Error::domain("length and spacing must be positive"));
    }
    Ok((length / spacing).ceil() as usize)
}

/// One of the four focal-spot cuts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    /// |Ex| along x through the focus.
    ExWidth,
    /// |Ex| along z through the focus.
    ExDepth,
    /// |Ez| along x through the focus.
    EzWidth,
    /// |Ez| along z through the focus.
    EzDepth,
}

impl Profile {
    pub const ALL: [Profile; 4] = [
        Profile::ExWidth,
        Profile::ExDepth,
        Profile::EzWidth,
        Profile::EzDepth,
    ];

    pub fn strategy(self) -> FocusStrategy {
        match self {
            Profile::ExWidth | Profile::ExDepth => FocusStrategy::Ex,
            Profile::EzWidth | Profile::EzDepth => FocusStrategy::Ez,
        }
    }

    pub fn is_depth(self) -> bool {
        matches!(self, Profile::ExDepth | Profile::EzDepth)
    }

    /// Large-aperture closed form at offset `delta` from the focus.
    pub fn closed_form(self, delta: f64, spec: &ApertureSpec) -> f64 {
        match self {
            Profile::ExWidth => ex_profile_width(delta, spec),
            Profile::ExDepth => ex_profile_depth(delta, spec),
            Profile::EzWidth => ez_profile_width(delta, spec),
            Profile::EzDepth => ez_profile_depth(delta, spec),
        }
    }

    /// The aperture integral with the phase error linearised in `delta` and
    /// the amplitude taken at the focus, truncated at `±L/2`.
    pub fn first_order_integral(
        self,
        delta: f64,
        spec: &ApertureSpec,
        quad: &QuadratureSpec,
    ) -> Result<f64> {
        let z0 = spec.focus_z;
        let kd = spec.wavenumber * delta;
        let half = 0.5 * spec.length;
        let r = move |s: f64| (z0 * z0 + s * s).sqrt();
        let value = match self {
            Profile::ExWidth => integrate_split(
                |s| {
                    let r = r(s);
                    Complex64::from_polar(z0 * z0 / (r * r * r), kd * s / r)
                },
                &[-half, half],
                quad,
            )?,
            Profile::ExDepth => integrate_split(
                |s| {
                    let r = r(s);
                    Complex64::from_polar(z0 * z0 / (r * r * r), kd * z0 / r)
                },
                &[-half, half],
                quad,
            )?,
            Profile::EzWidth => integrate_split(
                |s| {
                    let r = r(s);
                    Complex64::from_polar(z0 * s.abs() / (r * r * r), kd * s / r)
                },
                &[-half, 0.0, half],
                quad,
            )?,
            Profile::EzDepth => {
                let v = integrate_split(
                    |s| {
                        let r = r(s);
                        Complex64::from_polar(z0 * s.abs() / (r * r * r), kd * z0 / r)
                    },
                    &[-half, 0.0, half],
                    quad,
                )?;
                v * ((z0 + delta.abs()) / z0)
            }
        };
        Ok(value.norm())
    }

    /// The continuous-aperture field itself: every element conjugate-phased
    /// to the focus, observed at the displaced point, no approximation.
    ///
    /// Width cuts observe at `(delta, z0)`, depth cuts at `(0, z0 + delta)`.
    /// The Ez integrals carry the sign compensation of the Ez excitation.
    pub fn exact_integral(
        self,
        delta: f64,
        spec: &ApertureSpec,
        quad: &QuadratureSpec,
    ) -> Result<f64> {
        let z0 = spec.focus_z;
        let k = spec.wavenumber;
        let half = 0.5 * spec.length;
        let (x, z) = if self.is_depth() {
            (0.0, z0 + delta)
        } else {
            (delta, z0)
        };
        if !(z > 0.0) {
            return Err(Error::domain(format!(
                "depth offset {delta} puts the observation point behind the aperture"
            )));
        }
        let ez = self.strategy() == FocusStrategy::Ez;
        let integrand = move |s: f64| {
            let dx = s - x;
            let r2 = z * z + dx * dx;
            let r = r2.sqrt();
            let focus_path = (z0 * z0 + s * s).sqrt();
            let amplitude = if ez {
                s.signum() * dx * z / (r2 * r)
            } else {
                z * z / (r2 * r)
            };
            Complex64::from_polar(amplitude, k * (focus_path - r))
        };
        let mut breaks = vec![-half, half];
        if ez {
            breaks.push(0.0);
        }
        if x.abs() < half {
            breaks.push(x);
        }
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        Ok(integrate_split(integrand, &breaks, quad)?.norm())
    }

    /// Smallest positive offset where the closed form drops to `1/√2` of its
    /// value at the focus.
    pub fn half_power_offset(self, spec: &ApertureSpec) -> Result<f64> {
        let step = spec.wavelength() / 1000.0;
        half_power_offset(
            |d| self.closed_form(d, spec),
            step,
            20.0 * spec.wavelength(),
        )
        .ok_or_else(|| Error::domain("profile never reaches half power"))
    }

    /// Largest secondary maximum of the closed form within `max_offset`,
    /// in dB relative to the focus value.
    pub fn strongest_sidelobe_db(self, spec: &ApertureSpec, max_offset: f64) -> Option<f64> {
        let step = spec.wavelength() / 1000.0;
        let n = (max_offset / step).ceil() as usize;
        let peak = self.closed_form(0.0, spec);
        let values: Vec<f64> = (0..=n)
            .map(|i| self.closed_form(i as f64 * step, spec))
            .collect();
        let first_min = values.windows(2).position(|w| w[1] > w[0])?;
        values[first_min..]
            .windows(3)
            .filter(|w| w[1] > w[0] && w[1] >= w[2])
            .map(|w| w[1])
            .max_by(f64::total_cmp)
            .map(|v| 20.0 * (v / peak).log10())
    }
}

fn integrate_split<F>(f: F, breaks: &[f64], quad: &QuadratureSpec) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    let mut total = Complex64::new(0.0, 0.0);
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            total += integrate(&f, w[0], w[1], quad)?;
        }
    }
    Ok(total)
}

/// First positive root of `f(δ) = f(0)/√2`, bracketed by stepping `step` at
/// a time up to `max_offset` and then bisected.
pub fn half_power_offset<F>(f: F, step: f64, max_offset: f64) -> Option<f64>
where
    F: Fn(f64) -> f64,
{
    let target = f(0.0) * FRAC_1_SQRT_2;
    let mut lo = 0.0;
    while lo < max_offset {
        let hi = lo + step;
        if f(hi) < target {
            let (mut a, mut b) = (lo, hi);
            for _ in 0..80 {
                let m = 0.5 * (a + b);
                if f(m) < target {
                    b = m;
                } else {
                    a = m;
                }
            }
            return Some(0.5 * (a + b));
        }
        lo = hi;
    }
    None
}

/// `2|sinc(kδ)|`.
pub fn ex_profile_width(delta: f64, spec: &ApertureSpec) -> f64 {
    2.0 * sinc(spec.wavenumber * delta).abs()
}

/// `2|sin(kδ/√(1 + 4(z0/L)²))/(kδ)|`, the finite-L form before the
/// large-aperture limit.
pub fn ex_profile_width_exact(delta: f64, spec: &ApertureSpec) -> f64 {
    let q = spec.focus_z / spec.length;
    let scale = 1.0 / (1.0 + 4.0 * q * q).sqrt();
    2.0 * scale * sinc(spec.wavenumber * delta * scale).abs()
}

/// `π√(J1(kδ)² + H₋₁(kδ)²)`.
pub fn ex_profile_depth(delta: f64, spec: &ApertureSpec) -> f64 {
    let x = spec.wavenumber * delta;
    PI * bessel_j1(x).hypot(struve_h_minus1(x))
}

/// `π|H₋₁(kδ)|`.
pub fn ez_profile_width(delta: f64, spec: &ApertureSpec) -> f64 {
    PI * struve_h_minus1(spec.wavenumber * delta).abs()
}

/// `2(z0 + |δ|)/z0 · |sinc(kδ/2)|`.
pub fn ez_profile_depth(delta: f64, spec: &ApertureSpec) -> f64 {
    let z0 = spec.focus_z;
    2.0 * (z0 + delta.abs()) / z0 * sinc(0.5 * spec.wavenumber * delta).abs()
}

/// How two dipoles sit relative to each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arrangement {
    SideBySide,
    Collinear,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DipolePairSpec {
    pub arrangement: Arrangement,
    /// Axis-to-axis distance (side by side) or centre-to-centre distance
    /// (collinear), in metres.
    pub separation: f64,
    pub dipole_length: f64,
}

/// Mutual impedance in ohms between two half-wave dipoles.
pub fn mutual_impedance(pair: &DipolePairSpec, wavenumber: f64) -> Result<Complex64> {
    let d = pair.separation;
    let l = pair.dipole_length;
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::domain(format!(
            "separation must be positive, got {d}"
        )));
    }
    if !(wavenumber > 0.0) {
        return Err(Error::domain("wavenumber must be positive"));
    }
    if ((wavenumber * l) / PI - 1.0).abs() > 1e-6 {
        return Err(Error::domain(format!(
            "only half-wave dipoles are supported (kl = {}, expected π)",
            wavenumber * l
        )));
    }
    let k = wavenumber;
    let eta = FREE_SPACE_IMPEDANCE;
    match pair.arrangement {
        Arrangement::SideBySide => {
            let rho = (d * d + l * l).sqrt();
            let u0 = k * d;
            let u1 = k * (rho + l);
            let u2 = k * (rho - l);
            let re = 2.0 * cosine_integral(u0)? - cosine_integral(u1)? - cosine_integral(u2)?;
            let im = 2.0 * sine_integral(u0) - sine_integral(u1) - sine_integral(u2);
            Ok(Complex64::new(re, -im) * (eta / (4.0 * PI)))
        }
        Arrangement::Collinear => {
            let h = d;
            if !(h > l) {
                return Err(Error::domain(format!(
                    "collinear dipoles overlap: separation {h} must exceed length {l}"
                )));
            }
            let v0 = k * h;
            let v1 = 2.0 * k * (h + l);
            let v2 = 2.0 * k * (h - l);
            let v3 = (h * h - l * l) / (h * h);
            let (s0, c0) = v0.sin_cos();
            let si = 2.0 * sine_integral(2.0 * v0) - sine_integral(v2) - sine_integral(v1);
            let ci_a = 2.0 * cosine_integral(2.0 * v0)?
                - cosine_integral(v2)?
                - cosine_integral(v1)?
                - v3.ln();
            let ci_b = cosine_integral(v2)? - 2.0 * cosine_integral(2.0 * v0)?
                + cosine_integral(v1)?
                - v3.ln();
            let z = si * Complex64::new(s0, -c0) + Complex64::new(-c0 * ci_b, s0 * ci_a);
            Ok(z * (eta / (8.0 * PI)))
        }
    }
}
