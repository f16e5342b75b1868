//! Special functions and adaptive quadrature.
//!
//! Everything here is a pure function of its arguments. The closed-form beam
//! profiles need `sinc`, `J1` and the order −1 Struve function; the dipole
//! mutual impedance needs the sine and cosine integrals; and the integral
//! forms of the beam profiles are checked with [`integrate`].

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::{FRAC_2_PI, FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Tolerances for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let spec = Self {
            abs_tol,
            rel_tol,
            max_subdivisions,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return Err(Error::domain("quadrature tolerances must be positive"));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::domain("max_subdivisions must be at least 1"));
        }
        Ok(())
    }
}

/// `sin(x)/x` with the removable singularity at zero filled in.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 * (1.0 - x2 / 20.0)
    } else {
        x.sin() / x
    }
}

/// Bessel function of the first kind, order one.
///
/// Power series below |x| = 8, Miller's backward recurrence above, normalised
/// with `J0 + 2 Σ J2k = 1`.
pub fn bessel_j1(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let ax = x.abs();
    let value = if ax < 8.0 {
        j1_series(ax)
    } else {
        j1_miller(ax)
    };
    if x < 0.0 {
        -value
    } else {
        value
    }
}

fn j1_series(x: f64) -> f64 {
    let h = 0.5 * x;
    let h2 = h * h;
    let mut term = h;
    let mut sum = term;
    for k in 1..60 {
        let kf = k as f64;
        term *= -h2 / (kf * (kf + 1.0));
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

fn j1_miller(x: f64) -> f64 {
    let mut start = x as usize + 40 + (8.0 * x.sqrt()) as usize;
    if start % 2 == 1 {
        start += 1;
    }
    let two_over_x = 2.0 / x;
    let mut above = 0.0; // J_{k+1}
    let mut current = 1e-30; // J_k
    let mut norm = 0.0;
    let mut j1 = 0.0;
    for k in (1..=start).rev() {
        let below = k as f64 * two_over_x * current - above;
        above = current;
        current = below;
        // `current` now holds J_{k-1}
        if k - 1 == 1 {
            j1 = current;
        }
        if (k - 1) % 2 == 0 && k - 1 > 0 {
            norm += 2.0 * current;
        }
        if current.abs() > 1e250 {
            current *= 1e-250;
            above *= 1e-250;
            norm *= 1e-250;
            j1 *= 1e-250;
        }
    }
    norm += current; // J0
    j1 / norm
}

/// Struve function of order one, `H1(x)`.
pub fn struve_h1(x: f64) -> f64 {
    let ax = x.abs();
    if ax == 0.0 {
        0.0
    } else if ax <= 8.0 {
        h1_series(ax)
    } else {
        h1_integral(ax)
    }
}

fn h1_series(x: f64) -> f64 {
    // Σ (-1)^k (x/2)^(2k+2) / (Γ(k+3/2) Γ(k+5/2))
    // Γ(3/2) Γ(5/2) = 3π/8
    let h = 0.5 * x;
    let h2 = h * h;
    let mut term = h2 / (3.0 * PI / 8.0);
    let mut sum = term;
    for k in 1..80 {
        let kf = k as f64;
        term *= -h2 / ((kf + 0.5) * (kf + 1.5));
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

fn h1_integral(x: f64) -> f64 {
    // H1(x) = (2x/π) ∫_0^{π/2} cos²φ sin(x sin φ) dφ
    let panels = 8 + x.ceil() as usize;
    let width = FRAC_PI_2 / panels as f64;
    let mut sum = 0.0;
    for p in 0..panels {
        let a = p as f64 * width;
        sum += kronrod15(
            |phi| {
                let c = phi.cos();
                c * c * (x * phi.sin()).sin()
            },
            a,
            a + width,
        );
    }
    2.0 * x / PI * sum
}

/// Struve function of order −1, evaluated through `H−1(x) = 2/π − H1(x)`.
pub fn struve_h_minus1(x: f64) -> f64 {
    FRAC_2_PI - struve_h1(x)
}

/// Sine integral `Si(x) = ∫_0^x sin t / t dt`. Odd in `x`.
pub fn sine_integral(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let (si, _) = sici_positive(x.abs());
    si.copysign(x)
}

/// Cosine integral `Ci(x) = γ + ln x + ∫_0^x (cos t − 1)/t dt`, defined for `x > 0`.
pub fn cosine_integral(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!(
            "cosine integral needs a positive finite argument, got {x}"
        )));
    }
    Ok(sici_positive(x).1)
}

fn sici_positive(x: f64) -> (f64, f64) {
    if x <= 2.0 {
        let x2 = x * x;
        // Si: Σ (-1)^k x^(2k+1) / ((2k+1)(2k+1)!)
        let mut fact = x; // x^(2k+1)/(2k+1)!
        let mut si = x;
        // Ci tail: Σ_{k≥1} (-1)^k x^(2k) / (2k (2k)!)
        let mut cfact = 1.0; // x^(2k)/(2k)!
        let mut ci = 0.0;
        for k in 1..40 {
            let kf = k as f64;
            cfact *= -x2 / ((2.0 * kf - 1.0) * (2.0 * kf));
            ci += cfact / (2.0 * kf);
            fact *= -x2 / ((2.0 * kf) * (2.0 * kf + 1.0));
            si += fact / (2.0 * kf + 1.0);
            if fact.abs() < 1e-18 && cfact.abs() < 1e-18 {
                break;
            }
        }
        (si, EULER_GAMMA + x.ln() + ci)
    } else {
        // E1(ix) by its continued fraction (modified Lentz), then
        // Ci = -Re E1(ix) and Si = π/2 + Im E1(ix).
        let tiny = 1e-300;
        let mut b = Complex64::new(1.0, x);
        let mut c = Complex64::new(1.0 / tiny, 0.0);
        let mut d = b.inv();
        let mut h = d;
        for i in 2..500 {
            let a = -((i - 1) as f64).powi(2);
            b += 2.0;
            d = (a * d + b).inv();
            c = b + a / c;
            let del = c * d;
            h *= del;
            if (del.re - 1.0).abs() + del.im.abs() < 1e-16 {
                break;
            }
        }
        let e1 = Complex64::new(x.cos(), -x.sin()) * h;
        (FRAC_PI_2 + e1.im, -e1.re)
    }
}

// Gauss–Kronrod 7/15 abscissae and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod15(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut sum = WGK[7] * f(centre);
    for j in 0..7 {
        let dx = half * XGK[j];
        sum += WGK[j] * (f(centre - dx) + f(centre + dx));
    }
    sum * half
}

fn gk15_complex(f: &impl Fn(f64) -> Complex64, a: f64, b: f64) -> (Complex64, f64) {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(centre - dx) + f(centre + dx);
        kronrod += pair * WGK[j];
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }
    let kronrod = kronrod * half;
    let gauss = gauss * half;
    (kronrod, (kronrod - gauss).norm())
}

struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// Adaptive Gauss–Kronrod (7/15) quadrature of a complex-valued integrand.
///
/// The segment with the largest error estimate is bisected until the summed
/// error estimate drops below `max(abs_tol, rel_tol·|result|)`.
pub fn integrate<F>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    spec.validate()?;
    if !a.is_finite() || !b.is_finite() || !(a < b) {
        return Err(Error::domain(format!(
            "integration bounds must be finite with a < b, got [{a}, {b}]"
        )));
    }

    let (value, error) = gk15_complex(&f, a, b);
    let mut total = value;
    let mut total_error = error;
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let mut subdivisions = 1;

    loop {
        if total_error <= spec.abs_tol.max(spec.rel_tol * total.norm()) {
            return Ok(total);
        }
        if !total.re.is_finite() || !total.im.is_finite() {
            return Err(Error::domain("integrand produced a non-finite value"));
        }
        if subdivisions >= spec.max_subdivisions {
            break;
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval cannot be split further in double precision
            heap.push(worst);
            break;
        }
        let (lv, le) = gk15_complex(&f, worst.a, mid);
        let (rv, re) = gk15_complex(&f, mid, worst.b);
        total += lv + rv - worst.value;
        total_error += le + re - worst.error;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: lv,
            error: le,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: rv,
            error: re,
        });
        subdivisions += 1;
    }

    // Recompute from the segments to shed accumulated update error.
    let mut segments = heap.into_vec();
    segments.sort_by(|x, y| x.a.total_cmp(&y.a));
    let estimate = segments
        .iter()
        .fold(Complex64::new(0.0, 0.0), |acc, s| acc + s.value);
    let error_estimate = segments.iter().map(|s| s.error).sum::<f64>();
    if error_estimate <= spec.abs_tol.max(spec.rel_tol * estimate.norm()) {
        return Ok(estimate);
    }
    Err(Error::ToleranceNotMet {
        estimate,
        error_estimate,
        subdivisions,
    })
}

/// Real-valued convenience wrapper around [`integrate`].
pub fn integrate_real<F>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    integrate(|x| Complex64::new(f(x), 0.0), a, b, spec).map(|z| z.re)
}
