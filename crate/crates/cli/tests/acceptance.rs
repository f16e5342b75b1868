//! Acceptance run: one PASS/FAIL line per criterion, sub-checks indented.
//!
//! Two sub-checks cannot be met by the model as specified; they are listed in
//! `KNOWN_SHORTFALLS`, still reported as FAIL, and do not fail the run. Any
//! other failure makes the process exit nonzero.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::Command;

use nearfocus::aperture::{
    ex_aperture_peak, ez_aperture_peak, mutual_impedance, ApertureSpec, Arrangement,
    DipolePairSpec, Profile,
};
use nearfocus::fieldmap::{
    convergence_sweep, cut_metrics, evaluate_map, first_reaching, local_maxima, Component,
    FieldMap, GridSpec,
};
use nearfocus::multipath::{
    reflection_coefficient, two_ray_field, GrazingAngle, Ground, Polarization, TwoRaySetup,
};
use nearfocus::polarization::{axial_ratio_sweep, min_elements_for_cp};
use nearfocus::radiator::{
    conjugate_phases, field_at, peak_field_on_axis, ArrayGeometry, FocusStrategy,
};
use nearfocus::FREE_SPACE_IMPEDANCE;
use num_complex::Complex64;

const LAMBDA: f64 = 0.05;
const D: f64 = 0.025;

const KNOWN_SHORTFALLS: &[(u32, &str)] = &[
    // 2 − 2(1 − 2/√(4 + a²)) ≈ 4/a, so a = 1e4 leaves 4e-4
    (2, "ez_aperture_peak within 1e-6 of 2 at L/z0 = 1e4"),
    // the floor echo is ~10% of the direct ray and beats with it every
    // ~1.3λ; a 20-element focus is broad enough that each crest stays above
    // half the peak
    (
        9,
        "h = 40λ horizontal axial cut has exactly one maximum above −6 dB",
    ),
];

type Criterion = fn() -> Vec<Check>;

struct Check {
    name: String,
    pass: bool,
    detail: String,
}

fn check(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Check {
    Check {
        name: name.into(),
        pass,
        detail: detail.into(),
    }
}

fn array(n: usize) -> ArrayGeometry {
    ArrayGeometry::new(n, D, LAMBDA).unwrap()
}

fn wrap_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(360.0);
    d.min(360.0 - d)
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn criterion_1() -> Vec<Check> {
    let ex_side = [
        0.56, 5.06, 14.05, 27.51, 45.42, 67.74, 94.44, 125.47, 160.77, 200.28,
    ];
    let ez_side = [
        180.56, 185.06, 194.05, 207.51, 225.42, 247.74, 274.44, 305.47, 340.77, 20.28,
    ];
    let geom = array(20);
    let z0 = 20.0 * LAMBDA;
    let ex = conjugate_phases(&geom, z0, FocusStrategy::Ex)
        .unwrap()
        .phases_deg();
    let ez = conjugate_phases(&geom, z0, FocusStrategy::Ez)
        .unwrap()
        .phases_deg();
    // centre outward: left half runs 9, 8, …, 0 and right half 10, …, 19
    let worst = |got: &[f64], left: &[f64], right: &[f64]| {
        (0..10)
            .map(|m| wrap_diff(got[9 - m], left[m]).max(wrap_diff(got[10 + m], right[m])))
            .fold(0.0, f64::max)
    };
    let wx = worst(&ex, &ex_side, &ex_side);
    let wz = worst(&ez, &ez_side, &ex_side);
    vec![
        check(
            "Ex phase table within 0.01°",
            wx <= 0.01,
            format!("worst {wx:.4}°"),
        ),
        check(
            "Ez phase table within 0.01°",
            wz <= 0.01,
            format!("worst {wz:.4}°"),
        ),
    ]
}

fn criterion_2() -> Vec<Check> {
    let k = 2.0 * PI / LAMBDA;
    let z0 = 1.5;
    let spec = |a: f64| ApertureSpec::new(a * z0, z0, k).unwrap();
    let far = spec(1e4);
    let ex_far = ex_aperture_peak(&far);
    let ez_far = ez_aperture_peak(&far);

    // continuum integrals by plain Simpson, independent of the closed forms
    let ex_int = |a: f64| {
        let h = 0.5 * a * z0;
        simpson(|s| z0 * z0 / (z0 * z0 + s * s).powf(1.5), -h, h, 200_000)
    };
    let ez_int = |a: f64| {
        let h = 0.5 * a * z0;
        2.0 * simpson(|s| s * z0 / (z0 * z0 + s * s).powf(1.5), 0.0, h, 200_000)
    };
    let ex10 = ex_aperture_peak(&ApertureSpec::new(10.0, z0, k).unwrap());
    let ex10_oracle = ex_int(10.0 / z0);
    let a19 = bisect(|a| ez_aperture_peak(&spec(a)) - 1.9, 1.0, 1e3);
    let a19_oracle = bisect(|a| ez_int(a) - 1.9, 1.0, 200.0);
    vec![
        check(
            "ex_aperture_peak within 1e-6 of 2 at L/z0 = 1e4",
            (2.0 - ex_far).abs() <= 1e-6,
            format!("2 − peak = {:.3e}", 2.0 - ex_far),
        ),
        check(
            "ez_aperture_peak within 1e-6 of 2 at L/z0 = 1e4",
            (2.0 - ez_far).abs() <= 1e-6,
            format!("2 − peak = {:.3e}", 2.0 - ez_far),
        ),
        check(
            "Ex(L = 10 m, z0 = 1.5 m) ≥ 1.9",
            ex10 >= 1.9 && (ex10 - ex10_oracle).abs() < 1e-9,
            format!("{ex10:.6} (quadrature {ex10_oracle:.6})"),
        ),
        check(
            "Ez first reaches 1.9 at L/z0 = 40 ± 0.2",
            (a19 - 40.0).abs() <= 0.2 && (a19 - a19_oracle).abs() < 1e-3,
            format!("L/z0 = {a19:.4} (quadrature {a19_oracle:.4})"),
        ),
    ]
}

fn criterion_3() -> Vec<Check> {
    let z0 = 1.5;
    let ns: Vec<usize> = (1..=1300).collect();
    let sweep = convergence_sweep(z0, D, LAMBDA, &ns).unwrap();
    let big = 20_000;
    let far = convergence_sweep(z0, D, LAMBDA, &[big]).unwrap()[0];
    let asymptote = 2.0 / D;
    let nx = first_reaching(&sweep, FocusStrategy::Ex, 0.9 * asymptote);
    let nz = first_reaching(&sweep, FocusStrategy::Ez, 0.9 * asymptote);

    // direct sum: on axis every co-phased term is z0²/r³ (Ex) or |x| z0/r³ (Ez)
    let direct = |n: usize| {
        let (mut ex, mut ez) = (0.0, 0.0);
        for m in 0..n {
            let x = (m as f64 - (n as f64 - 1.0) / 2.0) * D;
            let r = (x * x + z0 * z0).sqrt();
            ex += z0 * z0 / r.powi(3);
            ez += x.abs() * z0 / r.powi(3);
        }
        (ex, ez)
    };
    let (ox, oz) = direct(big);
    let nx_oracle = (1..).find(|&n| direct(n).0 >= 0.9 * asymptote).unwrap();
    let nz_oracle = (1..).find(|&n| direct(n).1 >= 0.9 * asymptote).unwrap();
    let show = |n: Option<usize>| n.map_or("none".into(), |n| n.to_string());
    vec![
        check(
            "N_x = 248 ± 2",
            nx.is_some_and(|n| n.abs_diff(248) <= 2) && nx == Some(nx_oracle),
            format!("{} (direct sum {nx_oracle})", show(nx)),
        ),
        check(
            "N_z = 1194 ± 5",
            nz.is_some_and(|n| n.abs_diff(1194) <= 5) && nz == Some(nz_oracle),
            format!("{} (direct sum {nz_oracle})", show(nz)),
        ),
        check(
            "asymptotic peak 80 ± 1",
            (far.peak_ex - 80.0).abs() <= 1.0
                && (far.peak_ez - 80.0).abs() <= 1.0
                && (far.peak_ex - ox).abs() < 1e-9 * ox
                && (far.peak_ez - oz).abs() < 1e-9 * oz,
            format!("N = {big}: Ex {:.4}, Ez {:.4}", far.peak_ex, far.peak_ez),
        ),
    ]
}

fn criterion_4() -> Vec<Check> {
    let geom = array(2000);
    let z0 = 10.0 * LAMBDA;
    let metrics = |s: FocusStrategy| {
        let exc = conjugate_phases(&geom, z0, s).unwrap();
        cut_metrics(&geom, &exc, s.into(), 2.0 * LAMBDA, LAMBDA / 100.0)
            .unwrap()
            .metrics
    };
    let mx = metrics(FocusStrategy::Ex);
    let mz = metrics(FocusStrategy::Ez);
    let corridor = ApertureSpec::new(1e3, 1.5, 2.0 * PI / LAMBDA).unwrap();
    let hp = |p: Profile| p.half_power_offset(&corridor).unwrap() / LAMBDA;

    // 2|sinc(kδ)| = √2 ⇔ sin u / u = 1/√2
    let u = bisect(|u| u.sin() / u - 0.5f64.sqrt(), 0.5, 2.5);
    let ex_width_oracle = u / (2.0 * PI);

    let wl = |v: Option<f64>| v.unwrap_or(f64::NAN) / LAMBDA;
    let numeric = [
        wl(mx.halfpower_width_one_sided),
        wl(mx.halfpower_depth_one_sided),
        wl(mz.halfpower_width_full),
        wl(mz.halfpower_depth_full),
        mz.strongest_sidelobe_db.unwrap_or(f64::NAN),
    ];
    let closed = [
        hp(Profile::ExWidth),
        hp(Profile::ExDepth),
        2.0 * hp(Profile::EzWidth),
        2.0 * hp(Profile::EzDepth),
        Profile::EzWidth
            .strongest_sidelobe_db(&corridor, 2.0 * LAMBDA)
            .unwrap_or(f64::NAN),
    ];
    let bands = [
        ("Ex one-sided width", 0.21, 0.23),
        ("Ex one-sided depth", 0.58, 0.64),
        ("Ez full width", 0.29, 0.32),
        ("Ez full depth", 0.86, 0.91),
        ("Ez width sidelobe [dB]", -3.5, -2.5),
    ];
    let mut out: Vec<Check> = bands
        .iter()
        .zip(numeric.iter().zip(&closed))
        .map(|(&(name, lo, hi), (&n, &c))| {
            check(
                format!("{name} in [{lo}, {hi}]"),
                (lo..=hi).contains(&n) && (lo..=hi).contains(&c),
                format!("discrete {n:.4}, closed form {c:.4}"),
            )
        })
        .collect();
    let rn = numeric[3] / numeric[2];
    let rc = closed[3] / closed[2];
    out.push(check(
        "Ez depth/width 2.87 ± 0.15",
        (rn - 2.87).abs() <= 0.15 && (rc - 2.87).abs() <= 0.15,
        format!("discrete {rn:.3}, closed form {rc:.3}"),
    ));
    out.push(check(
        "Ex closed-form width matches sinc root",
        (closed[0] - ex_width_oracle).abs() < 1e-6,
        format!("{:.6} vs {ex_width_oracle:.6}", closed[0]),
    ));
    out.push(check(
        "discrete peaks are interior",
        !mx.peak_on_boundary && !mz.peak_on_boundary,
        "",
    ));
    out
}

fn criterion_5() -> Vec<Check> {
    let z0 = 10.0 * LAMBDA;
    let geom = array(2000);
    let spec = ApertureSpec::new(geom.aperture_length(), z0, geom.wavenumber()).unwrap();
    let mut out = Vec::new();
    for (strategy, width, depth) in [
        (FocusStrategy::Ex, Profile::ExWidth, Profile::ExDepth),
        (FocusStrategy::Ez, Profile::EzWidth, Profile::EzDepth),
    ] {
        let exc = conjugate_phases(&geom, z0, strategy).unwrap();
        let a = cut_metrics(&geom, &exc, strategy.into(), 2.0 * LAMBDA, LAMBDA / 100.0).unwrap();
        let peak = a.metrics.peak_mag;
        for (cut, profile, centre) in [
            (&a.width, width, 0.0),
            (&a.depth, depth, a.metrics.peak_pos.1),
        ] {
            let worst = cut
                .coords
                .iter()
                .zip(&cut.values)
                .filter(|(c, _)| (*c - centre).abs() <= 2.0 * LAMBDA + 1e-12)
                .map(|(c, v)| (v / peak - profile.closed_form(c - centre, &spec) / 2.0).abs())
                .fold(0.0, f64::max);
            out.push(check(
                format!("{profile:?} within 0.05"),
                worst < 0.05,
                format!("max |Δ| = {worst:.4}"),
            ));
        }
    }
    out
}

fn criterion_6() -> Vec<Check> {
    let mut out = Vec::new();
    for (n, f) in [(20usize, 20.0), (2000, 20.0), (100, 7.3)] {
        let geom = array(n);
        let z0 = f * LAMBDA;
        let sx = field_at(
            &geom,
            &conjugate_phases(&geom, z0, FocusStrategy::Ex).unwrap(),
            0.0,
            z0,
        )
        .unwrap();
        let sz = field_at(
            &geom,
            &conjugate_phases(&geom, z0, FocusStrategy::Ez).unwrap(),
            0.0,
            z0,
        )
        .unwrap();
        let rx = sx.ez.norm() / sx.ex.norm();
        let rz = sz.ex.norm() / sz.ez.norm();
        out.push(check(
            format!("N = {n}, focus {f}λ: cross-pol ratios < 1e-10"),
            rx < 1e-10 && rz < 1e-10,
            format!("|Ez/Ex| = {rx:.1e}, |Ex/Ez| = {rz:.1e}"),
        ));
    }
    out
}

fn criterion_7() -> Vec<Check> {
    let mut out = Vec::new();
    let mut per_focus = Vec::new();
    for (f, expected) in [(10.0, 53usize), (20.0, 106), (40.0, 213)] {
        let n = min_elements_for_cp(D, LAMBDA, f * LAMBDA).unwrap();
        per_focus.push(n as f64 / f);
        out.push(check(
            format!("focus {f}λ: minimum N = {expected} ± 2"),
            n.abs_diff(expected) <= 2,
            format!("{n}"),
        ));
        let ladder: Vec<usize> = (2..=3 * expected).collect();
        let sweep = axial_ratio_sweep(D, LAMBDA, f * LAMBDA, &ladder).unwrap();
        let rises = sweep
            .windows(2)
            .filter(|w| w[1].axial_ratio > w[0].axial_ratio)
            .map(|w| w[1].n_elements)
            .collect::<Vec<_>>();
        out.push(check(
            format!(
                "focus {f}λ: AR(N) nonincreasing for N in 2..={}",
                3 * expected
            ),
            rises.is_empty(),
            if rises.is_empty() {
                String::new()
            } else {
                format!("rises at N = {:?}", &rises[..rises.len().min(5)])
            },
        ));
    }
    let mean = per_focus.iter().sum::<f64>() / 3.0;
    let spread = per_focus
        .iter()
        .map(|v| (v - mean).abs() / mean)
        .fold(0.0, f64::max);
    out.push(check(
        "N_min proportional to focus within 5%",
        spread < 0.05,
        format!(
            "N/focus[λ] = {per_focus:.3?}, spread {:.2}%",
            100.0 * spread
        ),
    ));
    out
}

fn setup(h: f64, ground: Ground) -> TwoRaySetup {
    TwoRaySetup {
        tx_height: h,
        rx_height: h,
        ground,
        grazing_angle: GrazingAngle::ElementRatio,
    }
}

fn criterion_8() -> Vec<Check> {
    let geom = array(20);
    let z0 = 20.0 * LAMBDA;
    let exc = conjugate_phases(&geom, z0, FocusStrategy::Ex).unwrap();
    let grid = GridSpec::new(
        (-4.0 * LAMBDA, 4.0 * LAMBDA),
        (LAMBDA, 40.0 * LAMBDA),
        41,
        157,
    )
    .unwrap();
    let los = evaluate_map(&geom, &exc, &grid).unwrap();
    let vacuum = two_ray_field(
        &geom,
        &exc,
        &setup(4.0 * LAMBDA, Ground::Dielectric { permittivity: 1.0 }),
        &grid,
        Polarization::Horizontal,
    )
    .unwrap();
    let identical = los.ex() == vacuum.ex();

    let los_peak = los
        .magnitudes(Component::Ex)
        .into_iter()
        .fold(0.0, f64::max);
    let metal = two_ray_field(
        &geom,
        &exc,
        &setup(1e-12, Ground::Metal),
        &grid,
        Polarization::Horizontal,
    )
    .unwrap();
    let residual = metal
        .magnitudes(Component::Ex)
        .into_iter()
        .fold(0.0, f64::max)
        / los_peak;

    let g = reflection_coefficient(
        PI / 2.0,
        &Ground::Dielectric { permittivity: 5.0 },
        Polarization::Horizontal,
    )
    .unwrap();
    let oracle = (1.0 - 5f64.sqrt()) / (1.0 + 5f64.sqrt());
    vec![
        check("ε_g = 1 map bit-identical to line of sight", identical, ""),
        check(
            "metal, heights → 0: |E_H| < 1e-10 of LOS peak",
            residual < 1e-10,
            format!("{residual:.2e}"),
        ),
        check(
            "Γ_h(90°, ε_g = 5) = −0.38197 ± 1e-5",
            (g + 0.38197).abs() <= 1e-5 && (g - oracle).abs() < 1e-15,
            format!("{g:.6}"),
        ),
    ]
}

fn axial_cut(
    geom: &ArrayGeometry,
    strategy: FocusStrategy,
    h: f64,
    pol: Polarization,
    z_range: (f64, f64),
) -> Vec<f64> {
    let z0 = 20.0 * LAMBDA;
    let exc = conjugate_phases(geom, z0, strategy).unwrap();
    let grid = GridSpec::new((0.0, 0.0), z_range, 1, 1601).unwrap();
    let map: FieldMap = two_ray_field(
        geom,
        &exc,
        &setup(h, Ground::Dielectric { permittivity: 5.0 }),
        &grid,
        pol,
    )
    .unwrap();
    let c = match pol {
        Polarization::Horizontal => Component::Ex,
        Polarization::Vertical => Component::Ez,
    };
    map.magnitudes(c)
}

/// Local maxima at or above half the cut's peak (−6 dB in amplitude).
fn strong_maxima(cut: &[f64]) -> usize {
    let peak = cut.iter().cloned().fold(0.0, f64::max);
    local_maxima(cut)
        .into_iter()
        .filter(|&i| cut[i] >= 0.5 * peak)
        .count()
}

/// Peak over the strongest other local maximum, in dB.
fn margin_db(cut: &[f64]) -> f64 {
    let mut m: Vec<f64> = local_maxima(cut).into_iter().map(|i| cut[i]).collect();
    m.sort_by(|a, b| b.total_cmp(a));
    match m.as_slice() {
        [p, s, ..] => 20.0 * (p / s).log10(),
        _ => f64::INFINITY,
    }
}

fn criterion_9() -> Vec<Check> {
    let z0 = 20.0 * LAMBDA;
    let window = (0.5 * z0, 1.5 * z0);
    let g20 = array(20);
    let h_low = axial_cut(
        &g20,
        FocusStrategy::Ex,
        4.0 * LAMBDA,
        Polarization::Horizontal,
        window,
    );
    let h_high = axial_cut(
        &g20,
        FocusStrategy::Ex,
        40.0 * LAMBDA,
        Polarization::Horizontal,
        window,
    );
    let n_low = strong_maxima(&h_low);
    let n_high = strong_maxima(&h_high);

    let g2000 = array(2000);
    let big_high = axial_cut(
        &g2000,
        FocusStrategy::Ex,
        40.0 * LAMBDA,
        Polarization::Horizontal,
        window,
    );
    let n_big = strong_maxima(&big_high);

    let mut out = vec![
        check(
            "h = 4λ horizontal axial cut has ≥ 2 maxima above −6 dB",
            n_low >= 2,
            format!("{n_low} on z ∈ [10λ, 30λ]"),
        ),
        check(
            "h = 40λ horizontal axial cut has exactly one maximum above −6 dB",
            n_high == 1,
            format!("{n_high} on z ∈ [10λ, 30λ]; N = 2000 gives {n_big}"),
        ),
    ];
    for h in [4.0, 40.0] {
        let mh = margin_db(&axial_cut(
            &g20,
            FocusStrategy::Ex,
            h * LAMBDA,
            Polarization::Horizontal,
            window,
        ));
        let mv = margin_db(&axial_cut(
            &g20,
            FocusStrategy::Ez,
            h * LAMBDA,
            Polarization::Vertical,
            window,
        ));
        out.push(check(
            format!("h = {h}λ: vertical margin exceeds horizontal"),
            mv > mh,
            format!("vertical {mv:.2} dB, horizontal {mh:.2} dB"),
        ));
    }
    out
}

fn criterion_10() -> Vec<Check> {
    let geom = array(20);
    let z0 = 20.0 * LAMBDA;
    let peak = |s| {
        let exc = conjugate_phases(&geom, z0, s).unwrap();
        peak_field_on_axis(&geom, &exc, 0.5 * z0, 1.5 * z0).unwrap()
    };
    let px = peak(FocusStrategy::Ex);
    let pz = peak(FocusStrategy::Ez);
    let (sx, sz) = (z0 - px.z, z0 - pz.z);
    vec![
        check(
            "both peaks short of 20λ",
            px.z < z0 && pz.z < z0 && !px.on_boundary && !pz.on_boundary,
            format!("Ex at {:.3}λ, Ez at {:.3}λ", px.z / LAMBDA, pz.z / LAMBDA),
        ),
        check(
            "Ez shift exceeds Ex shift",
            sz > sx,
            format!("{:.3}λ vs {:.3}λ", sz / LAMBDA, sx / LAMBDA),
        ),
    ]
}

/// Induced-EMF mutual impedance of two parallel side-by-side half-wave
/// dipoles at spacing `d`, by direct quadrature of the near field of one
/// along the other.
fn side_by_side_oracle(d: f64) -> Complex64 {
    let k = 2.0 * PI / LAMBDA;
    let h = LAMBDA / 4.0;
    let kernel = |z: f64, part: fn(Complex64) -> f64| {
        let r1 = (d * d + (z - h).powi(2)).sqrt();
        let r2 = (d * d + (z + h).powi(2)).sqrt();
        let e = Complex64::from_polar(1.0 / r1, -k * r1) + Complex64::from_polar(1.0 / r2, -k * r2);
        part(Complex64::new(0.0, FREE_SPACE_IMPEDANCE / (4.0 * PI)) * e) * (k * (h - z.abs())).sin()
    };
    let re = simpson(|z| kernel(z, |c| c.re), -h, h, 20_000);
    let im = simpson(|z| kernel(z, |c| c.im), -h, h, 20_000);
    Complex64::new(re, im)
}

fn criterion_11() -> Vec<Check> {
    let k = 2.0 * PI / LAMBDA;
    let z = |a, s| {
        mutual_impedance(
            &DipolePairSpec {
                arrangement: a,
                separation: s,
                dipole_length: LAMBDA / 2.0,
            },
            k,
        )
        .unwrap()
    };
    let mut violations = Vec::new();
    for i in 0..=225 {
        let s = (0.75 + 0.01 * i as f64) * LAMBDA;
        if z(Arrangement::Collinear, s).norm() >= z(Arrangement::SideBySide, s).norm() {
            violations.push(s / LAMBDA);
        }
    }
    let half = z(Arrangement::SideBySide, 0.5 * LAMBDA);
    let oracle = side_by_side_oracle(0.5 * LAMBDA);
    vec![
        check(
            "|Z_collinear| < |Z_side-by-side| on [0.75λ, 3λ]",
            violations.is_empty(),
            format!("{} of 226 separations violate", violations.len()),
        ),
        check(
            "side-by-side Z(0.5λ) = −12.5 − j29.9 ± 0.5 Ω",
            (half.re + 12.5).abs() <= 0.5
                && (half.im + 29.9).abs() <= 0.5
                && (half - oracle).norm() < 1e-3,
            format!(
                "{:.3} {:+.3}j (induced EMF {:.3} {:+.3}j)",
                half.re, half.im, oracle.re, oracle.im
            ),
        ),
    ]
}

fn run_cli(args: &[&str], dir: &Path, threads: &str) -> bool {
    Command::new(env!("CARGO_BIN_EXE_nearfocus"))
        .args(args)
        .current_dir(dir)
        .env("RAYON_NUM_THREADS", threads)
        .output()
        .map(|o| o.status.success())
        .unwrap_or(false)
}

fn criterion_12() -> Vec<Check> {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let grid = r#"{"x_range": [{"wavelengths": -3}, {"wavelengths": 3}],
                   "z_range": [{"wavelengths": 2}, {"wavelengths": 30}], "nx": 61, "nz": 281}"#;
    let configs = [
        ("phases", "", r#"{"phases": {"n_elements": 20, "focus_z": {"wavelengths": 20}, "strategy": "ez"}}"#.to_string()),
        (
            "fieldmap",
            "",
            format!(r#"{{"fieldmap": {{"n_elements": 200, "focus_z": {{"wavelengths": 20}}, "strategy": "ez", "grid": {grid}}}}}"#),
        ),
        (
            "fieldmap",
            "--ground",
            format!(
                r#"{{"fieldmap": {{"n_elements": 200, "focus_z": {{"wavelengths": 20}}, "grid": {grid},
                   "ground": {{"tx_height": {{"wavelengths": 4}}, "ground": {{"kind": "dielectric", "permittivity": 5}}}}}}}}"#
            ),
        ),
        ("profile", "", r#"{"profile": {"n_elements": 400, "focus_z": {"wavelengths": 10}, "strategy": "ez"}}"#.to_string()),
        ("converge", "", r#"{"converge": {"focus_z": 1.5, "n_max": 400}}"#.to_string()),
        ("axial-ratio", "", r#"{"axial_ratio": {"focus_z": [{"wavelengths": 10}, {"wavelengths": 20}], "n_max": 150}}"#.to_string()),
        ("coupling", "", r#"{"coupling": {"separation_start": 0.01, "separation_stop": 0.2, "count": 50}}"#.to_string()),
    ];
    let mut out = Vec::new();
    for (i, (cmd, flag, text)) in configs.iter().enumerate() {
        let cfg = format!("c{i}.json");
        fs::write(dir.join(&cfg), text).unwrap();
        let runs = [("a", "1"), ("b", "1"), ("c", "4")];
        let mut ok = true;
        for (tag, threads) in runs {
            let target = format!("out{i}{tag}");
            let mut args = vec![*cmd, "--config", cfg.as_str(), "--out", target.as_str()];
            if !flag.is_empty() {
                args.push(flag);
            }
            ok &= run_cli(&args, dir, threads);
        }
        let read = |tag: &str| -> Vec<(String, Vec<u8>)> {
            let mut files: Vec<_> = fs::read_dir(dir.join(format!("out{i}{tag}")))
                .map(|r| {
                    r.filter_map(|e| e.ok())
                        .map(|e| {
                            (
                                e.file_name().to_string_lossy().into_owned(),
                                fs::read(e.path()).unwrap(),
                            )
                        })
                        .collect()
                })
                .unwrap_or_default();
            files.sort();
            files
        };
        let a = read("a");
        let same = ok && !a.is_empty() && a == read("b") && a == read("c");
        let csvs = a.iter().filter(|(n, _)| n.ends_with(".csv")).count();
        out.push(check(
            format!(
                "{cmd}{} repeat runs byte-identical (1 and 4 threads)",
                if flag.is_empty() {
                    String::new()
                } else {
                    format!(" {flag}")
                }
            ),
            same && csvs > 0,
            format!("{} files", a.len()),
        ));
    }
    out
}

fn main() {
    let criteria: [(u32, &str, Criterion); 12] = [
        (1, "phase tables", criterion_1),
        (2, "convergence limits", criterion_2),
        (3, "threshold element counts", criterion_3),
        (4, "beam metrics", criterion_4),
        (5, "closed form vs discrete profiles", criterion_5),
        (6, "cross-polarization nulls", criterion_6),
        (7, "circular-polarization element counts", criterion_7),
        (8, "two-ray limits", criterion_8),
        (9, "multipath focal structure", criterion_9),
        (10, "focal shift ordering", criterion_10),
        (11, "dipole coupling", criterion_11),
        (12, "CLI determinism", criterion_12),
    ];
    let mut unexpected = 0;
    let mut failed = 0;
    for (id, title, run) in criteria {
        let checks = run();
        let pass = checks.iter().all(|c| c.pass);
        if !pass {
            failed += 1;
        }
        println!(
            "{} criterion {id:>2}: {title}",
            if pass { "PASS" } else { "FAIL" }
        );
        for c in &checks {
            let known = KNOWN_SHORTFALLS.contains(&(id, c.name.as_str()));
            let tag = match (c.pass, known) {
                (true, false) => "ok  ",
                (true, true) => "ok (listed as a known shortfall)",
                (false, true) => "FAIL (known shortfall)",
                (false, false) => {
                    unexpected += 1;
                    "FAIL"
                }
            };
            if c.detail.is_empty() {
                println!("    {tag} {}", c.name);
            } else {
                println!("    {tag} {}: {}", c.name, c.detail);
            }
        }
    }
    println!(
        "\n{} of 12 criteria pass; {unexpected} unexpected sub-check failure(s)",
        12 - failed
    );
    if unexpected > 0 {
        std::process::exit(1);
    }
}
