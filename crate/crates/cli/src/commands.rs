//! One function per subcommand. Each validates its part of the config,
//! computes, and returns the rendered files plus a short stdout report.

use nearfocus::aperture::{
    self, mutual_impedance, ApertureSpec, Arrangement, DipolePairSpec, Profile,
};
use nearfocus::fieldmap::{
    convergence_sweep, cut_metrics, evaluate_map, first_reaching, Component, FieldMap,
};
use nearfocus::multipath::two_ray_field;
use nearfocus::polarization::{axial_ratio_sweep, min_elements_for_cp};
use nearfocus::radiator::{conjugate_phases, physical_prefactor, FocusStrategy};
use serde::Serialize;
use serde_json::json;

use crate::config::{self, positive, require, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::{num, Outputs, Table};

pub struct Report {
    pub outputs: Outputs,
    pub summary: String,
}

fn strategy_name(s: FocusStrategy) -> &'static str {
    match s {
        FocusStrategy::Ex => "ex",
        FocusStrategy::Ez => "ez",
    }
}

pub fn phases(cfg: &RunConfig, strategy: Option<FocusStrategy>) -> CliResult<Report> {
    let base = cfg.base()?;
    let block = require(&cfg.phases, "phases")?;
    let geom = config::geometry(&base, block.n_elements, "phases")?;
    let focus = positive("phases.focus_z", block.focus_z.metres(base.wavelength))?;
    let strategy = strategy.unwrap_or(block.strategy);
    let exc = conjugate_phases(&geom, focus, strategy).map_err(CliError::at("phases.focus_z"))?;

    let mut table = Table::new(&["index", "x", "phase_deg"])?;
    let mut summary = format!(
        "{} elements, focus {} m, strategy {}\n index          x [m]    phase [deg]\n",
        geom.n_elements(),
        focus,
        strategy_name(strategy)
    );
    for (i, (x, p)) in geom.positions().iter().zip(exc.phases_deg()).enumerate() {
        table.row([i.to_string(), num(*x), num(p)])?;
        summary.push_str(&format!("{i:>6} {x:>14.6} {p:>14.2}\n"));
    }
    let mut outputs = Outputs::new();
    outputs.add("phases.csv", table.finish()?);
    Ok(Report { outputs, summary })
}

fn map_csv(map: &FieldMap) -> CliResult<Vec<u8>> {
    let g = map.grid();
    let mut t = Table::new(&["x", "z", "re_ex", "im_ex", "re_ez", "im_ez", "mag_total"])?;
    for i in 0..g.len() {
        let (x, z) = g.coords(i);
        let (ex, ez) = (map.ex()[i], map.ez()[i]);
        t.row([
            num(x),
            num(z),
            num(ex.re),
            num(ex.im),
            num(ez.re),
            num(ez.im),
            num(Component::Total.magnitude(ex, ez)),
        ])?;
    }
    t.finish()
}

pub fn fieldmap(cfg: &RunConfig, with_ground: bool) -> CliResult<Report> {
    let base = cfg.base()?;
    let block = require(&cfg.fieldmap, "fieldmap")?;
    let geom = config::geometry(&base, block.n_elements, "fieldmap")?;
    let focus = positive("fieldmap.focus_z", block.focus_z.metres(base.wavelength))?;
    let grid = config::grid(&base, &block.grid, "fieldmap.grid")?;
    let setup = if with_ground {
        let g = require(&block.ground, "fieldmap.ground")?;
        Some((
            config::two_ray_setup(&base, g, "fieldmap.ground")?,
            g.polarization,
        ))
    } else {
        None
    };
    if let Some(p) = block.physical_units {
        positive("fieldmap.physical_units.current", p.current)?;
        positive("fieldmap.physical_units.dipole_length", p.dipole_length)?;
    }
    let exc =
        conjugate_phases(&geom, focus, block.strategy).map_err(CliError::at("fieldmap.focus_z"))?;

    let (mut map, component) = match &setup {
        Some((s, pol)) => {
            let comp = match pol {
                nearfocus::multipath::Polarization::Horizontal => Component::Ex,
                nearfocus::multipath::Polarization::Vertical => Component::Ez,
            };
            (two_ray_field(&geom, &exc, s, &grid, *pol)?, comp)
        }
        None => (
            evaluate_map(&geom, &exc, &grid)?,
            Component::from(block.strategy),
        ),
    };
    let units = match block.physical_units {
        Some(p) => {
            map = map.scaled(physical_prefactor(
                geom.wavenumber(),
                p.current,
                p.dipole_length,
            ));
            "V/m"
        }
        None => "normalized",
    };
    if block.normalize {
        map = map
            .normalized((0.0, focus), component)
            .map_err(CliError::at("fieldmap.normalize"))?;
    }

    let meta = json!({
        "columns": ["x", "z", "re_ex", "im_ex", "re_ez", "im_ez", "mag_total"],
        "layout": "row-major, x fastest",
        "grid": grid,
        "geometry": {
            "n_elements": geom.n_elements(),
            "spacing": geom.spacing(),
            "wavelength": geom.wavelength(),
            "frequency": base.frequency,
        },
        "excitation": {
            "strategy": block.strategy,
            "focus_z": focus,
        },
        "normalization": map.normalization(),
        "normalization_component": component,
        "peak_value": map.peak_value(),
        "units": units,
        "environment": setup.map(|(s, pol)| json!({
            "tx_height": s.tx_height,
            "rx_height": s.rx_height,
            "ground": s.ground,
            "grazing_angle": s.grazing_angle,
            "polarization": pol,
            "range_axis": "z",
        })),
    });
    let mut outputs = Outputs::new();
    outputs.add("fieldmap.csv", map_csv(&map)?);
    outputs.add_json("fieldmap.json", &meta)?;
    let summary = format!(
        "{}×{} cells, {} model, peak near focus {:.6e}",
        grid.nx,
        grid.nz,
        if setup.is_some() {
            "two-ray"
        } else {
            "line-of-sight"
        },
        map.peak_value()
    );
    Ok(Report { outputs, summary })
}

#[derive(Serialize)]
struct ClosedFormSpot {
    width_one_sided: f64,
    width_full: f64,
    depth_one_sided: f64,
    depth_full: f64,
    width_sidelobe_db: Option<f64>,
}

pub fn profile(cfg: &RunConfig) -> CliResult<Report> {
    let base = cfg.base()?;
    let block = require(&cfg.profile, "profile")?;
    let lam = base.wavelength;
    let geom = config::geometry(&base, block.n_elements, "profile")?;
    let focus = positive("profile.focus_z", block.focus_z.metres(lam))?;
    let span = positive("profile.span", block.span.metres(lam))?;
    let step = positive("profile.step", block.step.metres(lam))?;
    if step >= span {
        return Err(CliError::config(
            "profile.step",
            "must be smaller than span",
        ));
    }
    let exc =
        conjugate_phases(&geom, focus, block.strategy).map_err(CliError::at("profile.focus_z"))?;
    let analysis = cut_metrics(&geom, &exc, block.strategy.into(), span, step)?;
    let spec = ApertureSpec::new(geom.aperture_length(), focus, geom.wavenumber())
        .map_err(CliError::at("profile"))?;
    let (width_p, depth_p) = match block.strategy {
        FocusStrategy::Ex => (Profile::ExWidth, Profile::ExDepth),
        FocusStrategy::Ez => (Profile::EzWidth, Profile::EzDepth),
    };
    let w = width_p.half_power_offset(&spec)?;
    let d = depth_p.half_power_offset(&spec)?;
    let closed = ClosedFormSpot {
        width_one_sided: w,
        width_full: 2.0 * w,
        depth_one_sided: d,
        depth_full: 2.0 * d,
        width_sidelobe_db: width_p.strongest_sidelobe_db(&spec, span),
    };

    let peak = analysis.metrics.peak_mag;
    let z_peak = analysis.metrics.peak_pos.1;
    let cut_csv = |cut: &nearfocus::fieldmap::Cut, centre: f64, p: Profile| -> CliResult<Vec<u8>> {
        let mut t = Table::new(&[
            "position",
            "offset",
            "offset_wavelengths",
            "numeric",
            "closed_form",
        ])?;
        for (c, v) in cut.coords.iter().zip(&cut.values) {
            let off = c - centre;
            t.row([
                num(*c),
                num(off),
                num(off / lam),
                num(v / peak),
                num(p.closed_form(off, &spec) / 2.0),
            ])?;
        }
        t.finish()
    };
    let mut outputs = Outputs::new();
    outputs.add("profile_width.csv", cut_csv(&analysis.width, 0.0, width_p)?);
    outputs.add(
        "profile_depth.csv",
        cut_csv(&analysis.depth, z_peak, depth_p)?,
    );
    outputs.add_json(
        "profile.json",
        &json!({
            "n_elements": geom.n_elements(),
            "focus_z": focus,
            "strategy": block.strategy,
            "wavelength": lam,
            "numeric": analysis.metrics,
            "closed_form": closed,
        }),
    )?;
    let m = &analysis.metrics;
    let fmt = |v: Option<f64>| v.map_or("n/a".to_string(), |v| format!("{:.4}λ", v / lam));
    let summary = format!(
        "peak at z = {:.4}λ (shift {:.4}λ)\nnumeric: width {} one-sided / {} full, depth {} one-sided / {} full\nclosed form: width {:.4}λ / {:.4}λ, depth {:.4}λ / {:.4}λ",
        m.peak_pos.1 / lam,
        m.focal_shift / lam,
        fmt(m.halfpower_width_one_sided),
        fmt(m.halfpower_width_full),
        fmt(m.halfpower_depth_one_sided),
        fmt(m.halfpower_depth_full),
        w / lam,
        2.0 * w / lam,
        d / lam,
        2.0 * d / lam,
    );
    Ok(Report { outputs, summary })
}

pub fn converge(cfg: &RunConfig) -> CliResult<Report> {
    let base = cfg.base()?;
    let block = require(&cfg.converge, "converge")?;
    let focus = positive("converge.focus_z", block.focus_z.metres(base.wavelength))?;
    let ns = config::ladder(block.n_min, block.n_max, block.n_step, "converge")?;
    let f = block.threshold_fraction;
    if !(f > 0.0 && f < 1.0) {
        return Err(CliError::config(
            "converge.threshold_fraction",
            format!("must lie in (0, 1), got {f}"),
        ));
    }
    let sweep = convergence_sweep(focus, base.spacing, base.wavelength, &ns)?;
    let d = base.spacing;
    let asymptote = 2.0 / d;
    let threshold = f * asymptote;

    let mut t = Table::new(&[
        "n",
        "length",
        "peak_ex",
        "peak_ez",
        "continuum_ex",
        "continuum_ez",
    ])?;
    for p in &sweep {
        let length = p.n_elements as f64 * d;
        let spec = ApertureSpec::new(length, focus, 2.0 * std::f64::consts::PI / base.wavelength)
            .map_err(CliError::at("converge"))?;
        t.row([
            p.n_elements.to_string(),
            num(length),
            num(p.peak_ex),
            num(p.peak_ez),
            num(aperture::ex_aperture_peak(&spec) / d),
            num(aperture::ez_aperture_peak(&spec) / d),
        ])?;
    }
    let nx = first_reaching(&sweep, FocusStrategy::Ex, threshold);
    let nz = first_reaching(&sweep, FocusStrategy::Ez, threshold);
    let lx = aperture::required_length(FocusStrategy::Ex, focus, f)?;
    let lz = aperture::required_length(FocusStrategy::Ez, focus, f)?;
    let mut outputs = Outputs::new();
    outputs.add("converge.csv", t.finish()?);
    outputs.add_json(
        "converge.json",
        &json!({
            "focus_z": focus,
            "spacing": d,
            "asymptote": asymptote,
            "threshold_fraction": f,
            "threshold": threshold,
            "first_n_ex": nx,
            "first_n_ez": nz,
            "continuum_length_ex": lx,
            "continuum_length_ez": lz,
            "continuum_n_ex": aperture::required_elements(lx, d)?,
            "continuum_n_ez": aperture::required_elements(lz, d)?,
        }),
    )?;
    let show = |n: Option<usize>| n.map_or("not reached".to_string(), |n| n.to_string());
    let summary = format!(
        "asymptote {asymptote:.4}, threshold {threshold:.4}\nEx reaches it at N = {}, Ez at N = {}\ncontinuum: Ex L = {lx:.4} m, Ez L = {lz:.4} m",
        show(nx),
        show(nz)
    );
    Ok(Report { outputs, summary })
}

pub fn axial_ratio(cfg: &RunConfig) -> CliResult<Report> {
    let base = cfg.base()?;
    let block = require(&cfg.axial_ratio, "axial_ratio")?;
    if block.focus_z.is_empty() {
        return Err(CliError::config(
            "axial_ratio.focus_z",
            "needs at least one distance",
        ));
    }
    let foci = block
        .focus_z
        .iter()
        .enumerate()
        .map(|(i, f)| {
            positive(
                &format!("axial_ratio.focus_z[{i}]"),
                f.metres(base.wavelength),
            )
        })
        .collect::<CliResult<Vec<f64>>>()?;
    let ns = config::ladder(block.n_min, block.n_max, block.n_step, "axial_ratio")?;

    let mut t = Table::new(&["focus_z", "n", "ex_peak", "ez_peak", "axial_ratio"])?;
    let mut minima = Vec::new();
    let mut summary = String::new();
    for &focus in &foci {
        for r in axial_ratio_sweep(base.spacing, base.wavelength, focus, &ns)? {
            t.row([
                num(focus),
                r.n_elements.to_string(),
                num(r.ex_peak),
                num(r.ez_peak),
                num(r.axial_ratio),
            ])?;
        }
        let n = min_elements_for_cp(base.spacing, base.wavelength, focus)?;
        summary.push_str(&format!(
            "focus {:.4}λ: at least {n} elements for AR ≤ 2\n",
            focus / base.wavelength
        ));
        minima.push(json!({ "focus_z": focus, "min_elements": n }));
    }
    let mut outputs = Outputs::new();
    outputs.add("axial_ratio.csv", t.finish()?);
    outputs.add_json(
        "axial_ratio.json",
        &json!({ "spacing": base.spacing, "wavelength": base.wavelength, "minimum": minima }),
    )?;
    Ok(Report { outputs, summary })
}

pub fn coupling(cfg: &RunConfig) -> CliResult<Report> {
    let base = cfg.base()?;
    let block = require(&cfg.coupling, "coupling")?;
    let lam = base.wavelength;
    let start = positive(
        "coupling.separation_start",
        block.separation_start.metres(lam),
    )?;
    let stop = positive(
        "coupling.separation_stop",
        block.separation_stop.metres(lam),
    )?;
    if stop < start {
        return Err(CliError::config(
            "coupling.separation_stop",
            "must not be below separation_start",
        ));
    }
    if block.count == 0 || (block.count == 1 && stop != start) {
        return Err(CliError::config(
            "coupling.count",
            "must be at least 1 (and 1 only when start equals stop)",
        ));
    }
    let k = 2.0 * std::f64::consts::PI / lam;
    let l = 0.5 * lam;
    let mut t = Table::new(&[
        "separation",
        "separation_wavelengths",
        "re_side_by_side",
        "im_side_by_side",
        "abs_side_by_side",
        "re_collinear",
        "im_collinear",
        "abs_collinear",
    ])?;
    for i in 0..block.count {
        let s = if block.count == 1 {
            start
        } else {
            start + (stop - start) * i as f64 / (block.count - 1) as f64
        };
        let pair = |arrangement| DipolePairSpec {
            arrangement,
            separation: s,
            dipole_length: l,
        };
        let ss = mutual_impedance(&pair(Arrangement::SideBySide), k)?;
        // collinear half-wave dipoles overlap below one dipole length
        let co = if s > l {
            Some(mutual_impedance(&pair(Arrangement::Collinear), k)?)
        } else {
            None
        };
        let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
        t.row([
            num(s),
            num(s / lam),
            num(ss.re),
            num(ss.im),
            num(ss.norm()),
            opt(co.map(|z| z.re)),
            opt(co.map(|z| z.im)),
            opt(co.map(|z| z.norm())),
        ])?;
    }
    let mut outputs = Outputs::new();
    outputs.add("coupling.csv", t.finish()?);
    Ok(Report {
        outputs,
        summary: format!("{} separations written", block.count),
    })
}
