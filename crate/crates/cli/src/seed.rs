//! Ready-made configs that regenerate the data behind each standard plot
//! at a size that runs on a laptop.

use serde_json::{json, Value};

use crate::error::CliResult;
use crate::output::Outputs;

pub struct Seed {
    pub name: &'static str,
    pub command: &'static str,
    pub flags: &'static str,
    pub about: &'static str,
    pub config: Value,
}

fn wl(v: f64) -> Value {
    json!({ "wavelengths": v })
}

fn map_grid(n_lateral: f64) -> Value {
    // λ/10 cells
    json!({
        "x_range": [wl(-n_lateral), wl(n_lateral)],
        "z_range": [wl(1.0), wl(40.0)],
        "nx": (20.0 * n_lateral) as usize + 1,
        "nz": 391,
    })
}

fn ground_map(name: &str, n: usize, h: f64, ground: Value, pol: &str) -> Value {
    json!({
        "output_dir": name,
        "fieldmap": {
            "n_elements": n,
            "focus_z": wl(20.0),
            "strategy": if pol == "horizontal" { "ex" } else { "ez" },
            "grid": map_grid(4.0),
            "ground": {
                "tx_height": wl(h),
                "ground": ground,
                "polarization": pol,
            },
        },
    })
}

pub fn seeds() -> Vec<Seed> {
    let dielectric = json!({ "kind": "dielectric", "permittivity": 5.0 });
    let metal = json!({ "kind": "metal" });
    let mut out = vec![
        Seed {
            name: "coupling",
            command: "coupling",
            flags: "",
            about: "mutual impedance of two half-wave dipoles against separation",
            config: json!({
                "output_dir": "coupling",
                "coupling": {
                    "separation_start": wl(0.05),
                    "separation_stop": wl(3.0),
                    "count": 296,
                },
            }),
        },
        Seed {
            name: "convergence",
            command: "converge",
            flags: "",
            about: "focal peak against element count with the continuum overlay",
            config: json!({
                "output_dir": "convergence",
                "converge": {
                    "focus_z": 1.5,
                    "n_min": 1,
                    "n_max": 2400,
                    "threshold_fraction": 0.9,
                },
            }),
        },
    ];
    for (name, strategy) in [("profile_ex", "ex"), ("profile_ez", "ez")] {
        out.push(Seed {
            name,
            command: "profile",
            flags: "",
            about: "width and depth cuts through the focus against the closed forms",
            config: json!({
                "output_dir": name,
                "profile": {
                    "n_elements": 2000,
                    "focus_z": wl(10.0),
                    "strategy": strategy,
                    "span": wl(2.0),
                    "step": wl(0.01),
                },
            }),
        });
    }
    out.push(Seed {
        name: "axial_ratio",
        command: "axial-ratio",
        flags: "",
        about: "axial ratio against element count for three focal distances",
        config: json!({
            "output_dir": "axial_ratio",
            "axial_ratio": {
                "focus_z": [wl(10.0), wl(20.0), wl(40.0)],
                "n_min": 2,
                "n_max": 300,
            },
        }),
    });
    for (name, n, strategy) in [
        ("map_n20_ex", 20usize, "ex"),
        ("map_n20_ez", 20, "ez"),
        ("map_n2000_ex", 2000, "ex"),
        ("map_n2000_ez", 2000, "ez"),
    ] {
        out.push(Seed {
            name,
            command: "fieldmap",
            flags: "",
            about: "line-of-sight map around the focus; mag_total gives the combined view",
            config: json!({
                "output_dir": name,
                "fieldmap": {
                    "n_elements": n,
                    "focus_z": wl(20.0),
                    "strategy": strategy,
                    "grid": map_grid(4.0),
                },
            }),
        });
    }
    let ground_cases: [(&'static str, usize, f64, &Value, &str); 12] = [
        ("h_dielectric_n20_h4", 20, 4.0, &dielectric, "horizontal"),
        ("h_dielectric_n20_h40", 20, 40.0, &dielectric, "horizontal"),
        (
            "h_dielectric_n2000_h4",
            2000,
            4.0,
            &dielectric,
            "horizontal",
        ),
        (
            "h_dielectric_n2000_h40",
            2000,
            40.0,
            &dielectric,
            "horizontal",
        ),
        ("h_metal_n2000_h4", 2000, 4.0, &metal, "horizontal"),
        ("h_metal_n2000_h40", 2000, 40.0, &metal, "horizontal"),
        ("v_dielectric_n20_h4", 20, 4.0, &dielectric, "vertical"),
        ("v_dielectric_n20_h40", 20, 40.0, &dielectric, "vertical"),
        ("v_dielectric_n2000_h4", 2000, 4.0, &dielectric, "vertical"),
        (
            "v_dielectric_n2000_h40",
            2000,
            40.0,
            &dielectric,
            "vertical",
        ),
        ("v_metal_n2000_h4", 2000, 4.0, &metal, "vertical"),
        ("v_metal_n2000_h40", 2000, 40.0, &metal, "vertical"),
    ];
    for (name, n, h, ground, pol) in ground_cases {
        out.push(Seed {
            name,
            command: "fieldmap",
            flags: "--ground",
            about: "two-ray map over a reflecting floor",
            config: ground_map(name, n, h, ground.clone(), pol),
        });
    }
    out
}

/// Render every seed config plus a `commands.txt` listing the invocations.
pub fn render() -> CliResult<Outputs> {
    let mut outputs = Outputs::new();
    let mut listing = String::new();
    for s in seeds() {
        let file = format!("{}.json", s.name);
        outputs.add_json(file.clone(), &s.config)?;
        let flags = if s.flags.is_empty() {
            String::new()
        } else {
            format!(" {}", s.flags)
        };
        listing.push_str(&format!(
            "# {}\nnearfocus {} --config {file}{flags}\n",
            s.about, s.command
        ));
    }
    outputs.add("commands.txt", listing.into_bytes());
    Ok(outputs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RunConfig;

    #[test]
    fn every_seed_parses_and_validates() {
        for s in seeds() {
            let cfg = RunConfig::from_json(&s.config.to_string())
                .unwrap_or_else(|e| panic!("{}: {e}", s.name));
            cfg.base().unwrap();
            if let Some(f) = &cfg.fieldmap {
                let base = cfg.base().unwrap();
                crate::config::grid(&base, &f.grid, "fieldmap.grid").unwrap();
                if let Some(g) = &f.ground {
                    crate::config::two_ray_setup(&base, g, "fieldmap.ground").unwrap();
                }
            }
        }
    }

    #[test]
    fn names_are_unique() {
        let mut names: Vec<_> = seeds().iter().map(|s| s.name).collect();
        let n = names.len();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), n);
    }
}
