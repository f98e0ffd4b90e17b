use std::fmt::Write;
use std::path::PathBuf;

use rayon::prelude::*;

use pentagram::conics::{is_concentric, PentagonConics, TOL_CONCENTRIC};
use pentagram::glick::{d_vector, glick_is_affine, relative_d_norm};
use pentagram::maps::{
    convexity_horizon, orbit, orbit_with, HorizonMethod, OrbitReport, PentagramMap,
};
use pentagram::polygon::random_convex_polygon;
use pentagram::variety::{horizon_reprojected, project_any_vertex, project_to_variety, reproject};
use pentagram::{io, AffinePolygon, Error};

use crate::output::{emit, write_atomic};
use crate::{svg, CliError, RunConfig};

pub fn check(p: &AffinePolygon, cfg: &RunConfig) -> Result<(), CliError> {
    let projective = p.to_projective();
    let d = d_vector(p)?;
    let rel = relative_d_norm(p)?;
    let affine = glick_is_affine(&projective, cfg.tolerance)?;
    let raw = convexity_horizon(p, cfg.k_max, HorizonMethod::Direct)?;

    let mut s = String::new();
    writeln!(s, "vertices: {}", p.len()).unwrap();
    writeln!(s, "d_norm: {:.6e}", d.norm()).unwrap();
    writeln!(s, "d_relative: {rel:.6e}").unwrap();
    writeln!(s, "affine: {affine}").unwrap();
    // floating-point orbits drift off d_P = 0, so polygons on it are followed
    // with re-projection; the raw horizon is always reported as well
    let horizon = if affine && cfg.reproject {
        horizon_reprojected(p, cfg.k_max)?
    } else {
        raw
    };
    writeln!(s, "horizon: {horizon}").unwrap();
    writeln!(s, "horizon_raw: {raw}").unwrap();
    writeln!(s, "kmax: {}", cfg.k_max).unwrap();
    if p.len() == 5 {
        let conics = PentagonConics::new(&projective)?;
        writeln!(
            s,
            "concentric: {}",
            is_concentric(&projective, TOL_CONCENTRIC)?
        )
        .unwrap();
        writeln!(
            s,
            "center_distance: {:.6e}",
            conics.relative_center_distance(&projective)?
        )
        .unwrap();
    }
    emit(cfg.output_path.as_deref(), &s)
}

fn orbit_csv(report: &OrbitReport) -> String {
    let mut s = String::from("k,convex,d_norm,diameter\n");
    for step in &report.steps {
        writeln!(
            s,
            "{},{},{:.9e},{:.9e}",
            step.k, step.convex, step.d_rel, step.orbit_diameter
        )
        .unwrap();
    }
    s
}

fn orbit_report(
    p: &AffinePolygon,
    map: PentagramMap,
    cfg: &RunConfig,
) -> Result<OrbitReport, CliError> {
    if !p.is_convex()? {
        return Err(Error::DegeneratePolygon("polygon is not convex".into()).into());
    }
    let on_variety = glick_is_affine(&p.to_projective(), cfg.tolerance)?;
    Ok(if cfg.reproject && on_variety && map == PentagramMap::S {
        orbit_with(p, map, cfg.k_max, cfg.renormalize, reproject)
    } else {
        orbit(p, map, cfg.k_max, cfg.renormalize)
    })
}

pub fn run_orbit(
    p: &AffinePolygon,
    map: PentagramMap,
    cfg: &RunConfig,
    csv: Option<PathBuf>,
    svg_path: Option<PathBuf>,
) -> Result<(), CliError> {
    let report = orbit_report(p, map, cfg)?;
    if let Some(path) = svg_path {
        write_atomic(&path, &svg::strip(&report.frames))?;
    }
    emit(
        csv.or(cfg.output_path.clone()).as_deref(),
        &orbit_csv(&report),
    )
}

pub fn solve(p: &AffinePolygon, vertex: Option<usize>, cfg: &RunConfig) -> Result<(), CliError> {
    let report = project_to_variety(p, vertex, cfg.tolerance)?;
    let summary = format!(
        "moved_vertex: {}\niterations: {}\nresidual: {:.6e}\ndisplacement: {:.6e}\n",
        report.moved_vertex, report.iterations, report.final_residual, report.displacement
    );
    let json = io::polygon_to_json(&report.result);
    match &cfg.output_path {
        Some(path) => {
            write_atomic(path, &json)?;
            print!("{summary}");
        }
        None => {
            print!("{json}");
            eprint!("{summary}");
        }
    }
    Ok(())
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Arm {
    Random,
    Variety,
    VarietyReprojected,
}

impl Arm {
    fn name(self) -> &'static str {
        match self {
            Arm::Random => "random",
            Arm::Variety => "variety",
            Arm::VarietyReprojected => "variety_reprojected",
        }
    }
}

struct Row {
    trial: usize,
    arm: Arm,
    seed: u64,
    d_norm: Option<f64>,
    horizon: Option<pentagram::maps::Horizon>,
    status: String,
}

fn trial_rows(trial: usize, n: usize, cfg: &RunConfig) -> Vec<Row> {
    let seed = cfg.seed.wrapping_add(trial as u64);
    let p = random_convex_polygon(n, seed);
    let row = |arm, d_norm, horizon: Result<_, (Error, &str)>| match horizon {
        Ok(h) => Row {
            trial,
            arm,
            seed,
            d_norm,
            horizon: Some(h),
            status: "ok".into(),
        },
        Err((_, status)) => Row {
            trial,
            arm,
            seed,
            d_norm,
            horizon: None,
            status: status.to_string(),
        },
    };
    let degenerate = |e| (e, "degenerate");
    let mut rows = vec![row(
        Arm::Random,
        relative_d_norm(&p).ok(),
        convexity_horizon(&p, cfg.k_max, HorizonMethod::Direct).map_err(degenerate),
    )];
    match project_any_vertex(&p, cfg.tolerance) {
        Ok(solved) => {
            let q = solved.result;
            let d = Some(solved.final_residual);
            rows.push(row(
                Arm::Variety,
                d,
                convexity_horizon(&q, cfg.k_max, HorizonMethod::Direct).map_err(degenerate),
            ));
            if cfg.reproject {
                let h = horizon_reprojected(&q, cfg.k_max).map_err(degenerate);
                rows.push(row(Arm::VarietyReprojected, d, h));
            }
        }
        Err(e) => {
            rows.push(row(Arm::Variety, None, Err((e.clone(), "solve_failed"))));
            if cfg.reproject {
                rows.push(row(Arm::VarietyReprojected, None, Err((e, "solve_failed"))));
            }
        }
    }
    rows
}

fn median(mut v: Vec<usize>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_unstable();
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[m] as f64
    } else {
        (v[m - 1] + v[m]) as f64 / 2.0
    })
}

pub fn experiment(n: usize, trials: usize, cfg: &RunConfig) -> Result<(), CliError> {
    let rows: Vec<Row> = (0..trials)
        .into_par_iter()
        .flat_map_iter(|t| trial_rows(t, n, cfg))
        .collect();

    let mut s = String::from("trial,arm,seed,d_norm,horizon,status\n");
    for r in &rows {
        let d = r.d_norm.map(|d| format!("{d:.6e}")).unwrap_or_default();
        let h = r.horizon.map(|h| h.to_string()).unwrap_or_default();
        writeln!(
            s,
            "{},{},{},{d},{h},{}",
            r.trial,
            r.arm.name(),
            r.seed,
            r.status
        )
        .unwrap();
    }
    for arm in [Arm::Random, Arm::Variety, Arm::VarietyReprojected] {
        if arm == Arm::VarietyReprojected && !cfg.reproject {
            continue;
        }
        let values = rows
            .iter()
            .filter(|r| r.arm == arm)
            .filter_map(|r| r.horizon.map(|h| h.value(cfg.k_max)))
            .collect();
        let m = median(values)
            .map(|m| format!("{m:.1}"))
            .unwrap_or_default();
        writeln!(s, "median,{},,,{m},summary", arm.name()).unwrap();
    }
    emit(cfg.output_path.as_deref(), &s)
}
