use serde::Serialize;

use spectral_core::degenerate_beta::{beta_roots, build_degenerate_psi};
use spectral_core::eigenfunction::Eigenfunction;
use spectral_core::spectral_curve::{spectral_points, PunctureSet};
use spectral_core::weierstrass_surface::{
    check_planar_end, integrate_surface, loop_period, GridSpec, SpinorPair,
};

use crate::config::{cx, SpinorSpec};
use crate::output::{emit, obj_mesh, pairs, sibling, to_json, C2};
use crate::{CliError, Outcome};

use super::Context;

#[derive(Serialize)]
struct PlanarEnd {
    puncture: usize,
    pole_order: Option<u32>,
    residues: Vec<C2>,
    leading: Vec<C2>,
    residue_ratio: Option<f64>,
    pass: bool,
    error: Option<String>,
}

#[derive(Serialize)]
struct Period {
    puncture: usize,
    radius: f64,
    period: Option<[f64; 3]>,
    error: Option<String>,
}

#[derive(Serialize)]
struct Report {
    mesh: String,
    nodes: usize,
    dropped: usize,
    unreachable: usize,
    planar_ends: Vec<PlanarEnd>,
    loop_periods: Vec<Period>,
}

fn spinor(ps: &PunctureSet, spec: &SpinorSpec) -> Result<Eigenfunction, CliError> {
    let numerical = |e: spectral_core::error::SpectralError| CliError::Numerical(e.to_string());
    match *spec {
        SpinorSpec::Floquet { alpha, sheet, mu_offset } => {
            let points = spectral_points(ps, cx(alpha)).map_err(numerical)?;
            let sp = points.get(sheet).ok_or_else(|| {
                CliError::Config(format!("surface: sheet {sheet} out of range ({} sheets)", points.len()))
            })?;
            Eigenfunction::floquet(ps.clone(), sp.alpha, sp.mu + mu_offset, sp.a.clone()).map_err(numerical)
        }
        SpinorSpec::Beta { root } => {
            let roots = beta_roots(ps).map_err(numerical)?;
            let br = roots.get(root).ok_or_else(|| {
                CliError::Config(format!("surface: root {root} out of range ({} roots)", roots.len()))
            })?;
            build_degenerate_psi(ps, br).map_err(numerical)
        }
        SpinorSpec::Zero => Ok(Eigenfunction::zero(ps.clone())),
    }
}

pub fn run(ctx: &Context) -> Result<Outcome, CliError> {
    let spec = ctx
        .cfg
        .surface
        .as_ref()
        .ok_or_else(|| CliError::Config("surface: missing section".into()))?;
    let out = ctx
        .out
        .as_deref()
        .ok_or_else(|| CliError::Config("surface: an output path is required (--out or output.path)".into()))?;
    let ps = ctx.punctures()?;
    let sp = SpinorPair::new(spinor(&ps, &spec.spinors[0])?, spinor(&ps, &spec.spinors[1])?)
        .map_err(|e| CliError::Config(format!("surface: {e}")))?;

    let g = &spec.grid;
    if g.nu == 0 || g.nv == 0 {
        return Err(CliError::Config("surface.grid: nu and nv must be positive".into()));
    }
    let grid = GridSpec {
        origin: cx(g.origin),
        du: cx(g.du),
        dv: cx(g.dv),
        nu: g.nu,
        nv: g.nv,
    };
    let sample = integrate_surface(&sp, &grid, cx(spec.basepoint), spec.base_value)
        .map_err(|e| CliError::Numerical(e.to_string()))?;

    let planar_ends = (0..ps.len())
        .map(|l| match check_planar_end(&sp, l) {
            Ok(r) => PlanarEnd {
                puncture: l,
                pole_order: Some(r.pole_order),
                residues: pairs(&r.residues),
                leading: pairs(&r.leading),
                residue_ratio: Some(r.residue_ratio),
                pass: r.pass,
                error: None,
            },
            Err(e) => PlanarEnd {
                puncture: l,
                pole_order: None,
                residues: Vec::new(),
                leading: Vec::new(),
                residue_ratio: None,
                pass: false,
                error: Some(e.to_string()),
            },
        })
        .collect();
    let radius = 0.25 * ps.min_separation();
    let loop_periods = ps
        .points()
        .iter()
        .enumerate()
        .map(|(l, &p)| {
            let r = loop_period(&sp, p, radius);
            Period {
                puncture: l,
                radius,
                period: r.as_ref().ok().copied(),
                error: r.err().map(|e| e.to_string()),
            }
        })
        .collect();

    let mesh_name = out
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    emit(Some(out), obj_mesh(g.nu, g.nv, &sample.xyz).as_bytes())?;
    let unreachable = sample.unreachable.len();
    let report = Report {
        mesh: mesh_name,
        nodes: grid.len(),
        dropped: sample.dropped.len(),
        unreachable,
        planar_ends,
        loop_periods,
    };
    emit(Some(&sibling(out, ".report.json")), &to_json(&report)?)?;
    Ok(if unreachable * 10 > grid.len() {
        Outcome::PartialFailure
    } else {
        Outcome::Success
    })
}
