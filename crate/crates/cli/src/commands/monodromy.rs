use serde::Serialize;

use spectral_core::continuation::{
    locate_branch_points, loop_monodromy, monodromy_at_zero, BranchSearch, LoopSpec, SheetLimit,
};

use crate::config::cx;
use crate::output::{pair, pairs, C2};
use crate::{CliError, Outcome};

use super::Context;

#[derive(Serialize)]
struct Classification {
    sheet: usize,
    kind: &'static str,
    beta: Option<C2>,
    probes: Vec<C2>,
    radii: Vec<f64>,
    extrapolation_gap: f64,
}

#[derive(Serialize)]
struct LoopReport {
    center: C2,
    radius: f64,
    samples: usize,
    permutation: Option<Vec<usize>>,
    error: Option<String>,
}

#[derive(Serialize)]
struct Branch {
    alpha: C2,
    discriminant: f64,
    converged: bool,
}

#[derive(Serialize)]
struct Report {
    radius: f64,
    shrinks: u32,
    permutation: Vec<usize>,
    cycles: Vec<Vec<usize>>,
    classifications: Vec<Classification>,
    beta_limits: Vec<C2>,
    loops: Vec<LoopReport>,
    branch_points: Vec<Branch>,
}

pub fn run(ctx: &Context) -> Result<Outcome, CliError> {
    let ps = ctx.punctures()?;
    let spec = &ctx.cfg.monodromy;
    let zero = monodromy_at_zero(&ps, spec.radius).map_err(|e| CliError::Numerical(e.to_string()))?;

    let mut partial = false;
    let loops: Vec<LoopReport> = spec
        .loops
        .iter()
        .map(|l| {
            let ls = LoopSpec {
                samples: l.samples,
                ..LoopSpec::circle(cx(l.center), l.radius)
            };
            let r = loop_monodromy(&ps, &ls);
            partial |= r.is_err();
            LoopReport {
                center: l.center,
                radius: l.radius,
                samples: l.samples,
                permutation: r.as_ref().ok().map(|m| m.permutation.clone()),
                error: r.err().map(|e| e.to_string()),
            }
        })
        .collect();

    let branch_points = match &spec.branch_search {
        Some(w) => locate_branch_points(
            &ps,
            &BranchSearch {
                center: cx(w.center),
                half_width: w.half_width,
                n: w.n,
            },
        )
        .map_err(|e| CliError::Numerical(e.to_string()))?
        .into_iter()
        .map(|b| Branch {
            alpha: pair(b.alpha),
            discriminant: b.discriminant,
            converged: b.converged,
        })
        .collect(),
        None => Vec::new(),
    };

    let classifications: Vec<Classification> = zero
        .classifications
        .iter()
        .map(|c| {
            let (kind, beta) = match c.limit {
                SheetLimit::Pole => ("POLE", None),
                SheetLimit::Finite { beta } => ("FINITE", Some(pair(beta))),
                SheetLimit::Unclassified => ("UNCLASSIFIED", None),
            };
            partial |= kind == "UNCLASSIFIED";
            Classification {
                sheet: c.sheet,
                kind,
                beta,
                probes: pairs(&c.probes),
                radii: c.radii.to_vec(),
                extrapolation_gap: c.extrapolation_gap,
            }
        })
        .collect();

    ctx.write_json(&Report {
        radius: zero.monodromy.loop_spec.map(|l| l.radius).unwrap_or(0.0),
        shrinks: zero.shrinks,
        permutation: zero.monodromy.permutation.clone(),
        cycles: zero.monodromy.cycles(),
        classifications,
        beta_limits: pairs(&zero.finite_limits()),
        loops,
        branch_points,
    })?;
    Ok(if partial { Outcome::PartialFailure } else { Outcome::Success })
}
