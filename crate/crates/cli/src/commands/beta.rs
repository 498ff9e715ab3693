use serde::Serialize;

use spectral_core::degenerate_beta::{beta_polynomial, beta_roots};

use crate::output::{pair, pairs, C2};
use crate::{CliError, Outcome};

use super::Context;

#[derive(Serialize)]
struct Report {
    degree: usize,
    poly_coeffs: Vec<C2>,
    roots: Vec<C2>,
    a0: Vec<C2>,
    vectors: Vec<Vec<C2>>,
    residuals: Vec<f64>,
    multiplicities: Vec<usize>,
    nullities: Vec<usize>,
}

pub fn run(ctx: &Context) -> Result<Outcome, CliError> {
    let ps = ctx.punctures()?;
    let numerical = |e: spectral_core::error::SpectralError| CliError::Numerical(e.to_string());
    let poly = beta_polynomial(&ps).map_err(numerical)?;
    let roots = beta_roots(&ps).map_err(numerical)?;
    ctx.write_json(&Report {
        degree: poly.degree(),
        poly_coeffs: pairs(&poly.coeffs),
        roots: roots.iter().map(|r| pair(r.beta)).collect(),
        a0: roots.iter().map(|r| pair(r.a0)).collect(),
        vectors: roots.iter().map(|r| pairs(&r.a)).collect(),
        residuals: roots.iter().map(|r| r.residual).collect(),
        multiplicities: roots.iter().map(|r| r.multiplicity).collect(),
        nullities: roots.iter().map(|r| r.nullity).collect(),
    })?;
    Ok(Outcome::Success)
}
