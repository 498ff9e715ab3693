use serde::Serialize;

use spectral_core::baker_akhiezer::phi;

use crate::config::{cx, Format, Function};
use crate::output::{csv_bytes, emit, float, pair, C2};
use crate::{CliError, Outcome};

use super::Context;

#[derive(Serialize)]
struct Row {
    z: C2,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<C2>,
    value: Option<C2>,
    error: Option<&'static str>,
}

#[derive(Serialize)]
struct Report {
    function: &'static str,
    rows: Vec<Row>,
}

pub fn run(ctx: &Context) -> Result<Outcome, CliError> {
    let spec = ctx
        .cfg
        .eval
        .as_ref()
        .ok_or_else(|| CliError::Config("eval: missing section".into()))?;
    let lat = ctx.lattice()?;
    let alpha = match (spec.function, spec.alpha) {
        (Function::Phi, None) => return Err(CliError::Config("eval.alpha is required for phi".into())),
        (Function::Phi, Some(a)) => Some(cx(a)),
        _ => None,
    };
    let name = match spec.function {
        Function::Sigma => "sigma",
        Function::Zeta => "zeta",
        Function::P => "p",
        Function::Phi => "phi",
    };
    let rows: Vec<Row> = spec
        .points
        .iter()
        .map(|&p| {
            let z = cx(p);
            let v = match spec.function {
                Function::Sigma => Ok(lat.sigma(z)),
                Function::Zeta => lat.zeta(z),
                Function::P => lat.weierstrass_p(z),
                Function::Phi => phi(&lat, z, alpha.unwrap()),
            };
            Row {
                z: p,
                alpha: alpha.map(pair),
                value: v.as_ref().ok().copied().map(pair),
                error: v.err().map(|e| e.kind()),
            }
        })
        .collect();

    match ctx.format() {
        Format::Json => ctx.write_json(&Report { function: name, rows })?,
        Format::Csv => {
            let mut header = vec!["z_re", "z_im"];
            if alpha.is_some() {
                header.extend(["alpha_re", "alpha_im"]);
            }
            header.extend(["val_re", "val_im", "error"]);
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    let mut rec = vec![float(r.z[0]), float(r.z[1])];
                    if let Some(a) = r.alpha {
                        rec.extend([float(a[0]), float(a[1])]);
                    }
                    match r.value {
                        Some(v) => rec.extend([float(v[0]), float(v[1])]),
                        None => rec.extend([String::new(), String::new()]),
                    }
                    rec.push(r.error.unwrap_or("").to_string());
                    rec
                })
                .collect();
            emit(ctx.out.as_deref(), &csv_bytes(&header, &table)?)?;
        }
    }
    Ok(Outcome::Success)
}
