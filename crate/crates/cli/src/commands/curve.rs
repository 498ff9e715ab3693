use num_complex::Complex64;
use serde::Serialize;

use spectral_core::continuation::track;
use spectral_core::spectral_curve::sample_curve;

use crate::config::{grid_alphas, Format, GridConfig};
use crate::output::{csv_bytes, emit, float, pair, pairs, sheets_svg, sibling, C2};
use crate::{CliError, Outcome};

use super::Context;

#[derive(Serialize)]
struct Record {
    alpha: C2,
    q: Vec<C2>,
    sheets: Vec<C2>,
    multipliers: Vec<[C2; 2]>,
    residuals: Vec<f64>,
    /// `max |μ² − (℘(α) − ℘(p₁ − p₂))| / max(1, |℘(α) − ℘(p₁ − p₂)|)`, two punctures only.
    #[serde(skip_serializing_if = "Option::is_none")]
    closed_form_defect: Option<f64>,
    error: Option<String>,
}

#[derive(Serialize)]
struct Report {
    punctures: Vec<C2>,
    grid_type: &'static str,
    failed: usize,
    records: Vec<Record>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tracking_error: Option<String>,
}

pub fn run(ctx: &Context) -> Result<Outcome, CliError> {
    let grid = ctx
        .cfg
        .grid
        .as_ref()
        .ok_or_else(|| CliError::Config("grid: missing section".into()))?;
    let ps = ctx.punctures()?;
    let lat = *ps.lattice();
    let alphas = grid_alphas(grid)?;
    let samples = sample_curve(&ps, &alphas, true);

    let p_d = if ps.len() == 2 {
        lat.weierstrass_p(ps.points()[0] - ps.points()[1]).ok()
    } else {
        None
    };

    let records: Vec<Record> = samples
        .iter()
        .map(|s| match &s.data {
            Ok(d) => {
                let closed_form_defect = p_d.and_then(|pd| {
                    let target = lat.weierstrass_p(s.alpha).ok()? - pd;
                    let worst = d
                        .sheets
                        .iter()
                        .map(|m| (m * m - target).norm())
                        .fold(0.0, f64::max);
                    Some(worst / target.norm().max(1.0))
                });
                Record {
                    alpha: pair(s.alpha),
                    q: pairs(&d.poly.q),
                    sheets: pairs(&d.sheets),
                    multipliers: d.points.iter().map(|p| [pair(p.nu1), pair(p.nu2)]).collect(),
                    residuals: d.points.iter().map(|p| p.residual).collect(),
                    closed_form_defect,
                    error: None,
                }
            }
            Err(e) => Record {
                alpha: pair(s.alpha),
                q: Vec::new(),
                sheets: Vec::new(),
                multipliers: Vec::new(),
                residuals: Vec::new(),
                closed_form_defect: None,
                error: Some(e.kind().to_string()),
            },
        })
        .collect();
    let failed = records.iter().filter(|r| r.error.is_some()).count();

    let grid_type = match grid {
        GridConfig::Rect { .. } => "rect",
        GridConfig::Path { .. } => "path",
        GridConfig::Loop { .. } => "loop",
    };
    let mut tracking_error = None;
    if let (GridConfig::Path { .. }, Some(out)) = (grid, ctx.out.as_deref()) {
        let tracks: Vec<Vec<Complex64>> = match track(&ps, &alphas) {
            Ok(path) => path.mu_tracks,
            Err(e) => {
                tracking_error = Some(e.to_string());
                let n = ps.len();
                (0..n)
                    .map(|i| {
                        samples
                            .iter()
                            .map(|s| s.data.as_ref().map(|d| d.sheets[i]).unwrap_or(Complex64::new(f64::NAN, f64::NAN)))
                            .collect()
                    })
                    .collect()
            }
        };
        emit(Some(&sibling(out, ".svg")), sheets_svg(&tracks).as_bytes())?;
    }

    match ctx.format() {
        Format::Json => ctx.write_json(&Report {
            punctures: pairs(ps.points()),
            grid_type,
            failed,
            records,
            tracking_error,
        })?,
        Format::Csv => {
            let header = [
                "alpha_re", "alpha_im", "sheet", "mu_re", "mu_im", "nu1_re", "nu1_im", "nu2_re",
                "nu2_im", "residual", "error",
            ];
            let mut rows = Vec::new();
            for r in &records {
                if let Some(e) = &r.error {
                    let mut rec = vec![float(r.alpha[0]), float(r.alpha[1])];
                    rec.extend(std::iter::repeat_n(String::new(), 8));
                    rec.push(e.clone());
                    rows.push(rec);
                    continue;
                }
                for (i, mu) in r.sheets.iter().enumerate() {
                    let [n1, n2] = r.multipliers[i];
                    rows.push(vec![
                        float(r.alpha[0]),
                        float(r.alpha[1]),
                        i.to_string(),
                        float(mu[0]),
                        float(mu[1]),
                        float(n1[0]),
                        float(n1[1]),
                        float(n2[0]),
                        float(n2[1]),
                        float(r.residuals[i]),
                        String::new(),
                    ]);
                }
            }
            emit(ctx.out.as_deref(), &csv_bytes(&header, &rows)?)?;
        }
    }
    if failed * 10 > alphas.len() {
        Ok(Outcome::PartialFailure)
    } else {
        Ok(Outcome::Success)
    }
}
