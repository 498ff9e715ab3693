use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use spectral_core::baker_akhiezer::{phi, phi_laurent_c0};
use spectral_core::continuation::monodromy_at_zero;
use spectral_core::degenerate_beta::{beta_roots, build_degenerate_psi};
use spectral_core::eigenfunction::Eigenfunction;
use spectral_core::elliptic::Lattice;
use spectral_core::error::SpectralError;
use spectral_core::linalg::inf_norm;
use spectral_core::spectral_curve::{
    alpha_mu_from_multipliers, assemble_offdiag, floquet_multipliers, spectral_points,
    verify_boundary, PunctureSet,
};

use crate::{CliError, Outcome};

use super::Context;

type Check = Result<f64, SpectralError>;

#[derive(Serialize)]
struct CheckReport {
    name: &'static str,
    pass: bool,
    worst: f64,
    tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Serialize)]
struct Report {
    punctures: usize,
    seed: u64,
    inject_mu_offset: f64,
    checks: Vec<CheckReport>,
    pass: bool,
}

fn report(name: &'static str, tolerance: f64, r: Check) -> CheckReport {
    match r {
        Ok(worst) => CheckReport {
            name,
            pass: worst <= tolerance,
            worst,
            tolerance,
            error: None,
        },
        Err(e) => CheckReport {
            name,
            pass: false,
            worst: f64::INFINITY,
            tolerance,
            error: Some(e.to_string()),
        },
    }
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

fn in_cell(lat: &Lattice, rng: &mut ChaCha8Rng) -> Complex64 {
    lat.e1() * rng.gen_range(0.0..1.0) + lat.e2() * rng.gen_range(0.0..1.0)
}

/// A point of the period cell at least `gap` from the lattice.
fn away_from_lattice(lat: &Lattice, rng: &mut ChaCha8Rng, gap: f64) -> Complex64 {
    loop {
        let z = in_cell(lat, rng);
        if lat.dist_to_lattice(z) >= gap * lat.min_generator() {
            return z;
        }
    }
}

/// A point whose translates by `e₁` and `e₂` stay clear of every puncture.
fn clear_point(ps: &PunctureSet, rng: &mut ChaCha8Rng) -> Complex64 {
    let lat = ps.lattice();
    let gap = 0.25 * ps.min_separation();
    loop {
        let z = in_cell(lat, rng);
        if [z, z + lat.e1(), z + lat.e2()].iter().all(|&w| ps.nearest(w).1 >= gap) {
            return z;
        }
    }
}

fn quasi_periodicity(lat: &Lattice, rng: &mut ChaCha8Rng) -> Check {
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let z = away_from_lattice(lat, rng, 0.05);
        for (e, eta) in [(lat.e1(), lat.eta1()), (lat.e2(), lat.eta2())] {
            let s = -lat.sigma(z) * (eta * (z + e / 2.0)).exp();
            worst = worst.max(rel(lat.sigma(z + e), s));
            worst = worst.max(rel(lat.zeta(z + e)?, lat.zeta(z)? + eta));
        }
    }
    Ok(worst)
}

fn phi_constant_term(lat: &Lattice, rng: &mut ChaCha8Rng) -> Check {
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let alpha = away_from_lattice(lat, rng, 0.05);
        worst = worst.max(phi_laurent_c0(lat, alpha)?.norm());
    }
    Ok(worst)
}

fn phi_periodicity(lat: &Lattice, rng: &mut ChaCha8Rng) -> Check {
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let alpha = away_from_lattice(lat, rng, 0.05);
        let z = away_from_lattice(lat, rng, 0.05);
        let base = phi(lat, z, alpha)?;
        for e in [lat.e1(), lat.e2()] {
            worst = worst.max(rel(phi(lat, z, alpha + e)?, base));
        }
    }
    Ok(worst)
}

struct Pipeline {
    residual: f64,
    multipliers: f64,
    c0_ratio: f64,
}

fn pipeline(ps: &PunctureSet, rng: &mut ChaCha8Rng, count: usize, offset: f64) -> Result<Pipeline, SpectralError> {
    let lat = ps.lattice();
    let mut out = Pipeline {
        residual: 0.0,
        multipliers: 0.0,
        c0_ratio: 0.0,
    };
    for _ in 0..count {
        let alpha = away_from_lattice(lat, rng, 0.1);
        let b_norm = inf_norm(&assemble_offdiag(ps, alpha)?).max(f64::MIN_POSITIVE);
        for sp in spectral_points(ps, alpha)? {
            out.residual = out.residual.max(sp.residual / b_norm);
            let psi = Eigenfunction::floquet(ps.clone(), alpha, sp.mu + offset, sp.a.clone())?;
            let z = clear_point(ps, rng);
            out.multipliers = out
                .multipliers
                .max(rel(psi.measured_multiplier(z, 1)?, sp.nu1))
                .max(rel(psi.measured_multiplier(z, 2)?, sp.nu2));
            for l in 0..ps.len() {
                out.c0_ratio = out.c0_ratio.max(verify_boundary(ps, &psi, l)?.ratio);
            }
        }
    }
    Ok(out)
}

fn roundtrip(lat: &Lattice, rng: &mut ChaCha8Rng) -> Check {
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let alpha = away_from_lattice(lat, rng, 0.05);
        let mu = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let (n1, n2) = floquet_multipliers(lat, alpha, mu)?;
        let (a, m) = alpha_mu_from_multipliers(lat, n1, n2)?;
        worst = worst.max(lat.dist_to_lattice(a - alpha)).max((m - mu).norm() / mu.norm().max(1.0));
    }
    Ok(worst)
}

/// 0 when `(e^{βe₁}, e^{βe₂})` is rejected, 1 otherwise.
fn degenerate_rejection(lat: &Lattice, rng: &mut ChaCha8Rng) -> Check {
    let mut failures = 0;
    for _ in 0..10 {
        let beta = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let r = alpha_mu_from_multipliers(lat, (beta * lat.e1()).exp(), (beta * lat.e2()).exp());
        if !matches!(r, Err(SpectralError::DegenerateMultipliers)) {
            failures += 1;
        }
    }
    Ok(failures as f64)
}

fn beta_checks(ps: &PunctureSet, rng: &mut ChaCha8Rng) -> [(&'static str, f64, Check); 4] {
    let roots = match beta_roots(ps) {
        Ok(r) => r,
        Err(e) => {
            return [
                ("beta_root_count", 0.0, Err(e.clone())),
                ("beta_residual", 1e-8, Err(e.clone())),
                ("degenerate_multipliers", 1e-9, Err(e.clone())),
                ("degenerate_c0", 1e-7, Err(e)),
            ]
        }
    };
    let count = (roots.len() as f64 - (ps.len() as f64 - 1.0)).abs();
    let residual = roots
        .iter()
        .map(|r| r.residual.max(r.constraint_residual))
        .fold(0.0, f64::max);
    let mut mult: Check = Ok(0.0);
    let mut c0: Check = Ok(0.0);
    for r in &roots {
        let psi = match build_degenerate_psi(ps, r) {
            Ok(p) => p,
            Err(e) => {
                mult = Err(e.clone());
                c0 = Err(e);
                break;
            }
        };
        let z = clear_point(ps, rng);
        let lat = ps.lattice();
        mult = mult.and_then(|w| {
            Ok(w.max(rel(psi.measured_multiplier(z, 1)?, (r.beta * lat.e1()).exp()))
                .max(rel(psi.measured_multiplier(z, 2)?, (r.beta * lat.e2()).exp())))
        });
        c0 = c0.and_then(|mut w| {
            for l in 0..ps.len() {
                w = w.max(verify_boundary(ps, &psi, l)?.ratio);
            }
            Ok(w)
        });
    }
    [
        ("beta_root_count", 0.0, Ok(count)),
        ("beta_residual", 1e-8, Ok(residual)),
        ("degenerate_multipliers", 1e-9, mult),
        ("degenerate_c0", 1e-7, c0),
    ]
}

/// Deviation of the `α → 0` structure from one pole sheet plus the `β` roots.
fn zero_structure(ps: &PunctureSet) -> Check {
    let zero = monodromy_at_zero(ps, None)?;
    if zero.pole_count() != 1 {
        return Ok(f64::INFINITY);
    }
    let finite = zero.finite_limits();
    let roots = beta_roots(ps)?;
    if finite.len() != roots.len() {
        return Ok(f64::INFINITY);
    }
    Ok(roots
        .iter()
        .map(|r| {
            finite
                .iter()
                .map(|b| (b - r.beta).norm())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max))
}

pub fn run(ctx: &Context) -> Result<Outcome, CliError> {
    let ps = ctx.punctures()?;
    let lat = *ps.lattice();
    let spec = &ctx.cfg.verify;
    let mut checks = vec![
        report("legendre", 1e-10 * 2.0 * std::f64::consts::PI, Ok(lat.legendre_defect())),
        report("quasi_periodicity", 1e-9, quasi_periodicity(&lat, &mut ctx.cfg.rng(1))),
        report("phi_constant_term", 1e-8, phi_constant_term(&lat, &mut ctx.cfg.rng(2))),
        report("phi_alpha_periodicity", 1e-9, phi_periodicity(&lat, &mut ctx.cfg.rng(3))),
    ];
    match pipeline(&ps, &mut ctx.cfg.rng(4), spec.alphas, spec.inject_mu_offset) {
        Ok(p) => checks.extend([
            report("kernel_residual", 1e-8, Ok(p.residual)),
            report("floquet_multipliers", 1e-8, Ok(p.multipliers)),
            report("boundary_c0", 1e-7, Ok(p.c0_ratio)),
        ]),
        Err(e) => checks.push(report("pipeline", 0.0, Err(e))),
    }
    checks.push(report("multiplier_roundtrip", 1e-8, roundtrip(&lat, &mut ctx.cfg.rng(5))));
    checks.push(report("degenerate_rejection", 0.0, degenerate_rejection(&lat, &mut ctx.cfg.rng(6))));
    for (name, tol, r) in beta_checks(&ps, &mut ctx.cfg.rng(7)) {
        checks.push(report(name, tol, r));
    }
    checks.push(report("zero_structure", 1e-4, zero_structure(&ps)));

    let pass = checks.iter().all(|c| c.pass);
    ctx.write_json(&Report {
        punctures: ps.len(),
        seed: ctx.cfg.seed,
        inject_mu_offset: spec.inject_mu_offset,
        checks,
        pass,
    })?;
    Ok(if pass { Outcome::Success } else { Outcome::InvariantFailure })
}
