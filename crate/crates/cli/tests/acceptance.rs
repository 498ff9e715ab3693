//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spectral_core::baker_akhiezer::{phi, phi_laurent_c0};
use spectral_core::continuation::{
    closed_path_monodromy, locate_branch_points, loop_monodromy, monodromy_at_zero, BranchPoint,
    BranchSearch, LoopSpec,
};
use spectral_core::degenerate_beta::{beta_polynomial, beta_roots, build_degenerate_psi};
use spectral_core::eigenfunction::Eigenfunction;
use spectral_core::elliptic::Lattice;
use spectral_core::error::SpectralError;
use spectral_core::spectral_curve::{
    alpha_mu_from_multipliers, build_psi, floquet_multipliers, sample_curve, sheets,
    spectral_points, verify_boundary, PunctureSet,
};
use spectral_core::weierstrass_surface::{check_planar_end, integrands, SpinorPair};

type Outcome = Result<String, String>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

fn ensure(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn random_lattice(rng: &mut ChaCha8Rng) -> Lattice {
    let e1 = Complex64::from_polar(rng.gen_range(0.7..1.6), rng.gen_range(-PI..PI));
    let tau = c(rng.gen_range(-0.5..0.5), rng.gen_range(0.75..1.8));
    Lattice::new(e1, e1 * tau, 1e-12).unwrap()
}

fn in_cell(lat: &Lattice, rng: &mut ChaCha8Rng) -> Complex64 {
    lat.e1() * rng.gen_range(0.0..1.0) + lat.e2() * rng.gen_range(0.0..1.0)
}

fn away(lat: &Lattice, rng: &mut ChaCha8Rng, gap: f64) -> Complex64 {
    loop {
        let z = in_cell(lat, rng);
        if lat.dist_to_lattice(z) >= gap * lat.min_generator() {
            return z;
        }
    }
}

fn random_punctures(lat: Lattice, rng: &mut ChaCha8Rng, n: usize, sep: f64) -> PunctureSet {
    loop {
        let pts: Vec<Complex64> = (0..n).map(|_| in_cell(&lat, rng)).collect();
        let ok = (0..n).all(|i| (0..i).all(|j| lat.dist_to_lattice(pts[i] - pts[j]) > sep * lat.min_generator()));
        if ok {
            return PunctureSet::new(lat, pts).unwrap();
        }
    }
}

/// A point whose translates by both generators stay clear of the punctures.
fn clear_point(ps: &PunctureSet, rng: &mut ChaCha8Rng) -> Complex64 {
    let lat = ps.lattice();
    loop {
        let z = in_cell(lat, rng);
        if [z, z + lat.e1(), z + lat.e2()]
            .iter()
            .all(|&w| ps.nearest(w).1 >= 0.25 * ps.min_separation())
        {
            return z;
        }
    }
}

fn legendre() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let lat = random_lattice(&mut rng);
        // Quasi-periods recomputed from ζ at the half periods.
        let eta1 = 2.0 * lat.zeta(lat.e1() / 2.0).map_err(|e| e.to_string())?;
        let eta2 = 2.0 * lat.zeta(lat.e2() / 2.0).map_err(|e| e.to_string())?;
        let defect = (eta1 * lat.e2() - eta2 * lat.e1() - c(0.0, 2.0 * PI)).norm();
        worst = worst.max(defect);
    }
    ensure(worst <= 1e-10 * 2.0 * PI, format!("max defect {worst:.3e}"))
}

fn quasi_periodicity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let lat = random_lattice(&mut rng);
        for _ in 0..50 {
            let z = away(&lat, &mut rng, 0.05);
            for (e, eta) in [(lat.e1(), lat.eta1()), (lat.e2(), lat.eta2())] {
                let s = -lat.sigma(z) * (eta * (z + e / 2.0)).exp();
                worst = worst.max(rel(lat.sigma(z + e), s));
                let zz = lat.zeta(z).map_err(|e| e.to_string())? + eta;
                worst = worst.max(rel(lat.zeta(z + e).map_err(|e| e.to_string())?, zz));
            }
        }
    }
    ensure(worst <= 1e-9, format!("max relative error {worst:.3e}"))
}

fn phi_laws() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let lat = random_lattice(&mut rng);
    let (mut c0, mut per): (f64, f64) = (0.0, 0.0);
    for _ in 0..20 {
        let alpha = away(&lat, &mut rng, 0.05);
        c0 = c0.max(phi_laurent_c0(&lat, alpha).map_err(|e| e.to_string())?.norm());
        let z = away(&lat, &mut rng, 0.05);
        let base = phi(&lat, z, alpha).map_err(|e| e.to_string())?;
        for w in [lat.e1(), lat.e2(), lat.e1() - 2.0 * lat.e2()] {
            per = per.max(rel(phi(&lat, z, alpha + w).map_err(|e| e.to_string())?, base));
        }
    }
    ensure(c0 <= 1e-8 && per <= 1e-9, format!("|c0| {c0:.3e}, periodicity {per:.3e}"))
}

fn eigenfunction_pipeline() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut res, mut mult, mut ratio): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut off_min = f64::INFINITY;
    for trial in 0..20 {
        let n = 1 + trial % 5;
        let lat = random_lattice(&mut rng);
        let ps = random_punctures(lat, &mut rng, n, 0.08);
        let alpha = away(&lat, &mut rng, 0.1);
        for sp in spectral_points(&ps, alpha).map_err(|e| e.to_string())? {
            res = res.max(sp.residual);
            let psi = build_psi(&ps, &sp).map_err(|e| e.to_string())?;
            let z = clear_point(&ps, &mut rng);
            let m1 = psi.measured_multiplier(z, 1).map_err(|e| e.to_string())?;
            let m2 = psi.measured_multiplier(z, 2).map_err(|e| e.to_string())?;
            mult = mult.max(rel(m1, sp.nu1)).max(rel(m2, sp.nu2));
            let off = Eigenfunction::floquet(ps.clone(), alpha, sp.mu + 0.1, sp.a.clone())
                .map_err(|e| e.to_string())?;
            let mut off_worst: f64 = 0.0;
            for l in 0..n {
                ratio = ratio.max(verify_boundary(&ps, &psi, l).map_err(|e| e.to_string())?.ratio);
                off_worst = off_worst.max(verify_boundary(&ps, &off, l).map_err(|e| e.to_string())?.ratio);
            }
            off_min = off_min.min(off_worst);
        }
    }
    ensure(
        res <= 1e-8 && mult <= 1e-8 && ratio <= 1e-7 && off_min >= 1e-3,
        format!("residual {res:.3e}, multipliers {mult:.3e}, c0 ratio {ratio:.3e}, off-curve min {off_min:.3e}"),
    )
}

fn one_puncture() -> Outcome {
    let lat = Lattice::new(c(1.0, 0.0), c(0.3, 0.9), 1e-12).unwrap();
    let ps = PunctureSet::new(lat, vec![c(0.4, 0.2)]).unwrap();
    let grid: Vec<Complex64> = (0..32)
        .flat_map(|j| (0..32).map(move |i| (i, j)))
        .map(|(i, j)| lat.e1() * ((i as f64 + 0.5) / 32.0) + lat.e2() * ((j as f64 + 0.5) / 32.0))
        .collect();
    let mut worst: f64 = 0.0;
    for s in sample_curve(&ps, &grid, false) {
        let d = s.data.map_err(|e| e.to_string())?;
        if d.sheets.len() != 1 {
            return Err(format!("{} sheets at {}", d.sheets.len(), s.alpha));
        }
        worst = worst.max(d.sheets[0].norm());
    }
    let zero = monodromy_at_zero(&ps, None).map_err(|e| e.to_string())?;
    ensure(
        worst <= 1e-12 && zero.pole_count() == 1,
        format!("max |mu| {worst:.3e}, POLE sheets {}", zero.pole_count()),
    )
}

fn two_punctures_closed_form() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let lat = random_lattice(&mut rng);
    // The product identity behind the closed form, checked on its own first.
    let mut identity: f64 = 0.0;
    for _ in 0..50 {
        let x = away(&lat, &mut rng, 0.05);
        let a = away(&lat, &mut rng, 0.05);
        let lhs = phi(&lat, x, a).map_err(|e| e.to_string())? * phi(&lat, -x, a).map_err(|e| e.to_string())?;
        let rhs = lat.weierstrass_p(a).map_err(|e| e.to_string())? - lat.weierstrass_p(x).map_err(|e| e.to_string())?;
        identity = identity.max((lhs - rhs).norm() / rhs.norm().max(1.0));
    }
    let ps = random_punctures(lat, &mut rng, 2, 0.1);
    let pd = lat.weierstrass_p(ps.points()[0] - ps.points()[1]).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let a = away(&lat, &mut rng, 0.05);
        let target = lat.weierstrass_p(a).map_err(|e| e.to_string())? - pd;
        for mu in sheets(&ps, a).map_err(|e| e.to_string())? {
            worst = worst.max((mu * mu - target).norm() / target.norm().max(1.0));
        }
    }
    ensure(
        identity <= 1e-9 && worst <= 1e-8,
        format!("product identity {identity:.3e}, sheets^2 defect {worst:.3e}"),
    )
}

fn degenerate_limits() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut gap: f64 = 0.0;
    let mut notes = Vec::new();
    for n in 2..=4 {
        let lat = random_lattice(&mut rng);
        let ps = random_punctures(lat, &mut rng, n, 0.15);
        let poly = beta_polynomial(&ps).map_err(|e| e.to_string())?;
        if poly.degree() != n - 1 {
            return Err(format!("N={n}: degree {}", poly.degree()));
        }
        let roots = beta_roots(&ps).map_err(|e| e.to_string())?;
        let zero = monodromy_at_zero(&ps, None).map_err(|e| e.to_string())?;
        if zero.pole_count() != 1 {
            return Err(format!("N={n}: {} POLE sheets", zero.pole_count()));
        }
        let finite = zero.finite_limits();
        if finite.len() != roots.len() {
            return Err(format!("N={n}: {} finite limits for {} roots", finite.len(), roots.len()));
        }
        // Greedy matching of multisets.
        let mut left = finite.clone();
        for r in &roots {
            let (k, d) = left
                .iter()
                .enumerate()
                .map(|(k, b)| (k, (b - r.beta).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            gap = gap.max(d);
            left.remove(k);
        }
        notes.push(format!("N={n} ok"));
    }
    ensure(gap <= 1e-4, format!("{}, max |limit - root| {gap:.3e}", notes.join(", ")))
}

fn degenerate_eigenfunctions() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut mult, mut ratio): (f64, f64) = (0.0, 0.0);
    for n in 2..=5 {
        let lat = random_lattice(&mut rng);
        let ps = random_punctures(lat, &mut rng, n, 0.1);
        for br in beta_roots(&ps).map_err(|e| e.to_string())? {
            let psi = build_degenerate_psi(&ps, &br).map_err(|e| e.to_string())?;
            let z = clear_point(&ps, &mut rng);
            for (j, e) in [(1, lat.e1()), (2, lat.e2())] {
                let m = psi.measured_multiplier(z, j).map_err(|e| e.to_string())?;
                mult = mult.max(rel(m, (br.beta * e).exp()));
            }
            for l in 0..n {
                ratio = ratio.max(verify_boundary(&ps, &psi, l).map_err(|e| e.to_string())?.ratio);
            }
        }
    }
    // Two punctures: β = 0 and ψ = a₁(ζ(z − p₁) − ζ(z − p₂)) plus the constant
    // a₀ = a₁ζ(p₁ − p₂) that the c₀ condition forces.
    let lat = random_lattice(&mut rng);
    let ps = random_punctures(lat, &mut rng, 2, 0.1);
    let roots = beta_roots(&ps).map_err(|e| e.to_string())?;
    let br = &roots[0];
    let psi = build_degenerate_psi(&ps, br).map_err(|e| e.to_string())?;
    let [p1, p2] = [ps.points()[0], ps.points()[1]];
    let a1 = br.a[0];
    let forced = a1 * lat.zeta(p1 - p2).map_err(|e| e.to_string())?;
    let (mut shape, mut per): (f64, f64) = ((br.a[1] + a1).norm(), (br.a0 - forced).norm() / forced.norm().max(1.0));
    let scale = br.a0.norm().max(a1.norm());
    for _ in 0..20 {
        let z = clear_point(&ps, &mut rng);
        let v = psi.eval(z).map_err(|e| e.to_string())?;
        let zd = lat.zeta(z - p1).map_err(|e| e.to_string())? - lat.zeta(z - p2).map_err(|e| e.to_string())?;
        shape = shape.max((v - a1 * zd - br.a0).norm() / scale);
        for e in [lat.e1(), lat.e2()] {
            per = per.max(rel(psi.eval(z + e).map_err(|e| e.to_string())?, v));
        }
    }
    ensure(
        mult <= 1e-9 && ratio <= 1e-7 && br.beta.norm() <= 1e-9 && shape <= 1e-9 && per <= 1e-9,
        format!(
            "multipliers {mult:.3e}, c0 ratio {ratio:.3e}, N=2 |beta| {:.3e}, zeta-difference shape {shape:.3e}, periodicity {per:.3e}",
            br.beta.norm()
        ),
    )
}

fn multiplier_inverse() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    let mut rejected = 0;
    for k in 0..50 {
        let lat = random_lattice(&mut rng);
        let alpha = away(&lat, &mut rng, 0.05) + lat.point(rng.gen_range(-2..=2), rng.gen_range(-2..=2));
        let mu = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let (n1, n2) = floquet_multipliers(&lat, alpha, mu).map_err(|e| e.to_string())?;
        let (a, m) = alpha_mu_from_multipliers(&lat, n1, n2).map_err(|e| e.to_string())?;
        worst = worst.max(lat.dist_to_lattice(a - alpha)).max((m - mu).norm() / mu.norm().max(1.0));
        if k < 10 {
            let beta = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let r = alpha_mu_from_multipliers(&lat, (beta * lat.e1()).exp(), (beta * lat.e2()).exp());
            if matches!(r, Err(SpectralError::DegenerateMultipliers)) {
                rejected += 1;
            }
        }
    }
    ensure(
        worst <= 1e-8 && rejected == 10,
        format!("roundtrip {worst:.3e}, degenerate rejected {rejected}/10"),
    )
}

fn whole_cell_branch_points(ps: &PunctureSet) -> Result<Vec<BranchPoint>, String> {
    let lat = ps.lattice();
    let center = (lat.e1() + lat.e2()) / 2.0;
    let half = 0.6 * (lat.e1().norm() + lat.e2().norm());
    locate_branch_points(ps, &BranchSearch { center, half_width: half, n: 64 }).map_err(|e| e.to_string())
}

fn monodromy_sanity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);

    // Two punctures: the loop around a located branch point swaps the sheets.
    let lat = Lattice::new(c(1.0, 0.0), c(0.2, 1.1), 1e-12).unwrap();
    let two = PunctureSet::new(lat, vec![c(0.1, 0.15), c(0.42, 0.5)]).unwrap();
    let d = two.points()[0] - two.points()[1];
    let found = locate_branch_points(&two, &BranchSearch { center: d, half_width: 0.1, n: 9 })
        .map_err(|e| e.to_string())?;
    let bp = found.first().ok_or("no branch point located")?;
    let swap = loop_monodromy(&two, &LoopSpec::circle(bp.alpha, 0.05)).map_err(|e| e.to_string())?;
    if swap.permutation != vec![1, 0] {
        return Err(format!("branch loop gave {:?}", swap.permutation));
    }

    // Three punctures: loops clear of every branch point and lattice point.
    let sq = Lattice::new(c(1.0, 0.0), c(0.0, 1.0), 1e-12).unwrap();
    let ps = PunctureSet::new(sq, vec![c(0.1, 0.0), c(0.37, 0.12), c(0.61, 0.55)]).unwrap();
    let bps: Vec<Complex64> = whole_cell_branch_points(&ps)?.into_iter().map(|b| b.alpha).collect();
    let dist_to_special = |z: Complex64| {
        bps.iter()
            .map(|b| sq.dist_to_lattice(z - b))
            .fold(sq.dist_to_lattice(z), f64::min)
    };
    let mut identities = 0;
    while identities < 5 {
        let center = in_cell(&sq, &mut rng);
        let r = 0.02;
        if dist_to_special(center) < 3.0 * r {
            continue;
        }
        let m = loop_monodromy(&ps, &LoopSpec::circle(center, r)).map_err(|e| e.to_string())?;
        if !m.is_identity() {
            return Err(format!("non-enclosing loop at {center} gave {:?}", m.permutation));
        }
        identities += 1;
    }
    // Composition on random loop pairs sharing a basepoint; each circle is
    // centred near the segment from the basepoint to a branch point so that
    // it encloses that branch point.
    let mut pairs = 0;
    let mut nontrivial = 0;
    let clear = |spec: &LoopSpec| spec.path().iter().all(|&a| dist_to_special(a) > 0.03);
    let around = |base: Complex64, target: Complex64, rng: &mut ChaCha8Rng| {
        let t = rng.gen_range(0.8..1.2);
        let jitter = c(rng.gen_range(-0.03..0.03), rng.gen_range(-0.03..0.03));
        LoopSpec {
            samples: 128,
            ..LoopSpec::through(base + (target - base) * t + jitter, base)
        }
    };
    while pairs < 5 {
        let base = in_cell(&sq, &mut rng);
        if dist_to_special(base) < 0.1 {
            continue;
        }
        let k1 = rng.gen_range(0..bps.len());
        let k2 = rng.gen_range(0..bps.len());
        let l1 = around(base, bps[k1] - sq.nearest_lattice_point(bps[k1] - base), &mut rng);
        let l2 = around(base, bps[k2] - sq.nearest_lattice_point(bps[k2] - base), &mut rng);
        if l1.radius > 0.6 || l2.radius > 0.6 || !clear(&l1) || !clear(&l2) {
            continue;
        }
        let m1 = loop_monodromy(&ps, &l1).map_err(|e| e.to_string())?;
        let m2 = loop_monodromy(&ps, &l2).map_err(|e| e.to_string())?;
        let mut joined = l1.path();
        joined.extend(l2.path().into_iter().skip(1));
        let m12 = closed_path_monodromy(&ps, &joined).map_err(|e| e.to_string())?;
        for i in 0..ps.len() {
            if m12.permutation[i] != m2.permutation[m1.permutation[i]] {
                return Err(format!(
                    "composition failed: {:?} then {:?} gave {:?}",
                    m1.permutation, m2.permutation, m12.permutation
                ));
            }
        }
        if !m1.is_identity() || !m2.is_identity() {
            nontrivial += 1;
        }
        pairs += 1;
    }
    Ok(format!(
        "transposition at {:.6}, 5 identity loops, 5 composed pairs ({nontrivial} nontrivial), {} branch points",
        bp.alpha,
        bps.len()
    ))
}

fn weierstrass_bridge() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut conformal: f64 = 0.0;
    let mut on_worst: f64 = 0.0;
    let mut off_min = f64::INFINITY;
    let mut all_pass = true;
    let mut any_off_pass = false;
    for n in 2..=4 {
        let lat = random_lattice(&mut rng);
        let ps = random_punctures(lat, &mut rng, n, 0.1);
        let p1 = spectral_points(&ps, away(&lat, &mut rng, 0.1)).map_err(|e| e.to_string())?;
        let p2 = spectral_points(&ps, away(&lat, &mut rng, 0.1)).map_err(|e| e.to_string())?;
        let (s1, s2) = (&p1[0], &p2[n - 1]);
        let on = SpinorPair::new(
            build_psi(&ps, s1).map_err(|e| e.to_string())?,
            build_psi(&ps, s2).map_err(|e| e.to_string())?,
        )
        .map_err(|e| e.to_string())?;
        let off = SpinorPair::new(
            Eigenfunction::floquet(ps.clone(), s1.alpha, s1.mu + 0.1, s1.a.clone()).map_err(|e| e.to_string())?,
            Eigenfunction::floquet(ps.clone(), s2.alpha, s2.mu + 0.1, s2.a.clone()).map_err(|e| e.to_string())?,
        )
        .map_err(|e| e.to_string())?;
        for _ in 0..20 {
            let z = clear_point(&ps, &mut rng);
            let x = integrands(&on, z).map_err(|e| e.to_string())?;
            let q: Complex64 = x.iter().map(|v| v * v).sum();
            let size: f64 = x.iter().map(|v| v.norm_sqr()).sum();
            conformal = conformal.max(q.norm() / size);
        }
        for l in 0..n {
            let r = check_planar_end(&on, l).map_err(|e| e.to_string())?;
            all_pass &= r.pass;
            on_worst = on_worst.max(r.residue_ratio);
            let r = check_planar_end(&off, l).map_err(|e| e.to_string())?;
            any_off_pass |= r.pass;
            off_min = off_min.min(r.residue_ratio);
        }
    }
    ensure(
        conformal <= 1e-8 && all_pass && !any_off_pass && off_min >= 1e-3,
        format!(
            "conformality {conformal:.3e}, on-curve residue ratio {on_worst:.3e}, perturbed min ratio {off_min:.3e}"
        ),
    )
}

fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_spectral-curve"))
        .args(args)
        .output()
        .expect("spawn spectral-curve");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn cli_contract() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let write = |name: &str, body: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        p.to_string_lossy().into_owned()
    };
    let curve = write(
        "curve.json",
        r#"{
  "lattice": { "e1": [1.0, 0.0], "e2": [0.2, 1.1] },
  "punctures": [[0.1, 0.2], [0.55, 0.65], [0.8, 0.1]],
  "grid": { "type": "path", "points": [[0.2, 0.1], [0.8, 0.3], [0.6, 0.9]], "samples_per_segment": 24 }
}"#,
    );
    let verify = write(
        "verify.json",
        r#"{
  "lattice": { "e1": [1.0, 0.0], "e2": [0.0, 1.0] },
  "random_punctures": { "count": 3, "min_separation": 0.1 },
  "seed": 11
}"#,
    );
    let injected = write(
        "inject.json",
        r#"{
  "lattice": { "e1": [1.0, 0.0], "e2": [0.0, 1.0] },
  "random_punctures": { "count": 3, "min_separation": 0.1 },
  "seed": 11,
  "verify": { "inject_mu_offset": 0.1 }
}"#,
    );
    let read = |p: &Path| std::fs::read(p).unwrap();
    let mut runs = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("curve{k}.json"));
        let (code, _) = run_cli(&["curve", "--config", &curve, "--out", out.to_str().unwrap()]);
        if code != 0 {
            return Err(format!("curve exit {code}"));
        }
        let (vcode, vout) = run_cli(&["verify", "--config", &verify, "--threads", "2"]);
        if vcode != 0 {
            return Err(format!("verify exit {vcode}"));
        }
        runs.push((read(&out), read(&dir.path().join(format!("curve{k}.svg"))), vout));
    }
    if runs[0] != runs[1] {
        return Err("reruns differ".into());
    }
    let (icode, _) = run_cli(&["verify", "--config", &injected]);
    let (bad, _) = run_cli(&["verify", "--config", &write("bad.json", "{ \"lattice\": 3 }")]);
    ensure(
        icode == 1 && bad == 2,
        format!("reruns byte-identical, injected exit {icode}, bad config exit {bad}"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("Legendre relation", legendre),
        ("sigma/zeta quasi-periodicity", quasi_periodicity),
        ("Phi constant term and alpha-periodicity", phi_laws),
        ("eigenfunction pipeline", eigenfunction_pipeline),
        ("one puncture", one_puncture),
        ("two-puncture closed form", two_punctures_closed_form),
        ("degenerate limits", degenerate_limits),
        ("degenerate eigenfunctions", degenerate_eigenfunctions),
        ("multiplier inverse", multiplier_inverse),
        ("monodromy sanity", monodromy_sanity),
        ("Weierstrass bridge", weierstrass_bridge),
        ("CLI determinism and exit codes", cli_contract),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let r = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let ms = t.elapsed().as_millis();
        match r {
            Ok(msg) => println!("PASS {:>2} {name}: {msg} ({ms} ms)", k + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {msg} ({ms} ms)", k + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1} s",
        criteria.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
