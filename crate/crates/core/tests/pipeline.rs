use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spectral_core::continuation::{monodromy_at_zero, shifted_sheets};
use spectral_core::degenerate_beta::beta_roots;
use spectral_core::elliptic::Lattice;
use spectral_core::spectral_curve::{
    assemble_offdiag, build_psi, sample_curve, spectral_points, verify_boundary, PunctureSet,
};
use spectral_core::linalg::inf_norm;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_instance(rng: &mut ChaCha8Rng, n: usize) -> (PunctureSet, Complex64) {
    let e1 = Complex64::from_polar(rng.gen_range(0.8..1.5), rng.gen_range(-0.5..0.5));
    let tau = c(rng.gen_range(-0.4..0.4), rng.gen_range(0.8..1.6));
    let lat = Lattice::new(e1, e1 * tau, 1e-12).unwrap();
    let pick = |rng: &mut ChaCha8Rng| lat.e1() * rng.gen_range(0.0..1.0) + lat.e2() * rng.gen_range(0.0..1.0);
    loop {
        let pts: Vec<Complex64> = (0..n).map(|_| pick(rng)).collect();
        let sep = 0.08 * lat.min_generator();
        if (0..n).all(|i| (0..i).all(|j| lat.dist_to_lattice(pts[i] - pts[j]) > sep)) {
            let alpha = pick(rng);
            if lat.dist_to_lattice(alpha) > 0.1 * lat.min_generator() {
                return (PunctureSet::new(lat, pts).unwrap(), alpha);
            }
        }
    }
}

#[test]
fn every_sheet_gives_a_solution() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for trial in 0..20 {
        let n = 1 + trial % 5;
        let (ps, alpha) = random_instance(&mut rng, n);
        let lat = *ps.lattice();
        let b_norm = inf_norm(&assemble_offdiag(&ps, alpha).unwrap());
        for sp in spectral_points(&ps, alpha).unwrap() {
            assert!(sp.residual <= 1e-8 * b_norm);
            let psi = build_psi(&ps, &sp).unwrap();
            let z = loop {
                let z = lat.e1() * rng.gen_range(0.0..1.0) + lat.e2() * rng.gen_range(0.0..1.0);
                if ps.nearest(z).1 > 0.05 && ps.nearest(z + lat.e1()).1 > 0.05 && ps.nearest(z + lat.e2()).1 > 0.05 {
                    break z;
                }
            };
            let r1 = psi.measured_multiplier(z, 1).unwrap();
            let r2 = psi.measured_multiplier(z, 2).unwrap();
            assert!((r1 - sp.nu1).norm() <= 1e-8 * sp.nu1.norm(), "trial {trial}");
            assert!((r2 - sp.nu2).norm() <= 1e-8 * sp.nu2.norm(), "trial {trial}");
            for l in 0..n {
                assert!(verify_boundary(&ps, &psi, l).unwrap().ratio <= 1e-7, "trial {trial}");
            }
        }
    }
}

#[test]
fn finite_limits_match_beta_roots() {
    let lat = Lattice::new(c(1.0, 0.0), c(0.0, 1.0), 1e-12).unwrap();
    let ps = PunctureSet::new(lat, vec![c(0.1, 0.0), c(0.37, 0.12), c(0.61, 0.55)]).unwrap();
    let zero = monodromy_at_zero(&ps, None).unwrap();
    assert_eq!(zero.pole_count(), 1);
    let finite = zero.finite_limits();
    let roots = beta_roots(&ps).unwrap();
    assert_eq!(finite.len(), roots.len());
    for r in &roots {
        assert!(finite.iter().any(|b| (b - r.beta).norm() <= 1e-4));
    }
    // Multipliers on finite sheets approach (e^{βe₁}, e^{βe₂}).
    let alpha = Complex64::from_polar(1e-6, 0.3);
    let near = shifted_sheets(&ps, alpha).unwrap();
    for beta in finite {
        let c_val = *near
            .iter()
            .min_by(|a, b| (*a - beta).norm().total_cmp(&(*b - beta).norm()))
            .unwrap();
        for (e, eta) in [(lat.e1(), lat.eta1()), (lat.e2(), lat.eta2())] {
            let nu = (c_val * e - alpha * eta).exp();
            let target = (beta * e).exp();
            assert!((nu - target).norm() <= 1e-4 * target.norm());
        }
    }
}

#[test]
fn large_grid_keeps_zero_trace() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (ps, _) = random_instance(&mut rng, 4);
    let lat = *ps.lattice();
    let grid: Vec<Complex64> = (0..32)
        .flat_map(|j| (0..32).map(move |i| (i, j)))
        .map(|(i, j)| lat.e1() * ((i as f64 + 0.5) / 32.0) + lat.e2() * ((j as f64 + 0.5) / 32.0))
        .collect();
    let out = sample_curve(&ps, &grid, false);
    assert_eq!(out.len(), 1024);
    for (sample, alpha) in out.iter().zip(&grid) {
        assert_eq!(sample.alpha, *alpha);
        let data = sample.data.as_ref().unwrap();
        let qmax = data.poly.q.iter().map(|q| q.norm()).fold(0.0, f64::max);
        assert!(data.poly.q[0].norm() <= 1e-10 * qmax.max(1.0));
    }
}
