//! The kernel `Φ(z, α) = σ(α − z) / (σ(α) σ(z)) · exp(ζ(α) z)` and its
//! exponential dressing `Ψ_{μ,α}(z − z₀) = exp(μz) Φ(z − z₀, α)`.
//!
//! `Φ` is Λ-periodic in `α`, has a simple pole of residue 1 at `z ∈ Λ` with
//! vanishing constant Laurent term, and picks up `exp(ζ(α)eⱼ − ηⱼα)` under
//! `z ↦ z + eⱼ`.

use num_complex::Complex64;

use crate::contour::{laurent_coefficients, CONTOUR_NODES};
use crate::elliptic::Lattice;
use crate::error::{Result, SpectralError};

/// `Φ(·, α)` with `σ(α)` and `ζ(α)` cached.
#[derive(Debug, Clone, Copy)]
pub struct PhiEvaluator {
    lattice: Lattice,
    alpha: Complex64,
    sigma_alpha: Complex64,
    zeta_alpha: Complex64,
}

impl PhiEvaluator {
    pub fn new(lattice: Lattice, alpha: Complex64) -> Result<Self> {
        if lattice.is_lattice_point(alpha) {
            return Err(SpectralError::AlphaOnLattice { alpha });
        }
        let zeta_alpha = lattice.zeta(alpha)?;
        Ok(PhiEvaluator {
            lattice,
            alpha,
            sigma_alpha: lattice.sigma(alpha),
            zeta_alpha,
        })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn zeta_alpha(&self) -> Complex64 {
        self.zeta_alpha
    }

    /// `σ(α − z) / (σ(α) σ(z))`, i.e. `Φ` without its exponential factor.
    pub fn eval_unscaled(&self, z: Complex64) -> Result<Complex64> {
        if self.lattice.is_lattice_point(z) {
            return Err(SpectralError::PoleAtLatticePoint { z });
        }
        let lat = &self.lattice;
        Ok(lat.sigma(self.alpha - z) / (self.sigma_alpha * lat.sigma(z)))
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.eval_unscaled(z)? * (self.zeta_alpha * z).exp())
    }

    /// `ln Φ(z, α)` on some branch; finite whenever `Φ(z, α) ≠ 0`.
    pub fn ln_eval(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.eval_unscaled(z)?.ln() + self.zeta_alpha * z)
    }

    /// Factor gained by `Φ(·, α)` under `z ↦ z + m·e₁ + n·e₂`.
    pub fn z_shift_factor(&self, m: i64, n: i64) -> Complex64 {
        let lat = &self.lattice;
        (self.zeta_alpha * lat.point(m, n) - lat.eta_of(m, n) * self.alpha).exp()
    }
}

/// `Φ(z, α)`.
pub fn phi(lattice: &Lattice, z: Complex64, alpha: Complex64) -> Result<Complex64> {
    PhiEvaluator::new(*lattice, alpha)?.eval(z)
}

/// Constant Laurent coefficient of `Φ(·, α)` at `z = 0`, measured on a circle
/// of radius `min(|e₁|, |e₂|)/400` with the trapezoidal rule.
pub fn phi_laurent_c0(lattice: &Lattice, alpha: Complex64) -> Result<Complex64> {
    let ev = PhiEvaluator::new(*lattice, alpha)?;
    let radius = 1e-2 * lattice.min_generator() / 4.0;
    let lc = laurent_coefficients(|z| ev.eval(z), Complex64::new(0.0, 0.0), radius, CONTOUR_NODES, 0, 0)?;
    Ok(lc.get(0))
}

/// `Ψ_{μ,α}(z − z₀) = exp(μz) Φ(z − z₀, α)`.
#[derive(Debug, Clone, Copy)]
pub struct PsiKernel {
    pub phi: PhiEvaluator,
    pub mu: Complex64,
    pub z0: Complex64,
}

impl PsiKernel {
    pub fn new(lattice: Lattice, alpha: Complex64, mu: Complex64, z0: Complex64) -> Result<Self> {
        Ok(PsiKernel {
            phi: PhiEvaluator::new(lattice, alpha)?,
            mu,
            z0,
        })
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        Ok((self.mu * z).exp() * self.phi.eval(z - self.z0)?)
    }

    pub fn ln_eval(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.mu * z + self.phi.ln_eval(z - self.z0)?)
    }

    /// `(μ + ζ(α))eⱼ − ηⱼα`, the logarithm of the `j`-th Floquet multiplier.
    pub fn log_multiplier(&self, j: usize) -> Complex64 {
        let lat = self.phi.lattice();
        let (e, eta) = match j {
            1 => (lat.e1(), lat.eta1()),
            2 => (lat.e2(), lat.eta2()),
            _ => panic!("period index must be 1 or 2"),
        };
        (self.mu + self.phi.zeta_alpha()) * e - eta * self.phi.alpha()
    }

    /// Measured `ln(Ψ(z + eⱼ)/Ψ(z))`, computed from logarithms so that large
    /// `|Re(μz)|` does not overflow. Defined modulo `2πi`.
    pub fn measured_log_multiplier(&self, z: Complex64, j: usize) -> Result<Complex64> {
        let lat = self.phi.lattice();
        let e = if j == 1 { lat.e1() } else { lat.e2() };
        Ok(self.ln_eval(z + e)? - self.ln_eval(z)?)
    }
}

/// `Ψ_{μ,α}(z − z₀)`.
pub fn psi_kernel_eval(kernel: &PsiKernel, z: Complex64) -> Result<Complex64> {
    kernel.eval(z)
}

/// Distance between two logarithms modulo `2πi`.
pub fn log_distance(a: Complex64, b: Complex64) -> f64 {
    let d = a - b;
    let two_pi = 2.0 * std::f64::consts::PI;
    let im = d.im - two_pi * (d.im / two_pi).round();
    Complex64::new(d.re, im).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contour::circle_integral;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn lattices() -> Vec<Lattice> {
        vec![
            Lattice::new(c(1.0, 0.0), c(0.0, 1.0), 1e-12).unwrap(),
            Lattice::new(c(2.0, 0.0), c(1.0, 2.0), 1e-12).unwrap(),
            Lattice::new(c(1.0, 0.3), c(-0.4, 1.7), 1e-12).unwrap(),
        ]
    }

    #[test]
    fn residue_one_at_origin() {
        for lat in lattices() {
            let alpha = c(0.3, 0.2);
            for k in 0..8 {
                let z = Complex64::from_polar(1e-4, k as f64 * PI / 4.0);
                let v = z * phi(&lat, z, alpha).unwrap();
                assert!((v - 1.0).norm() <= 1e-6);
            }
        }
    }

    #[test]
    fn periodic_in_alpha() {
        for lat in lattices() {
            let (z, alpha) = (c(0.17, 0.41), c(0.33, -0.12));
            let base = phi(&lat, z, alpha).unwrap();
            for (m, n) in [(1, 0), (0, 1), (-2, 1), (3, -2)] {
                let shifted = phi(&lat, z, alpha + lat.point(m, n)).unwrap();
                assert!((shifted - base).norm() <= 1e-9 * base.norm());
            }
        }
    }

    #[test]
    fn z_quasi_periodicity_matches_sigma_factors() {
        // Oracle: the factor built from the two σ quasi-periodicity laws,
        // σ(u − e₁) = −σ(u)exp(−η₁(u − e₁/2)) and σ(z + e₁) = −σ(z)exp(η₁(z + e₁/2)),
        // which combine to exp(ζ(α)e₁ − η₁α).
        for lat in lattices() {
            let (z, alpha) = (c(0.17, 0.41), c(0.33, -0.12));
            let za = lat.zeta(alpha).unwrap();
            for (e, eta) in [(lat.e1(), lat.eta1()), (lat.e2(), lat.eta2())] {
                let u = alpha - z;
                let num = -lat.sigma(u) * (-eta * (u - e / 2.0)).exp();
                let den = lat.sigma(alpha) * (-lat.sigma(z) * (eta * (z + e / 2.0)).exp());
                let oracle = num / den * (za * (z + e)).exp();
                let got = phi(&lat, z + e, alpha).unwrap();
                assert!((got - oracle).norm() <= 1e-9 * oracle.norm());
                let factor = (za * e - eta * alpha).exp();
                assert!((got - phi(&lat, z, alpha).unwrap() * factor).norm() <= 1e-9 * got.norm());
            }
        }
    }

    #[test]
    fn constant_laurent_coefficient_vanishes() {
        let cases = [
            (Lattice::new(c(1.0, 0.0), c(0.0, 1.0), 1e-12).unwrap(), c(0.3, 0.2)),
            (Lattice::new(c(1.0, 0.0), c(0.0, 1.0), 1e-12).unwrap(), c(0.5, 0.0)),
            (Lattice::new(c(2.0, 0.0), c(1.0, 2.0), 1e-12).unwrap(), c(0.7, 0.1)),
        ];
        for (lat, alpha) in cases {
            // Taylor oracle: the z¹ coefficient of σ(α − z)/σ(α)·e^{ζ(α)z} is
            // −σ'(α)/σ(α) + ζ(α); σ' by central differences of σ alone.
            let h = 1e-5;
            let dsigma = (lat.sigma(alpha + h) - lat.sigma(alpha - h)) / (2.0 * h);
            let taylor_c0 = -dsigma / lat.sigma(alpha) + lat.zeta(alpha).unwrap();
            assert!(taylor_c0.norm() < 1e-8);
            assert!(phi_laurent_c0(&lat, alpha).unwrap().norm() <= 1e-8);
        }
    }

    #[test]
    fn alpha_on_lattice_is_rejected() {
        let lat = lattices()[0];
        assert!(matches!(phi(&lat, c(0.2, 0.1), c(1.0, 1.0)), Err(SpectralError::AlphaOnLattice { .. })));
        assert!(matches!(phi(&lat, c(1.0, 0.0), c(0.2, 0.1)), Err(SpectralError::PoleAtLatticePoint { .. })));
        assert!(matches!(phi_laurent_c0(&lat, c(0.0, 0.0)), Err(SpectralError::AlphaOnLattice { .. })));
    }

    #[test]
    fn psi_kernel_reduces_to_phi_and_has_floquet_factors() {
        let lat = lattices()[2];
        let alpha = c(0.21, 0.33);
        let k0 = PsiKernel::new(lat, alpha, c(0.0, 0.0), c(0.0, 0.0)).unwrap();
        let z = c(0.4, 0.1);
        assert_eq!(psi_kernel_eval(&k0, z).unwrap(), phi(&lat, z, alpha).unwrap());

        let k = PsiKernel::new(lat, alpha, c(0.7, -1.3), c(0.05, 0.2)).unwrap();
        for j in [1, 2] {
            let e = if j == 1 { lat.e1() } else { lat.e2() };
            let ratio = k.eval(z + e).unwrap() / k.eval(z).unwrap();
            let expect = k.log_multiplier(j).exp();
            assert!((ratio - expect).norm() <= 1e-9 * expect.norm());
            assert!(log_distance(k.measured_log_multiplier(z, j).unwrap(), k.log_multiplier(j)) < 1e-9);
        }
    }

    #[test]
    fn psi_kernel_residue_by_contour() {
        let lat = lattices()[1];
        let (mu, z0) = (c(0.4, 0.9), c(0.3, 0.6));
        let k = PsiKernel::new(lat, c(0.5, 0.25), mu, z0).unwrap();
        let res = circle_integral(|z| k.eval(z), z0, 1e-3, 64).unwrap() / (2.0 * PI * Complex64::i());
        assert!((res - (mu * z0).exp()).norm() <= 1e-6);
    }

    #[test]
    fn log_form_survives_large_mu() {
        let lat = lattices()[0];
        let k = PsiKernel::new(lat, c(0.2, 0.1), c(900.0, 0.0), c(0.0, 0.0)).unwrap();
        let z = c(0.9, 0.3);
        assert!(k.eval(z + lat.e1()).unwrap().norm().is_infinite());
        let got = k.measured_log_multiplier(z, 1).unwrap();
        assert!(log_distance(got, k.log_multiplier(1)) < 1e-9 * k.log_multiplier(1).norm());
    }
}
