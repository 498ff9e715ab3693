//! Solutions with multipliers `(e^{βe₁}, e^{βe₂})`, the excluded case `α ≡ 0`.
//!
//! Here `ψ = e^{βz}(a₀ + Σ a_l ζ(z − p_l))` with `Σ a_l = 0`. The vanishing
//! constant term at `p_k` reads `a₀ + βa_k + Σ_{l≠k} a_l ζ(p_k − p_l) = 0`.
//! Subtracting one of these conditions from the others removes `a₀`, and with
//! the constraint `Σ a_l = 0` leaves an `N × N` system `M(β)a = 0` whose entries
//! are affine in `β`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::eigenfunction::Eigenfunction;
use crate::error::{Result, SpectralError};
use crate::linalg::{
    companion_roots, eval_ascending, inf_norm, newton_polish, normalize_sup, null_direction,
    CMatrix,
};
use crate::spectral_curve::PunctureSet;

/// Roots closer than this (relative to `max(1, |β|)`) are one multiple root.
pub const CLUSTER_TOLERANCE: f64 = 1e-6;

/// `Z_kl = ζ(p_k − p_l)` off the diagonal, zero on it.
pub fn zeta_matrix(ps: &PunctureSet) -> Result<CMatrix> {
    let p = ps.points();
    let n = p.len();
    let lat = ps.lattice();
    let mut z = CMatrix::zeros(n, n);
    for k in 0..n {
        for l in 0..n {
            if k != l {
                z[(k, l)] = lat.zeta(p[k] - p[l])?;
            }
        }
    }
    Ok(z)
}

/// `M(β)` with `a₀` eliminated by subtracting condition 1.
pub fn beta_system(ps: &PunctureSet, beta: Complex64) -> Result<CMatrix> {
    beta_system_with_pivot(ps, beta, 0)
}

/// `M(β)` with `a₀` eliminated by subtracting condition `pivot`.
pub fn beta_system_with_pivot(ps: &PunctureSet, beta: Complex64, pivot: usize) -> Result<CMatrix> {
    let n = ps.len();
    if pivot >= n {
        return Err(SpectralError::IndexOutOfRange { index: pivot, len: n });
    }
    Ok(system_from(&zeta_matrix(ps)?, beta, pivot))
}

fn system_from(z: &CMatrix, beta: Complex64, pivot: usize) -> CMatrix {
    let n = z.nrows();
    let mut m = CMatrix::zeros(n, n);
    let others = (0..n).filter(|&k| k != pivot);
    for (row, k) in others.enumerate() {
        for l in 0..n {
            m[(row, l)] = z[(k, l)] - z[(pivot, l)];
        }
        m[(row, k)] += beta;
        m[(row, pivot)] -= beta;
    }
    for l in 0..n {
        m[(n - 1, l)] = Complex64::new(1.0, 0.0);
    }
    m
}

/// `det M(β) = Σ cₖ βᵏ`, degree `N − 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaPolynomial {
    /// Ascending coefficients `c₀ … c_{N−1}`.
    pub coeffs: Vec<Complex64>,
    /// Radius of the interpolation circle.
    pub radius: f64,
}

impl BetaPolynomial {
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, beta: Complex64) -> Complex64 {
        eval_ascending(&self.coeffs, beta).0
    }
}

/// Coefficients of `det M(β)` by interpolation on `N` equispaced points of a
/// circle of radius `1 + max|ζ(p_k − p_l)|`.
pub fn beta_polynomial(ps: &PunctureSet) -> Result<BetaPolynomial> {
    beta_polynomial_with_pivot(ps, 0)
}

pub fn beta_polynomial_with_pivot(ps: &PunctureSet, pivot: usize) -> Result<BetaPolynomial> {
    let n = ps.len();
    if pivot >= n {
        return Err(SpectralError::IndexOutOfRange { index: pivot, len: n });
    }
    let z = zeta_matrix(ps)?;
    let radius = 1.0 + z.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let nodes: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar(radius, 2.0 * PI * j as f64 / n as f64))
        .collect();
    let dets: Vec<Complex64> = nodes
        .iter()
        .map(|&b| system_from(&z, b, pivot).determinant())
        .collect();
    // Inverse DFT: c_k r^k = (1/N) Σ_j det(β_j) ω^{−jk}.
    let coeffs: Vec<Complex64> = (0..n)
        .map(|k| {
            let sum: Complex64 = dets
                .iter()
                .enumerate()
                .map(|(j, d)| d * Complex64::from_polar(1.0, -2.0 * PI * (j * k) as f64 / n as f64))
                .sum();
            sum / n as f64 / radius.powi(k as i32)
        })
        .collect();
    let max = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let leading = coeffs[n - 1].norm();
    if leading < 1e-10 * max {
        return Err(SpectralError::DegenerateLeadingCoefficient { leading });
    }
    Ok(BetaPolynomial { coeffs, radius })
}

/// A root `β` with the coefficients of its eigenfunction.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaRoot {
    pub beta: Complex64,
    pub a0: Complex64,
    /// Null vector of `M(β)`, normalised like a curve kernel vector.
    pub a: Vec<Complex64>,
    /// `max_k |a₀ + βa_k + Σ_{l≠k} a_l ζ(p_k − p_l)|`.
    pub residual: f64,
    /// `|Σ a_l|`.
    pub constraint_residual: f64,
    /// Number of roots in this root's cluster.
    pub multiplicity: usize,
    /// Numerical dimension of the null space of `M(β)`.
    pub nullity: usize,
}

/// The `N − 1` roots of [`beta_polynomial`] with their coefficient vectors.
pub fn beta_roots(ps: &PunctureSet) -> Result<Vec<BetaRoot>> {
    let n = ps.len();
    if n == 1 {
        return Ok(Vec::new());
    }
    let poly = beta_polynomial(ps)?;
    let z = zeta_matrix(ps)?;
    let det = |b: Complex64| system_from(&z, b, 0).determinant();
    let roots: Vec<Complex64> = companion_roots(&poly.coeffs)?
        .into_iter()
        .map(|r| {
            newton_polish(
                |b| {
                    let h = 1e-7 * b.norm().max(1.0);
                    let d = (det(b + h) - det(b - h)) / (2.0 * h);
                    (det(b), d)
                },
                r,
                2,
            )
        })
        .collect();

    let close = |a: Complex64, b: Complex64| (a - b).norm() <= CLUSTER_TOLERANCE * a.norm().max(1.0);
    roots
        .iter()
        .map(|&beta| {
            let multiplicity = roots.iter().filter(|&&r| close(beta, r)).count();
            root_data(&z, beta, multiplicity)
        })
        .collect()
}

fn root_data(z: &CMatrix, beta: Complex64, multiplicity: usize) -> Result<BetaRoot> {
    let n = z.nrows();
    let m = system_from(z, beta, 0);
    let nd = null_direction(&m)?;
    let nullity = nd.nullity(1e-6 * inf_norm(&m)).max(1);
    let mut a = nd.vector;
    normalize_sup(&mut a);
    let a0 = -beta * a[0] - (1..n).map(|l| a[l] * z[(0, l)]).sum::<Complex64>();
    let residual = (0..n)
        .map(|k| {
            let s: Complex64 = (0..n).filter(|&l| l != k).map(|l| a[l] * z[(k, l)]).sum();
            (a0 + beta * a[k] + s).norm()
        })
        .fold(0.0, f64::max);
    let constraint_residual = a.iter().sum::<Complex64>().norm();
    Ok(BetaRoot {
        beta,
        a0,
        a,
        residual,
        constraint_residual,
        multiplicity,
        nullity,
    })
}

/// `ψ(z) = e^{βz}(a₀ + Σ a_l ζ(z − p_l))`.
pub fn build_degenerate_psi(ps: &PunctureSet, br: &BetaRoot) -> Result<Eigenfunction> {
    Eigenfunction::degenerate(ps.clone(), br.beta, br.a0, br.a.clone())
}
