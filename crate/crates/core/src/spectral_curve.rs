//! The spectral curve `Γ = {(α, μ) : det(μI + B(α)) = 0}`.
//!
//! `B(α)` has zero diagonal and `B_lm = Φ(p_l − p_m, α)`, so row `l` is the
//! vanishing of the constant Laurent term of `ψ = Σ a_m Ψ_{μ,α}(z − p_m)` at
//! `p_l`. Solutions of the Cauchy–Riemann problem with simple poles at the
//! punctures and zero constant terms there are the kernel vectors `a`.
//!
//! `B = D B̃ D⁻¹` with `D = diag(exp(ζ(α)(p_l − p₁)))` and
//! `B̃_lm = σ(α − x)/(σ(α)σ(x))`, `x = p_l − p_m`. Both have the same
//! characteristic polynomial; `B̃` is used for eigenvalues since its entries
//! stay moderate when `ζ(α)` is large.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::baker_akhiezer::PhiEvaluator;
use crate::contour::{laurent_coefficients, CONTOUR_NODES};
use crate::eigenfunction::Eigenfunction;
use crate::elliptic::Lattice;
use crate::error::{Result, SpectralError};
use crate::linalg::{
    discriminant_monic, eigenvalues, eval_monic, faddeev_leverrier, inf_norm, mat_vec, newton_polish, normalize_sup,
    null_direction, vec_norm, CMatrix,
};

/// Minimum separation of punctures modulo Λ, relative to the shorter generator.
pub const PUNCTURE_SEPARATION: f64 = 1e-6;

/// Singular values below this fraction of `max(1, ‖B‖∞)` count as null.
pub const NULL_THRESHOLD: f64 = 1e-6;

/// `N` pairwise distinct marked points on `ℂ/Λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct PunctureSet {
    lattice: Lattice,
    points: Vec<Complex64>,
}

impl PunctureSet {
    pub fn new(lattice: Lattice, points: Vec<Complex64>) -> Result<Self> {
        if points.is_empty() {
            return Err(SpectralError::InvalidPunctures("at least one puncture required".into()));
        }
        if points.iter().any(|p| !p.re.is_finite() || !p.im.is_finite()) {
            return Err(SpectralError::InvalidPunctures("non-finite coordinate".into()));
        }
        let min_sep = PUNCTURE_SEPARATION * lattice.min_generator();
        for i in 0..points.len() {
            for j in 0..i {
                if lattice.dist_to_lattice(points[i] - points[j]) < min_sep {
                    return Err(SpectralError::InvalidPunctures(format!(
                        "punctures {j} and {i} coincide modulo the lattice"
                    )));
                }
            }
        }
        Ok(PunctureSet { lattice, points })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Same punctures, every representative shifted by `w`.
    pub fn translated(&self, w: Complex64) -> Self {
        PunctureSet {
            lattice: self.lattice,
            points: self.points.iter().map(|p| p + w).collect(),
        }
    }

    /// Distance from `z` to the nearest puncture modulo Λ, with its index.
    pub fn nearest(&self, z: Complex64) -> (usize, f64) {
        self.points
            .iter()
            .enumerate()
            .map(|(i, p)| (i, self.lattice.dist_to_lattice(z - p)))
            .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
    }

    /// Smallest distance between distinct punctures modulo Λ, capped by the
    /// shortest lattice vector; `min(|e₁|, |e₂|)/4` when `N = 1`.
    pub fn min_separation(&self) -> f64 {
        if self.points.len() == 1 {
            return self.lattice.min_generator() / 4.0;
        }
        let mut best = self.lattice.shortest_vector();
        for i in 0..self.points.len() {
            for j in 0..i {
                best = best.min(self.lattice.dist_to_lattice(self.points[i] - self.points[j]));
            }
        }
        best
    }

    /// Radius of the circles used to read off Laurent data at a puncture.
    pub fn contour_radius(&self) -> f64 {
        1e-2 * self.min_separation()
    }
}

/// Coefficients `q₁ … q_N` of `det(μI + B(α)) = μᴺ + q₁μᴺ⁻¹ + … + q_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct CharPoly {
    pub alpha: Complex64,
    pub q: Vec<Complex64>,
    /// `max(1, ‖B̃‖∞)ᴺ`, the reference size for polynomial residuals.
    pub scale: f64,
}

impl CharPoly {
    pub fn degree(&self) -> usize {
        self.q.len()
    }

    pub fn eval(&self, mu: Complex64) -> Complex64 {
        eval_monic(&self.q, mu).0
    }

    pub fn residual(&self, mu: Complex64) -> f64 {
        self.eval(mu).norm() / self.scale
    }
}

/// A point of `Γ` with its kernel vector and Floquet multipliers.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralPoint {
    pub alpha: Complex64,
    pub mu: Complex64,
    /// Kernel of `μI + B`, sup-norm 1, first entry of modulus ≥ 1/2 real positive.
    pub a: Vec<Complex64>,
    pub nu1: Complex64,
    pub nu2: Complex64,
    /// `‖(μI + B)a‖ / ‖a‖`.
    pub residual: f64,
    /// Numerical dimension of the kernel; above 1 only at branch points.
    pub nullity: usize,
}

fn check_alpha(lattice: &Lattice, alpha: Complex64) -> Result<PhiEvaluator> {
    PhiEvaluator::new(*lattice, alpha)
}

/// `B(α)`: zero diagonal, `B_lm = Φ(p_l − p_m, α)`.
pub fn assemble_offdiag(ps: &PunctureSet, alpha: Complex64) -> Result<CMatrix> {
    let phi = check_alpha(ps.lattice(), alpha)?;
    let p = ps.points();
    let n = p.len();
    let mut b = CMatrix::zeros(n, n);
    for l in 0..n {
        for m in 0..n {
            if l != m {
                b[(l, m)] = phi.eval(p[l] - p[m])?;
            }
        }
    }
    Ok(b)
}

/// `B̃(α) = D⁻¹ B(α) D`, the gauge-balanced form of `B`.
pub fn assemble_balanced(ps: &PunctureSet, alpha: Complex64) -> Result<CMatrix> {
    let phi = check_alpha(ps.lattice(), alpha)?;
    balanced_from(&phi, ps)
}

fn balanced_from(phi: &PhiEvaluator, ps: &PunctureSet) -> Result<CMatrix> {
    let p = ps.points();
    let n = p.len();
    let mut b = CMatrix::zeros(n, n);
    for l in 0..n {
        for m in 0..n {
            if l != m {
                b[(l, m)] = phi.eval_unscaled(p[l] - p[m])?;
            }
        }
    }
    Ok(b)
}

/// Diagonal of the gauge `D`, `exp(ζ(α)(p_l − p₁))`.
fn gauge(phi: &PhiEvaluator, ps: &PunctureSet) -> Vec<Complex64> {
    let p0 = ps.points()[0];
    ps.points().iter().map(|p| (phi.zeta_alpha() * (p - p0)).exp()).collect()
}

fn char_poly_of(alpha: Complex64, balanced: &CMatrix) -> CharPoly {
    let n = balanced.nrows();
    let q = faddeev_leverrier(&(-balanced));
    CharPoly {
        alpha,
        q,
        scale: inf_norm(balanced).max(1.0).powi(n as i32),
    }
}

/// Characteristic polynomial of `−B(α)` by the Faddeev–LeVerrier recursion.
pub fn char_poly(ps: &PunctureSet, alpha: Complex64) -> Result<CharPoly> {
    Ok(char_poly_of(alpha, &assemble_balanced(ps, alpha)?))
}

fn sheets_of(poly: &CharPoly, balanced: &CMatrix) -> Result<Vec<Complex64>> {
    let mut roots: Vec<Complex64> = eigenvalues(&(-balanced))?
        .into_iter()
        .map(|r| newton_polish(|x| eval_monic(&poly.q, x), r, 2))
        .collect();
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(roots)
}

/// The `N` values `μᵢ(α)` over `α`, with multiplicity, sorted by real part.
pub fn sheets(ps: &PunctureSet, alpha: Complex64) -> Result<Vec<Complex64>> {
    let balanced = assemble_balanced(ps, alpha)?;
    let poly = char_poly_of(alpha, &balanced);
    sheets_of(&poly, &balanced)
}

/// Kernel vector of `μI + B(α)` with its residual and numerical nullity.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelVector {
    pub a: Vec<Complex64>,
    pub residual: f64,
    pub nullity: usize,
}

/// Kernel vector of `μI + B(α)` from the smallest singular direction.
///
/// Fails with [`SpectralError::NotOnCurve`] when the best residual exceeds
/// `1e-6 · ‖B‖∞`.
pub fn kernel_vector(ps: &PunctureSet, alpha: Complex64, mu: Complex64) -> Result<KernelVector> {
    let phi = check_alpha(ps.lattice(), alpha)?;
    let balanced = balanced_from(&phi, ps)?;
    kernel_from(ps, &phi, &balanced, mu)
}

fn kernel_from(
    ps: &PunctureSet,
    phi: &PhiEvaluator,
    balanced: &CMatrix,
    mu: Complex64,
) -> Result<KernelVector> {
    let n = ps.len();
    let mut shifted = balanced.clone();
    for i in 0..n {
        shifted[(i, i)] += mu;
    }
    let nd = null_direction(&shifted)?;
    let nullity = nd.nullity(NULL_THRESHOLD * inf_norm(balanced).max(1.0)).max(1);

    let d = gauge(phi, ps);
    let mut a: Vec<Complex64> = nd.vector.iter().zip(&d).map(|(x, g)| x * g).collect();
    normalize_sup(&mut a);

    let mut full = assemble_from(phi, ps)?;
    let b_norm = inf_norm(&full);
    for i in 0..n {
        full[(i, i)] += mu;
    }
    let residual = vec_norm(&mat_vec(&full, &a)) / vec_norm(&a);
    if !(residual <= NULL_THRESHOLD * b_norm) {
        return Err(SpectralError::NotOnCurve {
            alpha: phi.alpha(),
            mu,
            residual,
        });
    }
    Ok(KernelVector { a, residual, nullity })
}

fn assemble_from(phi: &PhiEvaluator, ps: &PunctureSet) -> Result<CMatrix> {
    let p = ps.points();
    let n = p.len();
    let mut b = CMatrix::zeros(n, n);
    for l in 0..n {
        for m in 0..n {
            if l != m {
                b[(l, m)] = phi.eval(p[l] - p[m])?;
            }
        }
    }
    Ok(b)
}

/// `νⱼ = exp((μ + ζ(α))eⱼ − αηⱼ)`.
pub fn floquet_multipliers(
    lattice: &Lattice,
    alpha: Complex64,
    mu: Complex64,
) -> Result<(Complex64, Complex64)> {
    let phi = check_alpha(lattice, alpha)?;
    Ok(multipliers_from(lattice, alpha, mu + phi.zeta_alpha()))
}

fn multipliers_from(lattice: &Lattice, alpha: Complex64, c: Complex64) -> (Complex64, Complex64) {
    (
        (c * lattice.e1() - alpha * lattice.eta1()).exp(),
        (c * lattice.e2() - alpha * lattice.eta2()).exp(),
    )
}

fn relative_gap(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

/// Inverts [`floquet_multipliers`]: the unique `α` in the fundamental
/// parallelogram and `μ` with the given multipliers.
///
/// Multipliers of the form `(exp(βe₁), exp(βe₂))` give `α ≡ 0` and are
/// rejected with [`SpectralError::DegenerateMultipliers`].
pub fn alpha_mu_from_multipliers(
    lattice: &Lattice,
    nu1: Complex64,
    nu2: Complex64,
) -> Result<(Complex64, Complex64)> {
    let finite = |z: Complex64| z.re.is_finite() && z.im.is_finite() && z.norm() > 0.0;
    if !finite(nu1) || !finite(nu2) {
        return Err(SpectralError::InvalidMultipliers);
    }
    let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
    let (e1, e2) = (lattice.e1(), lattice.e2());
    let (eta1, eta2) = (lattice.eta1(), lattice.eta2());
    let (l1, l2) = (nu1.ln(), nu2.ln());

    // Any branch of the logarithms gives the same α modulo Λ.
    let alpha_raw = (l2 * e1 - l1 * e2) / (two_pi_i * lattice.orientation());
    if lattice.is_lattice_point(alpha_raw) {
        return Err(SpectralError::DegenerateMultipliers);
    }
    let (alpha, _, _) = lattice.reduce(alpha_raw);
    let zeta_alpha = lattice.zeta(alpha)?;

    // Branch pair making both equations share one μ:
    // 2πi(n₁e₂ − n₂e₁) = (l₂ + αη₂)e₁ − (l₁ + αη₁)e₂.
    let rhs = ((l2 + alpha * eta2) * e1 - (l1 + alpha * eta1) * e2) / two_pi_i;
    let denom = (e2 * (-e1).conj()).im;
    let n1 = ((rhs * (-e1).conj()).im / denom).round() as i64;

    let try_branch = |k1: i64| {
        let c = (l1 + two_pi_i * k1 as f64 + alpha * eta1) / e1;
        let (m1, m2) = multipliers_from(lattice, alpha, c);
        if relative_gap(m1, nu1) <= 1e-8 && relative_gap(m2, nu2) <= 1e-8 {
            Some((alpha, c - zeta_alpha))
        } else {
            None
        }
    };
    if let Some(found) = try_branch(n1) {
        return Ok(found);
    }
    for k in -8..=8 {
        if let Some(found) = try_branch(k) {
            return Ok(found);
        }
    }
    Err(SpectralError::NoConsistentBranch)
}

/// Full spectral data at an on-curve `(α, μ)`.
pub fn spectral_point(ps: &PunctureSet, alpha: Complex64, mu: Complex64) -> Result<SpectralPoint> {
    let phi = check_alpha(ps.lattice(), alpha)?;
    let balanced = balanced_from(&phi, ps)?;
    point_from(ps, &phi, &balanced, mu)
}

fn point_from(
    ps: &PunctureSet,
    phi: &PhiEvaluator,
    balanced: &CMatrix,
    mu: Complex64,
) -> Result<SpectralPoint> {
    let kv = kernel_from(ps, phi, balanced, mu)?;
    let (nu1, nu2) = multipliers_from(ps.lattice(), phi.alpha(), mu + phi.zeta_alpha());
    Ok(SpectralPoint {
        alpha: phi.alpha(),
        mu,
        a: kv.a,
        nu1,
        nu2,
        residual: kv.residual,
        nullity: kv.nullity,
    })
}

/// Spectral points on every sheet over `α`.
pub fn spectral_points(ps: &PunctureSet, alpha: Complex64) -> Result<Vec<SpectralPoint>> {
    let phi = check_alpha(ps.lattice(), alpha)?;
    let balanced = balanced_from(&phi, ps)?;
    let poly = char_poly_of(alpha, &balanced);
    sheets_of(&poly, &balanced)?
        .into_iter()
        .map(|mu| point_from(ps, &phi, &balanced, mu))
        .collect()
}

/// `ψ(z) = Σ a_l exp(μz) Φ(z − p_l, α)` for a point of `Γ`.
pub fn build_psi(ps: &PunctureSet, sp: &SpectralPoint) -> Result<Eigenfunction> {
    Eigenfunction::floquet(ps.clone(), sp.alpha, sp.mu, sp.a.clone())
}

/// Laurent data of an eigenfunction at a puncture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryCheck {
    pub residue: Complex64,
    pub c0: Complex64,
    /// `|c₀| / |residue|`.
    pub ratio: f64,
}

/// Residue and constant term of `ψ` at `p_l`, read off a circle of radius
/// [`PunctureSet::contour_radius`].
pub fn verify_boundary(ps: &PunctureSet, psi: &Eigenfunction, l: usize) -> Result<BoundaryCheck> {
    let p = *ps
        .points()
        .get(l)
        .ok_or(SpectralError::IndexOutOfRange { index: l, len: ps.len() })?;
    let lc = laurent_coefficients(|z| psi.eval(z), p, ps.contour_radius(), CONTOUR_NODES, -1, 0)?;
    let residue = lc.get(-1);
    let c0 = lc.get(0);
    let ratio = if residue.norm() > 0.0 {
        c0.norm() / residue.norm()
    } else if c0.norm() == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(BoundaryCheck { residue, c0, ratio })
}

/// One grid point of a curve sample.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSample {
    pub alpha: Complex64,
    pub data: Result<CurveData>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveData {
    pub poly: CharPoly,
    pub sheets: Vec<Complex64>,
    /// Present when points were requested.
    pub points: Vec<SpectralPoint>,
}

/// Char polys and sheets over a list of `α`, evaluated in parallel and
/// returned in grid order. Per-point failures are recorded, not raised.
pub fn sample_curve(ps: &PunctureSet, grid: &[Complex64], with_points: bool) -> Vec<CurveSample> {
    grid.par_iter()
        .map(|&alpha| CurveSample {
            alpha,
            data: sample_one(ps, alpha, with_points),
        })
        .collect()
}

fn sample_one(ps: &PunctureSet, alpha: Complex64, with_points: bool) -> Result<CurveData> {
    let phi = check_alpha(ps.lattice(), alpha)?;
    let balanced = balanced_from(&phi, ps)?;
    let poly = char_poly_of(alpha, &balanced);
    let sheets = sheets_of(&poly, &balanced)?;
    let points = if with_points {
        sheets
            .iter()
            .map(|&mu| point_from(ps, &phi, &balanced, mu))
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    Ok(CurveData { poly, sheets, points })
}

/// `Π_{i<j} (μᵢ − μⱼ)²` at `α`; zero exactly at branch points of the covering.
pub fn discriminant(ps: &PunctureSet, alpha: Complex64) -> Result<Complex64> {
    Ok(discriminant_monic(&char_poly(ps, alpha)?.q))
}
