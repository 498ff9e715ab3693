//! Weierstrass elliptic functions on a period lattice.
//!
//! `σ`, `ζ` and `℘` are evaluated through the odd Jacobi theta function
//! `θ₁` in the nome `q = exp(iπτ)` of a Gauss-reduced basis of the lattice,
//! after centering the argument in the reduced fundamental parallelogram.
//! The removed lattice translate is restored with the quasi-periodicity
//! factors of `σ` and the increments of `ζ`.
//!
//! The reduced basis is an evaluation detail. The quasi-periods returned by
//! [`Lattice::eta1`] and [`Lattice::eta2`] always refer to the generators
//! the caller supplied.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Result, SpectralError};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Number of precomputed theta coefficients. For a reduced modulus
/// `Im τ ≥ √3/2`, so the 12th coefficient is below `1e-80`.
const THETA_TERMS: usize = 12;

/// Relative size of the last retained theta term.
const SERIES_EPS: f64 = 1e-17;

/// Poles are excluded within this fraction of the shorter user generator.
pub const POLE_EXCLUSION: f64 = 1e-8;

/// Default target accuracy used by callers that do not supply one.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// The period lattice `Λ = ℤe₁ + ℤe₂` together with its quasi-periods.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    e1: Complex64,
    e2: Complex64,
    eta1: Complex64,
    eta2: Complex64,
    /// `+1` when `Im(e₂/e₁) > 0`, `-1` otherwise.
    orientation: f64,
    tolerance: f64,
    basis: ReducedBasis,
}

/// Gauss-reduced, positively oriented basis used for every evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
struct ReducedBasis {
    w1: Complex64,
    w2: Complex64,
    tau: Complex64,
    eta1: Complex64,
    eta2: Complex64,
    /// `2(-1)ⁿ q^{(n+1/2)²}` for `n = 0..THETA_TERMS`.
    coeffs: [Complex64; THETA_TERMS],
    /// `θ₁'(0)`.
    theta1_d1_zero: Complex64,
}

#[derive(Debug, Clone, Copy)]
struct Theta1 {
    value: Complex64,
    d1: Complex64,
    d2: Complex64,
}

impl ReducedBasis {
    fn new(w1: Complex64, w2: Complex64) -> Self {
        let tau = w2 / w1;
        let mut coeffs = [Complex64::new(0.0, 0.0); THETA_TERMS];
        for (n, c) in coeffs.iter_mut().enumerate() {
            let h = n as f64 + 0.5;
            let sign = if n % 2 == 0 { 2.0 } else { -2.0 };
            *c = sign * (I * PI * tau * h * h).exp();
        }
        let mut d1 = Complex64::new(0.0, 0.0);
        let mut d3 = Complex64::new(0.0, 0.0);
        for (n, c) in coeffs.iter().enumerate() {
            let k = (2 * n + 1) as f64;
            d1 += c * k;
            d3 -= c * k * k * k;
        }
        // ζ has no linear Taylor term at the origin, which fixes η₁ in terms
        // of θ₁'''(0)/θ₁'(0).
        let eta1 = -(PI * PI) * (d3 / d1) / (3.0 * w1);
        let eta2 = (eta1 * w2 - 2.0 * PI * I) / w1;
        ReducedBasis {
            w1,
            w2,
            tau,
            eta1,
            eta2,
            coeffs,
            theta1_d1_zero: d1,
        }
    }

    fn theta1(&self, v: Complex64) -> Theta1 {
        let mut value = Complex64::new(0.0, 0.0);
        let mut d1 = Complex64::new(0.0, 0.0);
        let mut d2 = Complex64::new(0.0, 0.0);
        for (n, c) in self.coeffs.iter().enumerate() {
            let k = (2 * n + 1) as f64;
            let (s, co) = ((k * v).sin(), (k * v).cos());
            let t0 = c * s;
            let t1 = c * k * co;
            let t2 = -c * k * k * s;
            value += t0;
            d1 += t1;
            d2 += t2;
            let small = |t: Complex64, sum: Complex64| t.norm() <= SERIES_EPS * sum.norm();
            let negligible = t2.norm() < 1e-300 && t1.norm() < 1e-300;
            if n > 0 && ((small(t0, value) && small(t1, d1) && small(t2, d2)) || negligible) {
                break;
            }
        }
        Theta1 { value, d1, d2 }
    }

    /// Coordinates `(s, t)` with `z = s·w₁ + t·w₂`.
    fn coords(&self, z: Complex64) -> (f64, f64) {
        let r = z / self.w1;
        let t = r.im / self.tau.im;
        let s = r.re - t * self.tau.re;
        (s, t)
    }

    /// `z = z₀ + m·w₁ + n·w₂` with `z₀` in the centered parallelogram.
    fn center(&self, z: Complex64) -> (Complex64, i64, i64) {
        let (s, t) = self.coords(z);
        let m = s.round();
        let n = t.round();
        let z0 = z - self.w1 * m - self.w2 * n;
        (z0, m as i64, n as i64)
    }

    fn nearest(&self, z: Complex64) -> Complex64 {
        let (z0, _, _) = self.center(z);
        let candidates = [
            Complex64::new(0.0, 0.0),
            self.w1,
            -self.w1,
            self.w2,
            -self.w2,
            self.w1 + self.w2,
            -self.w1 - self.w2,
            self.w1 - self.w2,
            self.w2 - self.w1,
        ];
        let best = candidates
            .iter()
            .copied()
            .min_by(|a, b| (z0 - a).norm().total_cmp(&(z0 - b).norm()))
            .unwrap();
        z - z0 + best
    }

    fn dist_to_lattice(&self, z: Complex64) -> f64 {
        (z - self.nearest(z)).norm()
    }

    /// `(θ₁'/θ₁)(πz/w₁)` contribution to `ζ` without argument reduction.
    fn zeta_unreduced(&self, z: Complex64) -> Complex64 {
        let v = PI * z / self.w1;
        let th = self.theta1(v);
        self.eta1 * z / self.w1 + PI / self.w1 * th.d1 / th.value
    }
}

/// Integer change of basis `[w₁, w₂]ᵀ = M [e₁, e₂]ᵀ`.
type BasisMatrix = [[i64; 2]; 2];

fn gauss_reduce(e1: Complex64, e2: Complex64) -> (Complex64, Complex64, BasisMatrix) {
    let mut w1 = e1;
    let mut w2 = e2;
    let mut m: BasisMatrix = [[1, 0], [0, 1]];
    for _ in 0..200 {
        let k = (w2 / w1).re.round();
        if k != 0.0 {
            w2 -= w1 * k;
            let k = k as i64;
            m[1][0] -= k * m[0][0];
            m[1][1] -= k * m[0][1];
        }
        if w2.norm() < w1.norm() * (1.0 - 1e-14) {
            // (w₁, w₂) → (w₂, −w₁) keeps the orientation.
            let nw1 = w2;
            w2 = -w1;
            w1 = nw1;
            m = [m[1], [-m[0][0], -m[0][1]]];
        } else {
            break;
        }
    }
    (w1, w2, m)
}

impl Lattice {
    /// Builds the lattice generated by `e1`, `e2`.
    ///
    /// Fails with [`SpectralError::DegenerateLattice`] when the generators are
    /// ℝ-linearly dependent and with [`SpectralError::BadTolerance`] unless
    /// `tolerance ∈ (0, 1e-4]`.
    pub fn new(e1: Complex64, e2: Complex64, tolerance: f64) -> Result<Self> {
        if !(tolerance > 0.0 && tolerance <= 1e-4) {
            return Err(SpectralError::BadTolerance(tolerance));
        }
        let finite = |z: Complex64| z.re.is_finite() && z.im.is_finite();
        if !finite(e1) || !finite(e2) || e1.norm() == 0.0 || e2.norm() == 0.0 {
            return Err(SpectralError::DegenerateLattice { e1, e2 });
        }
        let cross = (e2 * e1.conj()).im;
        if cross.abs() <= 10.0 * f64::EPSILON * e1.norm() * e2.norm() {
            return Err(SpectralError::DegenerateLattice { e1, e2 });
        }
        let orientation = cross.signum();

        let (w1, w2, mut m) = gauss_reduce(e1, e2 * orientation);
        // Undo the internal negation of e₂ in the basis matrix.
        m[0][1] *= orientation as i64;
        m[1][1] *= orientation as i64;
        let basis = ReducedBasis::new(w1, w2);

        let direct_eta2 = 2.0 * basis.zeta_unreduced(w2 / 2.0);
        let defect = (direct_eta2 - basis.eta2).norm();
        if defect > tolerance * basis.eta2.norm().max(1.0) {
            return Err(SpectralError::LegendreViolation { defect });
        }

        // η is additive on Λ, so η(e) = M⁻¹ η(w).
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let inv = [
            [m[1][1] * det, -m[0][1] * det],
            [-m[1][0] * det, m[0][0] * det],
        ];
        let eta1 = basis.eta1 * inv[0][0] as f64 + basis.eta2 * inv[0][1] as f64;
        let eta2 = basis.eta1 * inv[1][0] as f64 + basis.eta2 * inv[1][1] as f64;

        let lattice = Lattice {
            e1,
            e2,
            eta1,
            eta2,
            orientation,
            tolerance,
            basis,
        };
        let defect = lattice.legendre_defect();
        if defect > tolerance * 2.0 * PI {
            return Err(SpectralError::LegendreViolation { defect });
        }
        Ok(lattice)
    }

    pub fn e1(&self) -> Complex64 {
        self.e1
    }

    pub fn e2(&self) -> Complex64 {
        self.e2
    }

    /// `η₁ = 2ζ(e₁/2)` for the caller's `e₁`.
    pub fn eta1(&self) -> Complex64 {
        self.eta1
    }

    /// `η₂ = 2ζ(e₂/2)` for the caller's `e₂`.
    pub fn eta2(&self) -> Complex64 {
        self.eta2
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Modulus of the reduced evaluation basis, `Im τ > 0`, `|Re τ| ≤ 1/2`, `|τ| ≥ 1`.
    pub fn tau(&self) -> Complex64 {
        self.basis.tau
    }

    /// Nome `exp(iπτ)` of the reduced basis.
    pub fn nome(&self) -> Complex64 {
        (I * PI * self.basis.tau).exp()
    }

    /// `+1` if the caller's generators are positively oriented, `-1` otherwise.
    pub fn orientation(&self) -> f64 {
        self.orientation
    }

    /// `|η₁e₂ − η₂e₁ − 2πi·orientation|`.
    pub fn legendre_defect(&self) -> f64 {
        (self.eta1 * self.e2 - self.eta2 * self.e1 - 2.0 * PI * I * self.orientation).norm()
    }

    pub fn min_generator(&self) -> f64 {
        self.e1.norm().min(self.e2.norm())
    }

    /// Length of a shortest nonzero lattice vector.
    pub fn shortest_vector(&self) -> f64 {
        self.basis.w1.norm()
    }

    /// Radius below which a point counts as lying on the lattice.
    pub fn pole_radius(&self) -> f64 {
        POLE_EXCLUSION * self.min_generator()
    }

    /// Lattice vector `m·e₁ + n·e₂`.
    pub fn point(&self, m: i64, n: i64) -> Complex64 {
        self.e1 * m as f64 + self.e2 * n as f64
    }

    /// Quasi-period of the lattice vector `m·e₁ + n·e₂`.
    pub fn eta_of(&self, m: i64, n: i64) -> Complex64 {
        self.eta1 * m as f64 + self.eta2 * n as f64
    }

    /// Euclidean distance from `z` to the nearest lattice point.
    pub fn dist_to_lattice(&self, z: Complex64) -> f64 {
        self.basis.dist_to_lattice(z)
    }

    /// The lattice point closest to `z`.
    pub fn nearest_lattice_point(&self, z: Complex64) -> Complex64 {
        self.basis.nearest(z)
    }

    /// Distance from the segment `a → b` to the lattice.
    pub fn segment_dist_to_lattice(&self, a: Complex64, b: Complex64) -> f64 {
        let b_ = &self.basis;
        let mid = (a + b) / 2.0;
        let w0 = b_.nearest(mid);
        let k = ((b - a).norm() / b_.w1.norm()).ceil() as i64 + 1;
        let mut best = f64::INFINITY;
        for i in -k..=k {
            for j in -k..=k {
                let w = w0 + b_.w1 * i as f64 + b_.w2 * j as f64;
                best = best.min(point_segment_distance(w, a, b));
            }
        }
        best
    }

    pub fn is_lattice_point(&self, z: Complex64) -> bool {
        self.dist_to_lattice(z) < self.pole_radius()
    }

    /// Writes `z = z₀ + m·e₁ + n·e₂` with `z₀` in `{s·e₁ + t·e₂ : s, t ∈ [0, 1)}`.
    pub fn reduce(&self, z: Complex64) -> (Complex64, i64, i64) {
        let denom = (self.e2 * self.e1.conj()).im;
        let t = (z * self.e1.conj()).im / denom;
        let s = -(z * self.e2.conj()).im / denom;
        let m = s.floor();
        let n = t.floor();
        let z0 = z - self.e1 * m - self.e2 * n;
        (z0, m as i64, n as i64)
    }

    /// Weierstrass `σ`. Total; `σ(0) = 0` exactly.
    pub fn sigma(&self, z: Complex64) -> Complex64 {
        let b = &self.basis;
        let (z0, m, n) = b.center(z);
        let v = PI * z0 / b.w1;
        let th = b.theta1(v);
        let base = b.w1 / PI * (b.eta1 * z0 * z0 / (2.0 * b.w1)).exp() * th.value / b.theta1_d1_zero;
        if m == 0 && n == 0 {
            return base;
        }
        let shift = b.w1 * m as f64 + b.w2 * n as f64;
        let eta = b.eta1 * m as f64 + b.eta2 * n as f64;
        let sign = if (m + n + m * n).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        base * sign * (eta * (z0 + shift / 2.0)).exp()
    }

    /// Weierstrass `ζ = σ'/σ`.
    pub fn zeta(&self, z: Complex64) -> Result<Complex64> {
        self.check_pole(z)?;
        let b = &self.basis;
        let (z0, m, n) = b.center(z);
        let v = PI * z0 / b.w1;
        let th = b.theta1(v);
        let local = b.eta1 * z0 / b.w1 + PI / b.w1 * th.d1 / th.value;
        Ok(local + b.eta1 * m as f64 + b.eta2 * n as f64)
    }

    /// Weierstrass `℘ = −ζ'`.
    pub fn weierstrass_p(&self, z: Complex64) -> Result<Complex64> {
        self.check_pole(z)?;
        let b = &self.basis;
        let (z0, _, _) = b.center(z);
        let v = PI * z0 / b.w1;
        let th = b.theta1(v);
        let ratio = th.d1 / th.value;
        let scale = PI / b.w1;
        Ok(-b.eta1 / b.w1 + scale * scale * (ratio * ratio - th.d2 / th.value))
    }

    fn check_pole(&self, z: Complex64) -> Result<()> {
        if self.is_lattice_point(z) {
            Err(SpectralError::PoleAtLatticePoint { z })
        } else {
            Ok(())
        }
    }
}

fn point_segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = (((p - a) * d.conj()).re / len2).clamp(0.0, 1.0);
    (p - (a + d * t)).norm()
}

/// A point of the torus `ℂ/Λ` with a chosen representative.
#[derive(Debug, Clone, Copy)]
pub struct TorusPoint {
    pub z: Complex64,
    pub lattice: Lattice,
}

impl TorusPoint {
    pub fn new(lattice: Lattice, z: Complex64) -> Self {
        TorusPoint { z, lattice }
    }

    /// Representative in the fundamental parallelogram.
    pub fn canonical(&self) -> Complex64 {
        self.lattice.reduce(self.z).0
    }

    /// Whether both points agree modulo `Λ` up to the lattice tolerance.
    pub fn same_point(&self, other: &TorusPoint) -> bool {
        let tol = self.lattice.tolerance() * self.lattice.min_generator();
        self.lattice.dist_to_lattice(self.z - other.z) <= tol
    }
}

impl PartialEq for TorusPoint {
    fn eq(&self, other: &Self) -> bool {
        self.same_point(other)
    }
}
