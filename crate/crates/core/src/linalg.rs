//! Dense complex linear algebra used by the curve and β modules.

use nalgebra::{DMatrix, Schur, SVD};
use num_complex::Complex64;

use crate::error::{Result, SpectralError};

pub type CMatrix = DMatrix<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Maximum absolute row sum.
pub fn inf_norm(m: &CMatrix) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|x| x.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Eigenvalues of a square complex matrix, read off the complex Schur form.
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<Complex64>> {
    let n = m.nrows();
    match n {
        0 => return Ok(Vec::new()),
        1 => return Ok(vec![m[(0, 0)]]),
        _ => {}
    }
    let schur = Schur::try_new(m.clone(), f64::EPSILON, 10_000)
        .ok_or(SpectralError::Linalg("Schur iteration did not converge"))?;
    let (_, t) = schur.unpack();
    Ok((0..n).map(|i| t[(i, i)]).collect())
}

/// Coefficients `c₁ … c_N` of `det(λI − C) = λᴺ + c₁λᴺ⁻¹ + … + c_N`
/// via the Faddeev–LeVerrier trace recursion.
pub fn faddeev_leverrier(c: &CMatrix) -> Vec<Complex64> {
    let n = c.nrows();
    let mut coeffs = Vec::with_capacity(n);
    let mut mk = CMatrix::zeros(n, n);
    let mut prev = Complex64::new(1.0, 0.0);
    for k in 1..=n {
        // M_k = C M_{k−1} + c_{k−1} I
        mk = c * &mk;
        for i in 0..n {
            mk[(i, i)] += prev;
        }
        let cm = c * &mk;
        let ck = -cm.trace() / k as f64;
        coeffs.push(ck);
        prev = ck;
    }
    coeffs
}

/// Value and derivative of the monic polynomial `xᴺ + q₁xᴺ⁻¹ + … + q_N`.
pub fn eval_monic(q: &[Complex64], x: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(1.0, 0.0);
    let mut dp = ZERO;
    for &qk in q {
        dp = dp * x + p;
        p = p * x + qk;
    }
    (p, dp)
}

/// Value and derivative of `Σ cₖ xᵏ` with coefficients in ascending order.
pub fn eval_ascending(coeffs: &[Complex64], x: Complex64) -> (Complex64, Complex64) {
    let mut p = ZERO;
    let mut dp = ZERO;
    for &c in coeffs.iter().rev() {
        dp = dp * x + p;
        p = p * x + c;
    }
    (p, dp)
}

/// Newton steps on `f`, keeping a step only while it lowers `|f|`.
pub fn newton_polish<F>(f: F, mut x: Complex64, steps: usize) -> Complex64
where
    F: Fn(Complex64) -> (Complex64, Complex64),
{
    let (mut fx, mut dfx) = f(x);
    for _ in 0..steps {
        if dfx.norm() == 0.0 || fx.norm() == 0.0 {
            break;
        }
        let cand = x - fx / dfx;
        let (fc, dfc) = f(cand);
        if !(fc.norm() < fx.norm()) {
            break;
        }
        x = cand;
        fx = fc;
        dfx = dfc;
    }
    x
}

/// Roots of `Σ cₖ xᵏ` (ascending, nonzero leading term) from the companion
/// matrix, each refined by Newton steps.
pub fn companion_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let deg = coeffs.len().saturating_sub(1);
    if deg == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[deg];
    let mut comp = CMatrix::zeros(deg, deg);
    for i in 1..deg {
        comp[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..deg {
        comp[(i, deg - 1)] = -coeffs[i] / lead;
    }
    let roots = eigenvalues(&comp)?;
    Ok(roots
        .into_iter()
        .map(|r| newton_polish(|x| eval_ascending(coeffs, x), r, 3))
        .collect())
}

/// Discriminant `Π_{i<j} (xᵢ − xⱼ)²` of the monic `xᴺ + q₁xᴺ⁻¹ + … + q_N`,
/// from the Sylvester resultant of the polynomial and its derivative.
pub fn discriminant_monic(q: &[Complex64]) -> Complex64 {
    let n = q.len();
    if n <= 1 {
        return Complex64::new(1.0, 0.0);
    }
    let mut p = vec![Complex64::new(1.0, 0.0)];
    p.extend_from_slice(q);
    let dp: Vec<Complex64> = (0..n).map(|k| p[k] * (n - k) as f64).collect();
    let size = 2 * n - 1;
    let mut syl = CMatrix::zeros(size, size);
    for r in 0..n - 1 {
        for (k, &c) in p.iter().enumerate() {
            syl[(r, r + k)] = c;
        }
    }
    for r in 0..n {
        for (k, &c) in dp.iter().enumerate() {
            syl[(n - 1 + r, r + k)] = c;
        }
    }
    let sign = if (n * (n - 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
    syl.determinant() * sign
}

/// Best null direction of a square matrix.
#[derive(Debug, Clone)]
pub struct NullDirection {
    /// Unit right-singular vector of the smallest singular value.
    pub vector: Vec<Complex64>,
    /// Singular values in descending order.
    pub singular_values: Vec<f64>,
}

impl NullDirection {
    pub fn smallest(&self) -> f64 {
        self.singular_values.last().copied().unwrap_or(0.0)
    }

    /// Number of singular values at or below `threshold`.
    pub fn nullity(&self, threshold: f64) -> usize {
        self.singular_values.iter().filter(|&&s| s <= threshold).count()
    }
}

pub fn null_direction(m: &CMatrix) -> Result<NullDirection> {
    let n = m.ncols();
    if n == 0 {
        return Err(SpectralError::Linalg("empty matrix"));
    }
    let svd = SVD::try_new(m.clone(), false, true, f64::EPSILON, 10_000)
        .ok_or(SpectralError::Linalg("SVD did not converge"))?;
    let v_t = svd.v_t.ok_or(SpectralError::Linalg("SVD without V"))?;
    let (idx, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |best, (i, &s)| if s < best.1 { (i, s) } else { best });
    // A = U Σ Vᴴ, so the right singular vector is the conjugated row of Vᴴ.
    let vector = (0..n).map(|j| v_t[(idx, j)].conj()).collect();
    let mut singular_values: Vec<f64> = svd.singular_values.iter().copied().collect();
    singular_values.sort_by(|a, b| b.total_cmp(a));
    Ok(NullDirection {
        vector,
        singular_values,
    })
}

/// Scales `v` to sup-norm 1 and rotates the phase so that the first entry of
/// modulus at least 1/2 is real and positive. A zero vector is left alone.
pub fn normalize_sup(v: &mut [Complex64]) {
    let sup = v.iter().map(|x| x.norm()).fold(0.0, f64::max);
    if sup == 0.0 {
        return;
    }
    for x in v.iter_mut() {
        *x /= sup;
    }
    if let Some(lead) = v.iter().find(|x| x.norm() >= 0.5).copied() {
        let phase = lead.conj() / lead.norm();
        for x in v.iter_mut() {
            *x *= phase;
        }
    }
}

pub fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub fn mat_vec(m: &CMatrix, v: &[Complex64]) -> Vec<Complex64> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)] * v[j]).sum())
        .collect()
}

/// Minimum-cost perfect matching on a square cost matrix (Hungarian method).
/// Returns `assign[row] = column`.
pub fn min_cost_assignment(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assign = vec![0; n];
    for j in 1..=n {
        assign[p[j] - 1] = j - 1;
    }
    assign
}
