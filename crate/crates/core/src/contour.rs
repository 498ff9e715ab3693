//! Quadrature on circles and straight segments.
//!
//! Laurent coefficients are extracted with the trapezoidal rule on a circle,
//! which converges geometrically for functions analytic in an annulus.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::Result;

/// Nodes per circle used for Laurent extraction.
pub const CONTOUR_NODES: usize = 64;

/// Laurent coefficients `c_k`, `k ∈ [k_min, k_max]`, about `center`.
#[derive(Debug, Clone)]
pub struct LaurentCoefficients {
    pub center: Complex64,
    pub radius: f64,
    pub k_min: i32,
    pub coeffs: Vec<Complex64>,
    /// Largest `|f|` seen on the circle.
    pub sup_on_circle: f64,
}

impl LaurentCoefficients {
    pub fn get(&self, k: i32) -> Complex64 {
        let idx = k - self.k_min;
        assert!(idx >= 0 && (idx as usize) < self.coeffs.len(), "coefficient {k} not extracted");
        self.coeffs[idx as usize]
    }

    /// Magnitude of the `k`-th mode on the circle, `|c_k| rᵏ`.
    pub fn mode_size(&self, k: i32) -> f64 {
        self.get(k).norm() * self.radius.powi(k)
    }

    /// Highest pole order `m ≤ -k_min` whose mode exceeds `rel · sup|f|`; 0 if none.
    pub fn pole_order(&self, rel: f64) -> u32 {
        let floor = rel * self.sup_on_circle;
        (1..=-self.k_min)
            .rev()
            .find(|&m| self.mode_size(-m) > floor)
            .map(|m| m as u32)
            .unwrap_or(0)
    }
}

/// `c_k = (1/M) Σⱼ f(zⱼ)(zⱼ − center)⁻ᵏ` on `M` equispaced nodes.
pub fn laurent_coefficients<F>(
    mut f: F,
    center: Complex64,
    radius: f64,
    nodes: usize,
    k_min: i32,
    k_max: i32,
) -> Result<LaurentCoefficients>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    let count = (k_max - k_min + 1).max(0) as usize;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); count];
    let mut sup: f64 = 0.0;
    for j in 0..nodes {
        let theta = 2.0 * PI * j as f64 / nodes as f64;
        let unit = Complex64::from_polar(1.0, theta);
        let value = f(center + radius * unit)?;
        sup = sup.max(value.norm());
        for (idx, c) in coeffs.iter_mut().enumerate() {
            let k = k_min + idx as i32;
            *c += value * unit.powi(-k) * radius.powi(-k);
        }
    }
    for c in coeffs.iter_mut() {
        *c /= nodes as f64;
    }
    Ok(LaurentCoefficients {
        center,
        radius,
        k_min,
        coeffs,
        sup_on_circle: sup,
    })
}

/// `∮ f dz` counter-clockwise around a circle (trapezoidal rule).
pub fn circle_integral<F>(f: F, center: Complex64, radius: f64, nodes: usize) -> Result<Complex64>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    let lc = laurent_coefficients(f, center, radius, nodes, -1, -1)?;
    Ok(2.0 * PI * Complex64::new(0.0, 1.0) * lc.get(-1))
}

const GL8: [(f64, f64); 4] = [
    (0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_5),
    (0.960_289_856_497_536_3, 0.101_228_536_290_376_3),
];

/// `∫ f dz` along the segment `a → b`, 8-point Gauss–Legendre on pieces of
/// length at most `max_piece`. The integrand is vector-valued.
pub fn segment_integral<const D: usize, F>(
    mut f: F,
    a: Complex64,
    b: Complex64,
    max_piece: f64,
) -> Result<[Complex64; D]>
where
    F: FnMut(Complex64) -> Result<[Complex64; D]>,
{
    let len = (b - a).norm();
    let pieces = ((len / max_piece).ceil() as usize).max(1);
    let step = (b - a) / pieces as f64;
    let mut acc = [Complex64::new(0.0, 0.0); D];
    for p in 0..pieces {
        let mid = a + step * (p as f64 + 0.5);
        let half = step / 2.0;
        for &(x, w) in GL8.iter() {
            for z in [mid + half * x, mid - half * x] {
                let v = f(z)?;
                for d in 0..D {
                    acc[d] += v[d] * half * w;
                }
            }
        }
    }
    Ok(acc)
}
