//! Weierstrass data of a pair of solutions and the surface they integrate to.
//!
//! With vanishing potential the spinor components `ψ₁` and `ψ̄₂` are both
//! holomorphic solutions of the boundary problem, so `SpinorPair` holds them
//! as two eigenfunctions and `psi2` stands for `ψ̄₂` itself. Then
//!
//! ```text
//! x¹_z = (i/2)(ψ̄₂² + ψ₁²),  x²_z = (1/2)(ψ̄₂² − ψ₁²),  x³_z = ψ₁ψ̄₂
//! ```
//!
//! and `x = x(z₀) + 2 Re ∫ x_z dz`.

use std::collections::VecDeque;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::contour::{laurent_coefficients, segment_integral, CONTOUR_NODES};
use crate::eigenfunction::Eigenfunction;
use crate::error::{Result, SpectralError};
use crate::spectral_curve::PunctureSet;

/// Residue bound, relative to the order-two coefficient, for a planar end.
pub const PLANAR_RESIDUE_TOLERANCE: f64 = 1e-6;

/// Laurent modes below this fraction of `sup|f|` on the circle are noise.
pub const POLE_MODE_FLOOR: f64 = 1e-9;

/// Grid samples closer than this many pole radii to a puncture are dropped.
pub const MARGIN_FACTOR: f64 = 10.0;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone)]
pub struct SpinorPair {
    pub psi1: Eigenfunction,
    pub psi2: Eigenfunction,
}

impl SpinorPair {
    pub fn new(psi1: Eigenfunction, psi2: Eigenfunction) -> Result<Self> {
        if psi1.punctures() != psi2.punctures() {
            return Err(SpectralError::IncompatibleSpinors);
        }
        Ok(SpinorPair { psi1, psi2 })
    }

    pub fn punctures(&self) -> &PunctureSet {
        self.psi1.punctures()
    }

    pub fn is_zero(&self) -> bool {
        self.psi1.is_zero() && self.psi2.is_zero()
    }
}

/// `(x¹_z, x²_z, x³_z)` from the values of `ψ₁` and `ψ̄₂`.
pub fn integrands_from(psi1: Complex64, psi2bar: Complex64) -> [Complex64; 3] {
    let a = psi2bar * psi2bar;
    let b = psi1 * psi1;
    [0.5 * I * (a + b), 0.5 * (a - b), psi1 * psi2bar]
}

pub fn integrands(sp: &SpinorPair, z: Complex64) -> Result<[Complex64; 3]> {
    Ok(integrands_from(sp.psi1.eval(z)?, sp.psi2.eval(z)?))
}

/// Laurent data of the three integrands at one puncture.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarEndReport {
    pub puncture: usize,
    /// Highest pole order among the three integrands.
    pub pole_order: u32,
    /// Coefficients of `(z − p)⁻¹`.
    pub residues: [Complex64; 3],
    /// Coefficients of `(z − p)⁻²`.
    pub leading: [Complex64; 3],
    /// `max|residue| / max|leading|`; infinite when there is no double pole.
    pub residue_ratio: f64,
    pub pass: bool,
}

/// Planar-end test at `p_l`: double poles with residues at most
/// [`PLANAR_RESIDUE_TOLERANCE`] times the order-two coefficient.
pub fn check_planar_end(sp: &SpinorPair, l: usize) -> Result<PlanarEndReport> {
    let ps = sp.punctures();
    let p = *ps
        .points()
        .get(l)
        .ok_or(SpectralError::IndexOutOfRange { index: l, len: ps.len() })?;
    let r = ps.contour_radius();
    let mut pole_order = 0;
    let mut residues = [Complex64::new(0.0, 0.0); 3];
    let mut leading = residues;
    for k in 0..3 {
        let lc = laurent_coefficients(
            |z| Ok(integrands(sp, z)?[k]),
            p,
            r,
            CONTOUR_NODES,
            -4,
            0,
        )?;
        pole_order = pole_order.max(lc.pole_order(POLE_MODE_FLOOR));
        residues[k] = lc.get(-1);
        leading[k] = lc.get(-2);
    }
    let res_max = residues.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let lead_max = leading.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let residue_ratio = if lead_max > 0.0 { res_max / lead_max } else { f64::INFINITY };
    let pass = pole_order == 2 && residue_ratio <= PLANAR_RESIDUE_TOLERANCE;
    Ok(PlanarEndReport {
        puncture: l,
        pole_order,
        residues,
        leading,
        residue_ratio,
        pass,
    })
}

/// Rectangular grid `origin + i·du + j·dv`, `0 ≤ i < nu`, `0 ≤ j < nv`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub origin: Complex64,
    pub du: Complex64,
    pub dv: Complex64,
    pub nu: usize,
    pub nv: usize,
}

impl GridSpec {
    pub fn node(&self, i: usize, j: usize) -> Complex64 {
        self.origin + self.du * i as f64 + self.dv * j as f64
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nu + i
    }

    pub fn len(&self) -> usize {
        self.nu * self.nv
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceSample {
    pub grid: GridSpec,
    pub basepoint: Complex64,
    pub base_value: [f64; 3],
    /// Node positions, row-major in `(j, i)`.
    pub z: Vec<Complex64>,
    /// `None` for nodes that were dropped or could not be reached.
    pub xyz: Vec<Option<[f64; 3]>>,
    /// Nodes dropped because they sit too close to a puncture.
    pub dropped: Vec<usize>,
    /// Retained nodes not connected to the basepoint by admissible edges.
    pub unreachable: Vec<usize>,
}

fn clearance(ps: &PunctureSet, a: Complex64, b: Complex64) -> f64 {
    let lat = ps.lattice();
    ps.points()
        .iter()
        .map(|p| lat.segment_dist_to_lattice(a - p, b - p))
        .fold(f64::INFINITY, f64::min)
}

fn piece_length(ps: &PunctureSet) -> f64 {
    ps.lattice().min_generator() / 64.0
}

/// `2 Re ∫_a^b x_z dz` along the straight segment.
pub fn segment_displacement(sp: &SpinorPair, a: Complex64, b: Complex64) -> Result<[f64; 3]> {
    if sp.is_zero() {
        return Ok([0.0; 3]);
    }
    let v = segment_integral(|z| integrands(sp, z), a, b, piece_length(sp.punctures()))?;
    Ok([2.0 * v[0].re, 2.0 * v[1].re, 2.0 * v[2].re])
}

fn add(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// Integrates the surface over the grid, starting from `x(basepoint) = base_value`.
///
/// The basepoint is joined by a segment to the nearest admissible node and the
/// rest of the grid is reached through grid edges that keep the margin from
/// every puncture.
pub fn integrate_surface(
    sp: &SpinorPair,
    grid: &GridSpec,
    basepoint: Complex64,
    base_value: [f64; 3],
) -> Result<SurfaceSample> {
    let ps = sp.punctures();
    let margin = MARGIN_FACTOR * ps.lattice().pole_radius();
    let count = grid.len();
    let z: Vec<Complex64> = (0..grid.nv)
        .flat_map(|j| (0..grid.nu).map(move |i| (i, j)))
        .map(|(i, j)| grid.node(i, j))
        .collect();
    let keep: Vec<bool> = z.iter().map(|&w| ps.nearest(w).1 >= margin).collect();
    let dropped: Vec<usize> = (0..count).filter(|&k| !keep[k]).collect();

    if ps.nearest(basepoint).1 < margin {
        return Err(SpectralError::PathThroughPuncture(format!(
            "basepoint {basepoint} is within the margin of a puncture"
        )));
    }

    let mut xyz: Vec<Option<[f64; 3]>> = vec![None; count];
    if count == 0 {
        return Ok(SurfaceSample {
            grid: *grid,
            basepoint,
            base_value,
            z,
            xyz,
            dropped,
            unreachable: Vec::new(),
        });
    }

    // Edges: (from, to) for right and up neighbours, both retained and clear.
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for j in 0..grid.nv {
        for i in 0..grid.nu {
            let k = grid.index(i, j);
            if i + 1 < grid.nu {
                edges.push((k, grid.index(i + 1, j)));
            }
            if j + 1 < grid.nv {
                edges.push((k, grid.index(i, j + 1)));
            }
        }
    }
    let edge_values: Vec<Option<[f64; 3]>> = edges
        .par_iter()
        .map(|&(a, b)| {
            if !keep[a] || !keep[b] || clearance(ps, z[a], z[b]) < margin {
                return Ok(None);
            }
            segment_displacement(sp, z[a], z[b]).map(Some)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut adjacency: Vec<Vec<(usize, [f64; 3], bool)>> = vec![Vec::new(); count];
    for (&(a, b), v) in edges.iter().zip(&edge_values) {
        if let Some(d) = v {
            adjacency[a].push((b, *d, true));
            adjacency[b].push((a, *d, false));
        }
    }

    let start = (0..count)
        .filter(|&k| keep[k] && clearance(ps, basepoint, z[k]) >= margin)
        .min_by(|&a, &b| {
            (z[a] - basepoint)
                .norm()
                .total_cmp(&(z[b] - basepoint).norm())
                .then(a.cmp(&b))
        })
        .ok_or_else(|| {
            SpectralError::PathThroughPuncture(
                "no grid node can be joined to the basepoint".into(),
            )
        })?;
    xyz[start] = Some(add(base_value, segment_displacement(sp, basepoint, z[start])?));

    let mut queue = VecDeque::from([start]);
    while let Some(k) = queue.pop_front() {
        let here = xyz[k].unwrap();
        for &(next, d, forward) in &adjacency[k] {
            if xyz[next].is_none() {
                xyz[next] = Some(if forward { add(here, d) } else { sub(here, d) });
                queue.push_back(next);
            }
        }
    }
    let unreachable = (0..count).filter(|&k| keep[k] && xyz[k].is_none()).collect();
    Ok(SurfaceSample {
        grid: *grid,
        basepoint,
        base_value,
        z,
        xyz,
        dropped,
        unreachable,
    })
}

/// `2 Re ∮ x_z dz` around a circle, the translational period of the loop.
pub fn loop_period(sp: &SpinorPair, center: Complex64, radius: f64) -> Result<[f64; 3]> {
    let mut out = [0.0; 3];
    for (k, slot) in out.iter_mut().enumerate() {
        let lc = laurent_coefficients(
            |z| Ok(integrands(sp, z)?[k]),
            center,
            radius,
            CONTOUR_NODES,
            -1,
            -1,
        )?;
        *slot = 2.0 * (2.0 * std::f64::consts::PI * I * lc.get(-1)).re;
    }
    Ok(out)
}

/// `2 Re` of the integral along a closed polyline.
pub fn polyline_period(sp: &SpinorPair, vertices: &[Complex64]) -> Result<[f64; 3]> {
    let mut acc = [0.0; 3];
    for w in vertices.windows(2) {
        acc = add(acc, segment_displacement(sp, w[0], w[1])?);
    }
    Ok(acc)
}
