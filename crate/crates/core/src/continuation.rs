//! Continuation of sheets along paths in `α`, loop monodromy, and the
//! behaviour of the sheets as `α → 0`.
//!
//! Sheets are tracked in the shifted variable `c = μ + ζ(α)`, which is the
//! quantity entering the Floquet multipliers and stays bounded on all but one
//! sheet near `α = 0`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Result, SpectralError};
use crate::linalg::min_cost_assignment;
use crate::spectral_curve::{discriminant, sheets, PunctureSet};

/// Maximum number of step bisections before giving up.
pub const MAX_REFINEMENT: u32 = 16;

/// Start angle of loops and of the radial probe at `α = 0`. Generic, so that
/// the probe ray avoids accidental symmetries of the puncture set.
pub const DEFAULT_START_ANGLE: f64 = 0.3;

pub const DEFAULT_LOOP_SAMPLES: usize = 64;

/// Growth factor per radius halving that marks a pole sheet.
pub const POLE_GROWTH: f64 = 1.8;

/// Cauchy tolerance of the extrapolated limit on finite sheets.
pub const FINITE_TOLERANCE: f64 = 1e-4;

/// Sheet values along a path in `α`.
#[derive(Debug, Clone, PartialEq)]
pub struct SheetPath {
    pub alphas: Vec<Complex64>,
    /// `mu_tracks[i][k]` is sheet `i` at `alphas[k]`.
    pub mu_tracks: Vec<Vec<Complex64>>,
    /// Same tracks in `c = μ + ζ(α)`.
    pub c_tracks: Vec<Vec<Complex64>>,
    /// Largest matched step relative to half the distance from the new root
    /// to its nearest neighbour; below 1 on every accepted step.
    pub max_jump: f64,
    /// Number of samples inserted by bisection.
    pub refinements: usize,
}

impl SheetPath {
    pub fn sheet_count(&self) -> usize {
        self.c_tracks.len()
    }

    /// Values of every track at the last sample, in `c`.
    pub fn final_c(&self) -> Vec<Complex64> {
        self.c_tracks.iter().map(|t| *t.last().unwrap()).collect()
    }

    pub fn initial_c(&self) -> Vec<Complex64> {
        self.c_tracks.iter().map(|t| t[0]).collect()
    }
}

/// `μ + ζ(α)` on every sheet, in the order of [`sheets`].
pub fn shifted_sheets(ps: &PunctureSet, alpha: Complex64) -> Result<Vec<Complex64>> {
    let zeta = ps
        .lattice()
        .zeta(alpha)
        .map_err(|_| SpectralError::AlphaOnLattice { alpha })?;
    Ok(sheets(ps, alpha)?.into_iter().map(|mu| mu + zeta).collect())
}

struct Matched {
    values: Vec<Complex64>,
    worst: f64,
}

fn match_roots(prev: &[Complex64], next: &[Complex64]) -> Matched {
    let cost: Vec<Vec<f64>> = prev
        .iter()
        .map(|p| next.iter().map(|q| (p - q).norm()).collect())
        .collect();
    let assign = min_cost_assignment(&cost);
    let mut worst: f64 = 0.0;
    let values: Vec<Complex64> = assign.iter().map(|&j| next[j]).collect();
    for (i, &j) in assign.iter().enumerate() {
        let gap = next
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != j)
            .map(|(_, q)| (next[j] - q).norm())
            .fold(f64::INFINITY, f64::min);
        let step = (values[i] - prev[i]).norm();
        let ratio = if step == 0.0 { 0.0 } else { step / (gap / 2.0) };
        worst = worst.max(ratio);
    }
    Matched { values, worst }
}

struct Tracker<'a> {
    ps: &'a PunctureSet,
    alphas: Vec<Complex64>,
    c: Vec<Vec<Complex64>>,
    max_jump: f64,
    refinements: usize,
}

impl Tracker<'_> {
    fn push(&mut self, alpha: Complex64, values: Vec<Complex64>) {
        self.alphas.push(alpha);
        self.c.push(values);
    }

    fn advance(
        &mut self,
        from: Complex64,
        from_c: &[Complex64],
        to: Complex64,
        depth: u32,
    ) -> Result<Vec<Complex64>> {
        let next = shifted_sheets(self.ps, to)?;
        let m = match_roots(from_c, &next);
        if m.worst < 1.0 {
            self.max_jump = self.max_jump.max(m.worst);
            self.push(to, m.values.clone());
            return Ok(m.values);
        }
        if depth >= MAX_REFINEMENT {
            return Err(SpectralError::RefinementLimitExceeded {
                alpha: to,
                levels: MAX_REFINEMENT,
            });
        }
        let mid = (from + to) / 2.0;
        self.refinements += 1;
        let mid_c = self.advance(from, from_c, mid, depth + 1)?;
        self.advance(mid, &mid_c, to, depth + 1)
    }
}

/// Continues every sheet along the polyline through `path`.
///
/// Each step is matched by a minimal-total-distance assignment; a step is
/// bisected while some matched move exceeds half the distance from its target
/// root to the nearest other root.
pub fn track(ps: &PunctureSet, path: &[Complex64]) -> Result<SheetPath> {
    let lat = ps.lattice();
    for w in path.windows(2) {
        if lat.segment_dist_to_lattice(w[0], w[1]) < lat.pole_radius() {
            let hit = lat.nearest_lattice_point((w[0] + w[1]) / 2.0);
            return Err(SpectralError::PathThroughLattice { alpha: hit });
        }
    }
    if let Some(&a) = path.iter().find(|&&a| lat.is_lattice_point(a)) {
        return Err(SpectralError::PathThroughLattice { alpha: a });
    }
    let n = ps.len();
    let Some(&start) = path.first() else {
        return Ok(SheetPath {
            alphas: Vec::new(),
            mu_tracks: vec![Vec::new(); n],
            c_tracks: vec![Vec::new(); n],
            max_jump: 0.0,
            refinements: 0,
        });
    };

    let mut tr = Tracker {
        ps,
        alphas: Vec::with_capacity(path.len()),
        c: Vec::with_capacity(path.len()),
        max_jump: 0.0,
        refinements: 0,
    };
    let mut current = shifted_sheets(ps, start)?;
    tr.push(start, current.clone());
    for w in path.windows(2) {
        current = tr.advance(w[0], &current, w[1], 0)?;
    }

    let mut c_tracks = vec![Vec::with_capacity(tr.alphas.len()); n];
    let mut mu_tracks = vec![Vec::with_capacity(tr.alphas.len()); n];
    for (alpha, values) in tr.alphas.iter().zip(&tr.c) {
        let zeta = lat.zeta(*alpha)?;
        for i in 0..n {
            c_tracks[i].push(values[i]);
            mu_tracks[i].push(values[i] - zeta);
        }
    }
    Ok(SheetPath {
        alphas: tr.alphas,
        mu_tracks,
        c_tracks,
        max_jump: tr.max_jump,
        refinements: tr.refinements,
    })
}

/// A circle in the `α`-plane traversed from `center + radius·e^{i·start_angle}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopSpec {
    pub center: Complex64,
    pub radius: f64,
    pub samples: usize,
    pub start_angle: f64,
    pub clockwise: bool,
}

impl LoopSpec {
    pub fn circle(center: Complex64, radius: f64) -> Self {
        LoopSpec {
            center,
            radius,
            samples: DEFAULT_LOOP_SAMPLES,
            start_angle: DEFAULT_START_ANGLE,
            clockwise: false,
        }
    }

    /// The circle about `center` passing through `base`.
    pub fn through(center: Complex64, base: Complex64) -> Self {
        let d = base - center;
        LoopSpec {
            center,
            radius: d.norm(),
            samples: DEFAULT_LOOP_SAMPLES,
            start_angle: d.arg(),
            clockwise: false,
        }
    }

    pub fn reversed(mut self) -> Self {
        self.clockwise = !self.clockwise;
        self
    }

    pub fn base(&self) -> Complex64 {
        self.center + Complex64::from_polar(self.radius, self.start_angle)
    }

    /// Closed polyline; the last sample repeats the first exactly.
    pub fn path(&self) -> Vec<Complex64> {
        let dir = if self.clockwise { -1.0 } else { 1.0 };
        let m = self.samples.max(3);
        let mut pts: Vec<Complex64> = (0..m)
            .map(|k| {
                let t = self.start_angle + dir * 2.0 * PI * k as f64 / m as f64;
                self.center + Complex64::from_polar(self.radius, t)
            })
            .collect();
        pts.push(pts[0]);
        pts
    }
}

/// Sheet permutation produced by continuation around a closed path.
#[derive(Debug, Clone, PartialEq)]
pub struct Monodromy {
    pub base_alpha: Complex64,
    pub loop_spec: Option<LoopSpec>,
    /// Track starting on sheet `i` ends on sheet `permutation[i]`, sheets
    /// indexed in the order of [`sheets`] at the base point.
    pub permutation: Vec<usize>,
    pub path: SheetPath,
}

impl Monodromy {
    pub fn is_identity(&self) -> bool {
        self.permutation.iter().enumerate().all(|(i, &p)| i == p)
    }

    /// Cycle decomposition, each cycle starting at its smallest element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        permutation_cycles(&self.permutation)
    }
}

pub fn permutation_cycles(perm: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; perm.len()];
    let mut out = Vec::new();
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            cycle.push(i);
            i = perm[i];
        }
        out.push(cycle);
    }
    out
}

/// Monodromy of a closed polyline; the first and last samples must coincide.
pub fn closed_path_monodromy(ps: &PunctureSet, path: &[Complex64]) -> Result<Monodromy> {
    let first = *path.first().ok_or(SpectralError::InvalidPath("empty loop".into()))?;
    let last = *path.last().unwrap();
    let scale = ps.lattice().min_generator();
    if (first - last).norm() > 1e-12 * scale {
        return Err(SpectralError::InvalidPath("loop is not closed".into()));
    }
    let tracked = track(ps, path)?;
    let cost: Vec<Vec<f64>> = tracked
        .final_c()
        .iter()
        .map(|f| tracked.initial_c().iter().map(|s| (f - s).norm()).collect())
        .collect();
    let permutation = min_cost_assignment(&cost);
    Ok(Monodromy {
        base_alpha: first,
        loop_spec: None,
        permutation,
        path: tracked,
    })
}

pub fn loop_monodromy(ps: &PunctureSet, spec: &LoopSpec) -> Result<Monodromy> {
    let mut m = closed_path_monodromy(ps, &spec.path())?;
    m.loop_spec = Some(*spec);
    Ok(m)
}

/// Limit of `μ + ζ(α)` on a sheet as `α → 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SheetLimit {
    Pole,
    Finite { beta: Complex64 },
    Unclassified,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SheetClassification {
    pub sheet: usize,
    pub limit: SheetLimit,
    /// `μ + ζ(α)` at `α = ρₖ e^{iθ}` for the probe radii `ρₖ = r/2ᵏ`.
    pub probes: [Complex64; 4],
    pub radii: [f64; 4],
    /// Difference of the last two extrapolants.
    pub extrapolation_gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroMonodromy {
    pub monodromy: Monodromy,
    pub classifications: Vec<SheetClassification>,
    /// Number of radius halvings applied to clear branch points.
    pub shrinks: u32,
}

impl ZeroMonodromy {
    pub fn pole_count(&self) -> usize {
        self.classifications
            .iter()
            .filter(|c| c.limit == SheetLimit::Pole)
            .count()
    }

    pub fn finite_limits(&self) -> Vec<Complex64> {
        self.classifications
            .iter()
            .filter_map(|c| match c.limit {
                SheetLimit::Finite { beta } => Some(beta),
                _ => None,
            })
            .collect()
    }
}

pub fn default_zero_radius(ps: &PunctureSet) -> f64 {
    1e-2 * ps.lattice().min_generator()
}

const MAX_SHRINKS: u32 = 8;
const RADIAL_STEPS_PER_HALVING: usize = 8;

/// Loop around `α = 0` and classification of each sheet's limit.
///
/// The loop radius is halved while the loop encloses branch points (non-trivial
/// permutation) or the tracking fails.
pub fn monodromy_at_zero(ps: &PunctureSet, radius: Option<f64>) -> Result<ZeroMonodromy> {
    let mut r = radius.unwrap_or_else(|| default_zero_radius(ps));
    let mut shrinks = 0;
    loop {
        let spec = LoopSpec::circle(Complex64::new(0.0, 0.0), r);
        let attempt = loop_monodromy(ps, &spec);
        let retry = match &attempt {
            Ok(m) => !m.is_identity(),
            Err(SpectralError::RefinementLimitExceeded { .. }) => true,
            Err(_) => false,
        };
        if retry && shrinks < MAX_SHRINKS {
            r /= 2.0;
            shrinks += 1;
            continue;
        }
        let monodromy = attempt?;
        let classifications = classify_at_zero(ps, r, spec.start_angle)?;
        return Ok(ZeroMonodromy {
            monodromy,
            classifications,
            shrinks,
        });
    }
}

fn classify_at_zero(ps: &PunctureSet, r: f64, angle: f64) -> Result<Vec<SheetClassification>> {
    let steps = 3 * RADIAL_STEPS_PER_HALVING;
    let ray: Vec<Complex64> = (0..=steps)
        .map(|k| {
            let rho = r * 2f64.powf(-(k as f64) / RADIAL_STEPS_PER_HALVING as f64);
            Complex64::from_polar(rho, angle)
        })
        .collect();
    let tracked = track(ps, &ray)?;
    // Bisection may insert samples; locate the probe radii by value.
    let radii = [r, r / 2.0, r / 4.0, r / 8.0];
    let probe_index: Vec<usize> = (0..4)
        .map(|k| {
            let target = ray[k * RADIAL_STEPS_PER_HALVING];
            tracked.alphas.iter().position(|a| *a == target).unwrap()
        })
        .collect();

    Ok((0..ps.len())
        .map(|i| {
            let t = &tracked.c_tracks[i];
            let probes = [
                t[probe_index[0]],
                t[probe_index[1]],
                t[probe_index[2]],
                t[probe_index[3]],
            ];
            let (limit, gap) = classify_sequence(&probes);
            SheetClassification {
                sheet: i,
                limit,
                probes,
                radii,
                extrapolation_gap: gap,
            }
        })
        .collect())
}

/// Classifies values sampled at radii `r, r/2, r/4, r/8`.
pub fn classify_sequence(t0: &[Complex64; 4]) -> (SheetLimit, f64) {
    let grows = (0..3).all(|k| t0[k + 1].norm() >= POLE_GROWTH * t0[k].norm());
    let t1: Vec<Complex64> = (0..3).map(|k| 2.0 * t0[k + 1] - t0[k]).collect();
    let t2: Vec<Complex64> = (0..2).map(|k| (4.0 * t1[k + 1] - t1[k]) / 3.0).collect();
    let t3 = (8.0 * t2[1] - t2[0]) / 7.0;
    let gap = (t3 - t2[1]).norm();
    if grows {
        (SheetLimit::Pole, gap)
    } else if gap <= FINITE_TOLERANCE * t3.norm().max(1.0) {
        (SheetLimit::Finite { beta: t3 }, gap)
    } else {
        (SheetLimit::Unclassified, gap)
    }
}

/// Candidate branch point of the covering.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchPoint {
    pub alpha: Complex64,
    /// `|discriminant|` at the refined location.
    pub discriminant: f64,
    pub converged: bool,
}

/// Square window of the `α`-plane sampled on an `n × n` grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchSearch {
    pub center: Complex64,
    pub half_width: f64,
    pub n: usize,
}

/// Local minima of `|discriminant|` on a grid, refined by Newton's method.
/// Diagnostic only: nothing guarantees every branch point is found.
pub fn locate_branch_points(ps: &PunctureSet, search: &BranchSearch) -> Result<Vec<BranchPoint>> {
    let lat = ps.lattice();
    let n = search.n.max(3);
    let h = 2.0 * search.half_width / (n - 1) as f64;
    let corner = search.center - Complex64::new(search.half_width, search.half_width);
    let node = |i: usize, j: usize| corner + Complex64::new(i as f64 * h, j as f64 * h);

    let mut values = vec![f64::NAN; n * n];
    for j in 0..n {
        for i in 0..n {
            if let Ok(d) = discriminant(ps, node(i, j)) {
                values[j * n + i] = d.norm();
            }
        }
    }

    let mut found: Vec<BranchPoint> = Vec::new();
    for j in 1..n - 1 {
        for i in 1..n - 1 {
            let v = values[j * n + i];
            if !v.is_finite() {
                continue;
            }
            let is_min = (-1i64..=1).all(|dj| {
                (-1i64..=1).all(|di| {
                    if di == 0 && dj == 0 {
                        return true;
                    }
                    let w = values[(j as i64 + dj) as usize * n + (i as i64 + di) as usize];
                    !w.is_finite() || v < w
                })
            });
            if !is_min {
                continue;
            }
            let bp = refine_branch_point(ps, node(i, j), h)?;
            if (bp.alpha - node(i, j)).norm() > 2.0 * h {
                continue;
            }
            let dup = found
                .iter()
                .any(|f| lat.dist_to_lattice(f.alpha - bp.alpha) < 1e-6 * lat.min_generator());
            if !dup {
                found.push(bp);
            }
        }
    }
    Ok(found)
}

fn refine_branch_point(ps: &PunctureSet, start: Complex64, cell: f64) -> Result<BranchPoint> {
    let lat = ps.lattice();
    let disc = |a: Complex64| discriminant(ps, a);
    let step_h = 1e-6 * cell;
    let mut alpha = start;
    let mut converged = false;
    for _ in 0..40 {
        let d = disc(alpha)?;
        if d.norm() == 0.0 {
            converged = true;
            break;
        }
        let hh = Complex64::new(step_h, 0.0);
        let dd = (disc(alpha + hh)? - disc(alpha - hh)?) / (2.0 * hh);
        if dd.norm() == 0.0 {
            break;
        }
        let step = d / dd;
        alpha -= step;
        if step.norm() < 1e-13 * lat.min_generator() {
            converged = true;
            break;
        }
        if (alpha - start).norm() > 4.0 * cell {
            break;
        }
    }
    Ok(BranchPoint {
        alpha,
        discriminant: disc(alpha)?.norm(),
        converged,
    })
}
