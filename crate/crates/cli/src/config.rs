use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use spectral_core::elliptic::{Lattice, DEFAULT_TOLERANCE};
use spectral_core::spectral_curve::PunctureSet;

use crate::CliError;

pub type Pair = [f64; 2];

pub fn cx(p: Pair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub lattice: LatticeSpec,
    #[serde(default)]
    pub punctures: Option<Vec<Pair>>,
    #[serde(default)]
    pub random_punctures: Option<RandomPunctures>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub eval: Option<EvalSpec>,
    #[serde(default)]
    pub monodromy: MonodromySpec,
    #[serde(default)]
    pub verify: VerifySpec,
    #[serde(default)]
    pub surface: Option<SurfaceSpec>,
}

fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    pub e1: Pair,
    pub e2: Pair,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomPunctures {
    pub count: usize,
    /// Minimum pairwise distance, relative to the shorter generator.
    #[serde(default = "default_separation")]
    pub min_separation: f64,
}

fn default_separation() -> f64 {
    0.05
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum GridConfig {
    Rect {
        origin: Pair,
        du: Pair,
        dv: Pair,
        nu: usize,
        nv: usize,
    },
    Path {
        points: Vec<Pair>,
        #[serde(default = "default_per_segment")]
        samples_per_segment: usize,
    },
    Loop {
        center: Pair,
        radius: f64,
        #[serde(default = "default_loop_samples")]
        samples: usize,
    },
}

fn default_per_segment() -> usize {
    16
}

fn default_loop_samples() -> usize {
    64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub format: Format,
    #[serde(default)]
    pub path: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Function {
    Sigma,
    Zeta,
    P,
    Phi,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalSpec {
    pub function: Function,
    pub points: Vec<Pair>,
    #[serde(default)]
    pub alpha: Option<Pair>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoopConfig {
    pub center: Pair,
    pub radius: f64,
    #[serde(default = "default_loop_samples")]
    pub samples: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchWindow {
    pub center: Pair,
    pub half_width: f64,
    #[serde(default = "default_branch_n")]
    pub n: usize,
}

fn default_branch_n() -> usize {
    24
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct MonodromySpec {
    /// Radius of the loop around `α = 0`; defaults to `1e-2·min|e|`.
    #[serde(default)]
    pub radius: Option<f64>,
    #[serde(default)]
    pub loops: Vec<LoopConfig>,
    #[serde(default)]
    pub branch_search: Option<BranchWindow>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySpec {
    /// Number of random spectral parameters checked through the full pipeline.
    #[serde(default = "default_alphas")]
    pub alphas: usize,
    /// Added to every `μ` before building eigenfunctions; nonzero values must
    /// make the suite fail.
    #[serde(default)]
    pub inject_mu_offset: f64,
}

fn default_alphas() -> usize {
    5
}

impl Default for VerifySpec {
    fn default() -> Self {
        VerifySpec {
            alphas: default_alphas(),
            inject_mu_offset: 0.0,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SpinorSpec {
    Floquet {
        alpha: Pair,
        #[serde(default)]
        sheet: usize,
        #[serde(default)]
        mu_offset: f64,
    },
    Beta {
        #[serde(default)]
        root: usize,
    },
    Zero,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceGrid {
    pub origin: Pair,
    pub du: Pair,
    pub dv: Pair,
    pub nu: usize,
    pub nv: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceSpec {
    pub spinors: [SpinorSpec; 2],
    pub grid: SurfaceGrid,
    pub basepoint: Pair,
    #[serde(default)]
    pub base_value: [f64; 3],
}

impl JobConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn lattice(&self) -> Result<Lattice, CliError> {
        Lattice::new(cx(self.lattice.e1), cx(self.lattice.e2), self.tolerance)
            .map_err(|e| CliError::Config(format!("lattice: {e}")))
    }

    /// Explicit punctures, or seeded random ones when `random_punctures` is set.
    pub fn punctures(&self, lattice: Lattice) -> Result<PunctureSet, CliError> {
        let points = match (&self.punctures, &self.random_punctures) {
            (Some(p), None) => p.iter().copied().map(cx).collect(),
            (None, Some(r)) => random_points(&lattice, r, self.seed)?,
            (Some(_), Some(_)) => {
                return Err(CliError::Config(
                    "punctures and random_punctures are mutually exclusive".into(),
                ))
            }
            (None, None) => return Err(CliError::Config("punctures: missing field".into())),
        };
        PunctureSet::new(lattice, points).map_err(|e| CliError::Config(format!("punctures: {e}")))
    }

    pub fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

fn random_points(lat: &Lattice, spec: &RandomPunctures, seed: u64) -> Result<Vec<Complex64>, CliError> {
    if spec.count == 0 {
        return Err(CliError::Config("random_punctures.count must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sep = spec.min_separation * lat.min_generator();
    let mut pts: Vec<Complex64> = Vec::with_capacity(spec.count);
    let mut attempts = 0;
    while pts.len() < spec.count {
        attempts += 1;
        if attempts > 100_000 {
            return Err(CliError::Config(
                "random_punctures: cannot place points at the requested separation".into(),
            ));
        }
        let z = lat.e1() * rng.gen_range(0.0..1.0) + lat.e2() * rng.gen_range(0.0..1.0);
        if pts.iter().all(|p| lat.dist_to_lattice(z - p) >= sep) {
            pts.push(z);
        }
    }
    Ok(pts)
}

/// Spectral parameters described by a grid.
pub fn grid_alphas(grid: &GridConfig) -> Result<Vec<Complex64>, CliError> {
    match grid {
        GridConfig::Rect { origin, du, dv, nu, nv } => {
            let (o, du, dv) = (cx(*origin), cx(*du), cx(*dv));
            Ok((0..*nv)
                .flat_map(|j| (0..*nu).map(move |i| o + du * i as f64 + dv * j as f64))
                .collect())
        }
        GridConfig::Path { points, samples_per_segment } => {
            if points.is_empty() {
                return Err(CliError::Config("grid.points must not be empty".into()));
            }
            let m = (*samples_per_segment).max(1);
            let mut out = vec![cx(points[0])];
            for w in points.windows(2) {
                let (a, b) = (cx(w[0]), cx(w[1]));
                out.extend((1..=m).map(|k| a + (b - a) * (k as f64 / m as f64)));
            }
            Ok(out)
        }
        GridConfig::Loop { center, radius, samples } => {
            let spec = spectral_core::continuation::LoopSpec {
                samples: *samples,
                ..spectral_core::continuation::LoopSpec::circle(cx(*center), *radius)
            };
            Ok(spec.path())
        }
    }
}
