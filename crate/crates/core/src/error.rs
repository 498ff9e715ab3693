use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("degenerate lattice: e1 = {e1}, e2 = {e2} are linearly dependent over R")]
    DegenerateLattice { e1: Complex64, e2: Complex64 },

    #[error("tolerance {0} outside (0, 1e-4]")]
    BadTolerance(f64),

    #[error("quasi-period check failed: |eta1 e2 - eta2 e1 - 2 pi i| = {defect:e}")]
    LegendreViolation { defect: f64 },

    #[error("evaluation point {z} lies on the period lattice")]
    PoleAtLatticePoint { z: Complex64 },

    #[error("spectral parameter alpha = {alpha} lies on the period lattice")]
    AlphaOnLattice { alpha: Complex64 },

    #[error("invalid puncture set: {0}")]
    InvalidPunctures(String),

    #[error("point (alpha = {alpha}, mu = {mu}) is not on the spectral curve (residual {residual:e})")]
    NotOnCurve {
        alpha: Complex64,
        mu: Complex64,
        residual: f64,
    },

    #[error("multipliers are zero or non-finite")]
    InvalidMultipliers,

    #[error("multipliers are of the exceptional form (exp(beta e1), exp(beta e2))")]
    DegenerateMultipliers,

    #[error("no logarithm branch reproduces both multipliers")]
    NoConsistentBranch,

    #[error("evaluation point {z} hits puncture {index}")]
    PoleAtPuncture { z: Complex64, index: usize },

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("path sample {alpha} lies on the period lattice")]
    PathThroughLattice { alpha: Complex64 },

    #[error("sheet matching still ambiguous after {levels} bisections near alpha = {alpha}")]
    RefinementLimitExceeded { alpha: Complex64, levels: u32 },

    #[error("leading coefficient {leading:e} of the beta polynomial is numerically zero")]
    DegenerateLeadingCoefficient { leading: f64 },

    #[error("integration path cannot avoid the punctures: {0}")]
    PathThroughPuncture(String),

    #[error("spinor components do not share lattice and punctures")]
    IncompatibleSpinors,

    #[error("index {index} out of range for {len} entries")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("linear algebra failure: {0}")]
    Linalg(&'static str),
}

pub type Result<T> = std::result::Result<T, SpectralError>;

impl SpectralError {
    /// Variant name, stable across releases; used in tabular output.
    pub fn kind(&self) -> &'static str {
        use SpectralError::*;
        match self {
            DegenerateLattice { .. } => "DegenerateLattice",
            BadTolerance(_) => "BadTolerance",
            LegendreViolation { .. } => "LegendreViolation",
            PoleAtLatticePoint { .. } => "PoleAtLatticePoint",
            AlphaOnLattice { .. } => "AlphaOnLattice",
            InvalidPunctures(_) => "InvalidPunctures",
            NotOnCurve { .. } => "NotOnCurve",
            InvalidMultipliers => "InvalidMultipliers",
            DegenerateMultipliers => "DegenerateMultipliers",
            NoConsistentBranch => "NoConsistentBranch",
            PoleAtPuncture { .. } => "PoleAtPuncture",
            InvalidPath(_) => "InvalidPath",
            PathThroughLattice { .. } => "PathThroughLattice",
            RefinementLimitExceeded { .. } => "RefinementLimitExceeded",
            DegenerateLeadingCoefficient { .. } => "DegenerateLeadingCoefficient",
            PathThroughPuncture(_) => "PathThroughPuncture",
            IncompatibleSpinors => "IncompatibleSpinors",
            IndexOutOfRange { .. } => "IndexOutOfRange",
            Linalg(_) => "Linalg",
        }
    }
}
