//! Evaluators for solutions of `∂̄ψ = 0` with Floquet multipliers and simple
//! poles at the punctures.

use num_complex::Complex64;

use crate::baker_akhiezer::PhiEvaluator;
use crate::contour::{laurent_coefficients, LaurentCoefficients, CONTOUR_NODES};
use crate::elliptic::Lattice;
use crate::error::{Result, SpectralError};
use crate::spectral_curve::PunctureSet;

#[derive(Debug, Clone)]
pub enum EigenKind {
    /// `exp(μz) Σ a_l Φ(z − p_l, α)`.
    Floquet {
        phi: PhiEvaluator,
        mu: Complex64,
        a: Vec<Complex64>,
    },
    /// `exp(βz)(a₀ + Σ a_l ζ(z − p_l))` with `Σ a_l = 0`.
    Degenerate {
        beta: Complex64,
        a0: Complex64,
        a: Vec<Complex64>,
    },
    Zero,
}

#[derive(Debug, Clone)]
pub struct Eigenfunction {
    punctures: PunctureSet,
    kind: EigenKind,
}

impl Eigenfunction {
    pub fn floquet(
        punctures: PunctureSet,
        alpha: Complex64,
        mu: Complex64,
        a: Vec<Complex64>,
    ) -> Result<Self> {
        check_len(&punctures, &a)?;
        let phi = PhiEvaluator::new(*punctures.lattice(), alpha)?;
        Ok(Eigenfunction {
            punctures,
            kind: EigenKind::Floquet { phi, mu, a },
        })
    }

    pub fn degenerate(
        punctures: PunctureSet,
        beta: Complex64,
        a0: Complex64,
        a: Vec<Complex64>,
    ) -> Result<Self> {
        check_len(&punctures, &a)?;
        Ok(Eigenfunction {
            punctures,
            kind: EigenKind::Degenerate { beta, a0, a },
        })
    }

    pub fn zero(punctures: PunctureSet) -> Self {
        Eigenfunction {
            punctures,
            kind: EigenKind::Zero,
        }
    }

    pub fn kind(&self) -> &EigenKind {
        &self.kind
    }

    pub fn punctures(&self) -> &PunctureSet {
        &self.punctures
    }

    pub fn lattice(&self) -> &Lattice {
        self.punctures.lattice()
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.kind, EigenKind::Zero)
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        if self.is_zero() {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let (index, dist) = self.punctures.nearest(z);
        if dist < self.lattice().pole_radius() {
            return Err(SpectralError::PoleAtPuncture { z, index });
        }
        let p = self.punctures.points();
        match &self.kind {
            EigenKind::Floquet { phi, mu, a } => {
                let mut acc = Complex64::new(0.0, 0.0);
                for (al, pl) in a.iter().zip(p) {
                    acc += al * phi.eval(z - pl)?;
                }
                Ok((mu * z).exp() * acc)
            }
            EigenKind::Degenerate { beta, a0, a } => {
                let lat = self.lattice();
                let mut acc = *a0;
                for (al, pl) in a.iter().zip(p) {
                    acc += al * lat.zeta(z - pl)?;
                }
                Ok((beta * z).exp() * acc)
            }
            EigenKind::Zero => unreachable!(),
        }
    }

    /// Multipliers `(ν₁, ν₂)` predicted by the construction.
    pub fn multipliers(&self) -> (Complex64, Complex64) {
        let lat = self.lattice();
        match &self.kind {
            EigenKind::Floquet { phi, mu, .. } => {
                let c = mu + phi.zeta_alpha();
                let alpha = phi.alpha();
                (
                    (c * lat.e1() - alpha * lat.eta1()).exp(),
                    (c * lat.e2() - alpha * lat.eta2()).exp(),
                )
            }
            EigenKind::Degenerate { beta, .. } => ((beta * lat.e1()).exp(), (beta * lat.e2()).exp()),
            EigenKind::Zero => (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)),
        }
    }

    /// `ψ(z + eⱼ)/ψ(z)` measured by direct evaluation.
    pub fn measured_multiplier(&self, z: Complex64, j: usize) -> Result<Complex64> {
        let e = match j {
            1 => self.lattice().e1(),
            2 => self.lattice().e2(),
            _ => panic!("period index must be 1 or 2"),
        };
        Ok(self.eval(z + e)? / self.eval(z)?)
    }

    /// Residue at `p_l` predicted by the construction.
    pub fn expected_residue(&self, l: usize) -> Complex64 {
        let p = self.punctures.points()[l];
        match &self.kind {
            EigenKind::Floquet { mu, a, .. } => a[l] * (mu * p).exp(),
            EigenKind::Degenerate { beta, a, .. } => a[l] * (beta * p).exp(),
            EigenKind::Zero => Complex64::new(0.0, 0.0),
        }
    }

    /// Laurent coefficients `c_k`, `k ∈ [k_min, k_max]`, at puncture `l`.
    pub fn laurent_at(&self, l: usize, k_min: i32, k_max: i32) -> Result<LaurentCoefficients> {
        let p = *self
            .punctures
            .points()
            .get(l)
            .ok_or(SpectralError::IndexOutOfRange {
                index: l,
                len: self.punctures.len(),
            })?;
        laurent_coefficients(
            |z| self.eval(z),
            p,
            self.punctures.contour_radius(),
            CONTOUR_NODES,
            k_min,
            k_max,
        )
    }
}

fn check_len(ps: &PunctureSet, a: &[Complex64]) -> Result<()> {
    if a.len() != ps.len() {
        return Err(SpectralError::IndexOutOfRange {
            index: a.len(),
            len: ps.len(),
        });
    }
    Ok(())
}
