use std::path::PathBuf;

use serde::Serialize;

use spectral_core::elliptic::Lattice;
use spectral_core::spectral_curve::PunctureSet;

use crate::config::{Format, JobConfig};
use crate::output::{emit, to_json};
use crate::CliError;

pub mod beta;
pub mod curve;
pub mod eval;
pub mod monodromy;
pub mod surface;
pub mod verify;

pub struct Context {
    pub cfg: JobConfig,
    pub out: Option<PathBuf>,
}

impl Context {
    pub fn lattice(&self) -> Result<Lattice, CliError> {
        self.cfg.lattice()
    }

    pub fn punctures(&self) -> Result<PunctureSet, CliError> {
        self.cfg.punctures(self.lattice()?)
    }

    pub fn format(&self) -> Format {
        self.cfg.output.format
    }

    pub fn write_json<T: Serialize>(&self, value: &T) -> Result<(), CliError> {
        emit(self.out.as_deref(), &to_json(value)?)
    }
}
