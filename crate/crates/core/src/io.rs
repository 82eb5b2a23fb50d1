//! Instance files and trajectory JSON.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::engine::{dc_split_of_pgd, dca_run, pgd_run, DcInstance, Trajectory};
use crate::error::{Error, Result};
use crate::oracles::{FunctionOracle, OracleSpec, Point, SubgradientPolicy};

/// One stepsize or one per step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Stepsizes {
    Constant(f64),
    Schedule(Vec<f64>),
}

impl Stepsizes {
    pub fn as_slice(&self) -> &[f64] {
        match self {
            Self::Constant(g) => std::slice::from_ref(g),
            Self::Schedule(v) => v,
        }
    }
}

/// A DC pair `{"f1", "f2"}` or a composite problem `{"phi", "h", "gamma"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InstanceFile {
    Dc { f1: OracleSpec, f2: OracleSpec },
    Pgd { phi: OracleSpec, h: OracleSpec, gamma: Stepsizes },
}

impl InstanceFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Input(e.to_string()))
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// The DC pair; composite problems use the splitting of the first stepsize.
    pub fn dc_instance(&self) -> Result<DcInstance> {
        match self {
            Self::Dc { f1, f2 } => DcInstance::new(f1.try_into()?, f2.try_into()?),
            Self::Pgd { phi, h, gamma } => {
                let g = *gamma.as_slice().first().ok_or_else(|| Error::Input("empty stepsize list".into()))?;
                dc_split_of_pgd(&phi.try_into()?, &h.try_into()?, g)
            }
        }
    }

    pub fn dim(&self) -> Result<usize> {
        Ok(self.dc_instance()?.dim())
    }

    /// `N + 1` steps of DCA, or of PGD for composite problems.
    pub fn run(&self, x0: &Point, n: usize, policy: SubgradientPolicy) -> Result<Trajectory> {
        match self {
            Self::Dc { .. } => dca_run(&self.dc_instance()?, x0, n, policy),
            Self::Pgd { phi, h, gamma } => {
                let phi = FunctionOracle::try_from(phi)?;
                let h = FunctionOracle::try_from(h)?;
                pgd_run(&phi, &h, gamma.as_slice(), x0, n)
            }
        }
    }
}

pub fn trajectory_from_json(text: &str) -> Result<Trajectory> {
    serde_json::from_str(text).map_err(|e| Error::Input(e.to_string()))
}

pub fn read_trajectory(path: impl AsRef<Path>) -> Result<Trajectory> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    trajectory_from_json(&text)
}
