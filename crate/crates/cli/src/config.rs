//! Problem configuration files.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use quadpencil_core::beam::{discretize_beam, BeamConfig};
use quadpencil_core::random::{random_pencil, RandomPencilSpec};
use quadpencil_core::QuadraticPencil;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Dense,
    Beam,
    Random,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DenseConfig {
    /// Row-major rows.
    pub a0: Vec<Vec<f64>>,
    pub d: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_eigen")]
    pub eigen: f64,
    #[serde(default = "default_inertia")]
    pub inertia: f64,
    #[serde(default = "default_verify")]
    pub verify: f64,
}

fn default_eigen() -> f64 {
    1e-8
}

fn default_inertia() -> f64 {
    1e-12
}

fn default_verify() -> f64 {
    1e-7
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { eigen: default_eigen(), inertia: default_inertia(), verify: default_verify() }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialState {
    pub z0: Option<Vec<f64>>,
    pub w0: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub schema: u32,
    pub source: Source,
    #[serde(default)]
    pub dense: Option<DenseConfig>,
    #[serde(default)]
    pub beam: Option<BeamConfig>,
    #[serde(default)]
    pub random: Option<RandomPencilSpec>,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Seed for the α search and subspace sampling.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub initial: InitialState,
}

fn matrix(name: &str, rows: &[Vec<f64>]) -> Result<DMatrix<f64>, CliError> {
    let n = rows.len();
    if n == 0 {
        return Err(CliError::Input(format!("{name} is empty")));
    }
    if let Some(bad) = rows.iter().position(|r| r.len() != n) {
        return Err(CliError::Input(format!("{name} row {bad} has {} entries, expected {n}", rows[bad].len())));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

impl ProblemConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let cfg: Self = serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema != SCHEMA_VERSION {
            return Err(CliError::Input(format!("unsupported schema {}, expected {SCHEMA_VERSION}", self.schema)));
        }
        let populated = [self.dense.is_some(), self.beam.is_some(), self.random.is_some()];
        if populated.iter().filter(|p| **p).count() != 1 {
            return Err(CliError::Input("exactly one of dense, beam, random must be given".into()));
        }
        let matches = match self.source {
            Source::Dense => self.dense.is_some(),
            Source::Beam => self.beam.is_some(),
            Source::Random => self.random.is_some(),
        };
        if !matches {
            return Err(CliError::Input(format!("source {:?} has no matching section", self.source)));
        }
        let t = &self.tolerances;
        for (name, v) in [("eigen", t.eigen), ("inertia", t.inertia), ("verify", t.verify)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Input(format!("tolerance {name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// Replaces every seed in the file.
    pub fn override_seed(&mut self, seed: u64) {
        self.seed = seed;
        if let Some(r) = &mut self.random {
            r.seed = seed;
        }
    }

    pub fn pencil(&self) -> Result<QuadraticPencil, CliError> {
        match self.source {
            Source::Dense => {
                let dense = self.dense.as_ref().expect("validated");
                let a0 = matrix("a0", &dense.a0)?;
                let d = matrix("d", &dense.d)?;
                Ok(QuadraticPencil::from_matrices(a0, d)?)
            }
            Source::Beam => Ok(discretize_beam(self.beam.as_ref().expect("validated"))?),
            Source::Random => Ok(random_pencil(self.random.as_ref().expect("validated"))?),
        }
    }

    /// `(z0, w0)`, defaulting to the first unit vector and zero velocity.
    pub fn initial_state(&self, dim: usize) -> Result<(DVector<f64>, DVector<f64>), CliError> {
        let pick = |name: &str, v: &Option<Vec<f64>>, default: DVector<f64>| match v {
            Some(v) if v.len() == dim => Ok(DVector::from_column_slice(v)),
            Some(v) => Err(CliError::Input(format!("{name} has length {}, expected {dim}", v.len()))),
            None => Ok(default),
        };
        let mut e1 = DVector::zeros(dim);
        e1[0] = 1.0;
        Ok((pick("z0", &self.initial.z0, e1)?, pick("w0", &self.initial.w0, DVector::zeros(dim))?))
    }
}
