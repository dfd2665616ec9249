//! Self-describing JSON checkpoints.
//!
//! ```json
//! {
//!   "format": "stanforge-checkpoint",
//!   "version": 1,
//!   "kind": "stan" | "mlp" | "linear" | "linreg",
//!   "arch": { "lookback": q, "units": d, "depth": L, "horizon": τ },
//!   "scaler": { "mean": .., "std": .. } | null,
//!   "params": [ { "name": "layer0.W", "value": { "rows": .., "cols": .., "data": [..] } }, .. ]
//! }
//! ```
//!
//! `params` follows the model's storage order: for a STAN network
//! `layer{l}.{W,b,phi,theta,gamma,c}` for each layer, then `head.W`, `head.b`;
//! for an MLP `layer{l}.{W,b}` then the head; for the linear models only the
//! head. Matrices are row-major. `units` and `depth` are 0 for the linear
//! models. Floats are written in shortest round-trip form, so save → load is
//! bit-exact.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::baselines::{linear_parameter_count, mlp_parameter_count, LinearRegression, LinearSpec, Mlp, MlpSpec};
use crate::data::ScalerParams;
use crate::error::{Error, Result};
use crate::model::{Model, ModelKind};
use crate::numerics::{Matrix, ParamStore};
use crate::stan::{count_parameters, NetworkSpec, StanNetwork};

pub const FORMAT_TAG: &str = "stanforge-checkpoint";
pub const FORMAT_VERSION: u32 = 1;

/// Architecture fields shared by every model kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArchSpec {
    pub lookback: usize,
    pub units: usize,
    pub depth: usize,
    pub horizon: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    pub kind: ModelKind,
    pub arch: ArchSpec,
    pub scaler: Option<ScalerParams>,
    pub params: ParamStore,
}

impl Checkpoint {
    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string(self)?;
        std::fs::write(path, json).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let ck: Checkpoint = serde_json::from_str(&text)?;
        if ck.format != FORMAT_TAG || ck.version != FORMAT_VERSION {
            return Err(Error::Checkpoint(format!(
                "unsupported checkpoint {} v{}",
                ck.format, ck.version
            )));
        }
        Ok(ck)
    }
}

/// Any of the four model families behind one predict contract.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyModel {
    Stan(StanNetwork),
    Mlp(Mlp),
    Linear(Mlp),
    Linreg(LinearRegression),
}

impl AnyModel {
    pub fn kind(&self) -> ModelKind {
        match self {
            AnyModel::Stan(_) => ModelKind::Stan,
            AnyModel::Mlp(_) => ModelKind::Mlp,
            AnyModel::Linear(_) => ModelKind::Linear,
            AnyModel::Linreg(_) => ModelKind::Linreg,
        }
    }

    pub fn predict(&self, x: &Matrix) -> Result<Matrix> {
        match self {
            AnyModel::Stan(m) => m.predict(x),
            AnyModel::Mlp(m) | AnyModel::Linear(m) => m.predict(x),
            AnyModel::Linreg(m) => m.predict(x),
        }
    }

    pub fn arch(&self) -> ArchSpec {
        match self {
            AnyModel::Stan(m) => {
                let s = m.spec();
                ArchSpec {
                    lookback: s.lookback,
                    units: s.units,
                    depth: s.depth,
                    horizon: s.horizon,
                }
            }
            AnyModel::Mlp(m) => ArchSpec {
                lookback: m.lookback(),
                units: m.params().value(0).cols(),
                depth: m.hidden_layers(),
                horizon: m.horizon(),
            },
            AnyModel::Linear(m) => ArchSpec {
                lookback: m.lookback(),
                units: 0,
                depth: 0,
                horizon: m.horizon(),
            },
            AnyModel::Linreg(m) => ArchSpec {
                lookback: m.weights.rows(),
                units: 0,
                depth: 0,
                horizon: m.weights.cols(),
            },
        }
    }

    pub fn params(&self) -> ParamStore {
        match self {
            AnyModel::Stan(m) => m.params().clone(),
            AnyModel::Mlp(m) | AnyModel::Linear(m) => m.params().clone(),
            AnyModel::Linreg(m) => m.to_params(),
        }
    }

    pub fn num_parameters(&self) -> usize {
        match self {
            AnyModel::Stan(m) => m.params().num_scalars(),
            AnyModel::Mlp(m) | AnyModel::Linear(m) => m.params().num_scalars(),
            AnyModel::Linreg(m) => m.num_parameters(),
        }
    }

    pub fn to_checkpoint(&self, scaler: Option<ScalerParams>) -> Checkpoint {
        Checkpoint {
            format: FORMAT_TAG.to_string(),
            version: FORMAT_VERSION,
            kind: self.kind(),
            arch: self.arch(),
            scaler,
            params: self.params(),
        }
    }

    pub fn from_checkpoint(ck: &Checkpoint) -> Result<Self> {
        let a = ck.arch;
        let params = ck.params.clone();
        match ck.kind {
            ModelKind::Stan => {
                let spec = NetworkSpec::new(a.lookback, a.units, a.depth, a.horizon)?;
                Ok(AnyModel::Stan(StanNetwork::from_params(spec, params)?))
            }
            ModelKind::Mlp => Ok(AnyModel::Mlp(Mlp::from_params(a.lookback, a.horizon, params)?)),
            ModelKind::Linear => Ok(AnyModel::Linear(Mlp::from_params(a.lookback, a.horizon, params)?)),
            ModelKind::Linreg => Ok(AnyModel::Linreg(LinearRegression::from_params(&params)?)),
        }
    }
}

/// Closed-form parameter count for a model kind and architecture.
pub fn parameter_count(kind: ModelKind, arch: &ArchSpec) -> usize {
    match kind {
        ModelKind::Stan => count_parameters(&NetworkSpec {
            lookback: arch.lookback,
            units: arch.units,
            depth: arch.depth,
            horizon: arch.horizon,
        }),
        ModelKind::Mlp => mlp_parameter_count(&MlpSpec {
            lookback: arch.lookback,
            units: arch.units,
            depth: arch.depth,
            horizon: arch.horizon,
        }),
        ModelKind::Linear | ModelKind::Linreg => linear_parameter_count(&LinearSpec {
            lookback: arch.lookback,
            horizon: arch.horizon,
        }),
    }
}
