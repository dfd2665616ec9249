use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::numerics::{mse_loss, GradStore, Matrix, ParamStore};

/// Which family a trainable or fitted model belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Stan,
    Mlp,
    Linear,
    Linreg,
}

impl ModelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::Stan => "stan",
            ModelKind::Mlp => "mlp",
            ModelKind::Linear => "linear",
            ModelKind::Linreg => "linreg",
        }
    }
}

impl std::str::FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "stan" => Ok(ModelKind::Stan),
            "mlp" => Ok(ModelKind::Mlp),
            "linear" => Ok(ModelKind::Linear),
            "linreg" | "linearregression" => Ok(ModelKind::Linreg),
            other => Err(format!("unknown model `{other}` (expected stan|mlp|linear|linreg)")),
        }
    }
}

/// A differentiable model with flat named parameters.
///
/// Forward passes are pure functions of `(params, input)`, and rows of a batch
/// never interact, so a batch prediction equals the stacked per-row predictions.
pub trait Model: Clone + Send + Sync {
    type Cache;

    fn forward(&self, x: &Matrix) -> Result<(Matrix, Self::Cache)>;

    fn backward(&self, cache: &Self::Cache, d_pred: &Matrix) -> Result<GradStore>;

    fn params(&self) -> &ParamStore;

    fn params_mut(&mut self) -> &mut ParamStore;

    fn predict(&self, x: &Matrix) -> Result<Matrix> {
        self.forward(x).map(|(p, _)| p)
    }

    /// MSE of `predict(x)` against `y` and its gradient.
    fn loss_and_grad(&self, x: &Matrix, y: &Matrix) -> Result<(f64, GradStore)> {
        let (pred, cache) = self.forward(x)?;
        let (loss, d_pred) = mse_loss(&pred, y)?;
        Ok((loss, self.backward(&cache, &d_pred)?))
    }
}
