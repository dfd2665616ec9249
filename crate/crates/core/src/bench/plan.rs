use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::checkpoint::ArchSpec;
use crate::data::{lookback_for, SplitConfig};
use crate::error::{Error, Result};
use crate::model::ModelKind;
use crate::training::TrainConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSource {
    pub name: String,
    pub path: PathBuf,
    /// MW column, e.g. `AEP_MW`.
    pub column: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    #[serde(default)]
    pub units: usize,
    #[serde(default)]
    pub depth: usize,
}

impl ModelSpec {
    pub fn stan(units: usize, depth: usize) -> Self {
        Self {
            kind: ModelKind::Stan,
            units,
            depth,
        }
    }

    pub fn mlp(units: usize, depth: usize) -> Self {
        Self {
            kind: ModelKind::Mlp,
            units,
            depth,
        }
    }

    pub fn linear() -> Self {
        Self {
            kind: ModelKind::Linear,
            units: 0,
            depth: 0,
        }
    }

    pub fn linreg() -> Self {
        Self {
            kind: ModelKind::Linreg,
            units: 0,
            depth: 0,
        }
    }

    /// Column label, e.g. `STAN-64-3`.
    pub fn name(&self) -> String {
        match self.kind {
            ModelKind::Stan => format!("STAN-{}-{}", self.units, self.depth),
            ModelKind::Mlp => format!("MLP-{}-{}", self.units, self.depth),
            ModelKind::Linear => "Linear".to_string(),
            ModelKind::Linreg => "LinearRegression".to_string(),
        }
    }

    pub fn arch(&self, horizon: usize) -> ArchSpec {
        let (units, depth) = match self.kind {
            ModelKind::Stan | ModelKind::Mlp => (self.units, self.depth),
            ModelKind::Linear | ModelKind::Linreg => (0, 0),
        };
        ArchSpec {
            lookback: lookback_for(horizon),
            units,
            depth,
            horizon,
        }
    }

    fn validate(&self) -> Result<()> {
        if matches!(self.kind, ModelKind::Stan | ModelKind::Mlp) && (self.units == 0 || self.depth == 0) {
            return Err(Error::Config(format!("{} needs units and depth >= 1", self.name())));
        }
        Ok(())
    }
}

fn default_runs() -> usize {
    5
}

fn default_horizons() -> Vec<usize> {
    vec![1, 6, 12]
}

fn default_blank_columns() -> Vec<String> {
    vec!["GRU-300-3".into(), "LSTM-300-3".into()]
}

/// Datasets × horizons × models × runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkPlan {
    pub datasets: Vec<DatasetSource>,
    #[serde(default = "default_horizons")]
    pub horizons: Vec<usize>,
    pub models: Vec<ModelSpec>,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub train: TrainConfig,
    #[serde(default)]
    pub split: SplitConfig,
    /// Keep only the most recent values of each series.
    #[serde(default)]
    pub max_series_len: Option<usize>,
    /// Report columns for models that are listed but never run.
    #[serde(default = "default_blank_columns")]
    pub blank_columns: Vec<String>,
}

impl BenchmarkPlan {
    /// The four non-recurrent families at the given width and depth.
    pub fn standard_models(units: usize, depth: usize) -> Vec<ModelSpec> {
        vec![
            ModelSpec::linreg(),
            ModelSpec::stan(units, depth),
            ModelSpec::linear(),
            ModelSpec::mlp(units, depth),
        ]
    }

    /// Reduced widths, epochs and series length for CPU runs.
    pub fn desk_scale(datasets: Vec<DatasetSource>, horizons: Vec<usize>, base_seed: u64) -> Self {
        Self {
            datasets,
            horizons,
            models: Self::standard_models(32, 3),
            runs: 5,
            base_seed,
            train: TrainConfig {
                max_epochs: 40,
                ..TrainConfig::default()
            },
            split: SplitConfig::default(),
            max_series_len: Some(4000),
            blank_columns: default_blank_columns(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.datasets.is_empty() || self.horizons.is_empty() || self.models.is_empty() {
            return Err(Error::Config(
                "benchmark plan needs at least one dataset, horizon and model".into(),
            ));
        }
        if self.runs == 0 {
            return Err(Error::Config("runs per cell must be >= 1".into()));
        }
        if self.horizons.contains(&0) {
            return Err(Error::Config("horizons must be >= 1".into()));
        }
        for m in &self.models {
            m.validate()?;
        }
        let mut names: Vec<String> = self.models.iter().map(ModelSpec::name).collect();
        names.sort();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Config("model names in a plan must be unique".into()));
        }
        let mut ds: Vec<&str> = self.datasets.iter().map(|d| d.name.as_str()).collect();
        ds.sort();
        if ds.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Config("dataset names in a plan must be unique".into()));
        }
        self.train.validate()?;
        Ok(())
    }

    /// Lookback for each horizon, in plan order.
    pub fn lookbacks(&self) -> Vec<usize> {
        self.horizons.iter().map(|&h| lookback_for(h)).collect()
    }
}
