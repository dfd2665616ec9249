use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Model;
use crate::numerics::{affine_backward, affine_forward, glorot_uniform, relu, relu_grad, GradStore, Matrix, ParamStore};
use crate::rng::{rng_for, Stream};

/// Feed-forward ReLU network over the flattened window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MlpSpec {
    pub lookback: usize,
    pub units: usize,
    pub depth: usize,
    pub horizon: usize,
}

impl MlpSpec {
    pub fn validate(&self) -> Result<()> {
        if self.lookback == 0 || self.units == 0 || self.depth == 0 || self.horizon == 0 {
            return Err(Error::Config(format!("MLP spec fields must all be >= 1, got {self:?}")));
        }
        Ok(())
    }
}

/// Direct affine map from the window to the horizon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearSpec {
    pub lookback: usize,
    pub horizon: usize,
}

impl LinearSpec {
    pub fn validate(&self) -> Result<()> {
        if self.lookback == 0 || self.horizon == 0 {
            return Err(Error::Config(format!("linear spec fields must be >= 1, got {self:?}")));
        }
        Ok(())
    }
}

pub fn mlp_parameter_count(spec: &MlpSpec) -> usize {
    let (q, d, l, t) = (spec.lookback, spec.units, spec.depth, spec.horizon);
    (q * d + d) + (l - 1) * (d * d + d) + (d * t + t)
}

pub fn linear_parameter_count(spec: &LinearSpec) -> usize {
    spec.lookback * spec.horizon + spec.horizon
}

/// `depth` ReLU layers then an affine head. With `depth = 0` hidden layers
/// this is the linear network.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    lookback: usize,
    hidden: usize,
    horizon: usize,
    params: ParamStore,
}

#[derive(Debug, Clone)]
pub struct MlpCache {
    /// Input to every affine map, head last.
    inputs: Vec<Matrix>,
    /// Pre-activations of the hidden layers.
    pre: Vec<Matrix>,
}

pub fn build_mlp(spec: MlpSpec, seed: u64) -> Result<Mlp> {
    spec.validate()?;
    Ok(Mlp::build(spec.lookback, spec.units, spec.depth, spec.horizon, seed))
}

pub fn build_linear_nn(spec: LinearSpec, seed: u64) -> Result<Mlp> {
    spec.validate()?;
    Ok(Mlp::build(spec.lookback, 0, 0, spec.horizon, seed))
}

impl Mlp {
    fn build(lookback: usize, units: usize, hidden: usize, horizon: usize, seed: u64) -> Self {
        let mut rng = rng_for(seed, Stream::Init);
        let mut params = ParamStore::new();
        let mut fan_in = lookback;
        for l in 0..hidden {
            params.push(format!("layer{l}.W"), glorot_uniform(fan_in, units, &mut rng));
            params.push(format!("layer{l}.b"), Matrix::zeros(1, units));
            fan_in = units;
        }
        params.push("head.W", glorot_uniform(fan_in, horizon, &mut rng));
        params.push("head.b", Matrix::zeros(1, horizon));
        Self {
            lookback,
            hidden,
            horizon,
            params,
        }
    }

    /// Rebuilds a model around stored parameters.
    pub fn from_params(lookback: usize, horizon: usize, params: ParamStore) -> Result<Self> {
        if params.len() < 2 || params.len() % 2 != 0 {
            return Err(Error::Checkpoint(format!("MLP needs an even tensor count, got {}", params.len())));
        }
        let hidden = params.len() / 2 - 1;
        let units = if hidden > 0 { params.value(0).cols() } else { 0 };
        let reference = Self::build(lookback, units, hidden, horizon, 0);
        reference.params.check_layout(&params)?;
        Ok(Self {
            lookback,
            hidden,
            horizon,
            params,
        })
    }

    pub fn lookback(&self) -> usize {
        self.lookback
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn hidden_layers(&self) -> usize {
        self.hidden
    }

    fn affine(&self, k: usize) -> (&Matrix, &[f64]) {
        (self.params.value(2 * k), self.params.value(2 * k + 1).as_slice())
    }
}

impl Model for Mlp {
    type Cache = MlpCache;

    fn forward(&self, x: &Matrix) -> Result<(Matrix, MlpCache)> {
        if x.cols() != self.lookback {
            return Err(Error::dim("Mlp::forward", x.shape_str(), format!("lookback {}", self.lookback)));
        }
        let mut inputs = Vec::with_capacity(self.hidden + 1);
        let mut pre = Vec::with_capacity(self.hidden);
        let mut h = x.clone();
        for k in 0..self.hidden {
            let (w, b) = self.affine(k);
            let z = affine_forward(&h, w, b)?;
            inputs.push(h);
            h = z.map(relu);
            pre.push(z);
        }
        let (w, b) = self.affine(self.hidden);
        let out = affine_forward(&h, w, b)?;
        inputs.push(h);
        Ok((out, MlpCache { inputs, pre }))
    }

    fn backward(&self, cache: &MlpCache, d_pred: &Matrix) -> Result<GradStore> {
        if cache.inputs.len() != self.hidden + 1 {
            return Err(Error::dim(
                "Mlp::backward",
                format!("{} cached inputs", cache.inputs.len()),
                format!("{} layers", self.hidden + 1),
            ));
        }
        let mut grads = self.params.zeros_like();
        let mut upstream = d_pred.clone();
        for k in (0..=self.hidden).rev() {
            let (w, _) = self.affine(k);
            let g = affine_backward(&cache.inputs[k], w, &upstream)?;
            *grads.value_mut(2 * k) = g.dw;
            *grads.value_mut(2 * k + 1) = Matrix::row_vector(&g.db);
            if k > 0 {
                let z = &cache.pre[k - 1];
                let mut dz = g.dx;
                for (d, &zv) in dz.as_mut_slice().iter_mut().zip(z.as_slice()) {
                    *d *= relu_grad(zv);
                }
                upstream = dz;
            }
        }
        Ok(grads)
    }

    fn params(&self) -> &ParamStore {
        &self.params
    }

    fn params_mut(&mut self) -> &mut ParamStore {
        &mut self.params
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_width_counts() {
        let mlp = MlpSpec {
            lookback: 45,
            units: 3000,
            depth: 3,
            horizon: 1,
        };
        assert_eq!(mlp_parameter_count(&mlp), 18_147_001);
        assert_eq!(
            linear_parameter_count(&LinearSpec {
                lookback: 45,
                horizon: 1
            }),
            46
        );
    }

    #[test]
    fn allocation_matches_count() {
        let spec = MlpSpec {
            lookback: 7,
            units: 5,
            depth: 3,
            horizon: 2,
        };
        let m = build_mlp(spec, 3).unwrap();
        assert_eq!(m.params().num_scalars(), mlp_parameter_count(&spec));
        let lspec = LinearSpec {
            lookback: 7,
            horizon: 2,
        };
        let l = build_linear_nn(lspec, 3).unwrap();
        assert_eq!(l.params().num_scalars(), linear_parameter_count(&lspec));
        assert_eq!(l.hidden_layers(), 0);
    }

    #[test]
    fn nonnegative_weights_make_output_monotone() {
        let spec = MlpSpec {
            lookback: 4,
            units: 6,
            depth: 2,
            horizon: 1,
        };
        let mut m = build_mlp(spec, 11).unwrap();
        for t in m.params_mut().tensors_mut() {
            for v in t.value.as_mut_slice() {
                *v = v.abs();
            }
        }
        let base = [0.2, 0.5, 0.1, 0.9];
        let y0 = m.predict(&Matrix::row_vector(&base)).unwrap().get(0, 0);
        for j in 0..4 {
            let mut bumped = base;
            bumped[j] += 0.3;
            let y1 = m.predict(&Matrix::row_vector(&bumped)).unwrap().get(0, 0);
            assert!(y1 >= y0, "input {j}: {y1} < {y0}");
        }
    }

    #[test]
    fn from_params_round_trip() {
        let spec = MlpSpec {
            lookback: 3,
            units: 4,
            depth: 2,
            horizon: 2,
        };
        let m = build_mlp(spec, 5).unwrap();
        let r = Mlp::from_params(3, 2, m.params().clone()).unwrap();
        assert_eq!(m, r);
        assert!(Mlp::from_params(4, 2, m.params().clone()).is_err());
    }
}
