use serde::{Deserialize, Serialize};

use super::layer::{stan_layer_backward, stan_layer_forward, StanCache, StanLayer, StanLayerParams};
use crate::error::{Error, Result};
use crate::model::Model;
use crate::numerics::{affine_backward, affine_forward, glorot_uniform, GradStore, Matrix, ParamStore};
use crate::rng::{rng_for, Stream};

/// Tensors per STAN layer, in storage order.
pub const LAYER_TENSORS: [&str; 6] = ["W", "b", "phi", "theta", "gamma", "c"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub lookback: usize,
    pub units: usize,
    pub depth: usize,
    pub horizon: usize,
}

impl NetworkSpec {
    pub fn new(lookback: usize, units: usize, depth: usize, horizon: usize) -> Result<Self> {
        let spec = Self {
            lookback,
            units,
            depth,
            horizon,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.lookback == 0 || self.units == 0 || self.depth == 0 || self.horizon == 0 {
            return Err(Error::Config(format!(
                "network spec fields must all be >= 1, got {self:?}"
            )));
        }
        Ok(())
    }
}

/// Closed-form trainable parameter count.
///
/// First layer: `q·d + d` for the input map plus `4d` for phi/theta/gamma/c.
/// Each further layer: `d·d + d + 4d`. Output projection: `d·τ + τ`.
pub fn count_parameters(spec: &NetworkSpec) -> usize {
    let NetworkSpec {
        lookback: q,
        units: d,
        depth: l,
        horizon: tau,
    } = *spec;
    (q * d + d + 4 * d) + (l - 1) * (d * d + d + 4 * d) + (d * tau + tau)
}

/// Stacked STAN layers followed by an affine projection to the horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct StanNetwork {
    spec: NetworkSpec,
    params: ParamStore,
}

#[derive(Debug, Clone)]
pub struct NetworkCache {
    pub layers: Vec<StanCache>,
    /// Output of the last STAN layer, input to the projection.
    pub head_input: Matrix,
}

/// Allocates a network with Glorot-uniform input maps, zero biases and the
/// neutral unit configuration `phi = 1, theta = 0, gamma = 1, c = 0`.
pub fn init_network(spec: NetworkSpec, seed: u64) -> Result<StanNetwork> {
    spec.validate()?;
    let mut rng = rng_for(seed, Stream::Init);
    let d = spec.units;
    let mut params = ParamStore::new();
    for l in 0..spec.depth {
        let fan_in = if l == 0 { spec.lookback } else { d };
        params.push(format!("layer{l}.W"), glorot_uniform(fan_in, d, &mut rng));
        params.push(format!("layer{l}.b"), Matrix::zeros(1, d));
        params.push(format!("layer{l}.phi"), Matrix::filled(1, d, 1.0));
        params.push(format!("layer{l}.theta"), Matrix::zeros(1, d));
        params.push(format!("layer{l}.gamma"), Matrix::filled(1, d, 1.0));
        params.push(format!("layer{l}.c"), Matrix::zeros(1, d));
    }
    params.push("head.W", glorot_uniform(d, spec.horizon, &mut rng));
    params.push("head.b", Matrix::zeros(1, spec.horizon));
    Ok(StanNetwork { spec, params })
}

impl StanNetwork {
    /// Wraps an existing parameter store, checking it matches `spec`.
    pub fn from_params(spec: NetworkSpec, params: ParamStore) -> Result<Self> {
        spec.validate()?;
        let reference = init_network(spec, 0)?;
        reference.params.check_layout(&params)?;
        Ok(Self { spec, params })
    }

    pub fn spec(&self) -> &NetworkSpec {
        &self.spec
    }

    pub fn layer(&self, l: usize) -> StanLayer<'_> {
        let base = l * LAYER_TENSORS.len();
        let p = &self.params;
        StanLayer {
            w: p.value(base),
            b: p.value(base + 1).as_slice(),
            phi: p.value(base + 2).as_slice(),
            theta: p.value(base + 3).as_slice(),
            gamma: p.value(base + 4).as_slice(),
            c: p.value(base + 5).as_slice(),
        }
    }

    /// Copies layer `l` out as owned parameters.
    pub fn layer_params(&self, l: usize) -> StanLayerParams {
        let v = self.layer(l);
        StanLayerParams {
            w: v.w.clone(),
            b: v.b.to_vec(),
            phi: v.phi.to_vec(),
            theta: v.theta.to_vec(),
            gamma: v.gamma.to_vec(),
            c: v.c.to_vec(),
        }
    }

    /// Overwrites layer `l`; shapes must match.
    pub fn set_layer(&mut self, l: usize, layer: &StanLayerParams) -> Result<()> {
        let base = l * LAYER_TENSORS.len();
        let d = self.spec.units;
        if layer.w.shape() != self.params.value(base).shape() {
            return Err(Error::dim(
                "set_layer",
                self.params.value(base).shape_str(),
                layer.w.shape_str(),
            ));
        }
        *self.params.value_mut(base) = layer.w.clone();
        for (k, v) in [&layer.b, &layer.phi, &layer.theta, &layer.gamma, &layer.c]
            .into_iter()
            .enumerate()
        {
            if v.len() != d {
                return Err(Error::dim("set_layer", format!("{d} units"), format!("len {}", v.len())));
            }
            *self.params.value_mut(base + 1 + k) = Matrix::row_vector(v);
        }
        Ok(())
    }

    fn head_index(&self) -> usize {
        self.spec.depth * LAYER_TENSORS.len()
    }

    pub fn head(&self) -> (&Matrix, &[f64]) {
        let h = self.head_index();
        (self.params.value(h), self.params.value(h + 1).as_slice())
    }

    pub fn set_head(&mut self, w: Matrix, b: &[f64]) -> Result<()> {
        let h = self.head_index();
        if w.shape() != self.params.value(h).shape() || b.len() != self.spec.horizon {
            return Err(Error::dim(
                "set_head",
                self.params.value(h).shape_str(),
                format!("{} / bias {}", w.shape_str(), b.len()),
            ));
        }
        *self.params.value_mut(h) = w;
        *self.params.value_mut(h + 1) = Matrix::row_vector(b);
        Ok(())
    }
}

pub fn network_forward(x: &Matrix, net: &StanNetwork) -> Result<(Matrix, NetworkCache)> {
    if x.cols() != net.spec.lookback {
        return Err(Error::dim(
            "network_forward",
            x.shape_str(),
            format!("lookback {}", net.spec.lookback),
        ));
    }
    let mut layers = Vec::with_capacity(net.spec.depth);
    let mut h = x.clone();
    for l in 0..net.spec.depth {
        let (y, cache) = stan_layer_forward(&h, net.layer(l))?;
        layers.push(cache);
        h = y;
    }
    let (hw, hb) = net.head();
    let pred = affine_forward(&h, hw, hb)?;
    Ok((pred, NetworkCache { layers, head_input: h }))
}

pub fn network_backward(cache: &NetworkCache, net: &StanNetwork, d_pred: &Matrix) -> Result<GradStore> {
    if cache.layers.len() != net.spec.depth {
        return Err(Error::dim(
            "network_backward",
            format!("{} cached layers", cache.layers.len()),
            format!("depth {}", net.spec.depth),
        ));
    }
    let mut grads = net.params.zeros_like();
    let (hw, _) = net.head();
    let head = affine_backward(&cache.head_input, hw, d_pred)?;
    let h = net.head_index();
    *grads.value_mut(h) = head.dw;
    *grads.value_mut(h + 1) = Matrix::row_vector(&head.db);

    let mut upstream = head.dx;
    for l in (0..net.spec.depth).rev() {
        let g = stan_layer_backward(&cache.layers[l], net.layer(l), &upstream)?;
        let base = l * LAYER_TENSORS.len();
        *grads.value_mut(base) = g.dw;
        for (k, v) in [g.db, g.dphi, g.dtheta, g.dgamma, g.dc].into_iter().enumerate() {
            *grads.value_mut(base + 1 + k) = Matrix::row_vector(&v);
        }
        upstream = g.dx;
    }
    Ok(grads)
}

impl Model for StanNetwork {
    type Cache = NetworkCache;

    fn forward(&self, x: &Matrix) -> Result<(Matrix, NetworkCache)> {
        network_forward(x, self)
    }

    fn backward(&self, cache: &NetworkCache, d_pred: &Matrix) -> Result<GradStore> {
        network_backward(cache, self, d_pred)
    }

    fn params(&self) -> &ParamStore {
        &self.params
    }

    fn params_mut(&mut self) -> &mut ParamStore {
        &mut self.params
    }
}
