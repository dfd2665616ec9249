use super::gate::transition_g;
use crate::error::{Error, Result};
use crate::numerics::{affine_backward, affine_forward, relu, relu_grad, Matrix};

/// Owned parameters of one STAN layer of width `d` fed by `p` inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct StanLayerParams {
    /// `p × d` input map.
    pub w: Matrix,
    pub b: Vec<f64>,
    pub phi: Vec<f64>,
    pub theta: Vec<f64>,
    pub gamma: Vec<f64>,
    pub c: Vec<f64>,
}

impl StanLayerParams {
    pub fn as_layer(&self) -> StanLayer<'_> {
        StanLayer {
            w: &self.w,
            b: &self.b,
            phi: &self.phi,
            theta: &self.theta,
            gamma: &self.gamma,
            c: &self.c,
        }
    }
}

/// Borrowed view of a layer's parameters, as stored inside a network.
#[derive(Debug, Clone, Copy)]
pub struct StanLayer<'a> {
    pub w: &'a Matrix,
    pub b: &'a [f64],
    pub phi: &'a [f64],
    pub theta: &'a [f64],
    pub gamma: &'a [f64],
    pub c: &'a [f64],
}

impl StanLayer<'_> {
    pub fn input_width(&self) -> usize {
        self.w.rows()
    }

    pub fn units(&self) -> usize {
        self.w.cols()
    }

    fn validate(&self) -> Result<()> {
        let d = self.units();
        for (name, v) in [
            ("b", self.b),
            ("phi", self.phi),
            ("theta", self.theta),
            ("gamma", self.gamma),
            ("c", self.c),
        ] {
            if v.len() != d {
                return Err(Error::dim(
                    "StanLayer",
                    format!("W {}", self.w.shape_str()),
                    format!("{name} len {}", v.len()),
                ));
            }
        }
        Ok(())
    }
}

/// Intermediate values retained by a forward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct StanCache {
    pub input: Matrix,
    pub pre: Matrix,
    pub relu: Matrix,
    pub gate: Matrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StanLayerGrads {
    pub dx: Matrix,
    pub dw: Matrix,
    pub db: Vec<f64>,
    pub dphi: Vec<f64>,
    pub dtheta: Vec<f64>,
    pub dgamma: Vec<f64>,
    pub dc: Vec<f64>,
}

pub fn stan_layer_forward(x: &Matrix, layer: StanLayer<'_>) -> Result<(Matrix, StanCache)> {
    layer.validate()?;
    let pre = affine_forward(x, layer.w, layer.b)?;
    let (m, d) = pre.shape();
    let mut y = Matrix::zeros(m, d);
    let mut act = Matrix::zeros(m, d);
    let mut gate = Matrix::zeros(m, d);
    for i in 0..m {
        let pre_row = pre.row(i);
        let y_row = y.row_mut(i);
        for j in 0..d {
            let yt = pre_row[j];
            let a = relu(yt);
            let g = transition_g(yt, layer.gamma[j], layer.c[j]);
            y_row[j] = layer.phi[j] * yt + layer.theta[j] * a * g;
            act.set(i, j, a);
            gate.set(i, j, g);
        }
    }
    Ok((
        y,
        StanCache {
            input: x.clone(),
            pre,
            relu: act,
            gate,
        },
    ))
}

pub fn stan_layer_backward(cache: &StanCache, layer: StanLayer<'_>, dy: &Matrix) -> Result<StanLayerGrads> {
    layer.validate()?;
    if cache.input.cols() != layer.input_width() || cache.pre.cols() != layer.units() {
        return Err(Error::dim(
            "stan_layer_backward cache",
            format!("input {} pre {}", cache.input.shape_str(), cache.pre.shape_str()),
            format!("W {}", layer.w.shape_str()),
        ));
    }
    if dy.shape() != cache.pre.shape() {
        return Err(Error::dim("stan_layer_backward dY", cache.pre.shape_str(), dy.shape_str()));
    }
    let (m, d) = dy.shape();
    let mut d_pre = Matrix::zeros(m, d);
    let mut dphi = vec![0.0; d];
    let mut dtheta = vec![0.0; d];
    let mut dgamma = vec![0.0; d];
    let mut dc = vec![0.0; d];
    for i in 0..m {
        for j in 0..d {
            let up = dy.get(i, j);
            let yt = cache.pre.get(i, j);
            let a = cache.relu.get(i, j);
            let g = cache.gate.get(i, j);
            let (phi, theta, gamma, c) = (layer.phi[j], layer.theta[j], layer.gamma[j], layer.c[j]);
            let slope = g * (1.0 - g);
            dphi[j] += up * yt;
            dtheta[j] += up * a * g;
            dgamma[j] += up * theta * a * slope * (yt - c);
            dc[j] -= up * theta * a * slope * gamma;
            let local = phi + theta * (relu_grad(yt) * g + a * slope * gamma);
            d_pre.set(i, j, up * local);
        }
    }
    let aff = affine_backward(&cache.input, layer.w, &d_pre)?;
    Ok(StanLayerGrads {
        dx: aff.dx,
        dw: aff.dw,
        db: aff.db,
        dphi,
        dtheta,
        dgamma,
        dc,
    })
}
