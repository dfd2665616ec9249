use serde::{Deserialize, Serialize};

use super::{GradStore, ParamStore};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            lr: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// Moment estimates for a single parameter tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl AdamState {
    pub fn new(len: usize, config: AdamConfig) -> Self {
        Self {
            m: vec![0.0; len],
            v: vec![0.0; len],
            t: 0,
            lr: config.lr,
            beta1: config.beta1,
            beta2: config.beta2,
            epsilon: config.epsilon,
        }
    }
}

/// One bias-corrected Adam update of `param` in place.
///
/// `name` is only used to label the error when `grad` holds a non-finite entry;
/// in that case neither the parameter nor the state is touched.
pub fn adam_step(name: &str, param: &mut [f64], grad: &[f64], state: &mut AdamState) -> Result<()> {
    if param.len() != grad.len() || param.len() != state.m.len() || state.v.len() != state.m.len() {
        return Err(Error::dim(
            "adam_step",
            format!("{name}: param {}", param.len()),
            format!("grad {}, state {}", grad.len(), state.m.len()),
        ));
    }
    if grad.iter().any(|g| !g.is_finite()) {
        return Err(Error::NonFiniteGradient(name.to_string()));
    }
    state.t += 1;
    let (b1, b2) = (state.beta1, state.beta2);
    let t = state.t as i32;
    let c1 = 1.0 - b1.powi(t);
    let c2 = 1.0 - b2.powi(t);
    for (((p, &g), m), v) in param
        .iter_mut()
        .zip(grad)
        .zip(state.m.iter_mut())
        .zip(state.v.iter_mut())
    {
        *m = b1 * *m + (1.0 - b1) * g;
        *v = b2 * *v + (1.0 - b2) * g * g;
        let m_hat = *m / c1;
        let v_hat = *v / c2;
        *p -= state.lr * m_hat / (v_hat.sqrt() + state.epsilon);
    }
    Ok(())
}

/// Adam over every tensor of a [`ParamStore`], sharing one learning rate.
#[derive(Debug, Clone)]
pub struct Adam {
    states: Vec<AdamState>,
}

impl Adam {
    pub fn new(params: &ParamStore, config: AdamConfig) -> Self {
        Self {
            states: params
                .tensors()
                .iter()
                .map(|t| AdamState::new(t.value.len(), config))
                .collect(),
        }
    }

    pub fn lr(&self) -> f64 {
        self.states.first().map_or(f64::NAN, |s| s.lr)
    }

    pub fn set_lr(&mut self, lr: f64) {
        for s in &mut self.states {
            s.lr = lr;
        }
    }

    pub fn states(&self) -> &[AdamState] {
        &self.states
    }

    /// Applies one update. Gradients are validated for every tensor before
    /// any parameter moves.
    pub fn step(&mut self, params: &mut ParamStore, grads: &GradStore) -> Result<()> {
        params.check_layout(grads)?;
        for t in grads.tensors() {
            if !t.value.is_finite() {
                return Err(Error::NonFiniteGradient(t.name.clone()));
            }
        }
        for (i, state) in self.states.iter_mut().enumerate() {
            let name = grads.name(i).to_string();
            adam_step(
                &name,
                params.value_mut(i).as_mut_slice(),
                grads.value(i).as_slice(),
                state,
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_leaves_param_unchanged() {
        let mut p = vec![1.5, -2.0, 0.0];
        let mut s = AdamState::new(3, AdamConfig::default());
        adam_step("w", &mut p, &[0.0; 3], &mut s).unwrap();
        assert_eq!(p, vec![1.5, -2.0, 0.0]);
        assert_eq!(s.t, 1);
    }

    #[test]
    fn first_step_moves_by_learning_rate() {
        // m̂ = g, v̂ = g², so Δ = -lr·g/(|g|+ε).
        let mut p = vec![0.0];
        let mut s = AdamState::new(1, AdamConfig::default());
        adam_step("w", &mut p, &[0.5], &mut s).unwrap();
        let expected = -0.001 * 0.5 / (0.5 + 1e-8);
        assert!((p[0] - expected).abs() < 1e-15, "{}", p[0]);
    }

    #[test]
    fn constant_gradient_keeps_step_near_lr() {
        let mut p = vec![0.0];
        let mut s = AdamState::new(1, AdamConfig::default());
        adam_step("w", &mut p, &[0.5], &mut s).unwrap();
        let after_one = p[0];
        adam_step("w", &mut p, &[0.5], &mut s).unwrap();
        assert_eq!(s.t, 2);
        let delta = p[0] - after_one;
        assert!((delta.abs() - 0.001).abs() < 1e-9, "{delta}");
    }

    #[test]
    fn non_finite_gradient_names_the_parameter() {
        let mut p = vec![0.0, 1.0];
        let mut s = AdamState::new(2, AdamConfig::default());
        let err = adam_step("layer0.gamma", &mut p, &[0.0, f64::NAN], &mut s).unwrap_err();
        assert!(err.to_string().contains("layer0.gamma"));
        assert_eq!(s.t, 0);
        assert_eq!(p, vec![0.0, 1.0]);
    }
}
