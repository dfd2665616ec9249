//! Classical univariate logistic STAR model: simulation and concentrated
//! least-squares estimation.
//!
//! ```text
//! y_t = φ₀ + Σᵢ φᵢ·y_{t-i} + (Σᵢ θᵢ·y_{t-i})·G(y_{t-d}; γ, c) + σ·ε_t,   ε_t ~ N(0, 1)
//! ```
//!
//! The transition variable is the series itself lagged by `delay`, and `sigma`
//! is the noise standard deviation.

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::linalg::lstsq_qr;
use crate::numerics::Matrix;
use crate::rng::{rng_for, Stream};
use crate::stan::transition_g;

/// Simulated values beyond this magnitude abort the run.
pub const EXPLOSION_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LstarParams {
    pub phi0: f64,
    pub phi: Vec<f64>,
    pub theta: Vec<f64>,
    pub gamma: f64,
    pub c: f64,
    pub delay: usize,
    pub sigma: f64,
}

impl LstarParams {
    pub fn order(&self) -> usize {
        self.phi.len()
    }

    pub fn validate(&self) -> Result<()> {
        let q = self.phi.len();
        if q == 0 || self.theta.len() != q {
            return Err(Error::Config(format!(
                "LSTAR needs q >= 1 with phi and theta of equal length (got {} and {})",
                q,
                self.theta.len()
            )));
        }
        if self.delay == 0 || self.delay > q {
            return Err(Error::Config(format!("LSTAR delay must be in 1..={q}, got {}", self.delay)));
        }
        if !(self.gamma > 0.0) || !(self.sigma >= 0.0) {
            return Err(Error::Config(format!(
                "LSTAR needs gamma > 0 and sigma >= 0 (got gamma={}, sigma={})",
                self.gamma, self.sigma
            )));
        }
        let all = [self.phi0, self.gamma, self.c, self.sigma];
        if all.iter().chain(&self.phi).chain(&self.theta).any(|v| !v.is_finite()) {
            return Err(Error::Config("LSTAR parameters must be finite".into()));
        }
        Ok(())
    }

    /// Conditional mean of `y_t` given the `q` most recent values, newest first.
    pub fn conditional_mean(&self, recent: &[f64]) -> f64 {
        let mut linear = self.phi0;
        let mut shift = 0.0;
        for i in 0..self.order() {
            linear += self.phi[i] * recent[i];
            shift += self.theta[i] * recent[i];
        }
        linear + shift * transition_g(recent[self.delay - 1], self.gamma, self.c)
    }
}

/// Iterates the model from zero initial conditions, dropping `burn_in` values.
pub fn simulate_lstar(params: &LstarParams, n: usize, burn_in: usize, seed: u64) -> Result<Vec<f64>> {
    params.validate()?;
    if n == 0 {
        return Err(Error::Config("simulation length must be >= 1".into()));
    }
    let q = params.order();
    let mut rng = rng_for(seed, Stream::Noise);
    let total = n + burn_in;
    // `recent[0]` is y_{t-1}.
    let mut recent = vec![0.0; q];
    let mut out = Vec::with_capacity(n);
    for t in 0..total {
        let eps: f64 = StandardNormal.sample(&mut rng);
        let y = params.conditional_mean(&recent) + params.sigma * eps;
        if !y.is_finite() || y.abs() > EXPLOSION_LIMIT {
            return Err(Error::Explosive { step: t, value: y });
        }
        recent.rotate_right(1);
        recent[0] = y;
        if t >= burn_in {
            out.push(y);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LstarFit {
    /// `sigma` holds the residual standard deviation.
    pub params: LstarParams,
    pub sse: f64,
    pub n_obs: usize,
}

pub const DEFAULT_GAMMA_GRID: [f64; 7] = [0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0];

/// Fifteen interior quantiles of the series at levels k/16, k = 1..=15.
pub fn default_c_grid(series: &[f64]) -> Vec<f64> {
    let mut sorted = series.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    (1..=15)
        .map(|k| {
            let pos = k as f64 / 16.0 * (n - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = pos.ceil() as usize;
            let frac = pos - lo as f64;
            sorted[lo] + frac * (sorted[hi] - sorted[lo])
        })
        .collect()
}

/// Grid search over `(gamma, c)`; at each point the remaining coefficients
/// enter linearly and are solved by least squares.
///
/// The minimum-SSE grid point wins, ties going to the smaller `gamma` and then
/// the smaller `c`. Grid points whose regressor matrix is numerically singular
/// are skipped.
pub fn estimate_lstar(
    series: &[f64],
    q: usize,
    delay: usize,
    gamma_grid: &[f64],
    c_grid: &[f64],
) -> Result<LstarFit> {
    if q == 0 || delay == 0 || delay > q {
        return Err(Error::Config(format!("need q >= 1 and 1 <= delay <= q (q={q}, delay={delay})")));
    }
    if series.len() <= q + 10 {
        return Err(Error::SeriesTooShort {
            needed: q + 11,
            got: series.len(),
        });
    }
    if gamma_grid.is_empty() || c_grid.is_empty() {
        return Err(Error::Config("estimation grids must be non-empty".into()));
    }
    let mut gammas = gamma_grid.to_vec();
    gammas.sort_by(f64::total_cmp);
    gammas.dedup();
    let mut cs = c_grid.to_vec();
    cs.sort_by(f64::total_cmp);
    cs.dedup();
    let points: Vec<(f64, f64)> = gammas
        .iter()
        .flat_map(|&g| cs.iter().map(move |&c| (g, c)))
        .collect();

    let target: Vec<f64> = series[q..].to_vec();
    let n_obs = target.len();
    let fits: Vec<Option<(Vec<f64>, f64)>> = points
        .par_iter()
        .map(|&(gamma, c)| {
            let design = lstar_design(series, q, delay, gamma, c);
            lstsq_qr(&design, &target).ok()
        })
        .collect();

    let mut best: Option<(usize, f64)> = None;
    for (i, fit) in fits.iter().enumerate() {
        if let Some((_, sse)) = fit {
            if best.is_none_or(|(_, b)| *sse < b) {
                best = Some((i, *sse));
            }
        }
    }
    let (idx, sse) = best.ok_or(Error::EstimationFailed)?;
    let coef = &fits[idx].as_ref().expect("selected fit exists").0;
    let (gamma, c) = points[idx];
    Ok(LstarFit {
        params: LstarParams {
            phi0: coef[0],
            phi: coef[1..=q].to_vec(),
            theta: coef[q + 1..].to_vec(),
            gamma,
            c,
            delay,
            sigma: (sse / n_obs as f64).sqrt(),
        },
        sse,
        n_obs,
    })
}

/// Rows `[1, y_{t-1..t-q}, y_{t-1..t-q}·G(y_{t-delay})]` for `t = q..n`.
fn lstar_design(series: &[f64], q: usize, delay: usize, gamma: f64, c: f64) -> Matrix {
    let n_obs = series.len() - q;
    let mut m = Matrix::zeros(n_obs, 1 + 2 * q);
    for r in 0..n_obs {
        let t = r + q;
        let g = transition_g(series[t - delay], gamma, c);
        let row = m.row_mut(r);
        row[0] = 1.0;
        for i in 1..=q {
            let lag = series[t - i];
            row[i] = lag;
            row[q + i] = lag * g;
        }
    }
    m
}
