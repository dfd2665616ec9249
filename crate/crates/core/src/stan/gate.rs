use crate::numerics::relu;

/// Largest `f64` strictly below 1.
const ONE_MINUS: f64 = 1.0 - f64::EPSILON / 2.0;

/// Logistic transition `1 / (1 + exp(-gamma·(z - c)))`.
///
/// Evaluated on whichever side keeps `exp` from overflowing, then clamped to
/// the open interval (0, 1) so that saturated gates still report a value
/// strictly inside it.
#[inline]
pub fn transition_g(z: f64, gamma: f64, c: f64) -> f64 {
    let s = gamma * (z - c);
    let g = if s >= 0.0 {
        1.0 / (1.0 + (-s).exp())
    } else {
        let e = s.exp();
        e / (1.0 + e)
    };
    g.clamp(f64::MIN_POSITIVE, ONE_MINUS)
}

/// One STAN unit: `phi·ỹ + theta·relu(ỹ)·G(ỹ; gamma, c)`.
///
/// The transition variable is the unit's own pre-activation.
#[inline]
pub fn stan_unit_forward(y_tilde: f64, phi: f64, theta: f64, gamma: f64, c: f64) -> f64 {
    phi * y_tilde + theta * relu(y_tilde) * transition_g(y_tilde, gamma, c)
}
