//! Smooth transition autoregressive network.
//!
//! Each unit of a layer computes
//!
//! ```text
//! ŷ = phi·ỹ + theta·relu(ỹ)·G(ỹ; gamma, c),    G(z; γ, c) = 1 / (1 + exp(-γ(z - c)))
//! ```
//!
//! where `ỹ = x·W + b` is the unit's pre-activation, which also serves as the
//! transition variable. The first layer maps the flattened lookback window
//! (length `q`) to `d` units, later layers map `d → d`, and an affine head maps
//! the last layer to the `τ` forecast steps.

mod gate;
mod layer;
mod network;

pub use gate::{stan_unit_forward, transition_g};
pub use layer::{stan_layer_backward, stan_layer_forward, StanCache, StanLayer, StanLayerGrads, StanLayerParams};
pub use network::{
    count_parameters, init_network, network_backward, network_forward, NetworkCache, NetworkSpec, StanNetwork,
    LAYER_TENSORS,
};
