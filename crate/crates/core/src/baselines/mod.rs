//! Non-recurrent comparison models: closed-form regression, the linear
//! network and the ReLU MLP.

mod linreg;
mod mlp;

pub use linreg::{fit_linear_regression, LinearRegression, RIDGE};
pub use mlp::{
    build_linear_nn, build_mlp, linear_parameter_count, mlp_parameter_count, LinearSpec, Mlp, MlpCache, MlpSpec,
};
