//! Operator-valued processes with stationary increments.
//!
//! A spectral density `m` defines `S_m` (the Fourier multiplier by `sqrt(m)`),
//! coefficient functions `f_n(t) = ∫_0^t S_m ξ_n`, the process
//! `X_m(t) = T_{f_m(t)}` with `f_m(t) = Σ_n f_n(t) i_n`, and its derivative
//! `W_m(t) = T_{df_m/dt}`. The covariance `⟨X_m(t)1, X_m(s)1⟩` is the Hermite
//! series `Σ_n f_n(t) f_n(s)`, which is compared against a direct quadrature of
//! the spectral kernel.

pub mod bounds;
pub mod density;
pub mod hermite;
pub mod integral;
pub mod kernel;
pub mod model;
pub mod quadrature;

pub use bounds::{default_bound_grid, fit_bound_params, DerivativeBoundParams};
pub use density::{GrowthParams, SpectralDensity};
pub use hermite::{hermite_table, hermite_xi};
pub use integral::{pettis_convergence, pettis_integral, ConvergenceRow, IntegralReport};
pub use kernel::{
    covariance_grid, covariance_oracle, covariance_series, fbm_closed_form, gamma_h, relative_error, CovarianceGrid,
    CovarianceRow,
};
pub use model::{ModelConfig, ProcessModel};
