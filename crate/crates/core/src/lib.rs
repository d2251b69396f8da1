//! Truncated Grassmann algebra with Fock-space operators, weighted distribution
//! norms, and a Grassmann-valued analog of processes with stationary increments.
//!
//! Module map:
//! - [`index`], [`element`], [`conjugation`], [`json`]: arithmetic in `Λ_N`.
//! - [`fock`]: `M_f`, its adjoint (left derivative), Berezin integration, `T_f`.
//! - [`distribution`]: weights `c_α`, `H_{-p}` norms, Våge constants, power series.
//! - [`process`]: spectral densities, `S_m` on Hermite functions, `X_m(t)`, `W_m(t)`,
//!   covariance kernels and Riemann-sum integrals.
//! - [`oracle`]: slow reference implementations used by tests and the check suites.
//! - [`suite`]: randomized invariant checks driven by the CLI and the acceptance tests.

// Quadrature tables are kept at full published precision, and `!(x <= tol)`
// deliberately treats NaN as a failure.
#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod conjugation;
pub mod distribution;
pub mod element;
pub mod error;
pub mod exec;
pub mod fock;
pub mod index;
pub mod json;
pub mod oracle;
pub mod process;
pub mod suite;

pub use conjugation::ConjugationId;
pub use element::GrassmannElement;
pub use error::{Error, Result};
pub use exec::Execution;
pub use index::{index_product, MultiIndex, SignedIndex};
