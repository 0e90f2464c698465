//! Tail asymptotics of the component-wise suprema of a correlated
//! two-dimensional Brownian motion with linear drifts,
//!
//! ```text
//! P(u) = P( sup_t (X1(t) - mu1 t) > u,  sup_s (X2(s) - mu2 s) > u ),   u -> infinity,
//! ```
//!
//! together with the machinery to check them: the quadratic two-layer
//! minimisation giving the decay rate, the Pickands-type constants in the
//! prefactor, and importance-sampling Monte Carlo.

pub mod asymptotics;
pub mod cli;
pub mod constants;
pub mod error;
pub mod mc;
pub mod model;
pub mod normal;
pub mod quadrature;
pub mod simulation;
pub mod variational;

pub use error::{Error, Result};
pub use model::{canonicalize, classify, ModelParams, Regime, RegimeTag};
