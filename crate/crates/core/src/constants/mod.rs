//! Pickands-type constants: the one-dimensional `H(mu; T)` by quadrature and
//! the band constants `H(T, S)` and `H~` by Monte Carlo.

pub mod band;
pub mod pickands;

pub use band::{
    estimate_h_band, estimate_h_band_with, estimate_htilde, staircase_measure, BandMethod,
    BandOptions, BandRegion, HtildeEstimate,
};
pub use pickands::{crossing_prob, h_mu_t};
