//! Q-Wiener noise: spectra, reproducible increment sampling, the
//! coarse-from-fine aggregation identity, and closed-form moment bounds.

mod bounds;
mod increments;
mod rng;
mod spectrum;

pub use bounds::{
    besov_block_bound_exact, convolution_l2_sq_exact, increment_scaling_exact, sobolev_series,
    TruncatedSeries,
};
pub use increments::{
    aggregate_increments, convolution_increment, increment_std, sample_increments, IncrementPack,
    IncrementScales,
};
pub use rng::{philox4x32_10, GaussianStream};
pub use spectrum::{NoiseSpectrum, SpectrumKind, POWER_DELTA_RANGE};

/// Environment variable consulted for the master seed.
pub const SEED_ENV_VAR: &str = "SPDE_SEED";
