//! Sparse time-frequency approximation by weighted thresholding of canonical
//! Gabor frame coefficients.
//!
//! - [`lorentz`]: Lorentz quasi-norms, rearrangements and tail-error curves.
//! - [`weighting`]: banded neighbourhood weights and the weighted ordering.
//! - [`gabor`]: painless-case Gabor analysis/synthesis with the canonical dual.
//! - [`approx`]: greedy and weighted m-term thresholding, windowed group lasso,
//!   error curves and rate fits.
//! - [`harness`]: WAV I/O, test signals, noise, spectrograms and the comparison runner.

pub mod approx;
pub mod error;
pub mod gabor;
pub mod harness;
pub mod lorentz;
pub mod numeric;
pub mod weighting;

pub use approx::{
    coefficient_error_curve, constructive_approx, error_curve, fit_rate, greedy_mterm, rms, weighted_mterm,
    wgl_denoise, wgl_match_sparsity, Approximant, ErrorNorm, RateFit, WglConfig,
};
pub use error::{Error, Result};
pub use gabor::{hann_window, periodic_hann, CoefficientGrid, GaborSystem};
pub use lorentz::{
    approx_space_norm, lorentz_norm, rearrange, sigma_curve, tail_norm, CoefficientSequence, DecayCurve, Exponent,
    LorentzParams,
};
pub use weighting::{
    apply_weight_1d, apply_weight_2d, lemma1_ratio, weighted_ordering, Tap, WeightStencil1D, WeightStencil2D,
    WeightedOrdering,
};
