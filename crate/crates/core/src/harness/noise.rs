use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::numeric::l2_norm;

/// Generator identifier echoed in reports.
pub const RNG_ALGORITHM: &str = "chacha8(seed, stream) + standard-normal ziggurat (rand_distr 0.5)";

/// Deterministic generator for stream `stream` of `seed`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Adds white Gaussian noise rescaled after drawing so the realized SNR is exactly `snr_db`.
pub fn add_awgn(signal: &[f64], snr_db: f64, seed: u64, stream: u64) -> Result<Vec<f64>> {
    if !snr_db.is_finite() {
        return Err(Error::param(format!("SNR must be finite, got {snr_db}")));
    }
    let signal_norm = l2_norm(signal);
    if signal_norm == 0.0 {
        return Err(Error::param("cannot set an SNR for an all-zero signal"));
    }
    let mut rng = rng_for(seed, stream);
    let noise: Vec<f64> = (0..signal.len()).map(|_| StandardNormal.sample(&mut rng)).collect();
    let noise_norm = l2_norm(&noise);
    let scale = signal_norm / noise_norm * 10f64.powf(-snr_db / 20.0);
    Ok(signal.iter().zip(&noise).map(|(s, n)| s + scale * n).collect())
}
