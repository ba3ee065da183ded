//! Lorentz sequence quasi-norms over finite coefficient sequences.
//!
//! For a sequence with non-increasing rearrangement `a*_1 >= a*_2 >= ...` the
//! Lorentz quasi-norm with parameters `(tau, q)` is
//!
//! ```text
//! q finite:   ( sum_m [ m^(1/tau) a*_m ]^q / m )^(1/q)
//! q = inf:    sup_m m^(1/tau) a*_m
//! ```
//!
//! With `q == tau` this is the plain `l^tau` (quasi-)norm. All sequences are
//! finite, so every sum and supremum runs over the stored entries only.

use num_complex::Complex64;
use rayon::slice::ParallelSliceMut;

use crate::error::{Error, Result};
use crate::numeric::NeumaierSum;

/// Second Lorentz exponent. `Infinity` is its own case, not a large number.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    fn validate(self, what: &str) -> Result<Self> {
        match self {
            Exponent::Finite(q) if !(q > 0.0 && q.is_finite()) => {
                Err(Error::param(format!("{what} must be positive, got {q}")))
            }
            other => Ok(other),
        }
    }
}

impl std::fmt::Display for Exponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Exponent::Finite(q) => write!(f, "{q}"),
            Exponent::Infinity => f.write_str("inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LorentzParams {
    tau: f64,
    q: Exponent,
}

impl LorentzParams {
    pub fn new(tau: f64, q: Exponent) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::param(format!("tau must be positive, got {tau}")));
        }
        Ok(Self {
            tau,
            q: q.validate("q")?,
        })
    }

    /// Parameters for which the quasi-norm is the plain `l^p` norm.
    pub fn lp(p: f64) -> Result<Self> {
        Self::new(p, Exponent::Finite(p))
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn q(&self) -> Exponent {
        self.q
    }
}

/// A finite list of complex coefficients with finite moduli.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CoefficientSequence {
    entries: Vec<Complex64>,
}

impl CoefficientSequence {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if let Some(k) = entries.iter().position(|c| !c.norm().is_finite()) {
            return Err(Error::param(format!("non-finite coefficient at index {k}")));
        }
        Ok(Self { entries })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.entries.iter().map(|c| c.norm()).collect()
    }
}

/// Sorted magnitudes plus the map from rank to original (0-based) index.
#[derive(Clone, Debug, PartialEq)]
pub struct Rearrangement {
    pub magnitudes: Vec<f64>,
    pub permutation: Vec<usize>,
}

/// Values `sigma_m` (or any error measure) at approximation sizes `ms`.
///
/// Dense curves have `ms = 1..=len`, matching a sum that starts at `m = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct DecayCurve {
    ms: Vec<usize>,
    values: Vec<f64>,
}

impl DecayCurve {
    pub fn dense(values: Vec<f64>) -> Result<Self> {
        let ms = (1..=values.len()).collect();
        Self::sampled(ms, values)
    }

    pub fn sampled(ms: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        if ms.len() != values.len() {
            return Err(Error::param(format!(
                "curve has {} sizes but {} values",
                ms.len(),
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
            return Err(Error::param(format!(
                "curve value {v} is not a finite nonnegative number"
            )));
        }
        if ms.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::param("curve sizes must be strictly ascending"));
        }
        Ok(Self { ms, values })
    }

    pub fn ms(&self) -> &[usize] {
        &self.ms
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.ms.iter().copied().zip(self.values.iter().copied())
    }
}

/// Non-increasing rearrangement; equal magnitudes keep ascending original index.
pub fn rearrange(seq: &CoefficientSequence) -> Rearrangement {
    let mags = seq.magnitudes();
    let permutation = descending_order(&mags);
    let magnitudes = permutation.iter().map(|&k| mags[k]).collect();
    Rearrangement {
        magnitudes,
        permutation,
    }
}

/// Stable descending argsort of nonnegative values.
pub(crate) fn descending_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    // rayon's par_sort_by is stable, so the tie-break survives parallel sorting.
    order.par_sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    order
}

pub fn lorentz_norm(seq: &CoefficientSequence, params: LorentzParams) -> f64 {
    let mut mags = seq.magnitudes();
    mags.sort_by(|a, b| b.total_cmp(a));
    lorentz_norm_nonincreasing(&mags, params)
}

/// Lorentz quasi-norm of magnitudes taken in the given order, which the caller
/// guarantees to be non-increasing (the rank `m` is the position plus one).
pub fn lorentz_norm_nonincreasing(values: &[f64], params: LorentzParams) -> f64 {
    weighted_rank_norm(values, 1.0 / params.tau, params.q)
}

/// `(sum_m [m^power v_m]^q / m)^(1/q)` or `sup_m m^power v_m`, evaluated in the log
/// domain and rescaled by the supremum so no intermediate over- or underflows.
fn weighted_rank_norm(values: &[f64], power: f64, q: Exponent) -> f64 {
    let log_terms = || {
        values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v > 0.0)
            .map(move |(i, v)| (i + 1, ((i + 1) as f64).ln() * power + v.ln()))
    };
    let log_sup = log_terms().map(|(_, t)| t).fold(f64::NEG_INFINITY, f64::max);
    if log_sup == f64::NEG_INFINITY {
        return 0.0;
    }
    match q {
        Exponent::Infinity => log_sup.exp(),
        Exponent::Finite(q) => {
            let mut sum = NeumaierSum::default();
            for (m, t) in log_terms() {
                sum.add((q * (t - log_sup)).exp() / m as f64);
            }
            log_sup.exp() * sum.total().powf(1.0 / q)
        }
    }
}

/// Lorentz quasi-norm of the rearranged magnitudes with the `m` largest removed.
///
/// In the canonical basis this is the best `m`-term error in the sequence space.
pub fn tail_norm(seq: &CoefficientSequence, m: usize, params: LorentzParams) -> f64 {
    let r = rearrange(seq);
    tail_of_sorted(&r.magnitudes, m, params)
}

fn tail_of_sorted(sorted: &[f64], m: usize, params: LorentzParams) -> f64 {
    if m >= sorted.len() {
        return 0.0;
    }
    lorentz_norm_nonincreasing(&sorted[m..], params)
}

/// `sigma_m` for `m = 1..=m_max`.
pub fn sigma_curve(seq: &CoefficientSequence, params: LorentzParams, m_max: usize) -> Result<DecayCurve> {
    if m_max < 1 {
        return Err(Error::param("m_max must be at least 1"));
    }
    let sorted = rearrange(seq).magnitudes;
    let values = (1..=m_max).map(|m| tail_of_sorted(&sorted, m, params)).collect();
    DecayCurve::dense(values)
}

/// Approximation-space norm: the `l_q^(1/alpha)` Lorentz norm of the curve (taken
/// in stored order, which is already non-increasing for error curves) plus the
/// caller-supplied norm of the function itself.
pub fn approx_space_norm(curve: &DecayCurve, base_norm: f64, alpha: f64, q: Exponent) -> Result<f64> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::param(format!("alpha must be positive, got {alpha}")));
    }
    let q = q.validate("q")?;
    if !(base_norm >= 0.0 && base_norm.is_finite()) {
        return Err(Error::param(format!(
            "base norm must be finite and nonnegative, got {base_norm}"
        )));
    }
    Ok(weighted_rank_norm(curve.values(), alpha, q) + base_norm)
}
