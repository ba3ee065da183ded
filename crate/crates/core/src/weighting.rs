//! Banded non-negative neighbourhood weights on coefficient magnitudes.
//!
//! In one dimension a stencil `lambda_{-W}..lambda_{W}` is a banded Toeplitz
//! matrix acting on `|c|`:
//!
//! ```text
//! c^w_k = sum_{j=k-W}^{k+W} lambda_{j-k} |c_j|
//! ```
//!
//! with out-of-range `c_j` taken as zero. On a time-frequency grid the same idea
//! uses a finite map of `(channel offset, frame offset) -> weight`. With frame-major
//! flattening any 2-D stencil is again banded, with bandwidth at most a few
//! multiples of the channel count.

use crate::error::{Error, Result};
use crate::gabor::CoefficientGrid;
use crate::lorentz::{descending_order, lorentz_norm_nonincreasing, CoefficientSequence, LorentzParams};
use rayon::prelude::*;

/// Symmetric-band 1-D stencil with `2W + 1` weights, index `W` is the diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightStencil1D {
    weights: Vec<f64>,
}

impl WeightStencil1D {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.len() % 2 != 1 {
            return Err(Error::param(format!(
                "a band of bandwidth W needs 2W+1 weights, got {}",
                weights.len()
            )));
        }
        if weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
            return Err(Error::param("stencil weights must be finite and nonnegative"));
        }
        let center = weights[weights.len() / 2];
        if center <= 0.0 {
            return Err(Error::param("center weight must be positive"));
        }
        Ok(Self { weights })
    }

    pub fn identity() -> Self {
        Self { weights: vec![1.0] }
    }

    pub fn all_ones(bandwidth: usize) -> Self {
        Self {
            weights: vec![1.0; 2 * bandwidth + 1],
        }
    }

    pub fn bandwidth(&self) -> usize {
        self.weights.len() / 2
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `lambda_l` for `l` in `-W..=W`.
    pub fn lambda(&self, l: isize) -> f64 {
        let idx = l + self.bandwidth() as isize;
        usize::try_from(idx)
            .ok()
            .and_then(|i| self.weights.get(i).copied())
            .unwrap_or(0.0)
    }

    pub fn center(&self) -> f64 {
        self.weights[self.bandwidth()]
    }

    pub fn max_weight(&self) -> f64 {
        self.weights.iter().copied().fold(0.0, f64::max)
    }

    /// Lifts the band onto the frame axis of a grid (time-direction neighbours).
    pub fn horizontal(&self) -> WeightStencil2D {
        let w = self.bandwidth() as isize;
        WeightStencil2D {
            taps: (-w..=w)
                .zip(&self.weights)
                .map(|(dn, wt)| Tap {
                    channel: 0,
                    frame: dn,
                    weight: *wt,
                })
                .collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tap {
    pub channel: isize,
    pub frame: isize,
    pub weight: f64,
}

impl Tap {
    pub fn new(channel: isize, frame: isize, weight: f64) -> Self {
        Self { channel, frame, weight }
    }
}

/// Weighted neighbourhood on a time-frequency grid.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightStencil2D {
    taps: Vec<Tap>,
}

pub const PRESET_NAMES: [&str; 5] = ["identity", "weight1", "weight2", "weight3", "extreme-horizontal"];

impl WeightStencil2D {
    pub fn new(taps: Vec<Tap>) -> Result<Self> {
        if taps.iter().any(|t| !(t.weight >= 0.0 && t.weight.is_finite())) {
            return Err(Error::param("stencil weights must be finite and nonnegative"));
        }
        for (i, a) in taps.iter().enumerate() {
            if taps[..i].iter().any(|b| (a.channel, a.frame) == (b.channel, b.frame)) {
                return Err(Error::param(format!(
                    "duplicate tap at offset ({}, {})",
                    a.channel, a.frame
                )));
            }
        }
        let center = taps
            .iter()
            .find(|t| t.channel == 0 && t.frame == 0)
            .map(|t| t.weight)
            .unwrap_or(0.0);
        if center <= 0.0 {
            return Err(Error::param("tap (0, 0) must be present with positive weight"));
        }
        Ok(Self { taps })
    }

    pub fn identity() -> Self {
        Self {
            taps: vec![Tap::new(0, 0, 1.0)],
        }
    }

    /// `|c_{m,n}| + (|c_{m-1,n}| + |c_{m+1,n}|) / 2` (frequency neighbours).
    pub fn weight1() -> Self {
        Self {
            taps: vec![Tap::new(0, 0, 1.0), Tap::new(-1, 0, 0.5), Tap::new(1, 0, 0.5)],
        }
    }

    /// `|c_{m,n}| + (|c_{m,n-1}| + |c_{m,n+1}|) / 2` (time neighbours).
    pub fn weight2() -> Self {
        Self {
            taps: vec![Tap::new(0, 0, 1.0), Tap::new(0, -1, 0.5), Tap::new(0, 1, 0.5)],
        }
    }

    /// Centre plus the four edge neighbours at weight 1/4.
    pub fn weight3() -> Self {
        Self {
            taps: vec![
                Tap::new(0, 0, 1.0),
                Tap::new(0, -1, 0.25),
                Tap::new(-1, 0, 0.25),
                Tap::new(0, 1, 0.25),
                Tap::new(1, 0, 0.25),
            ],
        }
    }

    /// Unit weights on frames `n-2..=n+2`.
    pub fn extreme_horizontal() -> Self {
        WeightStencil1D::all_ones(2).horizontal()
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "identity" => Ok(Self::identity()),
            "weight1" => Ok(Self::weight1()),
            "weight2" => Ok(Self::weight2()),
            "weight3" => Ok(Self::weight3()),
            "extreme-horizontal" => Ok(Self::extreme_horizontal()),
            other => Err(Error::param(format!(
                "unknown stencil preset {other:?} (expected one of {})",
                PRESET_NAMES.join(", ")
            ))),
        }
    }

    /// Parses a preset name or an explicit tap list `"dm:dn:w,dm:dn:w,..."`.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        if !spec.contains(':') {
            return Self::preset(spec);
        }
        let taps = spec
            .split(',')
            .map(|tap| {
                let parts: Vec<&str> = tap.trim().split(':').collect();
                let bad = || Error::param(format!("tap {tap:?} is not of the form dm:dn:weight"));
                if parts.len() != 3 {
                    return Err(bad());
                }
                Ok(Tap::new(
                    parts[0].parse().map_err(|_| bad())?,
                    parts[1].parse().map_err(|_| bad())?,
                    parts[2].parse().map_err(|_| bad())?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(taps)
    }

    pub fn taps(&self) -> &[Tap] {
        &self.taps
    }

    pub fn center(&self) -> f64 {
        self.taps
            .iter()
            .find(|t| t.channel == 0 && t.frame == 0)
            .map(|t| t.weight)
            .expect("validated stencil has a centre tap")
    }

    pub fn is_identity(&self) -> bool {
        self.taps
            .iter()
            .all(|t| (t.channel == 0 && t.frame == 0) || t.weight == 0.0)
    }
}

pub fn apply_weight_1d(seq: &CoefficientSequence, stencil: &WeightStencil1D) -> Vec<f64> {
    apply_weight_1d_magnitudes(&seq.magnitudes(), stencil)
}

pub fn apply_weight_1d_magnitudes(mags: &[f64], stencil: &WeightStencil1D) -> Vec<f64> {
    let w = stencil.bandwidth() as isize;
    let n = mags.len() as isize;
    (0..n)
        .map(|k| {
            let mut acc = 0.0;
            for (l, lambda) in (-w..=w).zip(stencil.weights()) {
                let j = k + l;
                if (0..n).contains(&j) {
                    acc += lambda * mags[j as usize];
                }
            }
            acc
        })
        .collect()
}

/// Per-cell weighted magnitudes, frame-major like the grid.
pub fn apply_weight_2d(grid: &CoefficientGrid, stencil: &WeightStencil2D) -> Vec<f64> {
    stencil_sum(&grid.magnitudes(), grid.channels(), grid.frames(), stencil)
}

/// `out[m, n] = sum_taps w * values[m + dm, n + dn]` with zero padding.
/// Every cell sums its taps in stored order, so the result does not depend on
/// how cells are scheduled across threads.
pub fn stencil_sum(values: &[f64], channels: usize, frames: usize, stencil: &WeightStencil2D) -> Vec<f64> {
    let mut out = vec![0.0; values.len()];
    stencil_sum_into(values, channels, frames, stencil, &mut out);
    out
}

/// [`stencil_sum`] into a caller-owned buffer of the same length as `values`.
pub fn stencil_sum_into(values: &[f64], channels: usize, frames: usize, stencil: &WeightStencil2D, out: &mut [f64]) {
    assert_eq!(values.len(), channels * frames, "values do not match grid shape");
    assert_eq!(out.len(), values.len(), "output does not match grid shape");
    if channels == 0 {
        return;
    }
    let (mc, nf) = (channels as isize, frames as isize);
    out.par_chunks_mut(channels).enumerate().for_each(|(n, column)| {
        column.fill(0.0);
        for tap in &stencil.taps {
            let nn = n as isize + tap.frame;
            if !(0..nf).contains(&nn) {
                continue;
            }
            let src = &values[nn as usize * channels..(nn as usize + 1) * channels];
            // Destination rows m with 0 <= m + dm < M.
            let lo = (-tap.channel).clamp(0, mc) as usize;
            let hi = (mc - tap.channel).clamp(0, mc) as usize;
            if lo >= hi {
                continue;
            }
            let shift = (lo as isize + tap.channel) as usize;
            let w = tap.weight;
            for (cell, v) in column[lo..hi].iter_mut().zip(&src[shift..shift + (hi - lo)]) {
                *cell += w * v;
            }
        }
    });
}

/// Rank-to-index map sorting the weighted values non-increasingly.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedOrdering {
    pub permutation: Vec<usize>,
    pub weighted_values: Vec<f64>,
}

/// Stable: equal weighted values keep ascending (frame-major) flat index.
pub fn weighted_ordering(weighted: &[f64]) -> WeightedOrdering {
    let permutation = descending_order(weighted);
    let weighted_values = permutation.iter().map(|&k| weighted[k]).collect();
    WeightedOrdering {
        permutation,
        weighted_values,
    }
}

/// Both sides of the tail comparison between weighted and plain thresholding
/// of a non-increasing sequence, and the constant `(lambda_max / lambda_0)(2W+1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lemma1Ratio {
    /// Norm of the coefficients discarded by weighted thresholding at size `m`.
    pub lhs: f64,
    /// Norm of the plain tail starting `W` positions early.
    pub rhs: f64,
    pub bound: f64,
}

impl Lemma1Ratio {
    pub fn holds(&self) -> bool {
        self.lhs <= self.bound * self.rhs * (1.0 + 1e-12) + f64::MIN_POSITIVE
    }
}

pub fn lemma1_ratio(
    seq: &CoefficientSequence,
    stencil: &WeightStencil1D,
    m: usize,
    params: LorentzParams,
) -> Result<Lemma1Ratio> {
    let omega = stencil.bandwidth();
    if m < omega {
        return Err(Error::param(format!("m = {m} must be at least the bandwidth {omega}")));
    }
    let mags = seq.magnitudes();
    if mags.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::param("sequence magnitudes must be non-increasing"));
    }
    let order = weighted_ordering(&apply_weight_1d_magnitudes(&mags, stencil));
    let mut discarded: Vec<f64> = order.permutation.iter().skip(m).map(|&k| mags[k]).collect();
    discarded.sort_by(|a, b| b.total_cmp(a));
    let lhs = lorentz_norm_nonincreasing(&discarded, params);
    let start = (m - omega).min(mags.len());
    let rhs = lorentz_norm_nonincreasing(&mags[start..], params);
    let bound = stencil.max_weight() / stencil.center() * (2 * omega + 1) as f64;
    Ok(Lemma1Ratio { lhs, rhs, bound })
}
