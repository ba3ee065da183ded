//! Discrete Gabor analysis and synthesis on a circular signal domain.
//!
//! A system is a real window `g` of length `Lg`, a hop `a` and `M` frequency
//! channels acting on signals of length `L` (a multiple of `a`). Atoms are
//!
//! ```text
//! g_{m,n}[l] = g[(l - n a) mod L] * exp(2 pi i m ((l - n a) mod L) / M)
//! ```
//!
//! i.e. the phase is measured from the window's own start, so a single unit
//! coefficient synthesizes exactly `g_{m,n}`. In the painless regime
//! (`Lg <= M`, `a <= Lg`) the frame operator is the diagonal
//! `M * sum_n |g[l - n a]|^2`, which makes the canonical dual a pointwise quotient.

use std::io::{Read, Write};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::numeric::lcm;

/// Periodic Hann window `0.5 - 0.5 cos(2 pi l / length)` without normalization.
pub fn periodic_hann(length: usize) -> Result<Vec<f64>> {
    if length < 2 {
        return Err(Error::param(format!("window length must be at least 2, got {length}")));
    }
    let n = length as f64;
    Ok((0..length)
        .map(|l| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * l as f64 / n).cos())
        .collect())
}

/// Periodic Hann window scaled to unit l2 norm.
pub fn hann_window(length: usize) -> Result<Vec<f64>> {
    let mut w = periodic_hann(length)?;
    let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
    w.iter_mut().for_each(|v| *v /= norm);
    Ok(w)
}

/// Zero-pads `signal` to a multiple of `lcm(hop, channels)`.
pub fn pad_signal(signal: &[f64], hop: usize, channels: usize) -> Vec<f64> {
    let block = lcm(hop, channels).max(1);
    let len = signal.len().div_ceil(block).max(1) * block;
    let mut out = signal.to_vec();
    out.resize(len, 0.0);
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaborSystem {
    window: Vec<f64>,
    hop: usize,
    channels: usize,
    signal_length: usize,
}

impl GaborSystem {
    pub fn new(window: Vec<f64>, hop: usize, channels: usize, signal_length: usize) -> Result<Self> {
        let lg = window.len();
        if hop == 0 || channels == 0 || signal_length == 0 {
            return Err(Error::param("hop, channels and signal length must be positive"));
        }
        if !signal_length.is_multiple_of(hop) {
            return Err(Error::param(format!(
                "signal length {signal_length} is not a multiple of hop {hop}"
            )));
        }
        if lg == 0 || lg > channels || hop > lg {
            return Err(Error::param(format!(
                "painless condition needs hop <= window length <= channels (hop {hop}, window {lg}, channels {channels})"
            )));
        }
        if lg > signal_length {
            return Err(Error::param(format!(
                "window length {lg} exceeds signal length {signal_length}"
            )));
        }
        if window.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("window has non-finite samples"));
        }
        if window.iter().all(|&v| v == 0.0) {
            return Err(Error::param("window is identically zero"));
        }
        Ok(Self {
            window,
            hop,
            channels,
            signal_length,
        })
    }

    /// Unit-norm periodic Hann system.
    pub fn hann(window_length: usize, hop: usize, channels: usize, signal_length: usize) -> Result<Self> {
        Self::new(hann_window(window_length)?, hop, channels, signal_length)
    }

    pub fn window(&self) -> &[f64] {
        &self.window
    }

    pub fn hop(&self) -> usize {
        self.hop
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn signal_length(&self) -> usize {
        self.signal_length
    }

    pub fn frames(&self) -> usize {
        self.signal_length / self.hop
    }

    pub fn coefficient_count(&self) -> usize {
        self.channels * self.frames()
    }

    pub fn redundancy(&self) -> f64 {
        self.channels as f64 / self.hop as f64
    }

    /// Same lattice on a different signal length.
    pub fn with_signal_length(&self, signal_length: usize) -> Result<Self> {
        Self::new(self.window.clone(), self.hop, self.channels, signal_length)
    }

    /// `sum_n |g[r - n a]|^2` for `r = 0..a`; the diagonal is `a`-periodic.
    fn window_energy(&self) -> Vec<f64> {
        let mut energy = vec![0.0; self.hop];
        for (j, g) in self.window.iter().enumerate() {
            energy[j % self.hop] += g * g;
        }
        energy
    }

    pub fn canonical_dual(&self) -> Result<Vec<f64>> {
        let energy = self.window_energy();
        if let Some(index) = energy.iter().position(|&e| e <= 0.0) {
            return Err(Error::Frame { index });
        }
        let m = self.channels as f64;
        Ok(self
            .window
            .iter()
            .enumerate()
            .map(|(j, g)| g / (m * energy[j % self.hop]))
            .collect())
    }

    /// Optimal frame bounds `(A, B)`; exact because the frame operator is diagonal.
    pub fn frame_bounds(&self) -> Result<(f64, f64)> {
        let energy = self.window_energy();
        let m = self.channels as f64;
        let lo = energy.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = energy.iter().copied().fold(0.0, f64::max);
        if lo <= 0.0 {
            let index = energy.iter().position(|&e| e <= 0.0).unwrap_or(0);
            return Err(Error::Frame { index });
        }
        Ok((m * lo, m * hi))
    }

    fn check_window(&self, window: &[f64]) -> Result<()> {
        if window.len() > self.channels || window.len() > self.signal_length {
            return Err(Error::param(format!(
                "window of length {} does not fit {} channels",
                window.len(),
                self.channels
            )));
        }
        Ok(())
    }

    /// Analysis with `window`: pass the system window for frame coefficients or
    /// the canonical dual for canonical coefficients.
    pub fn dgt(&self, signal: &[f64], window: &[f64]) -> Result<CoefficientGrid> {
        let signal: Vec<Complex64> = signal.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.dgt_complex(&signal, window)
    }

    pub fn dgt_complex(&self, signal: &[Complex64], window: &[f64]) -> Result<CoefficientGrid> {
        if signal.len() != self.signal_length {
            return Err(Error::param(format!(
                "signal has {} samples, system expects {}",
                signal.len(),
                self.signal_length
            )));
        }
        self.check_window(window)?;
        let (m, l, hop) = (self.channels, self.signal_length, self.hop);
        let fft = FftPlanner::new().plan_fft_forward(m);
        let mut data = vec![Complex64::default(); m * self.frames()];
        data.par_chunks_mut(m).enumerate().for_each(|(n, frame)| {
            let start = n * hop;
            for (j, w) in window.iter().enumerate() {
                frame[j] = signal[(start + j) % l] * *w;
            }
            fft.process(frame);
        });
        CoefficientGrid::new(m, self.frames(), data)
    }

    /// Canonical coefficients `<f, dual_{m,n}>`.
    pub fn canonical_coefficients(&self, signal: &[f64]) -> Result<CoefficientGrid> {
        self.dgt(signal, &self.canonical_dual()?)
    }

    /// Synthesis `sum_{m,n} c[m][n] * window_{m,n}` by inverse FFT and overlap-add.
    pub fn idgt(&self, grid: &CoefficientGrid, window: &[f64]) -> Result<Vec<Complex64>> {
        if grid.channels() != self.channels || grid.frames() != self.frames() {
            return Err(Error::param(format!(
                "grid is {}x{}, system expects {}x{}",
                grid.channels(),
                grid.frames(),
                self.channels,
                self.frames()
            )));
        }
        self.check_window(window)?;
        let (m, l, hop) = (self.channels, self.signal_length, self.hop);
        let ifft = FftPlanner::new().plan_fft_inverse(m);
        let mut frames = grid.data().to_vec();
        frames.par_chunks_mut(m).for_each(|frame| {
            if frame.iter().any(|c| *c != Complex64::default()) {
                ifft.process(frame);
            }
        });
        let mut out = vec![Complex64::default(); l];
        for (n, frame) in frames.chunks(m).enumerate() {
            let start = n * hop;
            for (j, w) in window.iter().enumerate() {
                out[(start + j) % l] += frame[j] * *w;
            }
        }
        Ok(out)
    }

    /// Real part of [`GaborSystem::idgt`], for grids of real signals.
    pub fn idgt_real(&self, grid: &CoefficientGrid, window: &[f64]) -> Result<Vec<f64>> {
        Ok(self.idgt(grid, window)?.into_iter().map(|c| c.re).collect())
    }
}

/// `M x N` complex coefficients stored frame-major: index `n * M + m`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientGrid {
    channels: usize,
    frames: usize,
    data: Vec<Complex64>,
}

const GRID_MAGIC: &[u8; 4] = b"WTHG";

/// Header flag: coefficients were computed with the canonical dual window.
pub const GRID_FLAG_CANONICAL: u32 = 1;

impl CoefficientGrid {
    pub fn new(channels: usize, frames: usize, data: Vec<Complex64>) -> Result<Self> {
        if channels.checked_mul(frames) != Some(data.len()) {
            return Err(Error::param(format!(
                "{} values do not form a {channels}x{frames} grid",
                data.len()
            )));
        }
        Ok(Self { channels, frames, data })
    }

    pub fn zeros(channels: usize, frames: usize) -> Self {
        Self {
            channels,
            frames,
            data: vec![Complex64::default(); channels * frames],
        }
    }

    /// Single-channel grid (one frequency row) from real values.
    pub fn row(values: &[f64]) -> Self {
        Self::from_real(1, values.len(), values).expect("row shape is consistent")
    }

    pub fn from_real(channels: usize, frames: usize, values: &[f64]) -> Result<Self> {
        Self::new(
            channels,
            frames,
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    pub fn flat_index(&self, channel: usize, frame: usize) -> usize {
        frame * self.channels + channel
    }

    /// `(channel, frame)` of a flat index.
    pub fn position(&self, flat: usize) -> (usize, usize) {
        (flat % self.channels, flat / self.channels)
    }

    pub fn get(&self, channel: usize, frame: usize) -> Complex64 {
        self.data[self.flat_index(channel, frame)]
    }

    pub fn set(&mut self, channel: usize, frame: usize, value: Complex64) {
        let k = self.flat_index(channel, frame);
        self.data[k] = value;
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.data.iter().map(|c| c.norm()).collect()
    }

    pub fn nonzeros(&self) -> usize {
        self.data.iter().filter(|c| **c != Complex64::default()).count()
    }

    /// Binary dump: `"WTHG"`, u32 M, u32 N, u32 flags, then little-endian f64
    /// `(re, im)` pairs in frame-major order.
    pub fn write_to<W: Write>(&self, mut out: W, flags: u32) -> Result<()> {
        let dim = |v: usize| u32::try_from(v).map_err(|_| Error::param(format!("grid dimension {v} exceeds u32")));
        out.write_all(GRID_MAGIC)?;
        out.write_all(&dim(self.channels)?.to_le_bytes())?;
        out.write_all(&dim(self.frames)?.to_le_bytes())?;
        out.write_all(&flags.to_le_bytes())?;
        let mut buf = Vec::with_capacity(self.data.len() * 16);
        for c in &self.data {
            buf.extend_from_slice(&c.re.to_le_bytes());
            buf.extend_from_slice(&c.im.to_le_bytes());
        }
        out.write_all(&buf)?;
        Ok(())
    }

    /// Inverse of [`CoefficientGrid::write_to`]; returns the grid and its flags.
    pub fn read_from<R: Read>(mut input: R) -> Result<(Self, u32)> {
        let mut header = [0u8; 16];
        input
            .read_exact(&mut header)
            .map_err(|_| Error::format("coefficient dump shorter than its 16-byte header"))?;
        if &header[..4] != GRID_MAGIC {
            return Err(Error::format("missing WTHG magic"));
        }
        let word = |i: usize| u32::from_le_bytes(header[i..i + 4].try_into().unwrap()) as usize;
        let (channels, frames, flags) = (word(4), word(8), word(12) as u32);
        let mut body = Vec::new();
        input.read_to_end(&mut body)?;
        if Some(body.len()) != channels.checked_mul(frames).and_then(|k| k.checked_mul(16)) {
            return Err(Error::format(format!(
                "payload of {} bytes does not match a {channels}x{frames} grid",
                body.len()
            )));
        }
        let data = body
            .chunks_exact(16)
            .map(|b| {
                Complex64::new(
                    f64::from_le_bytes(b[..8].try_into().unwrap()),
                    f64::from_le_bytes(b[8..].try_into().unwrap()),
                )
            })
            .collect();
        Ok((Self::new(channels, frames, data)?, flags))
    }
}
