//! m-term approximation by (weighted) thresholding of canonical Gabor
//! coefficients, the windowed-group-lasso shrinkage baseline, error curves and
//! log-log rate fits.

use std::io::{Read, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gabor::{CoefficientGrid, GaborSystem};
use crate::lorentz::{descending_order, lorentz_norm_nonincreasing, DecayCurve, LorentzParams};
use crate::numeric::{l2_norm, NeumaierSum};
use crate::weighting::{apply_weight_2d, stencil_sum, stencil_sum_into, weighted_ordering, Tap, WeightStencil2D};

/// Coefficients retained by thresholding, in rank order.
///
/// Retained values are copied from the source grid unchanged.
#[derive(Clone, Debug, PartialEq)]
pub struct Approximant {
    channels: usize,
    frames: usize,
    kept: Vec<usize>,
    values: Vec<Complex64>,
}

impl Approximant {
    fn from_ranking(grid: &CoefficientGrid, ranking: &[usize], m: usize) -> Self {
        let kept = ranking[..m].to_vec();
        let values = kept.iter().map(|&k| grid.data()[k]).collect();
        Self {
            channels: grid.channels(),
            frames: grid.frames(),
            kept,
            values,
        }
    }

    pub fn len(&self) -> usize {
        self.kept.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kept.is_empty()
    }

    /// Frame-major flat indices in rank order.
    pub fn kept_indices(&self) -> &[usize] {
        &self.kept
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    /// Full grid with zeros off the kept set.
    pub fn to_grid(&self) -> CoefficientGrid {
        let mut grid = CoefficientGrid::zeros(self.channels, self.frames);
        let data = grid.data_mut();
        for (&k, &v) in self.kept.iter().zip(&self.values) {
            data[k] = v;
        }
        grid
    }

    /// `u32 count`, then `(u32 m, u32 n, f64 re, f64 im)` per kept coefficient in
    /// rank order, all little-endian.
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        let to_u32 = |v: usize| u32::try_from(v).map_err(|_| Error::param(format!("{v} exceeds u32")));
        let mut buf = Vec::with_capacity(4 + 24 * self.kept.len());
        buf.extend_from_slice(&to_u32(self.kept.len())?.to_le_bytes());
        for (&k, v) in self.kept.iter().zip(&self.values) {
            let (m, n) = (k % self.channels, k / self.channels);
            buf.extend_from_slice(&to_u32(m)?.to_le_bytes());
            buf.extend_from_slice(&to_u32(n)?.to_le_bytes());
            buf.extend_from_slice(&v.re.to_le_bytes());
            buf.extend_from_slice(&v.im.to_le_bytes());
        }
        out.write_all(&buf)?;
        Ok(())
    }

    /// Reads records written by [`Approximant::write_to`] for a grid of the given shape.
    pub fn read_from<R: Read>(mut input: R, channels: usize, frames: usize) -> Result<Self> {
        let mut bytes = Vec::new();
        input.read_to_end(&mut bytes)?;
        if bytes.len() < 4 {
            return Err(Error::format("approximant record shorter than its count"));
        }
        let count = u32::from_le_bytes(bytes[..4].try_into().unwrap()) as usize;
        if bytes.len() != 4 + 24 * count {
            return Err(Error::format(format!(
                "approximant of {count} records needs {} bytes, got {}",
                4 + 24 * count,
                bytes.len()
            )));
        }
        let mut kept = Vec::with_capacity(count);
        let mut values = Vec::with_capacity(count);
        for rec in bytes[4..].chunks_exact(24) {
            let m = u32::from_le_bytes(rec[..4].try_into().unwrap()) as usize;
            let n = u32::from_le_bytes(rec[4..8].try_into().unwrap()) as usize;
            if m >= channels || n >= frames {
                return Err(Error::format(format!(
                    "record ({m}, {n}) outside {channels}x{frames} grid"
                )));
            }
            kept.push(n * channels + m);
            values.push(Complex64::new(
                f64::from_le_bytes(rec[8..16].try_into().unwrap()),
                f64::from_le_bytes(rec[16..24].try_into().unwrap()),
            ));
        }
        Ok(Self {
            channels,
            frames,
            kept,
            values,
        })
    }
}

fn check_budget(grid: &CoefficientGrid, m: usize) -> Result<()> {
    if m > grid.len() {
        return Err(Error::param(format!(
            "m = {m} exceeds the {} available coefficients",
            grid.len()
        )));
    }
    Ok(())
}

/// Keeps the `m` largest-magnitude coefficients (ties: ascending flat index).
pub fn greedy_mterm(grid: &CoefficientGrid, m: usize) -> Result<Approximant> {
    check_budget(grid, m)?;
    let ranking = descending_order(&grid.magnitudes());
    Ok(Approximant::from_ranking(grid, &ranking, m))
}

/// Keeps the original coefficients at the `m` positions with largest weighted magnitude.
pub fn weighted_mterm(grid: &CoefficientGrid, stencil: &WeightStencil2D, m: usize) -> Result<Approximant> {
    check_budget(grid, m)?;
    let ranking = weighted_ranking(grid, stencil);
    Ok(Approximant::from_ranking(grid, &ranking, m))
}

fn weighted_ranking(grid: &CoefficientGrid, stencil: &WeightStencil2D) -> Vec<usize> {
    if stencil.is_identity() {
        descending_order(&grid.magnitudes())
    } else {
        weighted_ordering(&apply_weight_2d(grid, stencil)).permutation
    }
}

/// Canonical coefficients, weighted thresholding to `m` terms, synthesis with
/// the system window. Returns the real part of the synthesized signal.
pub fn constructive_approx(
    signal: &[f64],
    system: &GaborSystem,
    stencil: &WeightStencil2D,
    m: usize,
) -> Result<(Vec<f64>, Approximant)> {
    let grid = system.canonical_coefficients(signal)?;
    let approximant = weighted_mterm(&grid, stencil, m)?;
    let out = system.idgt_real(&approximant.to_grid(), system.window())?;
    Ok((out, approximant))
}

#[derive(Clone, Debug, PartialEq)]
pub struct WglConfig {
    pub neighborhood: WeightStencil2D,
    pub threshold: f64,
    pub iterations: usize,
    /// Scales the threshold applied in each iteration.
    pub step: f64,
}

impl Default for WglConfig {
    /// Horizontal asymmetric neighbourhood `{(0,0): 1, (0,1): 0.5, (0,2): 0.25}`,
    /// 20 iterations, unit step, zero threshold.
    fn default() -> Self {
        Self {
            neighborhood: WeightStencil2D::new(vec![Tap::new(0, 0, 1.0), Tap::new(0, 1, 0.5), Tap::new(0, 2, 0.25)])
                .expect("default neighbourhood is valid"),
            threshold: 0.0,
            iterations: 20,
            step: 1.0,
        }
    }
}

impl WglConfig {
    pub fn with_threshold(&self, threshold: f64) -> Self {
        Self {
            threshold,
            ..self.clone()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.iterations < 1 {
            return Err(Error::param("WGL needs at least one iteration"));
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::param(format!("WGL step must be positive, got {}", self.step)));
        }
        if !(self.threshold >= 0.0 && self.threshold.is_finite()) {
            return Err(Error::param(format!(
                "WGL threshold must be finite and nonnegative, got {}",
                self.threshold
            )));
        }
        Ok(())
    }
}

/// Neighbourhood energy `sqrt(sum_taps w |c|^2)` for every cell.
fn neighborhood_energy(grid: &CoefficientGrid, stencil: &WeightStencil2D) -> Vec<f64> {
    let power: Vec<f64> = grid.data().iter().map(|c| c.norm_sqr()).collect();
    let mut s = stencil_sum(&power, grid.channels(), grid.frames(), stencil);
    s.iter_mut().for_each(|v| *v = v.sqrt());
    s
}

pub fn wgl_denoise(grid: &CoefficientGrid, config: &WglConfig) -> Result<CoefficientGrid> {
    config.validate()?;
    let mut out = grid.clone();
    let level = config.step * config.threshold;
    if level == 0.0 {
        return Ok(out);
    }
    let (channels, frames) = (grid.channels(), grid.frames());
    let mut power = vec![0.0; grid.len()];
    let mut energy = vec![0.0; grid.len()];
    for _ in 0..config.iterations {
        for (p, c) in power.iter_mut().zip(out.data()) {
            *p = c.norm_sqr();
        }
        stencil_sum_into(&power, channels, frames, &config.neighborhood, &mut energy);
        for (c, s) in out.data_mut().iter_mut().zip(&energy) {
            let s = s.sqrt();
            let gain = if s > 0.0 { (1.0 - level / s).max(0.0) } else { 0.0 };
            *c *= gain;
        }
    }
    Ok(out)
}

pub fn wgl_match_sparsity(grid: &CoefficientGrid, base: &WglConfig, target: usize) -> Result<(CoefficientGrid, f64)> {
    base.validate()?;
    if target == 0 || target > grid.len() {
        return Err(Error::param(format!(
            "target nonzeros must lie in 1..={}, got {target}",
            grid.len()
        )));
    }
    let tolerance = target / 100;
    let within = |count: usize| count.abs_diff(target) <= tolerance;

    let mut lo = 0.0;
    let unshrunk = grid.nonzeros();
    if unshrunk <= target {
        if within(unshrunk) {
            return Ok((grid.clone(), 0.0));
        }
        return Err(Error::Search {
            lo: 0.0,
            hi: 0.0,
            count: unshrunk,
            target,
        });
    }
    // Any threshold at or above the largest neighbourhood energy zeroes every cell.
    let mut hi = neighborhood_energy(grid, &base.neighborhood)
        .into_iter()
        .fold(0.0, f64::max)
        / base.step;
    let mut best: Option<(usize, f64, CoefficientGrid)> = None;
    for _ in 0..64 {
        let mid = 0.5 * (lo + hi);
        let out = wgl_denoise(grid, &base.with_threshold(mid))?;
        let count = out.nonzeros();
        if best
            .as_ref()
            .is_none_or(|(c, _, _)| count.abs_diff(target) < c.abs_diff(target))
        {
            best = Some((count, mid, out));
        }
        if count == target {
            break;
        }
        if count > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-9 * hi {
            break;
        }
    }
    match best {
        Some((count, threshold, out)) if within(count) => Ok((out, threshold)),
        Some((count, _, _)) => Err(Error::Search { lo, hi, count, target }),
        None => unreachable!("at least one bisection step runs"),
    }
}

/// Norm used to measure approximation error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ErrorNorm {
    /// `||f - f_m||_2` over signal samples.
    SampleL2,
    /// Lorentz norm of the canonical coefficients left out of the approximant.
    CoeffLorentz(LorentzParams),
}

fn check_m_list(m_list: &[usize], available: usize) -> Result<()> {
    if m_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::param("m list must be strictly ascending"));
    }
    if let Some(&m) = m_list.last() {
        if m > available {
            return Err(Error::param(format!("m = {m} exceeds {available} coefficients")));
        }
    }
    Ok(())
}

fn discarded_norm(grid: &CoefficientGrid, ranking: &[usize], m: usize, params: LorentzParams) -> f64 {
    let mut tail: Vec<f64> = ranking[m..].iter().map(|&k| grid.data()[k].norm()).collect();
    tail.sort_by(|a, b| b.total_cmp(a));
    lorentz_norm_nonincreasing(&tail, params)
}

/// Error of weighted thresholding of the canonical coefficients of `signal` at each `m`.
pub fn error_curve(
    signal: &[f64],
    system: &GaborSystem,
    stencil: &WeightStencil2D,
    m_list: &[usize],
    norm: ErrorNorm,
) -> Result<DecayCurve> {
    let grid = system.canonical_coefficients(signal)?;
    check_m_list(m_list, grid.len())?;
    let ranking = weighted_ranking(&grid, stencil);
    let values = m_list
        .iter()
        .map(|&m| match norm {
            ErrorNorm::CoeffLorentz(params) => Ok(discarded_norm(&grid, &ranking, m, params)),
            ErrorNorm::SampleL2 => {
                let approx = Approximant::from_ranking(&grid, &ranking, m);
                let rec = system.idgt_real(&approx.to_grid(), system.window())?;
                let diff: Vec<f64> = signal.iter().zip(&rec).map(|(a, b)| a - b).collect();
                Ok(l2_norm(&diff))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    DecayCurve::sampled(m_list.to_vec(), values)
}

/// Lorentz norm of the coefficients discarded by weighted thresholding of a
/// given grid, at each `m`.
pub fn coefficient_error_curve(
    grid: &CoefficientGrid,
    stencil: &WeightStencil2D,
    m_list: &[usize],
    params: LorentzParams,
) -> Result<DecayCurve> {
    check_m_list(m_list, grid.len())?;
    let ranking = weighted_ranking(grid, stencil);
    let values = m_list
        .iter()
        .map(|&m| discarded_norm(grid, &ranking, m, params))
        .collect();
    DecayCurve::sampled(m_list.to_vec(), values)
}

/// Least-squares line through `(ln m, ln value)`; the decay rate is `-slope`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub m_range: (usize, usize),
    /// Root-mean-square residual in log space.
    pub residual: f64,
    pub points: usize,
}

pub fn fit_rate(curve: &DecayCurve, m_range: (usize, usize)) -> Result<RateFit> {
    let (lo, hi) = m_range;
    let pts: Vec<(f64, f64)> = curve
        .points()
        .filter(|&(m, v)| m >= lo.max(1) && m <= hi && v > 0.0)
        .map(|(m, v)| ((m as f64).ln(), v.ln()))
        .collect();
    if pts.len() < 5 {
        return Err(Error::Fit(pts.len()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::param("rate fit needs at least two distinct m values"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum::<f64>() / n).sqrt();
    Ok(RateFit {
        slope,
        intercept,
        m_range,
        residual,
        points: pts.len(),
    })
}

/// Relative error `||reference - reconstruction||_2 / ||reference||_2`.
pub fn rms(reference: &[f64], reconstruction: &[f64]) -> Result<f64> {
    if reference.len() != reconstruction.len() {
        return Err(Error::param(format!(
            "reference has {} samples, reconstruction {}",
            reference.len(),
            reconstruction.len()
        )));
    }
    let den = l2_norm(reference);
    if den == 0.0 {
        return Err(Error::param("reference signal is identically zero"));
    }
    let num: NeumaierSum = reference
        .iter()
        .zip(reconstruction)
        .map(|(a, b)| (a - b) * (a - b))
        .collect();
    Ok(num.total().sqrt() / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn greedy_examples() {
        let g = CoefficientGrid::row(&[1.0, 5.0, 1.0, 0.0]);
        assert!(greedy_mterm(&g, 0).unwrap().is_empty());
        assert_eq!(greedy_mterm(&g, 2).unwrap().kept_indices(), &[1, 0]);
        let all = greedy_mterm(&g, 4).unwrap();
        assert_eq!(all.to_grid(), g);
        assert!(matches!(greedy_mterm(&g, 5), Err(Error::Param(_))));
    }

    #[test]
    fn weighted_examples() {
        let g = CoefficientGrid::row(&[1.0, 5.0, 1.0, 0.0]);
        let w = apply_weight_2d(&g, &WeightStencil2D::weight2());
        assert_eq!(w, vec![3.5, 6.0, 3.5, 0.5]);
        assert_eq!(
            weighted_mterm(&g, &WeightStencil2D::weight2(), 2)
                .unwrap()
                .kept_indices(),
            &[1, 0]
        );
    }

    #[test]
    fn extreme_weight_prefers_dense_neighbourhoods() {
        let g = CoefficientGrid::row(&[0.0, 3.0, 3.0, 3.0, 0.0, 4.0, 0.0]);
        let stencil = WeightStencil2D::extreme_horizontal();
        let w = apply_weight_2d(&g, &stencil);
        assert_eq!(w, vec![6.0, 9.0, 9.0, 13.0, 10.0, 7.0, 4.0]);
        let a = weighted_mterm(&g, &stencil, 1).unwrap();
        assert_eq!(a.kept_indices(), &[3]);
        // At m = 2 a zero coefficient is kept while the isolated 4 is dropped.
        let a = weighted_mterm(&g, &stencil, 2).unwrap();
        assert_eq!(a.kept_indices(), &[3, 4]);
        assert_eq!(a.values()[1], Complex64::default());
    }

    #[test]
    fn approximant_roundtrip() {
        let g = CoefficientGrid::new(3, 2, (0..6).map(|k| Complex64::new(k as f64, 1.0 - k as f64)).collect()).unwrap();
        let a = greedy_mterm(&g, 4).unwrap();
        let mut bytes = Vec::new();
        a.write_to(&mut bytes).unwrap();
        assert_eq!(bytes.len(), 4 + 4 * 24);
        assert_eq!(&bytes[..4], &4u32.to_le_bytes());
        // Largest magnitude is flat index 5 = (m 2, n 1).
        assert_eq!(&bytes[4..8], &2u32.to_le_bytes());
        assert_eq!(&bytes[8..12], &1u32.to_le_bytes());
        assert_eq!(Approximant::read_from(bytes.as_slice(), 3, 2).unwrap(), a);
        assert!(Approximant::read_from(&bytes[..30], 3, 2).is_err());
        assert!(Approximant::read_from(bytes.as_slice(), 2, 2).is_err());
    }

    #[test]
    fn wgl_examples() {
        let g = CoefficientGrid::new(
            2,
            3,
            vec![
                Complex64::new(1.0, 2.0),
                Complex64::new(-3.0, 0.5),
                Complex64::new(0.2, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(4.0, -1.0),
                Complex64::new(0.1, 0.1),
            ],
        )
        .unwrap();
        let base = WglConfig::default();
        assert_eq!(wgl_denoise(&g, &base).unwrap(), g);

        let max_s = neighborhood_energy(&g, &base.neighborhood)
            .into_iter()
            .fold(0.0, f64::max);
        assert_eq!(wgl_denoise(&g, &base.with_threshold(max_s)).unwrap().nonzeros(), 0);

        let single = WglConfig {
            neighborhood: WeightStencil2D::identity(),
            threshold: 0.5,
            iterations: 1,
            step: 1.0,
        };
        let out = wgl_denoise(&g, &single).unwrap();
        for (o, c) in out.data().iter().zip(g.data()) {
            let want = if c.norm() > 0.5 {
                c * (1.0 - 0.5 / c.norm())
            } else {
                Complex64::default()
            };
            assert!((o - want).norm() < 1e-12);
        }

        let bad = WglConfig {
            iterations: 0,
            ..base.clone()
        };
        assert!(matches!(wgl_denoise(&g, &bad), Err(Error::Param(_))));
        let bad = WglConfig {
            step: 0.0,
            ..base.clone()
        };
        assert!(matches!(wgl_denoise(&g, &bad), Err(Error::Param(_))));
        assert!(matches!(
            wgl_denoise(&g, &base.with_threshold(-1.0)),
            Err(Error::Param(_))
        ));
    }

    #[test]
    fn wgl_match_edge_cases() {
        let g = CoefficientGrid::row(&[1.0, 2.0, 3.0, 4.0]);
        let (out, t) = wgl_match_sparsity(&g, &WglConfig::default(), 4).unwrap();
        assert_eq!(t, 0.0);
        assert_eq!(out, g);
        assert!(matches!(
            wgl_match_sparsity(&g, &WglConfig::default(), 0),
            Err(Error::Param(_))
        ));
        assert!(matches!(
            wgl_match_sparsity(&g, &WglConfig::default(), 5),
            Err(Error::Param(_))
        ));
        let sparse = CoefficientGrid::row(&[1.0, 0.0, 0.0, 0.0]);
        assert!(matches!(
            wgl_match_sparsity(&sparse, &WglConfig::default(), 3),
            Err(Error::Search { .. })
        ));
    }

    #[test]
    fn rms_examples() {
        assert_eq!(rms(&[3.0, 4.0], &[3.0, 4.0]).unwrap(), 0.0);
        assert_eq!(rms(&[3.0, 4.0], &[0.0, 0.0]).unwrap(), 1.0);
        assert!((rms(&[3.0, 4.0], &[0.0, 4.0]).unwrap() - 0.6).abs() < 1e-15);
        assert!(matches!(rms(&[0.0, 0.0], &[1.0, 0.0]), Err(Error::Param(_))));
        assert!(matches!(rms(&[1.0], &[1.0, 0.0]), Err(Error::Param(_))));
    }

    #[test]
    fn fit_rate_examples() {
        let ms: Vec<usize> = (1..=20).map(|k| k * 10).collect();
        let pow = DecayCurve::sampled(ms.clone(), ms.iter().map(|&m| (m as f64).powf(-1.5)).collect()).unwrap();
        let fit = fit_rate(&pow, (1, 1000)).unwrap();
        assert!((fit.slope + 1.5).abs() < 1e-9);
        assert!(fit.residual < 1e-9);

        let flat = DecayCurve::sampled(ms.clone(), vec![0.3; 20]).unwrap();
        assert!(fit_rate(&flat, (1, 1000)).unwrap().slope.abs() < 1e-12);

        assert!(matches!(fit_rate(&pow, (10, 40)), Err(Error::Fit(4))));
        let zeros = DecayCurve::sampled(ms, vec![0.0; 20]).unwrap();
        assert!(matches!(fit_rate(&zeros, (1, 1000)), Err(Error::Fit(0))));
    }

    #[test]
    fn m_list_validation() {
        let g = CoefficientGrid::row(&[1.0, 2.0]);
        let l2 = LorentzParams::lp(2.0).unwrap();
        assert!(coefficient_error_curve(&g, &WeightStencil2D::identity(), &[2, 1], l2).is_err());
        assert!(coefficient_error_curve(&g, &WeightStencil2D::identity(), &[1, 3], l2).is_err());
        let c = coefficient_error_curve(&g, &WeightStencil2D::identity(), &[0, 1, 2], l2).unwrap();
        assert_eq!(c.values(), &[5f64.sqrt(), 1.0, 0.0]);
    }
}
