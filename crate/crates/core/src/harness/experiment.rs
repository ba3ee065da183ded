//! Denoising comparison: WGL fixes (or matches) a coefficient budget and every
//! thresholding algorithm is run at that same budget on the canonical
//! coefficients of the noisy signal.

use std::fmt::Write as _;
use std::path::PathBuf;

use rayon::prelude::*;

use crate::approx::{
    coefficient_error_curve, fit_rate, greedy_mterm, rms, weighted_mterm, wgl_denoise, wgl_match_sparsity, RateFit,
    WglConfig,
};
use crate::error::{Error, Result};
use crate::gabor::{pad_signal, CoefficientGrid, GaborSystem};
use crate::harness::audio::{load_wav, Audio};
use crate::harness::noise::{add_awgn, RNG_ALGORITHM};
use crate::harness::synth::{synth_harmonic, SynthSpec};
use crate::lorentz::LorentzParams;
use crate::weighting::WeightStencil2D;

#[derive(Clone, Debug, PartialEq)]
pub enum Input {
    Wav(PathBuf),
    /// `spec = None` is the ten-tone ascending melody spanning the whole signal.
    Synth {
        spec: Option<SynthSpec>,
        length: usize,
        sample_rate: u32,
    },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Budget {
    /// Whatever WGL at the configured threshold leaves nonzero.
    FromWgl,
    Count(usize),
    /// Fraction of all coefficients, in `(0, 1]`.
    Fraction(f64),
}

impl Budget {
    pub fn fraction(f: f64) -> Result<Self> {
        if !(f > 0.0 && f <= 1.0) {
            return Err(Error::param(format!("budget fraction must lie in (0, 1], got {f}")));
        }
        Ok(Budget::Fraction(f))
    }
}

impl std::fmt::Display for Budget {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Budget::FromWgl => f.write_str("from-wgl"),
            Budget::Count(n) => write!(f, "{n}"),
            Budget::Fraction(x) => write!(f, "{}%", x * 100.0),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Algorithm {
    Wgl,
    Greedy,
    Weighted { label: String, stencil: WeightStencil2D },
}

impl Algorithm {
    pub fn weighted(label: impl Into<String>, stencil: WeightStencil2D) -> Self {
        Algorithm::Weighted {
            label: label.into(),
            stencil,
        }
    }

    pub fn label(&self) -> &str {
        match self {
            Algorithm::Wgl => "WGL",
            Algorithm::Greedy => "Greedy",
            Algorithm::Weighted { label, .. } => label,
        }
    }

    /// The five columns of the standard comparison.
    pub fn comparison_set() -> Vec<Algorithm> {
        vec![
            Algorithm::Wgl,
            Algorithm::Greedy,
            Algorithm::weighted("Weight 1", WeightStencil2D::weight1()),
            Algorithm::weighted("Weight 2", WeightStencil2D::weight2()),
            Algorithm::weighted("Weight 3", WeightStencil2D::weight3()),
        ]
    }

    fn stencil(&self) -> Option<WeightStencil2D> {
        match self {
            Algorithm::Wgl => None,
            Algorithm::Greedy => Some(WeightStencil2D::identity()),
            Algorithm::Weighted { stencil, .. } => Some(stencil.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub input: Input,
    pub window_length: usize,
    pub hop: usize,
    pub channels: usize,
    pub algorithms: Vec<Algorithm>,
    pub snr_db: f64,
    pub seed: u64,
    pub budget: Budget,
    pub wgl: WglConfig,
    /// When set, each thresholding algorithm also reports the log-log slope of
    /// its coefficient-domain l2 error on the clean signal at these sizes.
    pub rate_points: Option<Vec<usize>>,
}

/// Default signal length: 2^19 samples.
pub const DEFAULT_LENGTH: usize = 1 << 19;

impl Default for ExperimentConfig {
    /// Hann 1024 / hop 256 / 1024 channels, 20 dB SNR, seed 0, 6.5% budget.
    fn default() -> Self {
        Self {
            input: Input::Synth {
                spec: None,
                length: DEFAULT_LENGTH,
                sample_rate: 44_100,
            },
            window_length: 1024,
            hop: 256,
            channels: 1024,
            algorithms: Algorithm::comparison_set(),
            snr_db: 20.0,
            seed: 0,
            budget: Budget::Fraction(0.065),
            wgl: WglConfig::default(),
            rate_points: None,
        }
    }
}

impl ExperimentConfig {
    pub fn system(&self, signal_length: usize) -> Result<GaborSystem> {
        GaborSystem::hann(self.window_length, self.hop, self.channels, signal_length)
    }
}

/// Loads or synthesizes the clean signal, padded to the lattice.
pub fn load_input(config: &ExperimentConfig) -> Result<Audio> {
    let audio = match &config.input {
        Input::Wav(path) => load_wav(path)?,
        Input::Synth {
            spec,
            length,
            sample_rate,
        } => {
            let spec = spec
                .clone()
                .unwrap_or_else(|| SynthSpec::melody(10, *length as f64 / *sample_rate as f64, *sample_rate));
            Audio {
                samples: synth_harmonic(&spec, *length, *sample_rate)?,
                sample_rate: *sample_rate,
            }
        }
    };
    Ok(Audio {
        samples: pad_signal(&audio.samples, config.hop, config.channels),
        ..audio
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlgorithmResult {
    pub label: String,
    pub nonzeros: usize,
    pub rms: f64,
    /// WGL threshold actually used.
    pub threshold: Option<f64>,
    pub rate: Option<RateFit>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentReport {
    pub input: String,
    pub signal_length: usize,
    pub sample_rate: u32,
    pub window_length: usize,
    pub hop: usize,
    pub channels: usize,
    pub total: usize,
    pub budget: usize,
    pub budget_spec: Budget,
    pub snr_db: f64,
    pub seed: u64,
    pub rms_noisy: f64,
    pub results: Vec<AlgorithmResult>,
}

impl ExperimentReport {
    pub fn retained_fraction(&self, result: &AlgorithmResult) -> f64 {
        result.nonzeros as f64 / self.total as f64
    }

    pub fn result(&self, label: &str) -> Option<&AlgorithmResult> {
        self.results.iter().find(|r| r.label == label)
    }

    fn echo(&self) -> Vec<(&'static str, String)> {
        vec![
            ("input", self.input.clone()),
            ("signal_length", self.signal_length.to_string()),
            ("sample_rate", self.sample_rate.to_string()),
            ("window", format!("hann {}", self.window_length)),
            ("hop", self.hop.to_string()),
            ("channels", self.channels.to_string()),
            ("total_coefficients", self.total.to_string()),
            ("budget", format!("{} ({})", self.budget, self.budget_spec)),
            ("snr_db", self.snr_db.to_string()),
            ("seed", self.seed.to_string()),
            ("rng", RNG_ALGORITHM.to_string()),
            ("rms_noisy", self.rms_noisy.to_string()),
        ]
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.echo() {
            let _ = writeln!(out, "{k:<20} {v}");
        }
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "{:<24} {:>10} {:>10} {:>10} {:>12}",
            "algorithm", "nonzeros", "retained", "rms", "rate slope"
        );
        for r in &self.results {
            let slope = r.rate.map(|f| format!("{:.4}", f.slope)).unwrap_or_else(|| "-".into());
            let _ = writeln!(
                out,
                "{:<24} {:>10} {:>9.4}% {:>10.4} {:>12}",
                r.label,
                r.nonzeros,
                100.0 * self.retained_fraction(r),
                r.rms,
                slope
            );
        }
        out
    }

    /// `#`-prefixed parameter lines, then one row per algorithm. Floats use the
    /// shortest round-tripping representation so values can be recomputed exactly.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.echo() {
            let _ = writeln!(out, "# {k}={v}");
        }
        out.push_str("algorithm,nonzeros,total,retained_fraction,rms,threshold,rate_slope\n");
        for r in &self.results {
            let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.label,
                r.nonzeros,
                self.total,
                self.retained_fraction(r),
                r.rms,
                opt(r.threshold),
                opt(r.rate.map(|f| f.slope))
            );
        }
        out
    }
}

/// Result of applying one algorithm to a canonical coefficient grid.
#[derive(Clone, Debug)]
pub struct Denoised {
    pub grid: CoefficientGrid,
    pub nonzeros: usize,
    pub threshold: Option<f64>,
}

/// Applies `algorithm` at `budget` coefficients. WGL is matched to the budget by
/// threshold search unless `wgl_fixed` already holds its output.
pub fn denoise_grid(
    grid: &CoefficientGrid,
    algorithm: &Algorithm,
    budget: usize,
    wgl: &WglConfig,
    wgl_fixed: Option<&Denoised>,
) -> Result<Denoised> {
    match algorithm {
        Algorithm::Wgl => {
            if let Some(done) = wgl_fixed {
                return Ok(done.clone());
            }
            let (out, threshold) = wgl_match_sparsity(grid, wgl, budget)?;
            Ok(Denoised {
                nonzeros: out.nonzeros(),
                grid: out,
                threshold: Some(threshold),
            })
        }
        Algorithm::Greedy => {
            let a = greedy_mterm(grid, budget)?;
            Ok(Denoised {
                nonzeros: a.len(),
                grid: a.to_grid(),
                threshold: None,
            })
        }
        Algorithm::Weighted { stencil, .. } => {
            let a = weighted_mterm(grid, stencil, budget)?;
            Ok(Denoised {
                nonzeros: a.len(),
                grid: a.to_grid(),
                threshold: None,
            })
        }
    }
}

/// Resolves the budget; for `FromWgl` also returns WGL's output.
pub fn resolve_budget(grid: &CoefficientGrid, budget: Budget, wgl: &WglConfig) -> Result<(usize, Option<Denoised>)> {
    let total = grid.len();
    match budget {
        Budget::Count(n) => {
            if n == 0 || n > total {
                return Err(Error::param(format!("budget {n} outside 1..={total}")));
            }
            Ok((n, None))
        }
        Budget::Fraction(f) => Ok((((f * total as f64).round() as usize).clamp(1, total), None)),
        Budget::FromWgl => {
            if wgl.threshold <= 0.0 {
                return Err(Error::param("a from-wgl budget needs a positive wgl-threshold"));
            }
            let out = wgl_denoise(grid, wgl).map_err(|e| e.in_stage("WGL", "budget"))?;
            let n = out.nonzeros();
            if n == 0 {
                return Err(
                    Error::param(format!("WGL at threshold {} removes every coefficient", wgl.threshold))
                        .in_stage("WGL", "budget"),
                );
            }
            Ok((
                n,
                Some(Denoised {
                    grid: out,
                    nonzeros: n,
                    threshold: Some(wgl.threshold),
                }),
            ))
        }
    }
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    if config.algorithms.is_empty() {
        return Err(Error::param("no algorithms configured"));
    }
    let clean = load_input(config).map_err(|e| e.in_stage("input", "load"))?;
    let system = config
        .system(clean.samples.len())
        .map_err(|e| e.in_stage("input", "system"))?;
    let noisy = add_awgn(&clean.samples, config.snr_db, config.seed, 0).map_err(|e| e.in_stage("input", "noise"))?;
    let rms_noisy = rms(&clean.samples, &noisy)?;
    let grid = system
        .canonical_coefficients(&noisy)
        .map_err(|e| e.in_stage("input", "analysis"))?;
    let (budget, wgl_fixed) = resolve_budget(&grid, config.budget, &config.wgl)?;

    let clean_grid = match &config.rate_points {
        Some(_) => Some(system.canonical_coefficients(&clean.samples)?),
        None => None,
    };

    let results = config
        .algorithms
        .par_iter()
        .map(|alg| {
            let label = alg.label().to_string();
            let out = denoise_grid(&grid, alg, budget, &config.wgl, wgl_fixed.as_ref())
                .map_err(|e| e.in_stage(label.clone(), "threshold"))?;
            let rec = system
                .idgt_real(&out.grid, system.window())
                .map_err(|e| e.in_stage(label.clone(), "synthesis"))?;
            let err = rms(&clean.samples, &rec).map_err(|e| e.in_stage(label.clone(), "rms"))?;
            let rate = match (&config.rate_points, &clean_grid, alg.stencil()) {
                (Some(ms), Some(cg), Some(stencil)) => {
                    let curve = coefficient_error_curve(cg, &stencil, ms, LorentzParams::lp(2.0)?)
                        .map_err(|e| e.in_stage(label.clone(), "rate"))?;
                    let range = (ms[0], *ms.last().unwrap_or(&ms[0]));
                    Some(fit_rate(&curve, range).map_err(|e| e.in_stage(label.clone(), "rate"))?)
                }
                _ => None,
            };
            Ok(AlgorithmResult {
                label,
                nonzeros: out.nonzeros,
                rms: err,
                threshold: out.threshold,
                rate,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(ExperimentReport {
        input: match &config.input {
            Input::Wav(p) => p.display().to_string(),
            Input::Synth { spec: None, .. } => "synth:melody".into(),
            Input::Synth { spec: Some(s), .. } => format!("synth:{} tones", s.tones.len()),
        },
        signal_length: clean.samples.len(),
        sample_rate: clean.sample_rate,
        window_length: config.window_length,
        hop: config.hop,
        channels: config.channels,
        total: grid.len(),
        budget,
        budget_spec: config.budget,
        snr_db: config.snr_db,
        seed: config.seed,
        rms_noisy,
        results,
    })
}
