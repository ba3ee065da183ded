//! Deterministic harmonic test signals standing in for recorded music.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn default_fade() -> f64 {
    0.01
}

/// One note: harmonic partials `k * f0` with the given amplitudes (partial 1 first).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tone {
    /// Start time in seconds.
    pub onset: f64,
    /// Length in seconds.
    pub duration: f64,
    pub f0: f64,
    pub amplitudes: Vec<f64>,
    /// Raised-cosine attack and release, seconds (capped at a quarter of the duration).
    #[serde(default = "default_fade")]
    pub fade: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub tones: Vec<Tone>,
}

impl SynthSpec {
    /// An ascending major-scale melody of `count` equal-length tones from G3,
    /// spread over `seconds`, each with up to ten partials decaying as `1/k`
    /// (partials at or above 45% of the sample rate are left out).
    pub fn melody(count: usize, seconds: f64, sample_rate: u32) -> Self {
        const STEPS: [i32; 7] = [0, 2, 4, 5, 7, 9, 11];
        let slot = seconds / count.max(1) as f64;
        let tones = (0..count)
            .map(|i| {
                let semitones = STEPS[i % 7] + 12 * (i / 7) as i32;
                let f0 = 196.0 * 2f64.powf(semitones as f64 / 12.0);
                Tone {
                    onset: i as f64 * slot,
                    duration: slot,
                    f0,
                    amplitudes: (1..=10)
                        .take_while(|&k| k as f64 * f0 < 0.45 * sample_rate as f64)
                        .map(|k| 0.3 / k as f64)
                        .collect(),
                    fade: default_fade(),
                }
            })
            .collect();
        Self { tones }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::format(format!("synth spec: {e}")))
    }
}

pub fn synth_harmonic(spec: &SynthSpec, length: usize, sample_rate: u32) -> Result<Vec<f64>> {
    if sample_rate == 0 {
        return Err(Error::param("sample rate must be positive"));
    }
    let fs = sample_rate as f64;
    let nyquist = fs / 2.0;
    for tone in &spec.tones {
        if !(tone.f0 > 0.0 && tone.duration >= 0.0 && tone.onset >= 0.0 && tone.fade >= 0.0) {
            return Err(Error::param(format!("invalid tone {tone:?}")));
        }
        for (k, a) in tone.amplitudes.iter().enumerate() {
            let f = tone.f0 * (k + 1) as f64;
            if *a != 0.0 && f >= nyquist {
                return Err(Error::param(format!(
                    "partial {} of f0 = {} Hz at {f} Hz aliases (Nyquist {nyquist} Hz)",
                    k + 1,
                    tone.f0
                )));
            }
        }
    }

    let mut out = vec![0.0; length];
    for tone in &spec.tones {
        let start = (tone.onset * fs).round() as usize;
        let count = (tone.duration * fs).round() as usize;
        let end = start.saturating_add(count).min(length);
        let fade = ((tone.fade * fs).round() as usize).min(count / 4);
        for (i, sample) in out.iter_mut().enumerate().take(end).skip(start) {
            let local = i - start;
            let envelope = if fade == 0 {
                1.0
            } else {
                let edge = local.min(count - 1 - local);
                if edge < fade {
                    0.5 - 0.5 * (std::f64::consts::PI * edge as f64 / fade as f64).cos()
                } else {
                    1.0
                }
            };
            let t = local as f64 / fs;
            let mut acc = 0.0;
            for (k, a) in tone.amplitudes.iter().enumerate() {
                acc += a * (2.0 * std::f64::consts::PI * tone.f0 * (k + 1) as f64 * t).sin();
            }
            *sample += envelope * acc;
        }
    }
    Ok(out)
}
