//! Flat settings shared by the config file and the command line.
//!
//! A config file is either a JSON object or `key = value` lines (`#` starts a
//! comment). Keys are case-insensitive and `_` is equivalent to `-`, so
//! `snr_db` in a file and `--snr-db` on the command line name the same setting.
//! Command-line values override file values.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::approx::ErrorNorm;
use crate::approx::WglConfig;
use crate::error::{Error, Result};
use crate::harness::experiment::{Algorithm, Budget, ExperimentConfig, Input};
use crate::harness::synth::SynthSpec;
use crate::lorentz::{Exponent, LorentzParams};
use crate::weighting::WeightStencil2D;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

fn normalize_key(key: &str) -> String {
    key.trim().to_ascii_lowercase().replace('_', "-")
}

impl Settings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            Self::parse_json(text)
        } else {
            Self::parse_key_values(text)
        }
    }

    fn parse_json(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::format(format!("config JSON: {e}")))?;
        let obj = value
            .as_object()
            .ok_or_else(|| Error::format("config JSON must be an object"))?;
        let mut settings = Self::new();
        for (k, v) in obj {
            settings.set(k, json_scalar(v)?);
        }
        Ok(settings)
    }

    fn parse_key_values(text: &str) -> Result<Self> {
        let mut settings = Self::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::format(format!("config line {}: expected key = value", lineno + 1)))?;
            settings.set(k, v.trim().to_string());
        }
        Ok(settings)
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.values.insert(normalize_key(key), value.into());
    }

    /// Copies every entry of `other` over this one.
    pub fn merge(&mut self, other: &Settings) {
        for (k, v) in &other.values {
            self.values.insert(k.clone(), v.clone());
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(&normalize_key(key)).map(String::as_str)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(String::as_str)
    }

    pub fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| Error::param(format!("{key}: cannot parse {v:?}")))
            })
            .transpose()
    }

    pub fn parsed_or<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.parsed(key)?.unwrap_or(default))
    }

    pub fn path(&self, key: &str) -> Option<PathBuf> {
        self.get(key).map(PathBuf::from)
    }

    pub fn require_path(&self, key: &str) -> Result<PathBuf> {
        self.path(key)
            .ok_or_else(|| Error::param(format!("missing required setting {key}")))
    }
}

fn json_scalar(v: &serde_json::Value) -> Result<String> {
    use serde_json::Value;
    Ok(match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        Value::Bool(b) => b.to_string(),
        Value::Array(items) => items.iter().map(json_scalar).collect::<Result<Vec<_>>>()?.join(","),
        Value::Null | Value::Object(_) => {
            return Err(Error::format(format!("config value {v} is not a scalar or list")))
        }
    })
}

/// Comma-separated list of integers, or `lo:hi:count` for log-spaced sizes.
pub fn parse_m_list(text: &str) -> Result<Vec<usize>> {
    let bad = || Error::param(format!("m-list: cannot parse {text:?}"));
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() == 3 {
        let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
        if !(lo >= 1.0 && hi >= lo && count >= 2) {
            return Err(bad());
        }
        let mut ms: Vec<usize> = (0..count)
            .map(|i| {
                (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (count - 1) as f64)
                    .exp()
                    .round() as usize
            })
            .collect();
        ms.dedup();
        return Ok(ms);
    }
    text.split(',').map(|s| s.trim().parse().map_err(|_| bad())).collect()
}

/// `lo,hi` pair.
pub fn parse_range(text: &str) -> Result<(usize, usize)> {
    let bad = || Error::param(format!("m-range: expected lo,hi, got {text:?}"));
    let (lo, hi) = text.split_once(',').ok_or_else(bad)?;
    let lo = lo.trim().parse().map_err(|_| bad())?;
    let hi = hi.trim().parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

/// `l2` (signal samples) or `lorentz:tau:q` / `lp:p` over discarded canonical coefficients.
pub fn parse_norm(text: &str) -> Result<ErrorNorm> {
    let bad = || Error::param(format!("norm: expected l2, lp:P or lorentz:TAU:Q, got {text:?}"));
    let parts: Vec<&str> = text.trim().split(':').collect();
    let num = |s: &str| s.parse::<f64>().map_err(|_| bad());
    match parts.as_slice() {
        ["l2"] => Ok(ErrorNorm::SampleL2),
        ["lp", p] => Ok(ErrorNorm::CoeffLorentz(LorentzParams::lp(num(p)?)?)),
        ["lorentz", tau, q] => {
            let q = if matches!(*q, "inf" | "infinity") {
                Exponent::Infinity
            } else {
                Exponent::Finite(num(q)?)
            };
            Ok(ErrorNorm::CoeffLorentz(LorentzParams::new(num(tau)?, q)?))
        }
        _ => Err(bad()),
    }
}

/// `from-wgl`, a percentage like `6.5%`, a fraction in `(0, 1)` written with a
/// decimal point, or an absolute coefficient count.
pub fn parse_budget(text: &str) -> Result<Budget> {
    let t = text.trim();
    let bad = || Error::param(format!("budget: cannot parse {text:?}"));
    if t == "from-wgl" {
        return Ok(Budget::FromWgl);
    }
    if let Some(pct) = t.strip_suffix('%') {
        let f: f64 = pct.trim().parse().map_err(|_| bad())?;
        return Budget::fraction(f / 100.0);
    }
    if t.contains('.') || t.contains('e') {
        return Budget::fraction(t.parse().map_err(|_| bad())?);
    }
    Ok(Budget::Count(t.parse().map_err(|_| bad())?))
}

/// Algorithm list, comma separated: `wgl`, `greedy`, any stencil preset, or
/// `weighted[dm:dn:w;dm:dn:w;...]`.
pub fn parse_algorithms(text: &str) -> Result<Vec<Algorithm>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(parse_algorithm)
        .collect()
}

pub fn parse_algorithm(token: &str) -> Result<Algorithm> {
    match token {
        "wgl" => Ok(Algorithm::Wgl),
        "greedy" => Ok(Algorithm::Greedy),
        "weight1" => Ok(Algorithm::weighted("Weight 1", WeightStencil2D::weight1())),
        "weight2" => Ok(Algorithm::weighted("Weight 2", WeightStencil2D::weight2())),
        "weight3" => Ok(Algorithm::weighted("Weight 3", WeightStencil2D::weight3())),
        other => {
            if let Some(taps) = other.strip_prefix("weighted[").and_then(|s| s.strip_suffix(']')) {
                let stencil = WeightStencil2D::parse(&taps.replace(';', ","))?;
                Ok(Algorithm::weighted(other, stencil))
            } else {
                Ok(Algorithm::weighted(other, WeightStencil2D::preset(other)?))
            }
        }
    }
}

impl WglConfig {
    /// Reads `wgl-threshold`, `wgl-iterations`, `wgl-step`, `wgl-neighborhood`.
    pub fn from_settings(s: &Settings) -> Result<Self> {
        let base = WglConfig::default();
        Ok(WglConfig {
            neighborhood: match s.get("wgl-neighborhood") {
                Some(spec) => WeightStencil2D::parse(spec)?,
                None => base.neighborhood,
            },
            threshold: s.parsed_or("wgl-threshold", base.threshold)?,
            iterations: s.parsed_or("wgl-iterations", base.iterations)?,
            step: s.parsed_or("wgl-step", base.step)?,
        })
    }
}

impl ExperimentConfig {
    pub fn from_settings(s: &Settings) -> Result<Self> {
        let d = ExperimentConfig::default();
        let input = match s.get("input") {
            None | Some("synth") => {
                let synth = match s.path("synth-spec") {
                    Some(p) => Some(SynthSpec::from_json(&std::fs::read_to_string(p)?)?),
                    None => None,
                };
                let (length, sample_rate) = match &d.input {
                    Input::Synth {
                        length, sample_rate, ..
                    } => (*length, *sample_rate),
                    Input::Wav(_) => unreachable!("default input is synthetic"),
                };
                Input::Synth {
                    spec: synth,
                    length: s.parsed_or("length", length)?,
                    sample_rate: s.parsed_or("sample-rate", sample_rate)?,
                }
            }
            Some(path) => Input::Wav(PathBuf::from(path)),
        };
        Ok(ExperimentConfig {
            input,
            window_length: s.parsed_or("window-length", d.window_length)?,
            hop: s.parsed_or("hop", d.hop)?,
            channels: s.parsed_or("channels", d.channels)?,
            algorithms: match s.get("algorithms") {
                Some(list) => parse_algorithms(list)?,
                None => d.algorithms,
            },
            snr_db: s.parsed_or("snr-db", d.snr_db)?,
            seed: s.parsed_or("seed", d.seed)?,
            budget: match s.get("budget") {
                Some(b) => parse_budget(b)?,
                None => d.budget,
            },
            wgl: WglConfig::from_settings(s)?,
            rate_points: match s.get("rate-points") {
                Some(list) => Some(parse_m_list(list)?),
                None => None,
            },
        })
    }
}
