use std::path::Path;

use crate::error::{Error, Result};
use crate::gabor::pad_signal;

/// Mono samples in `[-1, 1]` and their sample rate.
#[derive(Clone, Debug, PartialEq)]
pub struct Audio {
    pub samples: Vec<f64>,
    pub sample_rate: u32,
}

/// Reads 16-bit PCM or 32-bit float WAV, averaging channels to mono.
///
/// Failing to open the file is an I/O error; anything wrong with its
/// contents, including truncation, is a format error.
pub fn load_wav(path: &Path) -> Result<Audio> {
    let file = std::io::BufReader::new(std::fs::File::open(path)?);
    let malformed = |e: hound::Error| Error::format(format!("{}: {e}", path.display()));
    let mut reader = hound::WavReader::new(file).map_err(malformed)?;
    let spec = reader.spec();
    let channels = spec.channels as usize;
    let interleaved: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (hound::SampleFormat::Int, 16) => reader
            .samples::<i16>()
            .map(|s| s.map(|v| v as f64 / 32768.0))
            .collect::<std::result::Result<_, _>>()
            .map_err(malformed)?,
        (hound::SampleFormat::Float, 32) => reader
            .samples::<f32>()
            .map(|s| s.map(|v| v as f64))
            .collect::<std::result::Result<_, _>>()
            .map_err(malformed)?,
        (format, bits) => {
            return Err(Error::format(format!(
                "unsupported WAV encoding: {bits}-bit {format:?} (expected 16-bit PCM or 32-bit float)"
            )))
        }
    };
    if interleaved.is_empty() || channels == 0 {
        return Err(Error::format(format!("{} contains no samples", path.display())));
    }
    let samples = interleaved
        .chunks(channels)
        .map(|frame| frame.iter().sum::<f64>() / channels as f64)
        .collect();
    Ok(Audio {
        samples,
        sample_rate: spec.sample_rate,
    })
}

/// [`load_wav`] followed by zero padding to a multiple of `lcm(hop, channels)`.
pub fn load_wav_padded(path: &Path, hop: usize, channels: usize) -> Result<Audio> {
    let audio = load_wav(path)?;
    Ok(Audio {
        samples: pad_signal(&audio.samples, hop, channels),
        ..audio
    })
}

/// Writes mono 32-bit float WAV.
pub fn write_wav(path: &Path, samples: &[f64], sample_rate: u32) -> Result<()> {
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate,
        bits_per_sample: 32,
        sample_format: hound::SampleFormat::Float,
    };
    let mut writer = hound::WavWriter::create(path, spec)?;
    for &s in samples {
        writer.write_sample(s as f32)?;
    }
    writer.finalize()?;
    Ok(())
}
