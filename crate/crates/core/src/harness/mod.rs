//! File formats, test-signal generation and the denoising comparison runner.

pub mod audio;
pub mod config;
pub mod experiment;
pub mod noise;
pub mod spectrogram;
pub mod synth;

pub use audio::{load_wav, load_wav_padded, write_wav, Audio};
pub use config::Settings;
pub use experiment::{
    denoise_grid, load_input, resolve_budget, run_experiment, Algorithm, AlgorithmResult, Budget, Denoised,
    ExperimentConfig, ExperimentReport, Input,
};
pub use noise::{add_awgn, RNG_ALGORITHM};
pub use spectrogram::{export_spectrogram, parse_pgm_header, spectrogram_pgm};
pub use synth::{synth_harmonic, SynthSpec, Tone};
