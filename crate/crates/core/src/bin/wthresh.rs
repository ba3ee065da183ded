use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use wthresh::approx::{error_curve, fit_rate};
use wthresh::error::{Error, Result};
use wthresh::gabor::{GaborSystem, GRID_FLAG_CANONICAL};
use wthresh::harness::config::{parse_algorithm, parse_budget, parse_m_list, parse_norm, parse_range};
use wthresh::harness::experiment::{denoise_grid, load_input, resolve_budget, ExperimentConfig};
use wthresh::harness::{
    export_spectrogram, load_wav_padded, run_experiment, synth_harmonic, write_wav, Settings, SynthSpec,
};
use wthresh::lorentz::DecayCurve;
use wthresh::weighting::WeightStencil2D;
use wthresh::{rms, WglConfig};

/// Weighted thresholding of Gabor coefficients: analysis, denoising, error curves and comparisons.
#[derive(Parser)]
#[command(name = "wthresh", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// WAV -> canonical coefficient dump (--output) and/or spectrogram (--spectrogram)
    Analyze(Opts),
    /// WAV -> thresholded WAV (--output) plus a short report
    Denoise(Opts),
    /// Error-decay curve as CSV with columns m,error
    Curve(Opts),
    /// Log-log slope fit of a curve CSV (--input)
    Rate(Opts),
    /// Synthesize a harmonic test signal to WAV
    Synth(Opts),
    /// Full comparison: WGL, greedy and weighted thresholding at a shared budget
    Compare(Opts),
}

macro_rules! options {
    ($($field:ident => $key:literal),* $(,)?) => {
        /// Every option can also be given in the --config file under the same key.
        #[derive(Args, Default)]
        struct Opts {
            /// Config file: JSON object or key = value lines
            #[arg(long)]
            config: Option<PathBuf>,
            $(
                #[arg(long = $key)]
                $field: Option<String>,
            )*
        }

        impl Opts {
            fn settings(&self) -> Result<Settings> {
                let mut s = match &self.config {
                    Some(p) => Settings::from_file(p)?,
                    None => Settings::new(),
                };
                let mut cli = Settings::new();
                $( if let Some(v) = &self.$field { cli.set($key, v.clone()); } )*
                s.merge(&cli);
                Ok(s)
            }
        }
    };
}

options! {
    input => "input",
    output => "output",
    spectrogram => "spectrogram",
    csv => "csv",
    report => "report",
    synth_spec => "synth-spec",
    length => "length",
    sample_rate => "sample-rate",
    window_length => "window-length",
    hop => "hop",
    channels => "channels",
    algorithms => "algorithms",
    algorithm => "algorithm",
    snr_db => "snr-db",
    seed => "seed",
    budget => "budget",
    wgl_threshold => "wgl-threshold",
    wgl_iterations => "wgl-iterations",
    wgl_step => "wgl-step",
    wgl_neighborhood => "wgl-neighborhood",
    stencil => "stencil",
    m_list => "m-list",
    m_range => "m-range",
    norm => "norm",
    rate_points => "rate-points",
}

fn write_or_print(path: Option<PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn analyze(s: &Settings) -> Result<()> {
    let cfg = ExperimentConfig::from_settings(s)?;
    let input = s.require_path("input")?;
    let out = s.path("output");
    let spec = s.path("spectrogram");
    if out.is_none() && spec.is_none() {
        return Err(Error::param("analyze needs --output and/or --spectrogram"));
    }
    let audio = load_wav_padded(&input, cfg.hop, cfg.channels)?;
    let system = cfg.system(audio.samples.len())?;
    let grid = system.canonical_coefficients(&audio.samples)?;
    if let Some(p) = out {
        let file = std::io::BufWriter::new(std::fs::File::create(p)?);
        grid.write_to(file, GRID_FLAG_CANONICAL)?;
    }
    if let Some(p) = spec {
        export_spectrogram(&grid, &p)?;
    }
    println!(
        "{} samples -> {} channels x {} frames ({} coefficients)",
        audio.samples.len(),
        grid.channels(),
        grid.frames(),
        grid.len()
    );
    Ok(())
}

fn denoise(s: &Settings) -> Result<()> {
    let cfg = ExperimentConfig::from_settings(s)?;
    let input = s.require_path("input")?;
    let output = s.require_path("output")?;
    let algorithm = parse_algorithm(s.get("algorithm").unwrap_or("weight2"))?;
    let budget = parse_budget(s.get("budget").unwrap_or("6.5%"))?;
    let wgl = WglConfig::from_settings(s)?;

    let audio = load_wav_padded(&input, cfg.hop, cfg.channels)?;
    let system = cfg.system(audio.samples.len())?;
    let grid = system.canonical_coefficients(&audio.samples)?;
    let (m, fixed) = resolve_budget(&grid, budget, &wgl)?;
    let out = denoise_grid(&grid, &algorithm, m, &wgl, fixed.as_ref())
        .map_err(|e| e.in_stage(algorithm.label(), "threshold"))?;
    let rec = system.idgt_real(&out.grid, system.window())?;
    write_wav(&output, &rec, audio.sample_rate)?;

    let fraction = out.nonzeros as f64 / grid.len() as f64;
    let change = rms(&audio.samples, &rec)?;
    println!("algorithm        {}", algorithm.label());
    println!("nonzeros         {}", out.nonzeros);
    println!("total            {}", grid.len());
    println!("retained         {fraction}");
    println!("rms(input, out)  {change}");
    if let Some(csv) = s.path("csv") {
        std::fs::write(
            csv,
            format!(
                "algorithm,nonzeros,total,retained_fraction,rms\n{},{},{},{fraction},{change}\n",
                algorithm.label(),
                out.nonzeros,
                grid.len()
            ),
        )?;
    }
    Ok(())
}

fn curve(s: &Settings) -> Result<()> {
    let cfg = ExperimentConfig::from_settings(s)?;
    let signal = load_input(&cfg)?.samples;
    let system: GaborSystem = cfg.system(signal.len())?;
    let stencil = WeightStencil2D::parse(s.get("stencil").unwrap_or("identity"))?;
    let ms = parse_m_list(s.get("m-list").unwrap_or("32:2048:13"))?;
    let norm = parse_norm(s.get("norm").unwrap_or("l2"))?;
    let c = error_curve(&signal, &system, &stencil, &ms, norm)?;
    let mut text = String::from("m,error\n");
    for (m, v) in c.points() {
        text.push_str(&format!("{m},{v}\n"));
    }
    write_or_print(s.path("output"), &text)
}

fn read_curve_csv(path: &Path) -> Result<DecayCurve> {
    let text = std::fs::read_to_string(path)?;
    let mut ms = Vec::new();
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("m,") {
            continue;
        }
        let bad = || Error::format(format!("{}:{}: expected m,error", path.display(), i + 1));
        let (m, v) = line.split_once(',').ok_or_else(bad)?;
        ms.push(m.trim().parse().map_err(|_| bad())?);
        values.push(v.trim().parse().map_err(|_| bad())?);
    }
    DecayCurve::sampled(ms, values).map_err(|e| Error::Format(e.to_string()))
}

fn rate(s: &Settings) -> Result<()> {
    let curve = read_curve_csv(&s.require_path("input")?)?;
    let range = match s.get("m-range") {
        Some(r) => parse_range(r)?,
        None => (
            curve.ms().first().copied().unwrap_or(1),
            curve.ms().last().copied().unwrap_or(1),
        ),
    };
    let fit = fit_rate(&curve, range)?;
    let text = format!(
        "slope={}\nalpha={}\nintercept={}\nresidual={}\npoints={}\nm_range={},{}\n",
        fit.slope, -fit.slope, fit.intercept, fit.residual, fit.points, range.0, range.1
    );
    write_or_print(s.path("output"), &text)
}

fn synth(s: &Settings) -> Result<()> {
    let output = s.require_path("output")?;
    let length: usize = s.parsed_or("length", wthresh::harness::experiment::DEFAULT_LENGTH)?;
    let rate: u32 = s.parsed_or("sample-rate", 44_100)?;
    let spec = match s.path("synth-spec") {
        Some(p) => SynthSpec::from_json(&std::fs::read_to_string(p)?)?,
        None => SynthSpec::melody(10, length as f64 / rate as f64, rate),
    };
    let x = synth_harmonic(&spec, length, rate)?;
    write_wav(&output, &x, rate)
}

fn compare(s: &Settings) -> Result<()> {
    let cfg = ExperimentConfig::from_settings(s)?;
    let report = run_experiment(&cfg)?;
    let text = report.to_text();
    print!("{text}");
    if let Some(p) = s.path("report") {
        std::fs::write(p, &text)?;
    }
    if let Some(p) = s.path("csv") {
        std::fs::write(p, report.to_csv())?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Analyze(o) => analyze(&o.settings()?),
        Command::Denoise(o) => denoise(&o.settings()?),
        Command::Curve(o) => curve(&o.settings()?),
        Command::Rate(o) => rate(&o.settings()?),
        Command::Synth(o) => synth(&o.settings()?),
        Command::Compare(o) => compare(&o.settings()?),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("wthresh: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
