use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use pids_core::analysis::{self, Spectrum, DB_FLOOR, DEFAULT_FFT_SIZE};
use pids_core::engine::{render_patch, AutomationTarget, Patch, RenderResult};
use pids_core::io::{
    format_number, parse_patch_with_warnings, read_wav_file, serialize_patch, spectrum_csv, write_csv,
    write_wav_file, BitDepth, CsvRow, WavFormat,
};
use pids_core::{presets, OversampleFactor, PidsError};

/// Audio analysed after this much lead-in so start-up transients do not dominate.
const SETTLE_S: f64 = 0.1;
const OUT_OF_BAND_HZ: f64 = 20_000.0;

#[derive(Parser)]
#[command(name = "pids", version, about = "PID-feedback synthesis: render, analyze and sweep patches")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Depth {
    #[value(name = "16")]
    Int16,
    #[value(name = "32")]
    Float32,
}

impl From<Depth> for BitDepth {
    fn from(d: Depth) -> Self {
        match d {
            Depth::Int16 => BitDepth::Int16,
            Depth::Float32 => BitDepth::Float32,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepParam {
    Kp,
    Ki,
    Kd,
    #[value(name = "frequency_hz")]
    Frequency,
}

impl SweepParam {
    fn target(self) -> AutomationTarget {
        match self {
            SweepParam::Kp => AutomationTarget::Kp,
            SweepParam::Ki => AutomationTarget::Ki,
            SweepParam::Kd => AutomationTarget::Kd,
            SweepParam::Frequency => AutomationTarget::Frequency,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Render a patch to a WAV file.
    Render {
        patch: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Oversampling factor for every voice (1, 2, 4 or 8).
        #[arg(long)]
        oversample: Option<u32>,
        /// Override the patch duration in seconds.
        #[arg(long)]
        duration: Option<f64>,
        #[arg(long, value_enum, default_value = "16")]
        bit_depth: Depth,
        /// Exit with status 3 when the instability detector fires.
        #[arg(long)]
        fail_on_unstable: bool,
    },
    /// Print a spectral report for a mono WAV file.
    Analyze {
        wav: PathBuf,
        #[arg(long, default_value_t = DEFAULT_FFT_SIZE)]
        fft_size: usize,
        /// Also write the spectrum as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Render one WAV per value of a parameter and summarise them in summary.csv.
    Sweep {
        patch: PathBuf,
        #[arg(long, value_enum)]
        param: SweepParam,
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        #[arg(long)]
        steps: usize,
        /// Voice whose parameter is swept.
        #[arg(long, default_value_t = 0)]
        voice: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Check a patch and print its warnings.
    Validate { patch: PathBuf },
    /// Write a named preset patch and its rendering to the working directory.
    Demo {
        name: String,
        /// Destination directory.
        #[arg(long, default_value = ".")]
        dir: PathBuf,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    fn io(path: &Path, e: impl fmt::Display) -> Self {
        Failure {
            code: 1,
            message: format!("{}: {e}", path.display()),
        }
    }
}

impl From<PidsError> for Failure {
    fn from(e: PidsError) -> Self {
        let code = if matches!(e, PidsError::Io(_)) { 1 } else { 2 };
        Failure { code, message: e.to_string() }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Render {
            patch,
            output,
            oversample,
            duration,
            bit_depth,
            fail_on_unstable,
        } => render(&patch, &output, oversample, duration, bit_depth.into(), fail_on_unstable),
        Command::Analyze { wav, fft_size, csv } => analyze(&wav, fft_size, csv.as_deref()),
        Command::Sweep {
            patch,
            param,
            from,
            to,
            steps,
            voice,
            output,
        } => sweep(&patch, param, from, to, steps, voice, &output),
        Command::Validate { patch } => validate(&patch),
        Command::Demo { name, dir } => demo(&name, &dir),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn load_patch(path: &Path) -> Result<(Patch, Vec<String>), Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    parse_patch_with_warnings(&text).map_err(|e| Failure {
        code: 2,
        message: format!("{}: {e}", path.display()),
    })
}

fn print_warnings(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

/// Summary statistics for a rendered or loaded signal.
struct Summary {
    rms: f64,
    dc_offset: f64,
    peak_hz: Option<f64>,
    out_of_band_db: f64,
}

fn steady_spectrum(samples: &[f64], rate: f64, fft_size: usize) -> Result<Spectrum, PidsError> {
    let start = ((SETTLE_S * rate).round() as usize).min(samples.len().saturating_sub(fft_size));
    analysis::magnitude_spectrum(&samples[start..], rate, fft_size, analysis::Window::Hann)
}

fn summarize(samples: &[f64], rate: f64) -> Result<Summary, PidsError> {
    if samples.is_empty() {
        return Ok(Summary {
            rms: 0.0,
            dc_offset: 0.0,
            peak_hz: None,
            out_of_band_db: DB_FLOOR,
        });
    }
    let spec = steady_spectrum(samples, rate, DEFAULT_FFT_SIZE)?;
    let nyquist = rate / 2.0;
    let out_of_band_db = if nyquist > OUT_OF_BAND_HZ {
        analysis::band_energy_db(&spec, OUT_OF_BAND_HZ, nyquist)?
    } else {
        DB_FLOOR
    };
    Ok(Summary {
        rms: analysis::rms(samples),
        dc_offset: analysis::dc_offset(samples),
        peak_hz: analysis::peak_frequency(&spec).ok(),
        out_of_band_db,
    })
}

fn fmt_peak(peak: Option<f64>) -> String {
    peak.map_or_else(|| "none".to_string(), |p| format!("{p:.2} Hz"))
}

fn wav_format(patch: &Patch, depth: BitDepth) -> Result<WavFormat, Failure> {
    let rate = patch.sample_rate;
    if rate.fract() != 0.0 || rate < 1.0 || rate > u32::MAX as f64 {
        return Err(Failure::usage(format!("sample rate {rate} cannot be stored in a WAV header")));
    }
    Ok(WavFormat::new(rate as u32, depth))
}

fn write_render(path: &Path, result: &RenderResult, format: WavFormat) -> Outcome {
    write_wav_file(path, &result.samples, format).map_err(|e| match e {
        PidsError::Io(io) => Failure::io(path, io),
        other => other.into(),
    })
}

fn render(
    patch_path: &Path,
    output: &Path,
    oversample: Option<u32>,
    duration: Option<f64>,
    depth: BitDepth,
    fail_on_unstable: bool,
) -> Outcome {
    let (mut patch, _) = load_patch(patch_path)?;
    if let Some(m) = oversample {
        let m = OversampleFactor::new(m).map_err(|e| Failure::usage(format!("--oversample: {e}")))?;
        patch.voices.iter_mut().for_each(|v| v.oversample = m);
    }
    if let Some(d) = duration {
        patch.duration_s = d;
    }
    let warnings = patch.validate()?;
    print_warnings(&warnings);

    let result = render_patch(&patch)?;
    write_render(output, &result, wav_format(&patch, depth)?)?;

    let s = summarize(&result.samples, patch.sample_rate)?;
    println!(
        "duration {:.3} s, rms {:.4}, dc offset {:.4}, peak {}, clipped {}, unstable {}",
        result.samples.len() as f64 / patch.sample_rate,
        s.rms,
        s.dc_offset,
        fmt_peak(s.peak_hz),
        result.clip_count,
        if result.unstable { "yes" } else { "no" }
    );
    if fail_on_unstable && result.unstable {
        return Err(Failure {
            code: 3,
            message: "instability detected (two-value oscillation at the tick rate)".into(),
        });
    }
    Ok(())
}

fn analyze(path: &Path, fft_size: usize, csv: Option<&Path>) -> Outcome {
    let (samples, format) = read_wav_file(path).map_err(|e| match e {
        PidsError::Io(io) => Failure::io(path, io),
        other => Failure::usage(format!("{}: {other}", path.display())),
    })?;
    if samples.is_empty() {
        return Err(Failure::usage(format!("{}: no samples", path.display())));
    }
    let rate = format.sample_rate as f64;
    let (report, spec) = analysis::analyze(&samples, rate, fft_size)?;
    println!("samples      {} ({:.3} s at {} Hz)", samples.len(), samples.len() as f64 / rate, format.sample_rate);
    println!("peak         {}", fmt_peak(report.peak_hz));
    println!("rms          {:.6}", report.rms);
    println!("dc offset    {:.6}", report.dc_offset);
    for (name, db) in &report.band_energies {
        println!("band {name:<7} {db:.2} dB");
    }
    if let Some(csv_path) = csv {
        fs::write(csv_path, spectrum_csv(&spec)).map_err(|e| Failure::io(csv_path, e))?;
    }
    Ok(())
}

fn sweep_values(from: f64, to: f64, steps: usize) -> Vec<f64> {
    match steps {
        1 => vec![from],
        _ => (0..steps)
            .map(|i| from + (to - from) * i as f64 / (steps - 1) as f64)
            .collect(),
    }
}

fn sweep(
    patch_path: &Path,
    param: SweepParam,
    from: f64,
    to: f64,
    steps: usize,
    voice: usize,
    dir: &Path,
) -> Outcome {
    if steps == 0 {
        return Err(Failure::usage("--steps must be at least 1"));
    }
    if !from.is_finite() || !to.is_finite() {
        return Err(Failure::usage("--from and --to must be finite"));
    }
    let (base, warnings) = load_patch(patch_path)?;
    print_warnings(&warnings);
    if voice >= base.voices.len() {
        return Err(Failure::usage(format!(
            "--voice {voice} out of range; the patch has {} voice(s)",
            base.voices.len()
        )));
    }
    let target = param.target();
    let format = wav_format(&base, BitDepth::Int16)?;
    fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))?;

    let name = target.to_string();
    let mut rows = Vec::with_capacity(steps);
    for (i, value) in sweep_values(from, to, steps).into_iter().enumerate() {
        let mut patch = base.clone();
        // the swept value replaces any automation of the same parameter
        patch.automations.retain(|a| !(a.voice == voice && a.target == target));
        let v = &mut patch.voices[voice];
        match param {
            SweepParam::Kp => v.pid.gains.kp = value,
            SweepParam::Ki => v.pid.gains.ki = value,
            SweepParam::Kd => v.pid.gains.kd = value,
            SweepParam::Frequency => v.artist.frequency_hz = value,
        }
        patch
            .validate()
            .map_err(|e| Failure::usage(format!("{name} = {}: {e}", format_number(value))))?;
        let result = render_patch(&patch)?;
        let wav = dir.join(format!("{name}_{i:03}.wav"));
        write_render(&wav, &result, format)?;
        let s = summarize(&result.samples, patch.sample_rate)?;
        println!(
            "{name} = {:<12} rms {:.4}  peak {}  {}",
            format_number(value),
            s.rms,
            fmt_peak(s.peak_hz),
            if result.unstable { "unstable" } else { "" }
        );
        rows.push(CsvRow::new(
            format_number(value),
            vec![
                s.rms,
                s.peak_hz.unwrap_or(f64::NAN),
                s.dc_offset,
                s.out_of_band_db,
                if result.unstable { 1.0 } else { 0.0 },
            ],
        ));
    }
    let header = [name.as_str(), "rms", "peak_hz", "dc_offset", "out_of_band_db", "unstable"];
    let csv = write_csv(&header, &rows)?;
    let summary = dir.join("summary.csv");
    fs::write(&summary, csv).map_err(|e| Failure::io(&summary, e))?;
    Ok(())
}

fn validate(path: &Path) -> Outcome {
    let (patch, warnings) = load_patch(path)?;
    print_warnings(&warnings);
    println!(
        "ok: {} voice(s), {} automation(s), {} samples at {} Hz",
        patch.voices.len(),
        patch.automations.len(),
        patch.output_len(),
        patch.sample_rate
    );
    Ok(())
}

fn demo(name: &str, dir: &Path) -> Outcome {
    let preset = presets::find(name).ok_or_else(|| {
        Failure::usage(format!(
            "unknown preset '{name}'; available: {}",
            presets::names().join(", ")
        ))
    })?;
    let patch = preset.patch();
    fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))?;
    let json = dir.join(format!("{name}.json"));
    fs::write(&json, serialize_patch(&patch)).map_err(|e| Failure::io(&json, e))?;
    let result = render_patch(&patch)?;
    let wav = dir.join(format!("{name}.wav"));
    write_render(&wav, &result, wav_format(&patch, BitDepth::Int16)?)?;
    println!("{name}: {}", preset.description);
    println!("wrote {} and {}", json.display(), wav.display());
    Ok(())
}
