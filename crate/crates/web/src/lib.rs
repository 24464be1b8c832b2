//! Browser bindings for the pids engine.
//!
//! Three operations back the demo page: rendering a single step/linear/sine
//! voice from slider values, rendering a named preset, and computing a
//! spectrum for plotting.

use pids_core::analysis::{self, Window};
use pids_core::artist::{ArtistSpec, BreakpointSet, Skeleton};
use pids_core::engine::{render_patch, single_voice_patch, Patch};
use pids_core::io::serialize_patch;
use pids_core::{presets, OversampleFactor, PidGains};
use wasm_bindgen::prelude::*;

const RATE: f64 = 44100.0;

/// A finished render plus the diagnostics shown next to the plots.
#[wasm_bindgen]
pub struct Rendering {
    samples: Vec<f64>,
    sample_rate: f64,
    unstable: bool,
    dc_offset: f64,
    rms: f64,
    clip_count: usize,
    warnings: Vec<String>,
}

#[wasm_bindgen]
impl Rendering {
    #[wasm_bindgen(getter)]
    pub fn samples(&self) -> Vec<f64> {
        self.samples.clone()
    }

    /// Samples as 32-bit floats, ready for an `AudioBuffer`.
    #[wasm_bindgen(getter)]
    pub fn samples_f32(&self) -> Vec<f32> {
        self.samples.iter().map(|&s| s as f32).collect()
    }

    #[wasm_bindgen(getter)]
    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    #[wasm_bindgen(getter)]
    pub fn unstable(&self) -> bool {
        self.unstable
    }

    #[wasm_bindgen(getter)]
    pub fn dc_offset(&self) -> f64 {
        self.dc_offset
    }

    #[wasm_bindgen(getter)]
    pub fn rms(&self) -> f64 {
        self.rms
    }

    #[wasm_bindgen(getter)]
    pub fn clip_count(&self) -> usize {
        self.clip_count
    }

    #[wasm_bindgen(getter)]
    pub fn warnings(&self) -> Vec<String> {
        self.warnings.clone()
    }
}

fn study_artist(skeleton: &str, frequency_hz: f64) -> Result<ArtistSpec, String> {
    let skeleton = match skeleton {
        "step" => Skeleton::Step,
        "linear" => Skeleton::Linear,
        "sine" => Skeleton::Sine {
            amplitude: 1.0,
            phase: 0.0,
        },
        other => return Err(format!("unknown skeleton '{other}'")),
    };
    ArtistSpec::new(skeleton, BreakpointSet::study(), frequency_hz).map_err(|e| e.to_string())
}

fn finish(patch: &Patch) -> Result<Rendering, String> {
    let warnings = patch.validate().map_err(|e| e.to_string())?;
    let r = render_patch(patch).map_err(|e| e.to_string())?;
    Ok(Rendering {
        rms: analysis::rms(&r.samples),
        samples: r.samples,
        sample_rate: r.sample_rate,
        unstable: r.unstable,
        dc_offset: r.dc_offset,
        clip_count: r.clip_count,
        warnings,
    })
}

#[allow(clippy::too_many_arguments)]
fn voice_rendering(
    skeleton: &str,
    frequency_hz: f64,
    kp: f64,
    ki: f64,
    kd: f64,
    integral_limit: f64,
    oversample: u32,
    duration_s: f64,
) -> Result<Rendering, String> {
    let artist = study_artist(skeleton, frequency_hz)?;
    let m = OversampleFactor::new(oversample).map_err(|e| e.to_string())?;
    let mut patch = single_voice_patch(artist, PidGains::new(kp, ki, kd), m, RATE, duration_s).map_err(|e| e.to_string())?;
    patch.voices[0].pid = pids_core::PidConfig::new(PidGains::new(kp, ki, kd), integral_limit).map_err(|e| e.to_string())?;
    finish(&patch)
}

fn preset_rendering(name: &str) -> Result<Rendering, String> {
    let preset = presets::find(name).ok_or_else(|| format!("unknown preset '{name}'"))?;
    finish(&preset.patch())
}

fn spectrum_db(samples: &[f64], sample_rate: f64, fft_size: usize) -> Result<Vec<f64>, String> {
    analysis::magnitude_spectrum(samples, sample_rate, fft_size, Window::Hann)
        .map(|s| s.magnitude_db)
        .map_err(|e| e.to_string())
}

/// Renders one voice against the study breakpoint set (Table 1 shape).
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn render_voice(
    skeleton: &str,
    frequency_hz: f64,
    kp: f64,
    ki: f64,
    kd: f64,
    integral_limit: f64,
    oversample: u32,
    duration_s: f64,
) -> Result<Rendering, JsError> {
    voice_rendering(skeleton, frequency_hz, kp, ki, kd, integral_limit, oversample, duration_s).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn render_preset(name: &str) -> Result<Rendering, JsError> {
    preset_rendering(name).map_err(|e| JsError::new(&e))
}

/// Hann-windowed magnitude spectrum in dB relative to the strongest bin.
#[wasm_bindgen]
pub fn spectrum(samples: &[f64], sample_rate: f64, fft_size: usize) -> Result<Vec<f64>, JsError> {
    spectrum_db(samples, sample_rate, fft_size).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn preset_names() -> Vec<String> {
    presets::names().into_iter().map(String::from).collect()
}

#[wasm_bindgen]
pub fn preset_description(name: &str) -> Option<String> {
    presets::find(name).map(|p| p.description.to_string())
}

#[wasm_bindgen]
pub fn preset_json(name: &str) -> Option<String> {
    presets::find(name).map(|p| serialize_patch(&p.patch()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn voice_render_reports_diagnostics() {
        let r = voice_rendering("step", 440.0, 0.6, 0.3, 0.0, 5000.0, 4, 0.1).unwrap();
        assert_eq!(r.samples.len(), 4410);
        assert!(!r.unstable);
        assert!(r.rms > 0.0);
        let wild = voice_rendering("step", 440.0, 50.0, 10.0, 0.0, 5000.0, 4, 0.1).unwrap();
        assert!(wild.unstable);
        assert!(voice_rendering("square", 440.0, 1.0, 0.0, 0.0, 5000.0, 4, 0.1).is_err());
        assert!(voice_rendering("step", 440.0, 1.0, 0.0, 0.0, 5000.0, 3, 0.1).is_err());
    }

    #[test]
    fn every_preset_renders() {
        for name in presets::names() {
            let r = preset_rendering(name).unwrap();
            assert!(r.samples.iter().all(|s| s.abs() <= 1.0));
            assert!(preset_json(name).is_some());
        }
        assert!(preset_rendering("nosuch").is_err());
    }

    #[test]
    fn spectrum_has_half_plus_one_bins() {
        let r = voice_rendering("sine", 1000.0, 1.0, 0.0, 0.0, 5000.0, 2, 0.1).unwrap();
        let db = spectrum_db(&r.samples, RATE, 2048).unwrap();
        assert_eq!(db.len(), 1025);
        assert!(spectrum_db(&r.samples, RATE, 1000).is_err());
    }
}
