//! Oversampling anti-aliasing: Kaiser-windowed sinc low-pass, then decimation.

use std::f64::consts::PI;


use crate::error::{PidsError, Result};

/// Integer oversampling factor. `1` bypasses anti-aliasing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OversampleFactor(u32);

impl OversampleFactor {
    pub const ALLOWED: [u32; 4] = [1, 2, 4, 8];
    pub const BYPASS: OversampleFactor = OversampleFactor(1);

    pub fn new(m: u32) -> Result<Self> {
        if Self::ALLOWED.contains(&m) {
            Ok(OversampleFactor(m))
        } else {
            Err(PidsError::Domain(format!(
                "oversampling factor must be one of 1, 2, 4, 8; got {m}"
            )))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn as_usize(self) -> usize {
        self.0 as usize
    }

    pub fn is_bypass(self) -> bool {
        self.0 == 1
    }
}

impl Default for OversampleFactor {
    fn default() -> Self {
        OversampleFactor(4)
    }
}

pub const DEFAULT_CUTOFF_HZ: f64 = 20_000.0;
pub const DEFAULT_ATTENUATION_DB: f64 = 80.0;

/// Low-pass design parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirSpec {
    pub cutoff_hz: f64,
    pub stopband_edge_hz: f64,
    pub attenuation_db: f64,
}

impl FirSpec {
    /// 20 kHz passband edge, stopband from the playback Nyquist, 80 dB.
    pub fn for_playback(playback_rate: f64) -> Self {
        FirSpec {
            cutoff_hz: DEFAULT_CUTOFF_HZ,
            stopband_edge_hz: playback_rate / 2.0,
            attenuation_db: DEFAULT_ATTENUATION_DB,
        }
    }

    fn validate(&self, oversampled_rate: f64) -> Result<()> {
        if !(self.attenuation_db >= 40.0) {
            return Err(PidsError::FilterDesign(format!(
                "stopband attenuation must be >= 40 dB, got {}",
                self.attenuation_db
            )));
        }
        if !(self.stopband_edge_hz > self.cutoff_hz) || !(self.cutoff_hz > 0.0) {
            return Err(PidsError::FilterDesign(format!(
                "transition width must be > 0 (cutoff {} Hz, stopband {} Hz)",
                self.cutoff_hz, self.stopband_edge_hz
            )));
        }
        if !(self.stopband_edge_hz < oversampled_rate / 2.0) {
            return Err(PidsError::FilterDesign(format!(
                "stopband edge {} Hz must lie below the oversampled Nyquist {} Hz",
                self.stopband_edge_hz,
                oversampled_rate / 2.0
            )));
        }
        Ok(())
    }
}

/// Kaiser's empirical shape parameter for a stopband attenuation of `a` dB.
pub fn kaiser_beta(attenuation_db: f64) -> f64 {
    let a = attenuation_db;
    if a > 50.0 {
        0.1102 * (a - 8.7)
    } else if a >= 21.0 {
        0.5842 * (a - 21.0).powf(0.4) + 0.07886 * (a - 21.0)
    } else {
        0.0
    }
}

/// Kaiser's tap-count estimate for normalized transition width `delta_f`, rounded up to odd.
pub fn estimate_taps(attenuation_db: f64, delta_f: f64) -> usize {
    let n = ((attenuation_db - 7.95) / (14.36 * delta_f)).ceil().max(1.0) as usize;
    n | 1
}

/// Modified Bessel function of the first kind, order zero (power series).
fn bessel_i0(x: f64) -> f64 {
    let half = x / 2.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let r = half / k as f64;
        term *= r * r;
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum
}

fn kaiser_window(len: usize, beta: f64) -> Vec<f64> {
    if len == 1 {
        return vec![1.0];
    }
    let denom = bessel_i0(beta);
    let half = (len - 1) as f64 / 2.0;
    (0..len)
        .map(|i| {
            let r = (i as f64 - half) / half;
            bessel_i0(beta * (1.0 - r * r).max(0.0).sqrt()) / denom
        })
        .collect()
}

/// Symmetric linear-phase FIR kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct FirKernel {
    coefficients: Vec<f64>,
}

impl FirKernel {
    /// Odd-length symmetric taps; anything else is rejected.
    pub fn new(coefficients: Vec<f64>) -> Result<Self> {
        let n = coefficients.len();
        if n == 0 || n.is_multiple_of(2) {
            return Err(PidsError::FilterDesign(format!(
                "kernel length must be odd, got {n}"
            )));
        }
        if (0..n / 2).any(|k| coefficients[k] != coefficients[n - 1 - k]) {
            return Err(PidsError::FilterDesign("kernel is not symmetric".into()));
        }
        Ok(FirKernel { coefficients })
    }

    pub fn identity() -> Self {
        FirKernel {
            coefficients: vec![1.0],
        }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn taps(&self) -> usize {
        self.coefficients.len()
    }

    pub fn group_delay(&self) -> usize {
        (self.coefficients.len() - 1) / 2
    }

    /// Magnitude response at `freq_hz` by direct evaluation.
    pub fn magnitude_at(&self, freq_hz: f64, rate: f64) -> f64 {
        let w = 2.0 * PI * freq_hz / rate;
        let (re, im) = self
            .coefficients
            .iter()
            .enumerate()
            .fold((0.0, 0.0), |(re, im), (k, &h)| {
                let (s, c) = (w * k as f64).sin_cos();
                (re + h * c, im - h * s)
            });
        re.hypot(im)
    }

    /// Worst-case attenuation (positive dB) over `[from_hz, rate/2]`, measured at
    /// `grid + 1` evenly spaced frequencies including both band edges.
    pub fn stopband_attenuation_db(&self, from_hz: f64, rate: f64, grid: usize) -> f64 {
        let h = &self.coefficients;
        let c = (h.len() - 1) / 2;
        let dc = h.iter().sum::<f64>().abs();
        let nyquist = rate / 2.0;
        let grid = grid.max(1);
        let worst = (0..=grid)
            .map(|i| {
                let f = from_hz + (nyquist - from_hz) * i as f64 / grid as f64;
                // symmetric taps: zero-phase amplitude h[c] + 2 sum h[c+k] cos(wk)
                let w = 2.0 * PI * f / rate;
                let two_cos = 2.0 * w.cos();
                let (mut prev, mut cur) = (1.0, w.cos());
                let mut acc = h[c];
                for k in 1..=c {
                    acc += 2.0 * h[c + k] * cur;
                    (prev, cur) = (cur, two_cos * cur - prev);
                }
                acc.abs()
            })
            .fold(0.0, f64::max);
        -20.0 * (worst / dc).log10()
    }
}

/// Grid used to verify designed kernels.
pub const VERIFY_GRID: usize = 8192;

/// Designs a Kaiser-windowed sinc low-pass.
///
/// The ideal response is centered at the middle of the transition band and the
/// taps are normalized to unity DC gain. The Kaiser length formula is only an
/// estimate, so the length grows two taps at a time until the measured
/// stopband attenuation reaches the target.
pub fn design_lowpass(spec: &FirSpec, oversampled_rate: f64) -> Result<FirKernel> {
    spec.validate(oversampled_rate)?;
    let delta_f = (spec.stopband_edge_hz - spec.cutoff_hz) / oversampled_rate;
    let beta = kaiser_beta(spec.attenuation_db);
    let fc = (spec.cutoff_hz + spec.stopband_edge_hz) / 2.0 / oversampled_rate;

    let estimate = estimate_taps(spec.attenuation_db, delta_f);
    let mut taps = estimate;
    loop {
        let kernel = windowed_sinc(taps, fc, beta);
        let measured =
            kernel.stopband_attenuation_db(spec.stopband_edge_hz, oversampled_rate, VERIFY_GRID);
        if measured >= spec.attenuation_db {
            return Ok(kernel);
        }
        taps += 2;
        if taps > estimate * 2 {
            return Err(PidsError::FilterDesign(format!(
                "could not reach {} dB within {} taps",
                spec.attenuation_db,
                estimate * 2
            )));
        }
    }
}

fn windowed_sinc(taps: usize, fc: f64, beta: f64) -> FirKernel {
    let window = kaiser_window(taps, beta);
    let half = (taps - 1) / 2;
    let mut h: Vec<f64> = (0..taps)
        .map(|i| {
            let t = i as f64 - half as f64;
            let sinc = if t == 0.0 {
                2.0 * fc
            } else {
                (2.0 * PI * fc * t).sin() / (PI * t)
            };
            sinc * window[i]
        })
        .collect();
    // mirror so rounding in sin() cannot break exact symmetry
    for k in 0..half {
        h[taps - 1 - k] = h[k];
    }
    let sum: f64 = h.iter().sum();
    h.iter_mut().for_each(|c| *c /= sum);
    FirKernel { coefficients: h }
}

/// Zero-phase FIR filtering: full convolution trimmed by the group delay,
/// same length as the input, zero-padded at both edges.
pub fn convolve(signal: &[f64], kernel: &FirKernel) -> Vec<f64> {
    let h = kernel.coefficients();
    let delay = kernel.group_delay() as isize;
    let len = signal.len() as isize;
    (0..len)
        .map(|n| {
            let mut acc = 0.0;
            for (k, &c) in h.iter().enumerate() {
                let idx = n + delay - k as isize;
                if idx >= 0 && idx < len {
                    acc += c * signal[idx as usize];
                }
            }
            acc
        })
        .collect()
}

/// Keeps every `m`-th sample starting at index 0.
pub fn decimate(signal: &[f64], m: OversampleFactor) -> Vec<f64> {
    signal.iter().step_by(m.as_usize()).copied().collect()
}

/// `decimate(convolve(signal, kernel), m)` computing only the retained outputs.
///
/// Terms are accumulated in the same order as [`convolve`], so the result is
/// bit-identical to the naive path while doing `1/m` of the work.
pub fn filter_decimate(signal: &[f64], kernel: &FirKernel, m: OversampleFactor) -> Vec<f64> {
    let h = kernel.coefficients();
    let taps = h.len();
    let delay = kernel.group_delay();
    let len = signal.len();
    let out_len = len.div_ceil(m.as_usize());
    let mut out = Vec::with_capacity(out_len);
    for j in 0..out_len {
        // output n reads signal[n + delay - k] for k in 0..taps
        let top = j * m.as_usize() + delay;
        let acc = if top < len && top + 1 >= taps {
            let window = &signal[top + 1 - taps..=top];
            h.iter()
                .zip(window.iter().rev())
                .fold(0.0, |acc, (&c, &x)| acc + c * x)
        } else {
            let k_lo = top.saturating_sub(len - 1);
            let k_hi = top.min(taps - 1);
            (k_lo..=k_hi).fold(0.0, |acc, k| acc + h[k] * signal[top - k])
        };
        out.push(acc);
    }
    out
}

/// Full anti-aliasing pass from `m * playback_rate` down to `playback_rate`.
pub fn antialias(signal: &[f64], m: OversampleFactor, playback_rate: f64) -> Result<Vec<f64>> {
    if m.is_bypass() {
        return Ok(signal.to_vec());
    }
    let kernel = design_lowpass(
        &FirSpec::for_playback(playback_rate),
        playback_rate * m.get() as f64,
    )?;
    Ok(filter_decimate(signal, &kernel, m))
}
