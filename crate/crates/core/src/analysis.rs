//! Spectral and level measurements.

use rustfft::{num_complex::Complex, FftPlanner};

use crate::error::{PidsError, Result};

/// Floor applied to every dB figure so reports stay finite.
pub const DB_FLOOR: f64 = -300.0;

pub const DEFAULT_FFT_SIZE: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Window {
    #[default]
    Hann,
    Rectangular,
}

impl Window {
    fn coefficients(self, n: usize) -> Vec<f64> {
        match self {
            Window::Rectangular => vec![1.0; n],
            // periodic Hann
            Window::Hann => (0..n)
                .map(|i| {
                    let s = (std::f64::consts::PI * i as f64 / n as f64).sin();
                    s * s
                })
                .collect(),
        }
    }

    /// Bins from DC that belong to the DC main lobe.
    fn dc_lobe(self) -> usize {
        match self {
            Window::Rectangular => 1,
            Window::Hann => 2,
        }
    }
}

/// One-sided power spectrum of `fft_size` samples.
///
/// `linear_power` is scaled so its sum equals the windowed time-domain energy.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub rate: f64,
    pub fft_size: usize,
    pub window: Window,
    pub bin_hz: Vec<f64>,
    pub magnitude_db: Vec<f64>,
    pub linear_power: Vec<f64>,
}

impl Spectrum {
    pub fn bin_width(&self) -> f64 {
        self.rate / self.fft_size as f64
    }

    pub fn total_power(&self) -> f64 {
        self.linear_power.iter().sum()
    }

    pub fn nearest_bin(&self, freq_hz: f64) -> usize {
        ((freq_hz / self.bin_width()).round().max(0.0) as usize).min(self.linear_power.len() - 1)
    }

    /// Builds a spectrum directly from one-sided bin powers, taken as unwindowed.
    pub fn from_power(rate: f64, fft_size: usize, linear_power: Vec<f64>) -> Result<Self> {
        if linear_power.len() != fft_size / 2 + 1 {
            return Err(PidsError::LengthMismatch {
                expected: fft_size / 2 + 1,
                actual: linear_power.len(),
            });
        }
        let max = linear_power.iter().copied().fold(0.0, f64::max);
        let magnitude_db = linear_power
            .iter()
            .map(|&p| {
                if max > 0.0 {
                    ratio_db(p / max)
                } else {
                    DB_FLOOR
                }
            })
            .collect();
        let bin_hz = (0..linear_power.len())
            .map(|k| k as f64 * rate / fft_size as f64)
            .collect();
        Ok(Spectrum {
            rate,
            fft_size,
            window: Window::Rectangular,
            bin_hz,
            magnitude_db,
            linear_power,
        })
    }
}

fn ratio_db(ratio: f64) -> f64 {
    if ratio > 0.0 {
        (10.0 * ratio.log10()).max(DB_FLOOR)
    } else {
        DB_FLOOR
    }
}

/// Windowed DFT of the first `fft_size` samples (zero-padded if shorter).
pub fn magnitude_spectrum(
    samples: &[f64],
    rate: f64,
    fft_size: usize,
    window: Window,
) -> Result<Spectrum> {
    if samples.is_empty() {
        return Err(PidsError::Domain("cannot analyze an empty signal".into()));
    }
    if !fft_size.is_power_of_two() || fft_size < 2 {
        return Err(PidsError::Domain(format!(
            "fft size must be a power of two >= 2, got {fft_size}"
        )));
    }
    if !(rate > 0.0) {
        return Err(PidsError::Domain(format!("rate must be > 0, got {rate}")));
    }
    let w = window.coefficients(fft_size);
    let mut buf: Vec<Complex<f64>> = (0..fft_size)
        .map(|i| Complex::new(samples.get(i).copied().unwrap_or(0.0) * w[i], 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(fft_size).process(&mut buf);

    let half = fft_size / 2;
    let n = fft_size as f64;
    let power = (0..=half)
        .map(|k| {
            let p = buf[k].norm_sqr() / n;
            if k == 0 || k == half {
                p
            } else {
                2.0 * p
            }
        })
        .collect();
    let mut spec = Spectrum::from_power(rate, fft_size, power)?;
    spec.window = window;
    Ok(spec)
}

/// Strongest bin outside the window's DC main lobe, refined by a parabola
/// through the neighbouring dB values. Ties resolve to the lowest bin.
pub fn peak_frequency(spec: &Spectrum) -> Result<f64> {
    let p = &spec.linear_power;
    let first = spec.window.dc_lobe();
    if p.len() <= first {
        return Err(PidsError::Domain("spectrum has no bins above the DC lobe".into()));
    }
    let mut best = first;
    for k in first + 1..p.len() {
        if p[k] > p[best] {
            best = k;
        }
    }
    if !(p[best] > 0.0) {
        return Err(PidsError::Domain("spectrum has no energy above DC".into()));
    }
    let mut offset = 0.0;
    if best + 1 < p.len() {
        let (a, b, c) = (
            spec.magnitude_db[best - 1],
            spec.magnitude_db[best],
            spec.magnitude_db[best + 1],
        );
        let denom = a - 2.0 * b + c;
        if denom < 0.0 {
            offset = (0.5 * (a - c) / denom).clamp(-0.5, 0.5);
        }
    }
    Ok((best as f64 + offset) * spec.bin_width())
}

/// Index of the strongest bin outside the DC lobe, without refinement.
pub fn peak_bin(spec: &Spectrum) -> Result<usize> {
    let f = peak_frequency(spec)?;
    Ok(spec.nearest_bin(f))
}

pub fn dc_offset(samples: &[f64]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    samples.iter().sum::<f64>() / samples.len() as f64
}

pub fn rms(samples: &[f64]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    (samples.iter().map(|x| x * x).sum::<f64>() / samples.len() as f64).sqrt()
}

/// Power in `[lo_hz, hi_hz]` relative to the total, in dB. A silent spectrum
/// reports the floor.
pub fn band_energy_db(spec: &Spectrum, lo_hz: f64, hi_hz: f64) -> Result<f64> {
    let nyquist = spec.rate / 2.0;
    if !(lo_hz >= 0.0 && lo_hz < hi_hz && hi_hz <= nyquist) {
        return Err(PidsError::Domain(format!(
            "band [{lo_hz}, {hi_hz}] Hz must satisfy 0 <= lo < hi <= {nyquist}"
        )));
    }
    let total = spec.total_power();
    let inside: f64 = spec
        .bin_hz
        .iter()
        .zip(&spec.linear_power)
        .filter(|(f, _)| (lo_hz..=hi_hz).contains(*f))
        .map(|(_, p)| p)
        .sum();
    Ok(if total > 0.0 {
        ratio_db(inside / total)
    } else {
        DB_FLOOR
    })
}

/// Total power lying more than `half_width` bins away from `center_hz`.
pub fn power_outside(spec: &Spectrum, center_hz: f64, half_width: usize) -> f64 {
    let k0 = spec.nearest_bin(center_hz);
    spec.linear_power
        .iter()
        .enumerate()
        .filter(|(k, _)| k.abs_diff(k0) > half_width)
        .map(|(_, p)| p)
        .sum()
}

/// Fraction of the total power lying more than `half_width` bins away from `center_hz`.
pub fn power_fraction_outside(spec: &Spectrum, center_hz: f64, half_width: usize) -> f64 {
    let total = spec.total_power();
    if total <= 0.0 {
        return 0.0;
    }
    power_outside(spec, center_hz, half_width) / total
}

/// Euclidean distance between the unit-normalized power profiles of two spectra.
pub fn spectral_distance(a: &Spectrum, b: &Spectrum) -> Result<f64> {
    if a.linear_power.len() != b.linear_power.len() {
        return Err(PidsError::LengthMismatch {
            expected: a.linear_power.len(),
            actual: b.linear_power.len(),
        });
    }
    if a.rate != b.rate {
        return Err(PidsError::Domain(format!(
            "bin grids differ: {} Hz vs {} Hz",
            a.rate, b.rate
        )));
    }
    let norm = |p: &[f64]| {
        let n = p.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 0.0 {
            n
        } else {
            1.0
        }
    };
    let (na, nb) = (norm(&a.linear_power), norm(&b.linear_power));
    Ok(a.linear_power
        .iter()
        .zip(&b.linear_power)
        .map(|(x, y)| {
            let d = x / na - y / nb;
            d * d
        })
        .sum::<f64>()
        .sqrt())
}

/// Frequency bands reported by [`analyze`].
pub const REPORT_BANDS: [(&str, f64, f64); 5] = [
    ("sub", 0.0, 20.0),
    ("low", 20.0, 500.0),
    ("mid", 500.0, 5000.0),
    ("high", 5000.0, 20000.0),
    ("ultra", 20000.0, f64::INFINITY),
];

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisReport {
    /// `None` when the signal has no energy above DC.
    pub peak_hz: Option<f64>,
    pub dc_offset: f64,
    pub rms: f64,
    pub band_energies: Vec<(String, f64)>,
}

/// Hann spectrum plus level statistics for a whole signal.
pub fn analyze(samples: &[f64], rate: f64, fft_size: usize) -> Result<(AnalysisReport, Spectrum)> {
    let spec = magnitude_spectrum(samples, rate, fft_size, Window::Hann)?;
    let nyquist = rate / 2.0;
    let band_energies = REPORT_BANDS
        .iter()
        .filter(|(_, lo, _)| *lo < nyquist)
        .map(|&(name, lo, hi)| Ok((name.to_string(), band_energy_db(&spec, lo, hi.min(nyquist))?)))
        .collect::<Result<Vec<_>>>()?;
    let report = AnalysisReport {
        peak_hz: peak_frequency(&spec).ok(),
        dc_offset: dc_offset(samples),
        rms: rms(samples),
        band_energies,
    };
    Ok((report, spec))
}
