//! Discrete PID feedback loop.
//!
//! The process variable is the loop's own previous output: every tick computes
//! `e = setpoint - y[n-1]`, accumulates `e` into a clamped integral, differences
//! consecutive errors and clamps the weighted sum to `[-1, 1]`.

use crate::error::{PidsError, Result};

/// Integral limit used when a patch does not specify one.
pub const DEFAULT_INTEGRAL_LIMIT: f64 = 5000.0;

/// Output rail. The loop output is always contained to `[-OUTPUT_LIMIT, OUTPUT_LIMIT]`.
pub const OUTPUT_LIMIT: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PidGains {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
}

impl PidGains {
    pub const fn new(kp: f64, ki: f64, kd: f64) -> Self {
        PidGains { kp, ki, kd }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, g) in [("kp", self.kp), ("ki", self.ki), ("kd", self.kd)] {
            if !g.is_finite() || g < 0.0 {
                return Err(PidsError::Domain(format!(
                    "gain {name} must be finite and non-negative, got {g}"
                )));
            }
        }
        Ok(())
    }

    /// All three gains zero: the loop can only ever output silence.
    pub fn is_silent(&self) -> bool {
        self.kp == 0.0 && self.ki == 0.0 && self.kd == 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PidConfig {
    pub gains: PidGains,
    integral_limit: f64,
}

impl PidConfig {
    pub fn new(gains: PidGains, integral_limit: f64) -> Result<Self> {
        gains.validate()?;
        if !integral_limit.is_finite() || integral_limit <= 0.0 {
            return Err(PidsError::Domain(format!(
                "integral limit must be finite and > 0, got {integral_limit}"
            )));
        }
        Ok(PidConfig {
            gains,
            integral_limit,
        })
    }

    pub fn with_gains(gains: PidGains) -> Result<Self> {
        Self::new(gains, DEFAULT_INTEGRAL_LIMIT)
    }

    pub fn integral_limit(&self) -> f64 {
        self.integral_limit
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PidState {
    pub prev_output: f64,
    pub prev_error: f64,
    pub integral: f64,
}

impl PidState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn reset(&mut self) {
        *self = PidState::default();
    }

    /// Advances the loop by one sample and returns the new output.
    ///
    /// The integral is clamped to `[-L, L]` before the weighted sum is formed;
    /// the sum is clamped to the output rail afterwards.
    pub fn tick(&mut self, config: &PidConfig, setpoint: f64) -> Result<f64> {
        if !setpoint.is_finite() {
            return Err(PidsError::Domain(format!(
                "setpoint must be finite, got {setpoint}"
            )));
        }
        Ok(self.tick_unchecked(config, setpoint))
    }

    #[inline]
    pub(crate) fn tick_unchecked(&mut self, config: &PidConfig, setpoint: f64) -> f64 {
        let limit = config.integral_limit;
        let PidGains { kp, ki, kd } = config.gains;

        let error = setpoint - self.prev_output;
        let integral = (self.integral + error).clamp(-limit, limit);
        let derivative = error - self.prev_error;
        let y = (kp * error + ki * integral + kd * derivative).clamp(-OUTPUT_LIMIT, OUTPUT_LIMIT);

        self.prev_output = y;
        self.prev_error = error;
        self.integral = integral;
        y
    }
}

/// Detector defaults: 64 alternating differences of at least 0.5.
pub const DEFAULT_INSTABILITY_WINDOW: usize = 64;
pub const DEFAULT_INSTABILITY_MIN_STEP: f64 = 0.5;

/// Streaming detector for the two-value Nyquist oscillation of an unstable loop.
///
/// Fires once `window` consecutive first differences strictly alternate in
/// sign with magnitude at least `min_step`.
#[derive(Debug, Clone)]
pub struct InstabilityDetector {
    window: usize,
    min_step: f64,
    prev_sample: Option<f64>,
    prev_diff: f64,
    run: usize,
    fired_at: Option<usize>,
    seen: usize,
}

impl InstabilityDetector {
    pub fn new(window: usize, min_step: f64) -> Result<Self> {
        if window < 2 {
            return Err(PidsError::Domain(format!(
                "instability window must be >= 2, got {window}"
            )));
        }
        if !(min_step > 0.0) {
            return Err(PidsError::Domain(format!(
                "instability min_step must be > 0, got {min_step}"
            )));
        }
        Ok(InstabilityDetector {
            window,
            min_step,
            prev_sample: None,
            prev_diff: 0.0,
            run: 0,
            fired_at: None,
            seen: 0,
        })
    }

    pub fn push(&mut self, sample: f64) {
        let index = self.seen;
        self.seen += 1;
        let Some(prev) = self.prev_sample.replace(sample) else {
            return;
        };
        let diff = sample - prev;
        if diff.abs() >= self.min_step {
            let alternates = self.run > 0 && diff.signum() != self.prev_diff.signum();
            self.run = if alternates { self.run + 1 } else { 1 };
        } else {
            self.run = 0;
        }
        self.prev_diff = diff;
        if self.run >= self.window && self.fired_at.is_none() {
            self.fired_at = Some(index);
        }
    }

    /// Index of the sample at which the detector first fired.
    pub fn fired_at(&self) -> Option<usize> {
        self.fired_at
    }

    pub fn fired(&self) -> bool {
        self.fired_at.is_some()
    }
}

impl Default for InstabilityDetector {
    fn default() -> Self {
        InstabilityDetector::new(DEFAULT_INSTABILITY_WINDOW, DEFAULT_INSTABILITY_MIN_STEP)
            .expect("default detector parameters are valid")
    }
}

/// Batch form of [`InstabilityDetector`]. Fewer than `window + 1` samples never fire.
pub fn detect_instability(samples: &[f64], window: usize, min_step: f64) -> Result<bool> {
    let mut detector = InstabilityDetector::new(window, min_step)?;
    for &s in samples {
        detector.push(s);
        if detector.fired() {
            return Ok(true);
        }
    }
    Ok(false)
}
