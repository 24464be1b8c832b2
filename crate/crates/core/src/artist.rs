//! Setpoint curves ("artists") and the phase accumulator that drives them.

use crate::error::{PidsError, Result};

/// An `(x, y)` coordinate the artist passes through within one cycle.
/// `x` is the relative position in the cycle, `y` the amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Breakpoint {
    pub x: f64,
    pub y: f64,
}

impl Breakpoint {
    pub const fn new(x: f64, y: f64) -> Self {
        Breakpoint { x, y }
    }
}

/// Breakpoints used throughout the parameter studies: a three-level step
/// at thirds of the cycle.
pub const STUDY_BREAKPOINTS: [Breakpoint; 4] = [
    Breakpoint::new(0.0, 0.0),
    Breakpoint::new(0.33, 1.0),
    Breakpoint::new(0.67, -1.0),
    Breakpoint::new(1.0, 0.0),
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub errors: Vec<String>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }
}

/// Checks a candidate breakpoint list. Errors make the set unrenderable;
/// a first/last amplitude mismatch is only a warning.
pub fn validate_breakpoints(points: &[Breakpoint]) -> ValidationReport {
    let mut report = ValidationReport::default();
    if points.len() < 2 {
        report
            .errors
            .push(format!("need at least 2 breakpoints, got {}", points.len()));
        return report;
    }
    for (i, p) in points.iter().enumerate() {
        if !p.x.is_finite() || !(0.0..=1.0).contains(&p.x) {
            report
                .errors
                .push(format!("breakpoint {i}: x = {} outside [0, 1]", p.x));
        }
        if !p.y.is_finite() || !(-1.0..=1.0).contains(&p.y) {
            report
                .errors
                .push(format!("breakpoint {i}: y = {} out of range [-1, 1]", p.y));
        }
    }
    for (i, w) in points.windows(2).enumerate() {
        if !(w[1].x > w[0].x) {
            report.errors.push(format!(
                "breakpoint {}: x not strictly increasing ({} after {})",
                i + 1,
                w[1].x,
                w[0].x
            ));
        }
    }
    let first = points[0];
    let last = points[points.len() - 1];
    if first.x != 0.0 {
        report
            .errors
            .push(format!("first breakpoint must have x = 0, got {}", first.x));
    }
    if last.x != 1.0 {
        report
            .errors
            .push(format!("last breakpoint must have x = 1, got {}", last.x));
    }
    if report.errors.is_empty() && first.y != last.y {
        report.warnings.push(format!(
            "first and last y differ ({} vs {}): the artist jumps at every cycle boundary",
            first.y, last.y
        ));
    }
    report
}

/// A validated breakpoint list: x strictly increasing from 0 to 1, y in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BreakpointSet {
    points: Vec<Breakpoint>,
}

impl BreakpointSet {
    pub fn new(points: Vec<Breakpoint>) -> Result<Self> {
        let report = validate_breakpoints(&points);
        if !report.is_ok() {
            return Err(PidsError::Breakpoints(report.errors.join("; ")));
        }
        Ok(BreakpointSet { points })
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(x, y)| Breakpoint::new(x, y)).collect())
    }

    pub fn study() -> Self {
        BreakpointSet {
            points: STUDY_BREAKPOINTS.to_vec(),
        }
    }

    pub fn points(&self) -> &[Breakpoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn warnings(&self) -> Vec<String> {
        validate_breakpoints(&self.points).warnings
    }
}

/// Interpolation rule between breakpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Skeleton {
    Linear,
    Step,
    /// `amplitude` in `[0, 1]`, `phase` offset in cycles, `[0, 1)`.
    Sine { amplitude: f64, phase: f64 },
}

impl Skeleton {
    pub fn name(&self) -> &'static str {
        match self {
            Skeleton::Linear => "linear",
            Skeleton::Step => "step",
            Skeleton::Sine { .. } => "sine",
        }
    }

    pub fn uses_breakpoints(&self) -> bool {
        !matches!(self, Skeleton::Sine { .. })
    }

    pub fn validate(&self) -> Result<()> {
        if let Skeleton::Sine { amplitude, phase } = *self {
            if !(0.0..=1.0).contains(&amplitude) {
                return Err(PidsError::Domain(format!(
                    "sine amplitude must be in [0, 1], got {amplitude}"
                )));
            }
            if !(0.0..1.0).contains(&phase) {
                return Err(PidsError::Domain(format!(
                    "sine phase must be in [0, 1) cycles, got {phase}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArtistSpec {
    pub skeleton: Skeleton,
    pub breakpoints: BreakpointSet,
    pub frequency_hz: f64,
}

impl ArtistSpec {
    pub fn new(skeleton: Skeleton, breakpoints: BreakpointSet, frequency_hz: f64) -> Result<Self> {
        skeleton.validate()?;
        if !frequency_hz.is_finite() || frequency_hz <= 0.0 {
            return Err(PidsError::Domain(format!(
                "frequency must be finite and > 0, got {frequency_hz}"
            )));
        }
        Ok(ArtistSpec {
            skeleton,
            breakpoints,
            frequency_hz,
        })
    }

    /// Setpoint at `phase` cycles. Any real phase is wrapped into `[0, 1)`.
    pub fn evaluate(&self, phase: f64) -> f64 {
        evaluate_shape(&self.skeleton, self.breakpoints.points(), phase)
    }

    /// Highest frequency this artist may run at for the given (effective) rate.
    ///
    /// Breakpoint skeletons must fit every breakpoint into one cycle; a sine only
    /// needs to stay below Nyquist.
    pub fn frequency_limit(&self, effective_rate: f64) -> f64 {
        if self.skeleton.uses_breakpoints() {
            max_frequency(effective_rate, self.breakpoints.len())
        } else {
            effective_rate / 2.0
        }
    }

    pub fn check_frequency(&self, frequency_hz: f64, effective_rate: f64) -> Result<()> {
        let limit = self.frequency_limit(effective_rate);
        let over = if self.skeleton.uses_breakpoints() {
            frequency_hz > limit
        } else {
            frequency_hz >= limit
        };
        if !frequency_hz.is_finite() || frequency_hz <= 0.0 || over {
            let reason = if self.skeleton.uses_breakpoints() {
                format!(
                    "{} breakpoints at an effective rate of {} Hz",
                    self.breakpoints.len(),
                    effective_rate
                )
            } else {
                format!("Nyquist at an effective rate of {effective_rate} Hz")
            };
            return Err(PidsError::Frequency {
                frequency_hz,
                limit_hz: limit,
                reason,
            });
        }
        Ok(())
    }
}

fn wrap_phase(phase: f64) -> f64 {
    let r = phase.rem_euclid(1.0);
    // rem_euclid rounds tiny negative inputs up to exactly 1.0
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Evaluates a skeleton over raw breakpoints. `points` must satisfy the
/// [`BreakpointSet`] invariants; the engine calls this with automated copies.
pub fn evaluate_shape(skeleton: &Skeleton, points: &[Breakpoint], phase: f64) -> f64 {
    let phase = wrap_phase(phase);
    match *skeleton {
        Skeleton::Sine {
            amplitude,
            phase: offset,
        } => amplitude * (std::f64::consts::TAU * (phase + offset)).sin(),
        Skeleton::Step => {
            let k = points.partition_point(|p| p.x <= phase).saturating_sub(1);
            points[k].y
        }
        Skeleton::Linear => {
            let k = points
                .partition_point(|p| p.x <= phase)
                .saturating_sub(1)
                .min(points.len() - 2);
            let (a, b) = (points[k], points[k + 1]);
            let t = (phase - a.x) / (b.x - a.x);
            (a.y + (b.y - a.y) * t).clamp(-1.0, 1.0)
        }
    }
}

/// Cycles-domain oscillator phase. `increment` is `f / effective_rate`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseAccumulator {
    pub phase: f64,
    increment: f64,
}

impl PhaseAccumulator {
    pub fn new(frequency_hz: f64, effective_rate: f64) -> Result<Self> {
        let mut acc = PhaseAccumulator {
            phase: 0.0,
            increment: 0.0,
        };
        acc.set_frequency(frequency_hz, effective_rate)?;
        Ok(acc)
    }

    pub fn with_increment(phase: f64, increment: f64) -> Result<Self> {
        if !(increment > 0.0 && increment < 1.0) {
            return Err(PidsError::Domain(format!(
                "phase increment must be in (0, 1), got {increment}"
            )));
        }
        Ok(PhaseAccumulator {
            phase: wrap_phase(phase),
            increment,
        })
    }

    pub fn set_frequency(&mut self, frequency_hz: f64, effective_rate: f64) -> Result<()> {
        let increment = frequency_hz / effective_rate;
        if !(increment > 0.0 && increment < 1.0) {
            return Err(PidsError::Domain(format!(
                "frequency {frequency_hz} Hz gives phase increment {increment} at {effective_rate} Hz; must be in (0, 1)"
            )));
        }
        self.increment = increment;
        Ok(())
    }

    pub fn increment(&self) -> f64 {
        self.increment
    }

    /// Steps the phase forward; the flag reports a cycle wraparound.
    pub fn advance(&mut self) -> (f64, bool) {
        let mut next = self.phase + self.increment;
        let wrapped = next >= 1.0;
        if wrapped {
            next -= 1.0;
        }
        self.phase = next;
        (next, wrapped)
    }
}

/// Cycle length in samples, `sample_rate / f`. Not rounded.
pub fn wavelength(sample_rate: f64, frequency_hz: f64) -> Result<f64> {
    if !(sample_rate.is_finite() && sample_rate > 0.0) {
        return Err(PidsError::Domain(format!(
            "sample rate must be finite and > 0, got {sample_rate}"
        )));
    }
    if !(frequency_hz.is_finite() && frequency_hz > 0.0) {
        return Err(PidsError::Domain(format!(
            "frequency must be finite and > 0, got {frequency_hz}"
        )));
    }
    let nyquist = sample_rate / 2.0;
    if frequency_hz >= nyquist {
        return Err(PidsError::Frequency {
            frequency_hz,
            limit_hz: nyquist,
            reason: format!("Nyquist at {sample_rate} Hz"),
        });
    }
    Ok(sample_rate / frequency_hz)
}

/// Highest artist frequency that still places every breakpoint on its own sample.
pub fn max_frequency(sample_rate: f64, breakpoint_count: usize) -> f64 {
    sample_rate / breakpoint_count as f64
}
