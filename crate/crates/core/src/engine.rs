//! Voice and patch rendering.
//!
//! Each voice ticks its PID loop at `m * sample_rate` against its artist, with
//! automation resolved on every tick, then is anti-aliased back down to the
//! playback rate. Voices are mixed additively with normalized weights.

use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;

use crate::analysis;
use crate::artist::{evaluate_shape, ArtistSpec, Breakpoint, PhaseAccumulator, Skeleton};
use crate::error::{PidsError, Result};
use crate::pid::{InstabilityDetector, PidConfig, PidGains, PidState};
use crate::resample::{decimate, design_lowpass, filter_decimate, FirKernel, FirSpec, OversampleFactor};

/// Voices below this fundamental are LFOs and skip anti-aliasing by default.
pub const LFO_THRESHOLD_HZ: f64 = 20.0;

/// Smallest gap kept between an automated breakpoint x and its neighbours.
const BREAKPOINT_X_GAP: f64 = 1e-9;

pub fn detune_hz(frequency_hz: f64, cents: f64) -> f64 {
    frequency_hz * (cents / 1200.0).exp2()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Voice {
    pub artist: ArtistSpec,
    pub pid: PidConfig,
    pub oversample: OversampleFactor,
    pub mix_weight: f64,
    pub detune_cents: f64,
    /// Force anti-aliasing even when the voice runs below [`LFO_THRESHOLD_HZ`].
    pub lfo_antialias: bool,
}

impl Voice {
    pub fn new(artist: ArtistSpec, pid: PidConfig, oversample: OversampleFactor) -> Self {
        Voice {
            artist,
            pid,
            oversample,
            mix_weight: 1.0,
            detune_cents: 0.0,
            lfo_antialias: false,
        }
    }

    /// Artist frequency after detune.
    pub fn frequency_hz(&self) -> f64 {
        detune_hz(self.artist.frequency_hz, self.detune_cents)
    }

    pub fn is_lfo(&self) -> bool {
        self.frequency_hz() < LFO_THRESHOLD_HZ
    }

    /// Checks the detuned frequency against the breakpoint limit at the effective rate.
    pub fn check_frequency(&self, sample_rate: f64) -> Result<()> {
        let rate = sample_rate * self.oversample.get() as f64;
        self.artist.check_frequency(self.frequency_hz(), rate)
    }

    fn static_value(&self, target: AutomationTarget) -> f64 {
        let g = self.pid.gains;
        let points = self.artist.breakpoints.points();
        match target {
            AutomationTarget::Kp => g.kp,
            AutomationTarget::Ki => g.ki,
            AutomationTarget::Kd => g.kd,
            AutomationTarget::Frequency => self.artist.frequency_hz,
            AutomationTarget::BreakpointX(k) => points[k].x,
            AutomationTarget::BreakpointY(k) => points[k].y,
            AutomationTarget::SineAmplitude => match self.artist.skeleton {
                Skeleton::Sine { amplitude, .. } => amplitude,
                _ => 0.0,
            },
            AutomationTarget::SinePhase => match self.artist.skeleton {
                Skeleton::Sine { phase, .. } => phase,
                _ => 0.0,
            },
        }
    }
}

/// A voice parameter that can be driven over time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AutomationTarget {
    Kp,
    Ki,
    Kd,
    Frequency,
    BreakpointX(usize),
    BreakpointY(usize),
    SineAmplitude,
    SinePhase,
}

impl fmt::Display for AutomationTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AutomationTarget::Kp => f.write_str("kp"),
            AutomationTarget::Ki => f.write_str("ki"),
            AutomationTarget::Kd => f.write_str("kd"),
            AutomationTarget::Frequency => f.write_str("frequency_hz"),
            AutomationTarget::BreakpointX(k) => write!(f, "breakpoint[{k}].x"),
            AutomationTarget::BreakpointY(k) => write!(f, "breakpoint[{k}].y"),
            AutomationTarget::SineAmplitude => f.write_str("sine.amplitude"),
            AutomationTarget::SinePhase => f.write_str("sine.phase"),
        }
    }
}

impl FromStr for AutomationTarget {
    type Err = PidsError;

    fn from_str(s: &str) -> Result<Self> {
        let unknown = || PidsError::config("target", format!("unknown automation target '{s}'"));
        Ok(match s {
            "kp" => AutomationTarget::Kp,
            "ki" => AutomationTarget::Ki,
            "kd" => AutomationTarget::Kd,
            "frequency_hz" => AutomationTarget::Frequency,
            "sine.amplitude" => AutomationTarget::SineAmplitude,
            "sine.phase" => AutomationTarget::SinePhase,
            _ => {
                let rest = s.strip_prefix("breakpoint[").ok_or_else(unknown)?;
                let (index, field) = rest.split_once("].").ok_or_else(unknown)?;
                let k: usize = index.parse().map_err(|_| unknown())?;
                match field {
                    "x" => AutomationTarget::BreakpointX(k),
                    "y" => AutomationTarget::BreakpointY(k),
                    _ => return Err(unknown()),
                }
            }
        })
    }
}

/// Time-anchored breakpoint list `(seconds, value)`, linearly interpolated and
/// held constant outside its span.
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    anchors: Vec<(f64, f64)>,
}

impl Envelope {
    pub fn new(anchors: Vec<(f64, f64)>) -> Result<Self> {
        if anchors.is_empty() {
            return Err(PidsError::config("envelope", "needs at least one anchor"));
        }
        for (i, &(t, v)) in anchors.iter().enumerate() {
            if !t.is_finite() || !v.is_finite() || t < 0.0 {
                return Err(PidsError::config(
                    format!("envelope[{i}]"),
                    format!("anchor ({t}, {v}) must be finite with t >= 0"),
                ));
            }
        }
        if let Some(i) = anchors.windows(2).position(|w| w[1].0 < w[0].0) {
            return Err(PidsError::config(
                format!("envelope[{}]", i + 1),
                "anchor times must be non-decreasing",
            ));
        }
        Ok(Envelope { anchors })
    }

    pub fn anchors(&self) -> &[(f64, f64)] {
        &self.anchors
    }

    pub fn value_at(&self, t: f64) -> f64 {
        let a = &self.anchors;
        let k = a.partition_point(|&(ta, _)| ta <= t);
        if k == 0 {
            return a[0].1;
        }
        if k == a.len() {
            return a[a.len() - 1].1;
        }
        let (t0, v0) = a[k - 1];
        let (t1, v1) = a[k];
        v0 + (v1 - v0) * ((t - t0) / (t1 - t0))
    }
}

/// Routes another voice's rendered output into a parameter:
/// `value = base + depth * lfo(t)` where `base` is `offset` or the parameter's static value.
#[derive(Debug, Clone, PartialEq)]
pub struct LfoRoute {
    pub source: usize,
    pub depth: f64,
    pub offset: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModSource {
    Envelope(Envelope),
    Lfo(LfoRoute),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Automation {
    pub voice: usize,
    pub target: AutomationTarget,
    pub source: ModSource,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Patch {
    pub sample_rate: f64,
    pub duration_s: f64,
    pub voices: Vec<Voice>,
    pub automations: Vec<Automation>,
    pub master_gain: f64,
}

pub const DEFAULT_SAMPLE_RATE: f64 = 44100.0;

impl Patch {
    pub fn new(sample_rate: f64, duration_s: f64, voices: Vec<Voice>) -> Self {
        Patch {
            sample_rate,
            duration_s,
            voices,
            automations: Vec::new(),
            master_gain: 1.0,
        }
    }

    /// Number of samples a render produces at the playback rate.
    pub fn output_len(&self) -> usize {
        (self.duration_s * self.sample_rate).round() as usize
    }

    /// Full semantic validation. Returns warnings on success; errors carry the
    /// field path that failed.
    pub fn validate(&self) -> Result<Vec<String>> {
        let mut warnings = Vec::new();
        if !(self.sample_rate.is_finite() && self.sample_rate > 0.0) {
            return Err(PidsError::config("sample_rate", format!("must be > 0, got {}", self.sample_rate)));
        }
        if !(self.duration_s.is_finite() && self.duration_s > 0.0) {
            return Err(PidsError::config("duration_s", format!("must be > 0, got {}", self.duration_s)));
        }
        if !self.master_gain.is_finite() {
            return Err(PidsError::config("master_gain", "must be finite"));
        }
        if self.voices.is_empty() {
            return Err(PidsError::config("voices", "at least one voice is required"));
        }
        for (i, v) in self.voices.iter().enumerate() {
            let path = format!("voices[{i}]");
            if !(v.mix_weight.is_finite() && v.mix_weight >= 0.0) {
                return Err(PidsError::config(format!("{path}.mix"), format!("must be finite and >= 0, got {}", v.mix_weight)));
            }
            if !v.detune_cents.is_finite() {
                return Err(PidsError::config(format!("{path}.detune_cents"), "must be finite"));
            }
            v.pid
                .gains
                .validate()
                .map_err(|e| PidsError::config(format!("{path}.gains"), e.to_string()))?;
            v.check_frequency(self.sample_rate).map_err(|e| {
                PidsError::config(format!("{path}.artist.frequency_hz"), e.to_string())
            })?;
            if v.pid.gains.is_silent() {
                warnings.push(format!("{path}: all gains are zero, the voice is silent"));
            }
            if v.artist.skeleton.uses_breakpoints() {
                for w in v.artist.breakpoints.warnings() {
                    warnings.push(format!("{path}.artist.breakpoints: {w}"));
                }
            }
        }
        if self.voices.iter().all(|v| v.mix_weight == 0.0) {
            return Err(PidsError::config("voices", "mix weights are all zero"));
        }

        let mut seen = std::collections::HashSet::new();
        for (i, a) in self.automations.iter().enumerate() {
            let path = format!("automations[{i}]");
            let voice = self.voices.get(a.voice).ok_or_else(|| {
                PidsError::config(format!("{path}.voice"), format!("no voice with index {}", a.voice))
            })?;
            check_target(voice, a.target).map_err(|m| PidsError::config(format!("{path}.target"), m))?;
            if !seen.insert((a.voice, a.target)) {
                return Err(PidsError::config(
                    format!("{path}.target"),
                    format!("voice {} already has an automation for {}", a.voice, a.target),
                ));
            }
            match &a.source {
                ModSource::Envelope(env) => {
                    let first = env.anchors()[0].0;
                    let last = env.anchors()[env.anchors().len() - 1].0;
                    if first > 0.0 || last < self.duration_s {
                        warnings.push(format!(
                            "{path}.envelope: spans [{first}, {last}] s, held constant outside it"
                        ));
                    }
                    if env.anchors().iter().any(|&(_, v)| {
                        let c = clamp_to_range(v, legal_range(voice, a.target, self.sample_rate), a.target);
                        c != v
                    }) {
                        warnings.push(format!(
                            "{path}.envelope: values leave the legal range of {} and will be clamped",
                            a.target
                        ));
                    }
                }
                ModSource::Lfo(route) => {
                    let lpath = format!("{path}.lfo");
                    let src = self.voices.get(route.source).ok_or_else(|| {
                        PidsError::config(format!("{lpath}.source"), format!("no voice with index {}", route.source))
                    })?;
                    if route.source == a.voice {
                        return Err(PidsError::config(format!("{lpath}.source"), "a voice cannot modulate itself"));
                    }
                    if !src.is_lfo() {
                        return Err(PidsError::config(
                            format!("{lpath}.source"),
                            format!(
                                "source voice runs at {} Hz; LFO sources must be below {LFO_THRESHOLD_HZ} Hz",
                                src.frequency_hz()
                            ),
                        ));
                    }
                    if self.automations.iter().any(|o| o.voice == route.source && matches!(o.source, ModSource::Lfo(_))) {
                        return Err(PidsError::config(
                            format!("{lpath}.source"),
                            "an LFO source voice cannot itself be LFO-modulated",
                        ));
                    }
                    if !route.depth.is_finite() || route.offset.is_some_and(|o| !o.is_finite()) {
                        return Err(PidsError::config(lpath, "depth and offset must be finite"));
                    }
                }
            }
        }
        Ok(warnings)
    }

    /// Instantaneous value of `target` on voice `voice` at `t` seconds, clamped
    /// to the target's legal range.
    pub fn resolve_automation(&self, voice: usize, target: &str, t: f64) -> Result<f64> {
        let target: AutomationTarget = target.parse()?;
        let v = self
            .voices
            .get(voice)
            .ok_or_else(|| PidsError::config("voice", format!("no voice with index {voice}")))?;
        check_target(v, target).map_err(|m| PidsError::config("target", m))?;
        let range = legal_range(v, target, self.sample_rate);
        let Some(a) = self.automations.iter().find(|a| a.voice == voice && a.target == target) else {
            return Ok(v.static_value(target));
        };
        let raw = match &a.source {
            ModSource::Envelope(env) => env.value_at(t),
            ModSource::Lfo(route) => {
                let src = &self.voices[route.source];
                let own: Vec<&Automation> = self.automations.iter().filter(|o| o.voice == route.source).collect();
                let mods = envelope_modulators(&own);
                let lfo = render_voice(src, self.duration_s, self.sample_rate, &mods)?;
                let base = route.offset.unwrap_or_else(|| v.static_value(target));
                base + route.depth * sample_at(&lfo.samples, t * self.sample_rate)
            }
        };
        Ok(clamp_to_range(raw, range, target))
    }
}

fn check_target(voice: &Voice, target: AutomationTarget) -> std::result::Result<(), String> {
    let n = voice.artist.breakpoints.len();
    let uses_bp = voice.artist.skeleton.uses_breakpoints();
    match target {
        AutomationTarget::BreakpointX(k) | AutomationTarget::BreakpointY(k) if !uses_bp => {
            Err(format!("breakpoint[{k}] cannot be automated on a sine artist"))
        }
        AutomationTarget::BreakpointX(k) | AutomationTarget::BreakpointY(k) if k >= n => {
            Err(format!("breakpoint index {k} out of range (artist has {n})"))
        }
        AutomationTarget::BreakpointX(k) if k == 0 || k == n - 1 => {
            Err(format!("breakpoint[{k}].x is fixed at the cycle boundary"))
        }
        AutomationTarget::SineAmplitude | AutomationTarget::SinePhase if uses_bp => {
            Err(format!("{target} requires a sine artist"))
        }
        _ => Ok(()),
    }
}

/// Legal `[lo, hi]` for a target. Breakpoint x ranges are resolved per tick
/// against the neighbours, so this returns the outer bounds only.
fn legal_range(voice: &Voice, target: AutomationTarget, sample_rate: f64) -> (f64, f64) {
    match target {
        AutomationTarget::Kp | AutomationTarget::Ki | AutomationTarget::Kd => (0.0, f64::MAX),
        AutomationTarget::Frequency => {
            let rate = sample_rate * voice.oversample.get() as f64;
            let mut limit = voice.artist.frequency_limit(rate);
            if !voice.artist.skeleton.uses_breakpoints() {
                // strictly below Nyquist
                limit *= 1.0 - 1e-9;
            }
            let detune = detune_hz(1.0, voice.detune_cents);
            (1e-6, limit / detune)
        }
        AutomationTarget::BreakpointX(_) => (0.0, 1.0),
        AutomationTarget::BreakpointY(_) => (-1.0, 1.0),
        AutomationTarget::SineAmplitude => (0.0, 1.0),
        AutomationTarget::SinePhase => (0.0, 1.0),
    }
}

fn clamp_to_range(value: f64, (lo, hi): (f64, f64), target: AutomationTarget) -> f64 {
    if target == AutomationTarget::SinePhase {
        let r = value.rem_euclid(1.0);
        return if r >= 1.0 { 0.0 } else { r };
    }
    value.clamp(lo, hi)
}

/// Linear interpolation into `signal` at fractional index `pos`, held at the ends.
fn sample_at(signal: &[f64], pos: f64) -> f64 {
    if signal.is_empty() {
        return 0.0;
    }
    let last = signal.len() - 1;
    if pos <= 0.0 {
        return signal[0];
    }
    let i = pos.floor() as usize;
    if i >= last {
        return signal[last];
    }
    let frac = pos - i as f64;
    signal[i] + (signal[i + 1] - signal[i]) * frac
}

/// A resolved modulation input for [`render_voice`].
#[derive(Debug, Clone)]
pub enum Modulator<'a> {
    Envelope(&'a Envelope),
    /// Already-rendered control signal at `rate`; `base` of `None` uses the
    /// parameter's static value.
    Signal {
        samples: &'a [f64],
        rate: f64,
        depth: f64,
        base: Option<f64>,
    },
}

#[derive(Debug, Clone)]
pub struct VoiceModulation<'a> {
    pub target: AutomationTarget,
    pub modulator: Modulator<'a>,
}

fn envelope_modulators<'a>(automations: &[&'a Automation]) -> Vec<VoiceModulation<'a>> {
    automations
        .iter()
        .filter_map(|a| match &a.source {
            ModSource::Envelope(env) => Some(VoiceModulation {
                target: a.target,
                modulator: Modulator::Envelope(env),
            }),
            ModSource::Lfo(_) => None,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VoiceDiagnostics {
    /// Detuned artist frequency.
    pub frequency_hz: f64,
    pub unstable: bool,
    /// Tick (at the oversampled rate) on which the instability detector fired.
    pub unstable_at_tick: Option<usize>,
    /// Ticks on which at least one automated value had to be clamped.
    pub automation_clamps: usize,
    pub antialiased: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VoiceRender {
    pub samples: Vec<f64>,
    pub diagnostics: VoiceDiagnostics,
}

/// Kernel for anti-aliasing from `m * sample_rate` to `sample_rate`.
///
/// Designs are cached per process, keyed by rate and factor.
pub fn antialias_kernel(sample_rate: f64, m: OversampleFactor) -> Result<FirKernel> {
    static CACHE: Mutex<Vec<((u64, u32), FirKernel)>> = Mutex::new(Vec::new());
    let key = (sample_rate.to_bits(), m.get());
    if let Some((_, k)) = CACHE.lock().unwrap_or_else(|e| e.into_inner()).iter().find(|(k, _)| *k == key) {
        return Ok(k.clone());
    }
    let kernel = design_lowpass(&FirSpec::for_playback(sample_rate), sample_rate * m.get() as f64)?;
    CACHE
        .lock()
        .unwrap_or_else(|e| e.into_inner())
        .push((key, kernel.clone()));
    Ok(kernel)
}

/// Renders one voice to the playback rate.
pub fn render_voice(
    voice: &Voice,
    duration_s: f64,
    sample_rate: f64,
    modulations: &[VoiceModulation<'_>],
) -> Result<VoiceRender> {
    let m = voice.oversample;
    let antialias = !m.is_bypass() && (!voice.is_lfo() || voice.lfo_antialias);
    let kernel = if antialias {
        Some(antialias_kernel(sample_rate, m)?)
    } else {
        None
    };
    render_voice_with_kernel(voice, duration_s, sample_rate, modulations, kernel.as_ref())
}

fn render_voice_with_kernel(
    voice: &Voice,
    duration_s: f64,
    sample_rate: f64,
    modulations: &[VoiceModulation<'_>],
    kernel: Option<&FirKernel>,
) -> Result<VoiceRender> {
    voice.check_frequency(sample_rate)?;
    for vm in modulations {
        check_target(voice, vm.target).map_err(|msg| PidsError::config("target", msg))?;
    }
    let m = voice.oversample;
    let rate = sample_rate * m.get() as f64;
    let out_len = (duration_s * sample_rate).round() as usize;
    let ticks = out_len * m.as_usize();
    let detune = detune_hz(1.0, voice.detune_cents);

    let mut config = voice.pid;
    let mut skeleton = voice.artist.skeleton;
    let mut points: Vec<Breakpoint> = voice.artist.breakpoints.points().to_vec();
    let mut phase = PhaseAccumulator::new(voice.frequency_hz(), rate)?;
    let mut state = PidState::new();
    let mut detector = InstabilityDetector::default();
    let mut clamps = 0usize;

    let ranges: Vec<(f64, f64)> = modulations
        .iter()
        .map(|vm| legal_range(voice, vm.target, sample_rate))
        .collect();
    let bases: Vec<f64> = modulations.iter().map(|vm| voice.static_value(vm.target)).collect();

    let mut raw = Vec::with_capacity(ticks);
    for i in 0..ticks {
        if !modulations.is_empty() {
            let t = i as f64 / rate;
            let mut clamped = false;
            for ((vm, &range), &base) in modulations.iter().zip(&ranges).zip(&bases) {
                let value = match &vm.modulator {
                    Modulator::Envelope(env) => env.value_at(t),
                    Modulator::Signal { samples, rate: src_rate, depth, base: b } => {
                        b.unwrap_or(base) + depth * sample_at(samples, t * src_rate)
                    }
                };
                let mut v = clamp_to_range(value, range, vm.target);
                if let AutomationTarget::BreakpointX(k) = vm.target {
                    v = v.clamp(points[k - 1].x + BREAKPOINT_X_GAP, points[k + 1].x - BREAKPOINT_X_GAP);
                }
                clamped |= v != value;
                apply(vm.target, v, &mut config, &mut skeleton, &mut points, &mut phase, detune, rate);
            }
            clamps += clamped as usize;
        }
        let setpoint = evaluate_shape(&skeleton, &points, phase.phase);
        let y = state.tick_unchecked(&config, setpoint);
        detector.push(y);
        raw.push(y);
        phase.advance();
    }

    let samples = match kernel {
        Some(k) if !m.is_bypass() => filter_decimate(&raw, k, m),
        _ => decimate(&raw, m),
    };
    Ok(VoiceRender {
        samples,
        diagnostics: VoiceDiagnostics {
            frequency_hz: voice.frequency_hz(),
            unstable: detector.fired(),
            unstable_at_tick: detector.fired_at(),
            automation_clamps: clamps,
            antialiased: kernel.is_some() && !m.is_bypass(),
        },
    })
}

#[allow(clippy::too_many_arguments)]
#[inline]
fn apply(
    target: AutomationTarget,
    value: f64,
    config: &mut PidConfig,
    skeleton: &mut Skeleton,
    points: &mut [Breakpoint],
    phase: &mut PhaseAccumulator,
    detune: f64,
    rate: f64,
) {
    match target {
        AutomationTarget::Kp => config.gains.kp = value,
        AutomationTarget::Ki => config.gains.ki = value,
        AutomationTarget::Kd => config.gains.kd = value,
        AutomationTarget::Frequency => {
            // range clamping keeps the increment inside (0, 1)
            let _ = phase.set_frequency(value * detune, rate);
        }
        AutomationTarget::BreakpointX(k) => points[k].x = value,
        AutomationTarget::BreakpointY(k) => points[k].y = value,
        AutomationTarget::SineAmplitude => {
            if let Skeleton::Sine { amplitude, .. } = skeleton {
                *amplitude = value;
            }
        }
        AutomationTarget::SinePhase => {
            if let Skeleton::Sine { phase, .. } = skeleton {
                *phase = value;
            }
        }
    }
}

/// Weighted per-sample sum with weights normalized to sum to one. No clamping.
pub fn weighted_sum(signals: &[Vec<f64>], weights: &[f64]) -> Result<Vec<f64>> {
    if signals.len() != weights.len() {
        return Err(PidsError::LengthMismatch {
            expected: signals.len(),
            actual: weights.len(),
        });
    }
    let Some(first) = signals.first() else {
        return Ok(Vec::new());
    };
    let len = first.len();
    if let Some(bad) = signals.iter().find(|s| s.len() != len) {
        return Err(PidsError::LengthMismatch {
            expected: len,
            actual: bad.len(),
        });
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(PidsError::Domain("mix weights must be finite and >= 0".into()));
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(PidsError::Domain("mix weights sum to zero".into()));
    }
    let mut out = vec![0.0; len];
    for (s, w) in signals.iter().zip(weights) {
        let w = w / total;
        for (o, x) in out.iter_mut().zip(s) {
            *o += w * x;
        }
    }
    Ok(out)
}

/// Clamps into `[-1, 1]`, returning the number of samples that were clamped.
pub fn clamp_output(samples: &mut [f64]) -> usize {
    let mut clipped = 0;
    for s in samples.iter_mut() {
        let c = s.clamp(-1.0, 1.0);
        clipped += (c != *s) as usize;
        *s = c;
    }
    clipped
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixOutput {
    pub samples: Vec<f64>,
    pub clip_count: usize,
}

/// Normalized weighted mix clamped to `[-1, 1]`.
pub fn mix(signals: &[Vec<f64>], weights: &[f64]) -> Result<MixOutput> {
    let mut samples = weighted_sum(signals, weights)?;
    let clip_count = clamp_output(&mut samples);
    Ok(MixOutput { samples, clip_count })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderResult {
    pub sample_rate: f64,
    /// Final output, clamped to `[-1, 1]`.
    pub samples: Vec<f64>,
    /// Mix times master gain, before the output clamp.
    pub unclamped: Vec<f64>,
    /// Arithmetic mean of `samples`.
    pub dc_offset: f64,
    pub clip_count: usize,
    pub unstable: bool,
    pub voices: Vec<VoiceDiagnostics>,
    pub warnings: Vec<String>,
}

/// Renders every voice of a validated patch (LFO sources first) at the playback rate.
pub fn render_voices(patch: &Patch) -> Result<Vec<VoiceRender>> {
    let kernel_for = |voice: &Voice| -> Result<Option<FirKernel>> {
        let m = voice.oversample;
        if m.is_bypass() || (voice.is_lfo() && !voice.lfo_antialias) {
            return Ok(None);
        }
        antialias_kernel(patch.sample_rate, m).map(Some)
    };

    let has_lfo_route = |i: usize| {
        patch
            .automations
            .iter()
            .any(|a| a.voice == i && matches!(a.source, ModSource::Lfo(_)))
    };
    let mut renders: Vec<Option<VoiceRender>> = vec![None; patch.voices.len()];

    // sources cannot be LFO-modulated, so two passes cover every dependency
    for pass in 0..2 {
        for (i, voice) in patch.voices.iter().enumerate() {
            if has_lfo_route(i) != (pass == 1) {
                continue;
            }
            let own: Vec<&Automation> = patch.automations.iter().filter(|a| a.voice == i).collect();
            let mut mods = Vec::with_capacity(own.len());
            for a in &own {
                let modulator = match &a.source {
                    ModSource::Envelope(env) => Modulator::Envelope(env),
                    ModSource::Lfo(route) => {
                        let src = renders[route.source].as_ref().ok_or_else(|| {
                            PidsError::config("automations", format!("LFO source voice {} not rendered", route.source))
                        })?;
                        Modulator::Signal {
                            samples: &src.samples,
                            rate: patch.sample_rate,
                            depth: route.depth,
                            base: route.offset,
                        }
                    }
                };
                mods.push(VoiceModulation {
                    target: a.target,
                    modulator,
                });
            }
            let kernel = kernel_for(voice)?;
            let render = render_voice_with_kernel(voice, patch.duration_s, patch.sample_rate, &mods, kernel.as_ref())
                .map_err(|e| match e {
                    PidsError::Frequency { .. } => PidsError::config(format!("voices[{i}].artist.frequency_hz"), e.to_string()),
                    other => other,
                })?;
            renders[i] = Some(render);
        }
    }
    Ok(renders.into_iter().map(|r| r.expect("every voice rendered")).collect())
}

/// Renders, mixes and measures a patch.
pub fn render_patch(patch: &Patch) -> Result<RenderResult> {
    let mut warnings = patch.validate()?;
    let renders = render_voices(patch)?;
    let weights: Vec<f64> = patch.voices.iter().map(|v| v.mix_weight).collect();
    let signals: Vec<Vec<f64>> = renders.iter().map(|r| r.samples.clone()).collect();
    let mut unclamped = weighted_sum(&signals, &weights)?;
    if patch.master_gain != 1.0 {
        unclamped.iter_mut().for_each(|s| *s *= patch.master_gain);
    }
    let mut samples = unclamped.clone();
    let clip_count = clamp_output(&mut samples);

    let voices: Vec<VoiceDiagnostics> = renders.into_iter().map(|r| r.diagnostics).collect();
    for (i, d) in voices.iter().enumerate() {
        if d.automation_clamps > 0 {
            warnings.push(format!(
                "voice {i}: automated values clamped to their legal range on {} ticks",
                d.automation_clamps
            ));
        }
        if let Some(tick) = d.unstable_at_tick {
            warnings.push(format!("voice {i}: unstable (two-value oscillation from tick {tick})"));
        }
    }
    Ok(RenderResult {
        sample_rate: patch.sample_rate,
        dc_offset: analysis::dc_offset(&samples),
        unstable: voices.iter().any(|d| d.unstable),
        samples,
        unclamped,
        clip_count,
        voices,
        warnings,
    })
}

/// Convenience: a single-voice patch with the given artist and gains.
pub fn single_voice_patch(
    artist: ArtistSpec,
    gains: PidGains,
    oversample: OversampleFactor,
    sample_rate: f64,
    duration_s: f64,
) -> Result<Patch> {
    let voice = Voice::new(artist, PidConfig::with_gains(gains)?, oversample);
    Ok(Patch::new(sample_rate, duration_s, vec![voice]))
}
