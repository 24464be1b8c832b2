//! JSON patch documents.
//!
//! ```json
//! {
//!   "sample_rate": 44100,
//!   "duration_s": 1.0,
//!   "oversample": 4,
//!   "voices": [{
//!     "artist": {
//!       "skeleton": "step",
//!       "frequency_hz": 440.0,
//!       "breakpoints": [[0,0],[0.33,1],[0.67,-1],[1,0]]
//!     },
//!     "gains": {"kp": 0.6, "ki": 0.3, "kd": 0.0},
//!     "integral_limit": 5000.0,
//!     "mix": 1.0,
//!     "detune_cents": 0.0,
//!     "lfo_antialias": false
//!   }],
//!   "automations": [{"voice": 0, "target": "ki", "envelope": [[0.0, 0.0], [1.0, 0.6]]}],
//!   "master_gain": 1.0
//! }
//! ```
//!
//! Defaults: `sample_rate` 44100, `oversample` 4, `integral_limit` 5000, `mix` 1,
//! `detune_cents` 0, `lfo_antialias` false, `automations` empty, `master_gain` 1,
//! missing gains 0. A sine artist takes `"sine": {"amplitude", "phase"}` and may
//! omit `breakpoints`. An automation carries exactly one of `envelope` or
//! `lfo: {"source", "depth", "offset"?}`.

use serde::{Deserialize, Serialize};

use crate::artist::{ArtistSpec, BreakpointSet, Skeleton};
use crate::engine::{Automation, AutomationTarget, Envelope, LfoRoute, ModSource, Patch, Voice};
use crate::error::{PidsError, Result};
use crate::pid::{PidConfig, PidGains, DEFAULT_INTEGRAL_LIMIT};
use crate::resample::OversampleFactor;

fn default_sample_rate() -> f64 {
    44100.0
}
fn default_oversample() -> u32 {
    4
}
fn default_integral_limit() -> f64 {
    DEFAULT_INTEGRAL_LIMIT
}
fn one() -> f64 {
    1.0
}
fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PatchDoc {
    #[serde(default = "default_sample_rate")]
    sample_rate: f64,
    duration_s: f64,
    #[serde(default = "default_oversample")]
    oversample: u32,
    voices: Vec<VoiceDoc>,
    #[serde(default)]
    automations: Vec<AutomationDoc>,
    #[serde(default = "one")]
    master_gain: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VoiceDoc {
    artist: ArtistDoc,
    gains: GainsDoc,
    #[serde(default = "default_integral_limit")]
    integral_limit: f64,
    #[serde(default = "one")]
    mix: f64,
    #[serde(default)]
    detune_cents: f64,
    #[serde(default, skip_serializing_if = "is_false")]
    lfo_antialias: bool,
    /// Per-voice override of the patch-level factor.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    oversample: Option<u32>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum SkeletonName {
    Linear,
    Step,
    Sine,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArtistDoc {
    skeleton: SkeletonName,
    frequency_hz: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    breakpoints: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sine: Option<SineDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SineDoc {
    #[serde(default = "one")]
    amplitude: f64,
    #[serde(default)]
    phase: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GainsDoc {
    #[serde(default)]
    kp: f64,
    #[serde(default)]
    ki: f64,
    #[serde(default)]
    kd: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AutomationDoc {
    voice: usize,
    target: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    envelope: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lfo: Option<LfoDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LfoDoc {
    source: usize,
    depth: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    offset: Option<f64>,
}

/// Breakpoints given to sine artists that omit them; never evaluated.
const SINE_PLACEHOLDER: [(f64, f64); 2] = [(0.0, 0.0), (1.0, 0.0)];

fn err(code: &'static str, path: impl Into<String>, message: impl Into<String>) -> PidsError {
    PidsError::Patch {
        code,
        path: path.into(),
        message: message.into(),
    }
}

/// Parses and fully validates a patch document.
pub fn parse_patch(text: &str) -> Result<Patch> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: PatchDoc = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let code = if inner.is_data() { "schema" } else { "syntax" };
        err(code, path, inner.to_string())
    })?;
    let patch = build_patch(doc)?;
    patch.validate().map_err(|e| match e {
        PidsError::Config { path, message } => {
            let code = if path.ends_with("frequency_hz") {
                "frequency"
            } else if path.starts_with("automations") {
                "automation"
            } else {
                "range"
            };
            err(code, path, message)
        }
        other => other,
    })?;
    Ok(patch)
}

/// Parses a patch and returns it with its validation warnings.
pub fn parse_patch_with_warnings(text: &str) -> Result<(Patch, Vec<String>)> {
    let patch = parse_patch(text)?;
    let warnings = patch.validate()?;
    Ok((patch, warnings))
}

fn build_patch(doc: PatchDoc) -> Result<Patch> {
    let top_m = OversampleFactor::new(doc.oversample)
        .map_err(|e| err("range", "oversample", e.to_string()))?;
    let mut voices = Vec::with_capacity(doc.voices.len());
    for (i, v) in doc.voices.into_iter().enumerate() {
        voices.push(build_voice(v, top_m, &format!("voices[{i}]"))?);
    }
    let mut automations = Vec::with_capacity(doc.automations.len());
    for (i, a) in doc.automations.into_iter().enumerate() {
        let path = format!("automations[{i}]");
        let target: AutomationTarget = a
            .target
            .parse()
            .map_err(|_| err("automation", format!("{path}.target"), format!("unknown automation target '{}'", a.target)))?;
        let source = match (a.envelope, a.lfo) {
            (Some(anchors), None) => {
                let env = Envelope::new(anchors.into_iter().map(|[t, v]| (t, v)).collect()).map_err(|e| match e {
                    PidsError::Config { path: p, message } => err("automation", format!("{path}.{p}"), message),
                    other => err("automation", format!("{path}.envelope"), other.to_string()),
                })?;
                ModSource::Envelope(env)
            }
            (None, Some(lfo)) => ModSource::Lfo(LfoRoute {
                source: lfo.source,
                depth: lfo.depth,
                offset: lfo.offset,
            }),
            _ => {
                return Err(err(
                    "automation",
                    path,
                    "exactly one of 'envelope' or 'lfo' is required",
                ))
            }
        };
        automations.push(Automation {
            voice: a.voice,
            target,
            source,
        });
    }
    Ok(Patch {
        sample_rate: doc.sample_rate,
        duration_s: doc.duration_s,
        voices,
        automations,
        master_gain: doc.master_gain,
    })
}

fn build_voice(v: VoiceDoc, top_m: OversampleFactor, path: &str) -> Result<Voice> {
    let oversample = match v.oversample {
        Some(m) => OversampleFactor::new(m).map_err(|e| err("range", format!("{path}.oversample"), e.to_string()))?,
        None => top_m,
    };
    let a = v.artist;
    let apath = format!("{path}.artist");
    let skeleton = match a.skeleton {
        SkeletonName::Linear => Skeleton::Linear,
        SkeletonName::Step => Skeleton::Step,
        SkeletonName::Sine => {
            let s = a.sine.as_ref().ok_or_else(|| err("schema", format!("{apath}.sine"), "sine artists need a 'sine' object"))?;
            Skeleton::Sine {
                amplitude: s.amplitude,
                phase: s.phase,
            }
        }
    };
    if a.skeleton != SkeletonName::Sine && a.sine.is_some() {
        return Err(err("schema", format!("{apath}.sine"), "only sine artists take a 'sine' object"));
    }
    skeleton
        .validate()
        .map_err(|e| err("range", format!("{apath}.sine"), e.to_string()))?;
    let breakpoints = match (&a.breakpoints, a.skeleton) {
        (Some(points), _) => BreakpointSet::from_pairs(&points.iter().map(|&[x, y]| (x, y)).collect::<Vec<_>>())
            .map_err(|e| err("breakpoints", format!("{apath}.breakpoints"), e.to_string()))?,
        (None, SkeletonName::Sine) => BreakpointSet::from_pairs(&SINE_PLACEHOLDER).expect("placeholder is valid"),
        (None, _) => return Err(err("schema", format!("{apath}.breakpoints"), "linear and step artists need breakpoints")),
    };
    let artist = ArtistSpec::new(skeleton, breakpoints, a.frequency_hz)
        .map_err(|e| err("range", format!("{apath}.frequency_hz"), e.to_string()))?;
    let gains = PidGains::new(v.gains.kp, v.gains.ki, v.gains.kd);
    gains
        .validate()
        .map_err(|e| err("range", format!("{path}.gains"), e.to_string()))?;
    let pid = PidConfig::new(gains, v.integral_limit)
        .map_err(|e| err("range", format!("{path}.integral_limit"), e.to_string()))?;
    Ok(Voice {
        artist,
        pid,
        oversample,
        mix_weight: v.mix,
        detune_cents: v.detune_cents,
        lfo_antialias: v.lfo_antialias,
    })
}

/// Canonical JSON for a patch; [`parse_patch`] inverts it exactly.
pub fn serialize_patch(patch: &Patch) -> String {
    let top_m = patch
        .voices
        .first()
        .map(|v| v.oversample)
        .unwrap_or_default();
    let doc = PatchDoc {
        sample_rate: patch.sample_rate,
        duration_s: patch.duration_s,
        oversample: top_m.get(),
        voices: patch
            .voices
            .iter()
            .map(|v| {
                let (skeleton, sine) = match v.artist.skeleton {
                    Skeleton::Linear => (SkeletonName::Linear, None),
                    Skeleton::Step => (SkeletonName::Step, None),
                    Skeleton::Sine { amplitude, phase } => (SkeletonName::Sine, Some(SineDoc { amplitude, phase })),
                };
                VoiceDoc {
                    artist: ArtistDoc {
                        skeleton,
                        frequency_hz: v.artist.frequency_hz,
                        breakpoints: Some(v.artist.breakpoints.points().iter().map(|p| [p.x, p.y]).collect()),
                        sine,
                    },
                    gains: GainsDoc {
                        kp: v.pid.gains.kp,
                        ki: v.pid.gains.ki,
                        kd: v.pid.gains.kd,
                    },
                    integral_limit: v.pid.integral_limit(),
                    mix: v.mix_weight,
                    detune_cents: v.detune_cents,
                    lfo_antialias: v.lfo_antialias,
                    oversample: (v.oversample != top_m).then_some(v.oversample.get()),
                }
            })
            .collect(),
        automations: patch
            .automations
            .iter()
            .map(|a| {
                let (envelope, lfo) = match &a.source {
                    ModSource::Envelope(env) => (Some(env.anchors().iter().map(|&(t, v)| [t, v]).collect()), None),
                    ModSource::Lfo(r) => (
                        None,
                        Some(LfoDoc {
                            source: r.source,
                            depth: r.depth,
                            offset: r.offset,
                        }),
                    ),
                };
                AutomationDoc {
                    voice: a.voice,
                    target: a.target.to_string(),
                    envelope,
                    lfo,
                }
            })
            .collect(),
        master_gain: patch.master_gain,
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("patch documents always serialize");
    text.push('\n');
    text
}
