//! Named demo patches, one per studied regime.

use crate::artist::{ArtistSpec, BreakpointSet, Skeleton};
use crate::engine::{Automation, AutomationTarget, Envelope, ModSource, Patch, Voice};
use crate::pid::{PidConfig, PidGains, DEFAULT_INTEGRAL_LIMIT};
use crate::resample::OversampleFactor;

pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    build: fn() -> Patch,
}

impl Preset {
    pub fn patch(&self) -> Patch {
        (self.build)()
    }
}

fn voice(skeleton: Skeleton, points: &[(f64, f64)], f: f64, gains: PidGains, limit: f64, m: u32) -> Voice {
    let artist = ArtistSpec::new(skeleton, BreakpointSet::from_pairs(points).expect("preset breakpoints"), f)
        .expect("preset artist");
    Voice::new(
        artist,
        PidConfig::new(gains, limit).expect("preset gains"),
        OversampleFactor::new(m).expect("preset factor"),
    )
}

const STUDY: [(f64, f64); 4] = [(0.0, 0.0), (0.33, 1.0), (0.67, -1.0), (1.0, 0.0)];

fn study_step(gains: PidGains) -> Patch {
    Patch::new(44100.0, 1.0, vec![voice(Skeleton::Step, &STUDY, 440.0, gains, DEFAULT_INTEGRAL_LIMIT, 4)])
}

fn envelope(voice: usize, target: AutomationTarget, anchors: &[(f64, f64)]) -> Automation {
    Automation {
        voice,
        target,
        source: ModSource::Envelope(Envelope::new(anchors.to_vec()).expect("preset envelope")),
    }
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "fig2-limit-5000",
        description: "I-heavy step artist with the integral free to wind up to +-5000",
        build: || study_step(PidGains::new(0.1, 0.4, 0.0)),
    },
    Preset {
        name: "fig2-early-limit",
        description: "same gains with the integral limited to +-1: rails-pinned, square-like output",
        build: || {
            let mut p = study_step(PidGains::new(0.1, 0.4, 0.0));
            p.voices[0].pid = PidConfig::new(PidGains::new(0.1, 0.4, 0.0), 1.0).unwrap();
            p
        },
    },
    Preset {
        name: "fig9-p",
        description: "P-only (kp 0.5) against the study step artist",
        build: || study_step(PidGains::new(0.5, 0.0, 0.0)),
    },
    Preset {
        name: "fig11-i",
        description: "I-only (ki 0.3): high-frequency oscillation around the artist",
        build: || study_step(PidGains::new(0.0, 0.3, 0.0)),
    },
    Preset {
        name: "fig13-d",
        description: "D-only (kd 0.3): scaled, differenced artist",
        build: || study_step(PidGains::new(0.0, 0.0, 0.3)),
    },
    Preset {
        name: "fig15-pi",
        description: "PI mode, kp 0.6 and ki 0.4",
        build: || study_step(PidGains::new(0.6, 0.4, 0.0)),
    },
    Preset {
        name: "fig16",
        description: "kp 0.6, ki 0.3 at 440 Hz",
        build: || study_step(PidGains::new(0.6, 0.3, 0.0)),
    },
    Preset {
        name: "fig18-additive",
        description: "step voice plus linear voice mixed 50/50",
        build: || {
            let step = voice(Skeleton::Step, &STUDY, 220.0, PidGains::new(0.6, 0.3, 0.0), DEFAULT_INTEGRAL_LIMIT, 4);
            let linear = voice(
                Skeleton::Linear,
                &[(0.0, 0.0), (0.25, 1.0), (0.75, -1.0), (1.0, 0.0)],
                220.0,
                PidGains::new(0.8, 0.0, 0.0),
                DEFAULT_INTEGRAL_LIMIT,
                4,
            );
            Patch::new(44100.0, 1.0, vec![step, linear])
        },
    },
    Preset {
        name: "fig19-lfo",
        description: "2 Hz linear-artist LFO without anti-aliasing",
        build: || {
            Patch::new(
                44100.0,
                2.0,
                vec![voice(
                    Skeleton::Linear,
                    &[(0.0, 0.0), (0.25, 1.0), (0.75, -1.0), (1.0, 0.0)],
                    2.0,
                    PidGains::new(0.02, 0.0, 0.0),
                    DEFAULT_INTEGRAL_LIMIT,
                    1,
                )],
            )
        },
    },
    Preset {
        name: "fig20-wavetable",
        description: "kp swept 1 -> 0.2 while ki rises 0 -> 0.5 over two seconds",
        build: || {
            let mut p = study_step(PidGains::new(1.0, 0.0, 0.0));
            p.duration_s = 2.0;
            p.automations.push(envelope(0, AutomationTarget::Kp, &[(0.0, 1.0), (2.0, 0.2)]));
            p.automations.push(envelope(0, AutomationTarget::Ki, &[(0.0, 0.0), (2.0, 0.5)]));
            p
        },
    },
    Preset {
        name: "fig21-dc",
        description: "asymmetric step artist with a large DC component",
        build: || {
            Patch::new(
                44100.0,
                1.0,
                vec![voice(
                    Skeleton::Step,
                    &[(0.0, 0.0), (0.5, 1.0), (1.0, 0.0)],
                    440.0,
                    PidGains::new(1.0, 0.0, 0.0),
                    DEFAULT_INTEGRAL_LIMIT,
                    4,
                )],
            )
        },
    },
    Preset {
        name: "fig23-fm",
        description: "ki swept 0 -> 0.6 over a small P term: FM-like sidebands",
        build: || {
            let mut p = study_step(PidGains::new(0.3, 0.0, 0.0));
            p.duration_s = 2.0;
            p.automations.push(envelope(0, AutomationTarget::Ki, &[(0.0, 0.0), (2.0, 0.6)]));
            p
        },
    },
    Preset {
        name: "fig24-triangle",
        description: "linear triangle artist",
        build: || {
            Patch::new(
                44100.0,
                1.0,
                vec![voice(
                    Skeleton::Linear,
                    &[(0.0, -1.0), (0.5, 1.0), (1.0, -1.0)],
                    440.0,
                    PidGains::new(0.6, 0.1, 0.0),
                    DEFAULT_INTEGRAL_LIMIT,
                    4,
                )],
            )
        },
    },
    Preset {
        name: "fig24-sawtooth",
        description: "linear sawtooth artist: the triangle with its peak moved to x = 0.95",
        build: || {
            let mut p = PRESETS
                .iter()
                .find(|p| p.name == "fig24-triangle")
                .expect("triangle preset")
                .patch();
            p.automations.push(envelope(0, AutomationTarget::BreakpointX(1), &[(0.0, 0.95)]));
            p
        },
    },
    Preset {
        name: "fig25-unstable",
        description: "gains (50, 10, 0): two-value oscillation at the tick rate",
        build: || study_step(PidGains::new(50.0, 10.0, 0.0)),
    },
];

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

pub fn names() -> Vec<&'static str> {
    PRESETS.iter().map(|p| p.name).collect()
}
