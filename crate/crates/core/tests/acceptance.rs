//! Acceptance suite. Each test covers one numbered criterion and prints a
//! single `criterion NN ... PASS|FAIL` line before asserting.

use std::time::Instant;

use pids_core::analysis::{
    band_energy_db, magnitude_spectrum, peak_bin, peak_frequency, power_outside, rms,
    spectral_distance, Window,
};
use pids_core::artist::{ArtistSpec, BreakpointSet, PhaseAccumulator, Skeleton};
use pids_core::engine::{
    antialias_kernel, render_patch, render_voice, single_voice_patch, Automation, AutomationTarget,
    Envelope, ModSource, Patch, Voice,
};
use pids_core::io::{parse_patch, read_wav, serialize_patch, write_wav, BitDepth, WavFormat};
use pids_core::pid::{detect_instability, PidConfig, PidGains, PidState};
use pids_core::resample::{
    convolve, decimate, filter_decimate, FirSpec, OversampleFactor, VERIFY_GRID,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const RATE: f64 = 44100.0;

fn report(id: u32, name: &str, ok: bool, detail: impl AsRef<str>) {
    println!(
        "criterion {id:02} {name:<28} {}  {}",
        if ok { "PASS" } else { "FAIL" },
        detail.as_ref()
    );
    assert!(ok, "criterion {id} ({name}) failed: {}", detail.as_ref());
}

fn m(f: u32) -> OversampleFactor {
    OversampleFactor::new(f).unwrap()
}

fn study_step(f: f64) -> ArtistSpec {
    ArtistSpec::new(Skeleton::Step, BreakpointSet::study(), f).unwrap()
}

fn render(artist: ArtistSpec, gains: PidGains, factor: u32, duration: f64) -> Vec<f64> {
    let patch = single_voice_patch(artist, gains, m(factor), RATE, duration).unwrap();
    render_patch(&patch).unwrap().samples
}

/// Replays the PID loop over the artist at the effective rate using only the
/// public building blocks, returning raw ticks and the loop state after each.
fn replay_ticks(artist: &ArtistSpec, config: &PidConfig, rate: f64, ticks: usize) -> Vec<(f64, PidState)> {
    let mut phase = PhaseAccumulator::new(artist.frequency_hz, rate).unwrap();
    let mut state = PidState::new();
    (0..ticks)
        .map(|_| {
            let y = state.tick(config, artist.evaluate(phase.phase)).unwrap();
            phase.advance();
            (y, state)
        })
        .collect()
}

fn random_artist(rng: &mut ChaCha8Rng, effective_rate: f64) -> ArtistSpec {
    let skeleton = match rng.gen_range(0..3) {
        0 => Skeleton::Linear,
        1 => Skeleton::Step,
        _ => Skeleton::Sine {
            amplitude: rng.gen_range(0.0..=1.0),
            phase: rng.gen_range(0.0..1.0),
        },
    };
    let inner = rng.gen_range(0..6);
    let mut xs: Vec<f64> = (0..inner).map(|_| rng.gen_range(0.001..0.999)).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let mut pairs = vec![(0.0, rng.gen_range(-1.0..=1.0))];
    pairs.extend(xs.into_iter().map(|x| (x, rng.gen_range(-1.0..=1.0))));
    pairs.push((1.0, rng.gen_range(-1.0..=1.0)));
    let bps = BreakpointSet::from_pairs(&pairs).unwrap();
    let limit = if skeleton.uses_breakpoints() {
        effective_rate / bps.len() as f64
    } else {
        effective_rate / 2.0 * 0.999
    };
    let f = rng.gen_range(1.0..limit.min(8000.0));
    ArtistSpec::new(skeleton, bps, f).unwrap()
}

#[test]
fn criterion_01_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let mut worst_out = 0.0f64;
    let mut integral_ok = true;
    let mut finite = true;
    for _ in 0..1000 {
        let factor = [1u32, 2, 4, 8][rng.gen_range(0..4)];
        let artist = random_artist(&mut rng, RATE * factor as f64);
        let gains = PidGains::new(rng.gen_range(0.0..=2.0), rng.gen_range(0.0..=2.0), rng.gen_range(0.0..=2.0));
        let limit = if rng.gen_bool(0.5) { 1.0 } else { rng.gen_range(1.0..=5000.0) };
        let config = PidConfig::new(gains, limit).unwrap();

        let mut voice = Voice::new(artist.clone(), config, m(factor));
        voice.mix_weight = 1.0;
        let patch = Patch::new(RATE, 0.1, vec![voice]);
        let out = render_patch(&patch).unwrap();
        finite &= out.samples.iter().all(|s| s.is_finite());
        worst_out = out.samples.iter().fold(worst_out, |w, s| w.max(s.abs()));

        for (y, st) in replay_ticks(&artist, &config, RATE * factor as f64, 4410 * factor as usize) {
            integral_ok &= st.integral.abs() <= limit && y.abs() <= 1.0 && y.is_finite();
        }
    }
    report(
        1,
        "bounds",
        finite && worst_out <= 1.0 && integral_ok,
        format!("max |out| = {worst_out}, integrals within limit: {integral_ok}, finite: {finite}"),
    );
}

#[test]
fn criterion_02_p_fixed_point() {
    let mut details = Vec::new();
    let mut ok = true;
    for kp in [0.1, 0.5, 1.0] {
        let cfg = PidConfig::with_gains(PidGains::new(kp, 0.0, 0.0)).unwrap();
        let mut state = PidState::new();
        let mut y = 0.0;
        for _ in 0..1000 {
            y = state.tick(&cfg, 0.8).unwrap();
        }
        // oracle: iterate y <- kp * (0.8 - y) directly
        let mut oracle = 0.0;
        for _ in 0..1000 {
            oracle = kp * (0.8 - oracle);
        }
        let target = 0.8 * kp / (1.0 + kp);
        let pass = (y - target).abs() <= 1e-6 && y == oracle;
        ok &= pass;
        details.push(format!("kp={kp}: y[999]={y:.6} target={target:.6}"));
    }
    report(2, "P fixed point", ok, details.join("; "));
}

#[test]
fn criterion_03_p_monotonicity() {
    let rms_values: Vec<f64> = (1..=10)
        .map(|i| rms(&render(study_step(440.0), PidGains::new(i as f64 / 10.0, 0.0, 0.0), 4, 1.0)))
        .collect();
    let ok = rms_values.windows(2).all(|w| w[1] > w[0]);
    report(3, "P monotonicity", ok, format!("rms {:.4?}", rms_values));
}

#[test]
fn criterion_04_i_peak_frequency() {
    let peaks: Vec<f64> = (1..=6)
        .map(|i| {
            let out = render(study_step(440.0), PidGains::new(0.0, i as f64 / 10.0, 0.0), 4, 0.5);
            let spec = magnitude_spectrum(&out[4410..], RATE, 4096, Window::Hann).unwrap();
            peak_frequency(&spec).unwrap()
        })
        .collect();
    let bin = RATE / 4096.0;
    let ok = peaks.windows(2).all(|w| w[1] >= w[0] - bin);
    report(4, "I peak-frequency order", ok, format!("peaks Hz {:.1?}", peaks));
}

#[test]
fn criterion_05_windup_limiting() {
    let gains = PidGains::new(0.1, 0.4, 0.0);
    let run = |limit: f64| {
        let voice = Voice::new(study_step(440.0), PidConfig::new(gains, limit).unwrap(), m(4));
        render_patch(&Patch::new(RATE, 0.5, vec![voice])).unwrap().samples
    };
    let (wide, early) = (run(5000.0), run(1.0));
    let diff = wide.iter().zip(&early).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let bounded = wide.iter().chain(&early).all(|s| s.is_finite() && s.abs() <= 1.0);
    report(5, "windup limiting", diff > 0.1 && bounded, format!("max |diff| = {diff:.4}"));
}

#[test]
fn criterion_06_antialiasing() {
    let mut ok = true;
    let mut details = Vec::new();
    for factor in [2u32, 4, 8] {
        let out = render(study_step(440.0), PidGains::new(1.0, 0.0, 0.0), factor, 0.5);
        let spec = magnitude_spectrum(&out[4410..], RATE, 8192, Window::Hann).unwrap();
        let above = band_energy_db(&spec, 20000.0, RATE / 2.0).unwrap();
        let rate = RATE * factor as f64;
        let kernel = antialias_kernel(RATE, m(factor)).unwrap();
        let atten = kernel.stopband_attenuation_db(RATE / 2.0, rate, VERIFY_GRID);
        let pass = above <= -60.0 && atten >= 80.0;
        ok &= pass;
        details.push(format!("m={factor}: >20kHz {above:.1} dB, stopband {atten:.2} dB ({} taps)", kernel.taps()));
    }
    report(6, "anti-aliasing", ok, details.join("; "));
}

#[test]
fn criterion_07_polyphase_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0007);
    let mut mismatches = 0;
    for factor in [1u32, 2, 4, 8] {
        let kernel = if factor == 1 {
            pids_core::resample::FirKernel::identity()
        } else {
            pids_core::resample::design_lowpass(&FirSpec::for_playback(RATE), RATE * factor as f64).unwrap()
        };
        for _ in 0..100 {
            let len = rng.gen_range(1..=10_000);
            let x: Vec<f64> = (0..len).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            let naive = decimate(&convolve(&x, &kernel), m(factor));
            let fast = filter_decimate(&x, &kernel, m(factor));
            let same = naive.len() == fast.len()
                && naive.iter().zip(&fast).all(|(a, b)| a.to_bits() == b.to_bits());
            mismatches += !same as usize;
        }
    }
    report(7, "polyphase equivalence", mismatches == 0, format!("{mismatches} mismatching signals of 400"));
}

#[test]
fn criterion_08_frequency_tracking() {
    let mut ok = true;
    let mut details = Vec::new();
    for f in [110.0, 220.0, 440.0] {
        let out = render(study_step(f), PidGains::new(1.0, 0.0, 0.0), 4, 0.5);
        let spec = magnitude_spectrum(&out[4410..], RATE, 4096, Window::Hann).unwrap();
        let peak = peak_frequency(&spec).unwrap();
        let pass = (peak - f).abs() <= spec.bin_width();
        ok &= pass;
        details.push(format!("f={f}: peak {peak:.2}"));
    }
    report(8, "frequency tracking", ok, details.join("; "));
}

#[test]
fn criterion_09_additive_linearity() {
    let step = Voice::new(study_step(220.0), PidConfig::with_gains(PidGains::new(0.6, 0.3, 0.0)).unwrap(), m(4));
    let linear_artist = ArtistSpec::new(
        Skeleton::Linear,
        BreakpointSet::from_pairs(&[(0.0, 0.0), (0.25, 1.0), (0.75, -1.0), (1.0, 0.0)]).unwrap(),
        330.0,
    )
    .unwrap();
    let linear = Voice::new(linear_artist, PidConfig::with_gains(PidGains::new(0.8, 0.0, 0.0)).unwrap(), m(4));
    let mut patch = Patch::new(RATE, 0.5, vec![step.clone(), linear.clone()]);
    patch.voices[0].mix_weight = 0.5;
    patch.voices[1].mix_weight = 0.5;
    let mixed = render_patch(&patch).unwrap();

    let solo_a = render_voice(&step, 0.5, RATE, &[]).unwrap().samples;
    let solo_b = render_voice(&linear, 0.5, RATE, &[]).unwrap().samples;
    let oracle: Vec<f64> = solo_a.iter().zip(&solo_b).map(|(a, b)| 0.5 * a + 0.5 * b).collect();
    let exact = mixed.unclamped == oracle;
    let clamped_ok = mixed
        .samples
        .iter()
        .zip(&oracle)
        .all(|(s, o)| *s == o.clamp(-1.0, 1.0));
    report(9, "additive linearity", exact && clamped_ok, format!("bit-exact pre-clamp: {exact}, clamp consistent: {clamped_ok}"));
}

#[test]
fn criterion_10_lfo_periodicity() {
    let out = render(study_step(2.0), PidGains::new(0.6, 0.3, 0.0), 1, 1.5);
    let period = 22050;
    let diff = out[period..2 * period]
        .iter()
        .zip(&out[2 * period..3 * period])
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    report(10, "LFO periodicity", diff <= 1e-6, format!("max |p2 - p3| = {diff:e}"));
}

#[test]
fn criterion_11_instability() {
    let gains = PidGains::new(50.0, 10.0, 0.0);
    let patch = single_voice_patch(study_step(440.0), gains, m(4), RATE, 1.0).unwrap();
    let result = render_patch(&patch).unwrap();
    let fired_at = result.voices[0].unstable_at_tick;

    // independent replay: the 64 differences ending at the firing tick alternate with |d| >= 0.5
    let config = PidConfig::with_gains(gains).unwrap();
    let ticks: Vec<f64> = replay_ticks(&patch.voices[0].artist, &config, RATE * 4.0, 4097)
        .into_iter()
        .map(|(y, _)| y)
        .collect();
    let alternates = fired_at.is_some_and(|t| {
        t <= 4096 && {
            let d: Vec<f64> = ticks[t - 64..=t].windows(2).map(|w| w[1] - w[0]).collect();
            d.iter().all(|x| x.abs() >= 0.5) && d.windows(2).all(|p| p[0].signum() != p[1].signum())
        }
    }) && detect_instability(&ticks, 64, 0.5).unwrap();

    let stable = render_patch(&single_voice_patch(study_step(440.0), PidGains::new(0.5, 0.0, 0.0), m(4), RATE, 1.0).unwrap())
        .unwrap();
    let ok = result.unstable && alternates && !stable.unstable;
    report(
        11,
        "instability detection",
        ok,
        format!("(50,10,0) fired at tick {fired_at:?}, alternation verified: {alternates}; (0.5,0,0) flagged: {}", stable.unstable),
    );
}

#[test]
fn criterion_12_wavetable_sweep() {
    let mut patch = single_voice_patch(study_step(440.0), PidGains::new(0.0, 0.0, 0.0), m(4), RATE, 1.0).unwrap();
    patch.automations.push(Automation {
        voice: 0,
        target: AutomationTarget::Kp,
        source: ModSource::Envelope(Envelope::new(vec![(0.0, 0.0), (1.0, 1.0)]).unwrap()),
    });
    let out = render_patch(&patch).unwrap();
    let finite = out.samples.iter().all(|s| s.is_finite() && s.abs() <= 1.0);
    let first = magnitude_spectrum(&out.samples[..4410], RATE, 4096, Window::Hann).unwrap();
    let last = magnitude_spectrum(&out.samples[44100 - 4410..], RATE, 4096, Window::Hann).unwrap();
    let distance = spectral_distance(&first, &last).unwrap();
    let fundamental = first.nearest_bin(440.0);
    let (pa, pb) = (peak_bin(&first).unwrap(), peak_bin(&last).unwrap());
    let ok = finite && distance > 0.1 && pa.abs_diff(fundamental) <= 1 && pb.abs_diff(fundamental) <= 1;
    report(
        12,
        "wavetable sweep",
        ok,
        format!("distance {distance:.3}, peak bins {pa}/{pb} (fundamental {fundamental})"),
    );
}

#[test]
fn criterion_13_pi_sidebands() {
    let outside: Vec<f64> = [0.0, 0.2, 0.4, 0.6]
        .iter()
        .map(|&ki| {
            let out = render(study_step(440.0), PidGains::new(0.6, ki, 0.0), 4, 0.5);
            let spec = magnitude_spectrum(&out[4410..], RATE, 4096, Window::Hann).unwrap();
            // fundamental bin plus the Hann main lobe
            power_outside(&spec, 440.0, 2)
        })
        .collect();
    let ok = outside.windows(2).all(|w| w[1] >= w[0]);
    report(13, "PI sidebands", ok, format!("power outside fundamental {:.3?}", outside));
}

#[test]
fn criterion_14_dc_reporting() {
    let asym = ArtistSpec::new(
        Skeleton::Step,
        BreakpointSet::from_pairs(&[(0.0, 0.0), (0.5, 1.0), (1.0, 0.0)]).unwrap(),
        440.0,
    )
    .unwrap();
    let dc = |artist| {
        render_patch(&single_voice_patch(artist, PidGains::new(1.0, 0.0, 0.0), m(4), RATE, 1.0).unwrap())
            .unwrap()
            .dc_offset
    };
    let (a, s) = (dc(asym), dc(study_step(440.0)));
    report(14, "DC reporting", a.abs() > 0.1 && s.abs() < 0.05, format!("asymmetric {a:.4}, symmetric {s:.4}"));
}

#[test]
fn criterion_15_round_trips() {
    let text = serialize_patch(&pids_core::presets::find("fig20-wavetable").unwrap().patch());
    let patch = parse_patch(&text).unwrap();
    let patch_ok = serialize_patch(&patch) == text && parse_patch(&serialize_patch(&patch)).unwrap() == patch;

    let a = render_patch(&patch).unwrap();
    let b = render_patch(&patch).unwrap();
    let deterministic = a.samples.iter().zip(&b.samples).all(|(x, y)| x.to_bits() == y.to_bits()) && a == b;

    let fmt = WavFormat::new(44100, BitDepth::Float32);
    let (read, _) = read_wav(&write_wav(&a.samples, fmt).unwrap()).unwrap();
    let wav_ok = read.len() == a.samples.len()
        && read.iter().zip(&a.samples).all(|(r, s)| r.to_bits() == (*s as f32 as f64).to_bits());
    report(
        15,
        "round trips",
        patch_ok && deterministic && wav_ok,
        format!("patch {patch_ok}, render determinism {deterministic}, wav32 {wav_ok}"),
    );
}

#[test]
fn criterion_16_performance() {
    let patch = single_voice_patch(study_step(440.0), PidGains::new(0.6, 0.3, 0.0), m(8), RATE, 1.0).unwrap();
    // kernels are cached per process, so charge a fresh design to the budget as well
    let start = Instant::now();
    let kernel = pids_core::resample::design_lowpass(&FirSpec::for_playback(RATE), RATE * 8.0).unwrap();
    let design = start.elapsed();
    let start = Instant::now();
    let out = render_patch(&patch).unwrap();
    let render = start.elapsed();
    let total = (design + render).as_secs_f64();
    report(
        16,
        "performance",
        out.samples.len() == 44100 && total < 1.0,
        format!(
            "1 s at 44.1 kHz, m=8: design {:.1} ms ({} taps) + render {:.1} ms",
            design.as_secs_f64() * 1e3,
            kernel.taps(),
            render.as_secs_f64() * 1e3
        ),
    );
}
