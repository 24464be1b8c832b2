use pids_core::analysis::{
    analyze, band_energy_db, magnitude_spectrum, peak_bin, peak_frequency, spectral_distance, Spectrum, Window,
};
use proptest::prelude::*;
use std::f64::consts::{PI, TAU};

const RATE: f64 = 44100.0;

fn hann_energy(x: &[f64], n: usize) -> f64 {
    (0..n)
        .map(|i| {
            let w = (PI * i as f64 / n as f64).sin().powi(2);
            let v = x.get(i).copied().unwrap_or(0.0) * w;
            v * v
        })
        .sum()
}

proptest! {
    #[test]
    fn parseval_holds(x in prop::collection::vec(-1.0..=1.0f64, 1..1024), log_n in 4u32..11) {
        let n = 1usize << log_n;
        let spec = magnitude_spectrum(&x, RATE, n, Window::Hann).unwrap();
        let time = hann_energy(&x, n);
        prop_assert!((spec.total_power() - time).abs() <= 1e-9 * time.max(1.0));
        let rect = magnitude_spectrum(&x, RATE, n, Window::Rectangular).unwrap();
        let direct: f64 = x.iter().take(n).map(|v| v * v).sum();
        prop_assert!((rect.total_power() - direct).abs() <= 1e-9 * direct.max(1.0));
    }

    #[test]
    fn full_band_is_zero_db(x in prop::collection::vec(-1.0..=1.0f64, 64..512)) {
        let spec = magnitude_spectrum(&x, RATE, 512, Window::Hann).unwrap();
        prop_assume!(spec.total_power() > 0.0);
        prop_assert!(band_energy_db(&spec, 0.0, RATE / 2.0).unwrap().abs() <= 1e-9);
    }

    #[test]
    fn distance_is_symmetric(
        a in prop::collection::vec(0.0..10.0f64, 65),
        b in prop::collection::vec(0.0..10.0f64, 65),
    ) {
        let sa = Spectrum::from_power(RATE, 128, a).unwrap();
        let sb = Spectrum::from_power(RATE, 128, b).unwrap();
        let (ab, ba) = (spectral_distance(&sa, &sb).unwrap(), spectral_distance(&sb, &sa).unwrap());
        prop_assert_eq!(ab, ba);
        prop_assert!((0.0..=2f64.sqrt() + 1e-12).contains(&ab));
    }

    #[test]
    fn sine_peak_is_located(f in 100.0..10000.0f64, phase in 0.0..1.0f64) {
        let x: Vec<f64> = (0..4096).map(|i| (TAU * (f * i as f64 / RATE + phase)).sin()).collect();
        let spec = magnitude_spectrum(&x, RATE, 4096, Window::Hann).unwrap();
        let coarse = peak_bin(&spec).unwrap() as f64 * spec.bin_width();
        prop_assert!((coarse - f).abs() <= spec.bin_width());
        let fine = peak_frequency(&spec).unwrap();
        prop_assert!((fine - f).abs() <= 2.0, "f={} refined {}", f, fine);
    }

    #[test]
    fn analysis_is_pure(x in prop::collection::vec(-1.0..=1.0f64, 1..2048)) {
        let a = analyze(&x, RATE, 1024).unwrap();
        let b = analyze(&x, RATE, 1024).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn dc_never_wins_the_peak_search() {
    let x: Vec<f64> = (0..4096).map(|i| 0.8 + 0.01 * (TAU * 1000.0 * i as f64 / RATE).sin()).collect();
    let spec = magnitude_spectrum(&x, RATE, 4096, Window::Hann).unwrap();
    assert!((peak_frequency(&spec).unwrap() - 1000.0).abs() <= 2.0);
    let (report, _) = analyze(&x, RATE, 4096).unwrap();
    assert!((report.dc_offset - 0.8).abs() < 1e-3);
}

#[test]
fn silence_reports_floor() {
    let (report, spec) = analyze(&[0.0; 4096], RATE, 4096).unwrap();
    assert_eq!(report.peak_hz, None);
    assert!(spec.magnitude_db.iter().all(|&d| d == pids_core::analysis::DB_FLOOR));
    assert!(report.band_energies.iter().all(|(_, db)| *db == pids_core::analysis::DB_FLOOR));
}
