use pids_core::pid::{detect_instability, PidConfig, PidGains, PidState};
use proptest::prelude::*;

fn gains() -> impl Strategy<Value = PidGains> {
    (0.0..=2.0f64, 0.0..=2.0f64, 0.0..=2.0f64).prop_map(|(p, i, d)| PidGains::new(p, i, d))
}

fn setpoints(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..=1.0f64, 1..max_len)
}

proptest! {
    #[test]
    fn output_and_integral_stay_bounded(
        g in gains(),
        limit in prop_oneof![Just(1.0), 0.01..=5000.0f64],
        sp in setpoints(2000),
    ) {
        let cfg = PidConfig::new(g, limit).unwrap();
        let mut st = PidState::new();
        for &s in &sp {
            let y = st.tick(&cfg, s).unwrap();
            prop_assert!(y.abs() <= 1.0 && y.is_finite());
            prop_assert!(st.integral.abs() <= limit);
            prop_assert_eq!(st.prev_output, y);
        }
    }

    #[test]
    fn ticking_is_deterministic(g in gains(), sp in setpoints(500)) {
        let cfg = PidConfig::with_gains(g).unwrap();
        let (mut a, mut b) = (PidState::new(), PidState::new());
        for &s in &sp {
            prop_assert_eq!(a.tick(&cfg, s).unwrap().to_bits(), b.tick(&cfg, s).unwrap().to_bits());
        }
        prop_assert_eq!(a, b);
    }

    #[test]
    fn zero_gains_are_silent(sp in setpoints(500)) {
        let cfg = PidConfig::with_gains(PidGains::new(0.0, 0.0, 0.0)).unwrap();
        let mut st = PidState::new();
        for &s in &sp {
            prop_assert_eq!(st.tick(&cfg, s).unwrap(), 0.0);
        }
    }

    // Deviation from the fixed point is scaled by -kp per tick, so kp = 1 never settles.
    #[test]
    fn p_only_converges_to_fixed_point(kp in 0.01..=0.95f64, a in -1.0..=1.0f64) {
        let cfg = PidConfig::with_gains(PidGains::new(kp, 0.0, 0.0)).unwrap();
        let mut st = PidState::new();
        let mut oracle = 0.0f64;
        let mut y = 0.0;
        for _ in 0..1000 {
            y = st.tick(&cfg, a).unwrap();
            oracle = kp * (a - oracle);
        }
        prop_assert_eq!(y, oracle);
        let fixed = a * kp / (1.0 + kp);
        prop_assert!((y - fixed).abs() <= 1e-6, "kp={} a={} y={} fixed={}", kp, a, y, fixed);
    }

    #[test]
    fn reset_restores_fresh_state(g in gains(), sp in setpoints(100)) {
        let cfg = PidConfig::with_gains(g).unwrap();
        let mut st = PidState::new();
        for &s in &sp {
            st.tick(&cfg, s).unwrap();
        }
        st.reset();
        prop_assert_eq!(st, PidState::new());
        prop_assert_eq!(st.tick(&cfg, 0.0).unwrap(), 0.0);
    }
}

#[test]
fn p_only_fixed_point_from_examples() {
    let cfg = PidConfig::with_gains(PidGains::new(0.5, 0.0, 0.0)).unwrap();
    let mut st = PidState::new();
    let mut y = 0.0;
    for _ in 0..1000 {
        y = st.tick(&cfg, 1.0).unwrap();
    }
    assert!((y - 1.0 / 3.0).abs() < 1e-6);
}

#[test]
fn high_p_gain_alternates_at_tick_rate() {
    let cfg = PidConfig::with_gains(PidGains::new(50.0, 0.0, 0.0)).unwrap();
    let mut st = PidState::new();
    let ys: Vec<f64> = (0..200).map(|_| st.tick(&cfg, 1.0).unwrap()).collect();
    assert_eq!(&ys[..4], &[1.0, 0.0, 1.0, 0.0]);
    assert!(detect_instability(&ys, 64, 0.5).unwrap());
}
