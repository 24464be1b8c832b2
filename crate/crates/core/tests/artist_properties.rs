use pids_core::artist::{evaluate_shape, validate_breakpoints, ArtistSpec, Breakpoint, BreakpointSet, PhaseAccumulator, Skeleton};
use proptest::prelude::*;

fn breakpoints() -> impl Strategy<Value = BreakpointSet> {
    (
        prop::collection::btree_set(1u32..999, 0..8),
        prop::collection::vec(-1.0..=1.0f64, 10),
    )
        .prop_map(|(inner, ys)| {
            let mut xs = vec![0.0];
            xs.extend(inner.into_iter().map(|x| x as f64 / 1000.0));
            xs.push(1.0);
            let pairs: Vec<(f64, f64)> = xs.iter().zip(ys.iter().cycle()).map(|(&x, &y)| (x, y)).collect();
            BreakpointSet::from_pairs(&pairs).unwrap()
        })
}

fn skeleton() -> impl Strategy<Value = Skeleton> {
    prop_oneof![
        Just(Skeleton::Linear),
        Just(Skeleton::Step),
        (0.0..=1.0f64, 0.0..1.0f64).prop_map(|(amplitude, phase)| Skeleton::Sine { amplitude, phase }),
    ]
}

fn artist() -> impl Strategy<Value = ArtistSpec> {
    (skeleton(), breakpoints()).prop_map(|(s, b)| ArtistSpec::new(s, b, 440.0).unwrap())
}

proptest! {
    #[test]
    fn evaluation_is_periodic(a in artist(), phase in 0.0..1.0f64, cycles in 0u32..50) {
        let shifted = phase + cycles as f64;
        prop_assert_eq!(a.evaluate(shifted), a.evaluate(shifted % 1.0));
    }

    #[test]
    fn evaluation_stays_in_range(a in artist(), phase in -10.0..10.0f64) {
        let v = a.evaluate(phase);
        prop_assert!((-1.0..=1.0).contains(&v));
    }

    #[test]
    fn breakpoints_are_hit_exactly(b in breakpoints()) {
        for skeleton in [Skeleton::Linear, Skeleton::Step] {
            let pts = b.points();
            // x = 1 wraps to phase 0, which belongs to the first breakpoint
            for p in &pts[..pts.len() - 1] {
                prop_assert_eq!(evaluate_shape(&skeleton, pts, p.x), p.y);
            }
        }
    }

    #[test]
    fn linear_segments_are_affine(b in breakpoints(), t in 0.0..=1.0f64) {
        let pts = b.points();
        for w in pts.windows(2) {
            let (a, c) = (w[0], w[1]);
            let mid = evaluate_shape(&Skeleton::Linear, pts, (a.x + c.x) / 2.0);
            prop_assert!((mid - (a.y + c.y) / 2.0).abs() <= 1e-12);
            let x = a.x + t * (c.x - a.x);
            if x < 1.0 {
                let v = evaluate_shape(&Skeleton::Linear, pts, x);
                prop_assert!((v - (a.y + t * (c.y - a.y))).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn step_holds_between_breakpoints(b in breakpoints(), t in 0.0..1.0f64) {
        let pts = b.points();
        for w in pts.windows(2) {
            let x = w[0].x + t * (w[1].x - w[0].x);
            if x < w[1].x {
                prop_assert_eq!(evaluate_shape(&Skeleton::Step, pts, x), w[0].y);
            }
        }
    }

    #[test]
    fn phase_drift_is_bounded(f in 1.0..20000.0f64, n in 1usize..200_000) {
        let mut acc = PhaseAccumulator::new(f, 176_400.0).unwrap();
        for _ in 0..n {
            acc.advance();
        }
        let exact = (n as f64 * acc.increment()).rem_euclid(1.0);
        let err = (acc.phase - exact).abs();
        prop_assert!(err.min(1.0 - err) <= 1e-9 * n as f64, "drift {} after {} steps", err, n);
        prop_assert!((0.0..1.0).contains(&acc.phase));
    }

    #[test]
    fn generated_sets_validate(b in breakpoints()) {
        let report = validate_breakpoints(b.points());
        prop_assert!(report.errors.is_empty());
    }
}

#[test]
fn hundred_advances_return_to_start() {
    let mut acc = PhaseAccumulator::new(441.0, 44100.0).unwrap();
    let mut wraps = 0;
    for _ in 0..100 {
        wraps += acc.advance().1 as usize;
    }
    assert_eq!(wraps, 1);
    assert!(acc.phase.min(1.0 - acc.phase) < 1e-9);
}

#[test]
fn invalid_sets_are_rejected() {
    let bad = [
        vec![(0.0, 0.0), (0.5, 2.0), (1.0, 0.0)],
        vec![(0.1, 0.0), (1.0, 0.0)],
        vec![(0.0, 0.0), (0.9, 0.0)],
        vec![(0.0, 0.0), (0.6, 0.0), (0.4, 0.0), (1.0, 0.0)],
        vec![(0.0, 0.0)],
    ];
    for pairs in bad {
        let pts: Vec<Breakpoint> = pairs.iter().map(|&(x, y)| Breakpoint { x, y }).collect();
        assert!(!validate_breakpoints(&pts).errors.is_empty(), "{pairs:?}");
        assert!(BreakpointSet::from_pairs(&pairs).is_err());
    }
    let warn = validate_breakpoints(&[Breakpoint { x: 0.0, y: 0.5 }, Breakpoint { x: 1.0, y: -0.5 }]);
    assert!(warn.errors.is_empty() && warn.warnings.len() == 1);
}
