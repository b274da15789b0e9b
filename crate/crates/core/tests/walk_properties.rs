use levywalk::rng::RngStream;
use levywalk::stats::{ecf_distance, euclidean_norm, Ensemble, Provenance};
use levywalk::{
    rescaled_lw_position, simulate_glw, simulate_golw, simulate_lw, simulate_olw, DirectionMeasure,
    HeavyTailLaw, MixingDensity, WalkKind,
};

fn probe_times(horizon: f64) -> Vec<f64> {
    (1..=100).map(|i| horizon * i as f64 / 100.0).collect()
}

#[test]
fn wait_first_cone_bound_over_ensembles() {
    let law = HeavyTailLaw::new(0.5).unwrap();
    let p = MixingDensity::new(0.5, 2.0).unwrap();
    let times = probe_times(10.0);
    for dim in [1, 2] {
        let lambda = DirectionMeasure::uniform(dim).unwrap();
        for i in 0..2_000u64 {
            let lw = simulate_lw(
                &law,
                &lambda,
                10.0,
                &mut RngStream::for_stage(5, "lw", i).rng(),
            )
            .unwrap();
            let glw = simulate_glw(
                1000,
                &p,
                &lambda,
                10.0,
                &mut RngStream::for_stage(5, "glw", i).rng(),
            )
            .unwrap();
            for path in [lw, glw] {
                let xs = path.positions_at(&times).unwrap();
                for (m, &t) in times.iter().enumerate() {
                    assert!(euclidean_norm(&xs[m * dim..(m + 1) * dim]) <= t * (1.0 + 1e-12));
                }
            }
        }
    }
}

#[test]
fn jump_first_overshoots_sometimes() {
    let law = HeavyTailLaw::new(0.5).unwrap();
    let lambda = DirectionMeasure::uniform(2).unwrap();
    let n = 2000;
    let over = (0..n)
        .filter(|&i| {
            let p = simulate_olw(&law, &lambda, 10.0, &mut RngStream::new(6, i).rng()).unwrap();
            euclidean_norm(&p.position_at(10.0).unwrap()) > 10.0
        })
        .count();
    assert!(over > 0 && over < n as usize, "{over}");
}

#[test]
fn renewal_sandwich_and_paths_are_event_lists() {
    let law = HeavyTailLaw::new(0.7).unwrap();
    let lambda = DirectionMeasure::uniform(3).unwrap();
    for i in 0..300 {
        let p = simulate_lw(&law, &lambda, 50.0, &mut RngStream::new(7, i).rng()).unwrap();
        assert_eq!(p.kind, WalkKind::Lw);
        assert_eq!(p.epochs[0], 0.0);
        assert!(*p.epochs.last().unwrap() >= 50.0);
        for &t in &probe_times(50.0) {
            let k = p.epochs.partition_point(|&e| e <= t) - 1;
            assert!(p.epochs[k] <= t && t < p.epochs[k + 1]);
        }
    }
}

#[test]
fn golw_replays_and_pairs_with_glw() {
    let p = MixingDensity::new(0.5, 2.0).unwrap();
    let lambda = DirectionMeasure::point(vec![1.0, 0.0]).unwrap();
    let a = simulate_golw(10, &p, &lambda, 5.0, &mut RngStream::new(8, 3).rng()).unwrap();
    let b = simulate_golw(10, &p, &lambda, 5.0, &mut RngStream::new(8, 3).rng()).unwrap();
    assert_eq!(a, b);
    let x0 = a.position_at(0.0).unwrap();
    assert!((x0[0] - a.epochs[1]).abs() <= 1e-12 * a.epochs[1]);
}

#[test]
fn rescaled_positions_respect_scaling_cone() {
    let law = HeavyTailLaw::new(0.5).unwrap();
    let lambda = DirectionMeasure::uniform(2).unwrap();
    for i in 0..500 {
        let x =
            rescaled_lw_position(&law, &lambda, 1e3, 1.0, &mut RngStream::new(9, i).rng()).unwrap();
        assert!(euclidean_norm(&x) <= 1.0 + 1e-12);
    }
}

/// Sanity check: a sharply peaked mixing density at n = 1 behaves like the
/// plain walk with α equal to its mean.
#[test]
fn peaked_glw_resembles_lw() {
    let p = MixingDensity::new(50.0, 2.0).unwrap();
    let law = HeavyTailLaw::new(50.0 / 52.0).unwrap();
    let lambda = DirectionMeasure::symmetric_axis(1).unwrap();
    let n = 20_000;
    let t = 20.0;
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for i in 0..n as u64 {
        a.extend(
            simulate_glw(
                1,
                &p,
                &lambda,
                t,
                &mut RngStream::for_stage(10, "glw", i).rng(),
            )
            .unwrap()
            .position_at(t)
            .unwrap(),
        );
        b.extend(
            simulate_lw(
                &law,
                &lambda,
                t,
                &mut RngStream::for_stage(10, "lw", i).rng(),
            )
            .unwrap()
            .position_at(t)
            .unwrap(),
        );
    }
    let ea = Ensemble::new(1, t, a, Provenance::default()).unwrap();
    let eb = Ensemble::new(1, t, b, Provenance::default()).unwrap();
    let grid: Vec<Vec<f64>> = (1..=16).map(|j| vec![0.05 * j as f64]).collect();
    let d = ecf_distance(&ea, &eb, &grid).unwrap();
    assert!(d < 0.05, "{d}");
}
