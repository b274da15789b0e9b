use levywalk::rng::RngStream;
use levywalk::sampling::{conditional_from_uniform, conditional_survival, pareto_from_uniform};
use levywalk::stats::ks_statistic;
use levywalk::{
    sample_conditional_waiting, sample_direction, sample_mixing_exponent, sample_pareto_waiting,
    validate_mixing_density, DirectionMeasure, Error, HeavyTailLaw, MixingDensity,
};
use statrs::function::beta::beta_reg;

#[test]
fn pareto_inversion_values() {
    assert_eq!(pareto_from_uniform(0.5, 0.25), 16.0);
    assert_eq!(pareto_from_uniform(0.5, 0.5), 4.0);
    let law = HeavyTailLaw::new(0.3).unwrap();
    let mut rng = RngStream::new(1, 0).rng();
    assert!((0..10_000).all(|_| sample_pareto_waiting(&law, &mut rng) >= 1.0));
    // larger u never gives a larger waiting time
    let grid: Vec<f64> = (1..1000).map(|i| i as f64 / 1000.0).collect();
    assert!(grid
        .windows(2)
        .all(|w| pareto_from_uniform(0.7, w[1]) <= pareto_from_uniform(0.7, w[0])));
}

#[test]
fn conditional_law_identities() {
    assert_eq!(conditional_from_uniform(4.0, 0.5, 1.0), 0.0625);
    assert!((conditional_survival(100.0, 0.5, 10.0) - 3.1623e-3).abs() < 1e-7);
    // n = 1 is the Pareto law
    for &u in &[0.01, 0.3, 0.9] {
        assert_eq!(
            conditional_from_uniform(1.0, 0.4, u),
            pareto_from_uniform(0.4, u)
        );
    }
    for &n in &[1.0, 7.0, 1e4] {
        for &b in &[0.1, 0.5, 0.95] {
            let edge = f64::powf(n, -1.0 / b);
            assert!(
                (n * conditional_survival(n, b, edge) - edge.powf(-b)).abs()
                    <= 1e-12 * edge.powf(-b)
            );
            for &t in &[edge * 1.5, edge * 10.0, 1e3] {
                assert!(
                    (n * conditional_survival(n, b, t) - t.powf(-b)).abs() <= 1e-12 * t.powf(-b)
                );
            }
        }
    }
}

#[test]
fn conditional_waiting_ks() {
    let n = 100.0;
    let beta = 0.5;
    let mut rng = RngStream::new(2, 0).rng();
    let x: Vec<f64> = (0..100_000)
        .map(|_| sample_conditional_waiting(n, beta, &mut rng))
        .collect();
    let d = ks_statistic(&x, |t| 1.0 - conditional_survival(n, beta, t)).unwrap();
    assert!(d < 1.36 / (1e5f64).sqrt(), "{d}");
}

#[test]
fn mixing_exponent_moments_and_cdf() {
    let p = MixingDensity::new(1.0, 2.0).unwrap();
    let mut rng = RngStream::new(3, 0).rng();
    let n = 1_000_000;
    let xs: Vec<f64> = (0..n)
        .map(|_| sample_mixing_exponent(&p, &mut rng))
        .collect();
    assert!(xs.iter().all(|&b| b > 0.0 && b < 1.0));
    let mean = xs.iter().sum::<f64>() / n as f64;
    let var = xs.iter().map(|b| (b - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
    assert!(
        (mean - 1.0 / 3.0).abs() < 3.0 * (var / n as f64).sqrt(),
        "{mean}"
    );

    let p = MixingDensity::new(0.5, 2.0).unwrap();
    let xs: Vec<f64> = (0..100_000)
        .map(|_| sample_mixing_exponent(&p, &mut rng))
        .collect();
    let d = ks_statistic(&xs, |b| beta_reg(0.5, 2.0, b)).unwrap();
    assert!(d < 1.36 / (1e5f64).sqrt(), "{d}");
}

#[test]
fn mixing_validation() {
    let r = validate_mixing_density(&MixingDensity::unchecked(0.5, 2.0).unwrap()).unwrap();
    assert!(r.is_valid() && r.regularly_varying && r.integrable);
    // ratio oracle p(λt)/p(t) = λ^(γ−1)(1−λt)/(1−t) evaluated directly
    let p = MixingDensity::unchecked(0.5, 2.0).unwrap();
    for &t in &[1e-3, 1e-5] {
        for &l in &[0.5, 2.0] {
            let direct = p.pdf(l * t) / p.pdf(t);
            assert!((direct / l.powf(-0.5) - 1.0).abs() < 0.01);
        }
    }
    assert!(
        validate_mixing_density(&MixingDensity::unchecked(2.0, 1.5).unwrap())
            .unwrap()
            .is_valid()
    );
    match validate_mixing_density(&MixingDensity::unchecked(1.0, 1.0).unwrap()) {
        Err(Error::MixingDensity { .. }) => {}
        other => panic!("expected rejection, got {other:?}"),
    }
    assert!(MixingDensity::new(1.0, 0.9).is_err());
}

#[test]
fn direction_laws() {
    let mut rng = RngStream::new(4, 0).rng();
    let point = DirectionMeasure::point(vec![1.0, 0.0]).unwrap();
    assert!((0..100).all(|_| sample_direction(&point, &mut rng) == vec![1.0, 0.0]));

    let sym = DirectionMeasure::symmetric_axis(1).unwrap();
    let n = 100_000;
    let plus = (0..n)
        .filter(|_| sample_direction(&sym, &mut rng)[0] > 0.0)
        .count() as f64
        / n as f64;
    assert!(
        (plus - 0.5).abs() < 3.0 * (0.25 / n as f64).sqrt(),
        "{plus}"
    );

    let uni = DirectionMeasure::uniform(3).unwrap();
    let n = 1_000_000;
    let mut sum = [0.0; 3];
    for _ in 0..n {
        let u = sample_direction(&uni, &mut rng);
        assert!((u.iter().map(|x| x * x).sum::<f64>().sqrt() - 1.0).abs() < 1e-12);
        for c in 0..3 {
            sum[c] += u[c];
        }
    }
    // each component has variance 1/3
    let se = (1.0 / 3.0 / n as f64).sqrt();
    for s in sum {
        assert!((s / n as f64).abs() < 4.0 * se);
    }
}
