mod common;

use circstab::measures::{wasserstein, AtomicMeasure, ContinuousMeasure, FourierDensity, Lebesgue};
use circstab::{CirclePoint, FourierSeries};
use common::{random_atomic, transport_lp};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn matches_min_cost_flow() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..200 {
        let mu = random_atomic(&mut rng, 12);
        let nu = random_atomic(&mut rng, 12);
        let w = wasserstein(&mu, &nu).unwrap();
        let lp = transport_lp(&mu, &nu);
        assert!((w - lp).abs() < 1e-9, "{w} vs {lp}");
    }
}

#[test]
fn flow_oracle_on_known_pairs() {
    let d0 = AtomicMeasure::dirac(CirclePoint::ZERO);
    let d = |x: f64| AtomicMeasure::dirac(CirclePoint::new(x).unwrap());
    assert!((transport_lp(&d0, &d(0.9)) - 0.1).abs() < 1e-15);
    let half = AtomicMeasure::new([(0.0, 0.5), (0.5, 0.5)]).unwrap();
    let quarter = AtomicMeasure::new([(0.25, 0.5), (0.75, 0.5)]).unwrap();
    assert!((transport_lp(&half, &quarter) - 0.25).abs() < 1e-15);
    assert!((wasserstein(&half, &quarter).unwrap() - 0.25).abs() < 1e-15);
}

/// Fine uniform grids converge to Lebesgue at rate 1/(4q).
#[test]
fn continuous_against_grids() {
    for q in [1u64, 2, 7, 64, 1000] {
        let w = wasserstein(&AtomicMeasure::uniform_grid(q).unwrap(), &Lebesgue).unwrap();
        assert!((w - 0.25 / q as f64).abs() < 1e-13, "q = {q}: {w}");
    }
    // density 1 + 0.5 cos(2 pi x) against a quantile grid of itself
    let rho = FourierDensity::probability(
        FourierSeries::cosine(1, 0.5).add(&FourierSeries::constant(1.0)),
    )
    .unwrap();
    let m = 20_000;
    let pts: Vec<CirclePoint> = (0..m)
        .map(|k| CirclePoint::new(rho.quantile((k as f64 + 0.5) / m as f64)).unwrap())
        .collect();
    let w = wasserstein(&AtomicMeasure::uniform(&pts).unwrap(), &rho).unwrap();
    assert!(w < 1e-4, "{w}");
    assert!((wasserstein(&rho, &rho).unwrap()).abs() < 1e-12);
}
