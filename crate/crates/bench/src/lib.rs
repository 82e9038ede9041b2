//! Shared inputs for the benchmarks.

use circstab::measures::AtomicMeasure;
use circstab::{golden_mean, CircleMapSpec, ConjugacyDiffeo};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random atomic probability measure with `n` atoms, reproducible per seed.
pub fn random_atomic(n: usize, seed: u64) -> AtomicMeasure {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<(f64, f64)> = (0..n)
        .map(|_| (rng.random::<f64>(), rng.random::<f64>() + 0.01))
        .collect();
    let total: f64 = raw.iter().map(|a| a.1).sum();
    AtomicMeasure::new(raw.into_iter().map(|(x, w)| (x, w / total))).expect("normalized weights")
}

pub fn golden_rotation() -> CircleMapSpec {
    CircleMapSpec::rotation(golden_mean())
}

/// Golden rotation conjugated by a single-mode diffeomorphism.
pub fn golden_conjugated() -> CircleMapSpec {
    CircleMapSpec::conjugated(
        golden_mean(),
        ConjugacyDiffeo::single_mode(0.2).expect("amplitude below the diffeo bound"),
    )
}
