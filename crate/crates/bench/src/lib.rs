//! Fixtures shared by the benchmarks.

use maj3lab_core::geometry::IntervalSet;
use maj3lab_core::instances::IntervalHardInstance;
use maj3lab_core::{Instance, Sample};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A random canonical set with up to `max_intervals` pieces.
pub fn random_set(rng: &mut ChaCha8Rng, max_intervals: usize) -> IntervalSet {
    let k = rng.random_range(1..=max_intervals);
    let raw: Vec<(f64, f64)> = (0..k)
        .map(|_| {
            let a: f64 = rng.random();
            (a * 0.9, a * 0.9 + rng.random::<f64>() * 0.5 / max_intervals as f64 + 1e-9)
        })
        .collect();
    IntervalSet::normalize(raw).unwrap()
}

pub fn interval_instance() -> Instance {
    Instance::Interval(IntervalHardInstance::new(1, maj3lab_core::instances::DEFAULT_C).unwrap())
}

pub fn interval_sample(n: usize, seed: u64) -> Sample {
    interval_instance().draw_sample(n, &mut ChaCha8Rng::seed_from_u64(seed))
}
