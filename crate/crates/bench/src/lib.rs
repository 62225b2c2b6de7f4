//! Shared inputs for the benchmarks.

use regularity_core::reference::{small_arms_for_model, small_arms_temporal_model};
use regularity_core::{generate, Dataset, SynthSpec};

/// Noisy small-arms history of `n` records drawn from the published model.
pub fn small_arms_history(n: usize, seed: u64) -> Dataset {
    let mut spec = SynthSpec::small_arms(small_arms_for_model(), small_arms_temporal_model(), n, seed).with_noise(0.1);
    spec.year_range = (1200.0, 2015.0);
    generate(&spec).expect("valid synthetic spec")
}
