//! Published small-arms fit, shipped so the forecast workflow runs without the
//! full historical dataset.
//!
//! FoR = 10^−5.96 · V^2.0 · D^2.35 · M^0.61 · R^0.39, with the quadratic
//! temporal law log₁₀ FoR = 1.0 + 8.27·10⁻⁶·(t − 1200)².

use crate::forecast::Scenario;
use crate::formodel::{ForModel, GaugeConvention};
use crate::temporal::TemporalModel;

/// Identifier accepted by `--reference-model`.
pub const SMALL_ARMS_REFERENCE: &str = "paper-eq4-eq5";

/// Highest log₁₀ FoR reported for fielded weapons in the full dataset.
/// Not derivable from the bundled eight-row sample.
pub const SMALL_ARMS_MAX_OBSERVED: f64 = 6.18;

pub const SMALL_ARMS_HORIZON: f64 = 2050.0;

pub fn small_arms_for_model() -> ForModel {
    ForModel {
        log10_k: -5.96,
        alphas: vec![2.0, 2.35, 0.61, 0.39],
        gauge: Some(GaugeConvention {
            alpha1_target: 2.0,
            anchor_year: 1200.0,
        }),
    }
}

pub fn small_arms_temporal_model() -> TemporalModel {
    TemporalModel::QuadraticExponential {
        vertex_year: 1200.0,
        curvature: 8.27e-6,
        offset: 1.0,
    }
}

/// Velocity +10 %, effective range +70 %, projectile mass +80 %, rate unchanged.
pub fn small_arms_2050_scenario() -> Scenario {
    Scenario {
        name: "small-arms R&D directions to 2050".into(),
        multipliers: vec![1.1, 1.7, 1.8, 1.0],
        rationale: "higher muzzle velocity; computerized fire control extending effective range; \
                    heavier bullet; no expected change in rate of fire"
            .into(),
    }
}
