//! Joint fitting of a power-law "Figure of Regularity" and its growth over
//! time.
//!
//! A technology record carries a year and positive attributes `x₁…xₙ`. The
//! FoR `k·∏ xᵢ^αᵢ` and one of five temporal laws for log₁₀ FoR are fitted
//! together by linear least squares in log space, then scored, ranked and
//! extrapolated.
//!
//! ```
//! use regularity_core::{fit_all, Dataset, FitConfig};
//!
//! let d = Dataset::builtin_sample();
//! let fits = fit_all(&d, &FitConfig::default()).unwrap();
//! assert_eq!(fits.len(), 5);
//! ```

pub mod dataset;
pub mod error;
pub mod fit;
pub mod forecast;
pub mod formodel;
pub mod lstsq;
pub mod reference;
pub mod scoring;
pub mod synth;
pub mod temporal;

pub use dataset::{AttributeSchema, Dataset, TechRecord};
pub use error::{Error, Result};
pub use fit::{fit, fit_all, fit_variants, FitConfig, FitResult, ProfileGrid, VariantOutcome};
pub use forecast::{extrapolate, gap_to_best, scenario_increments, GapReport, Scenario, ScenarioFile};
pub use formodel::{ForModel, GaugeConvention, KineticForm};
pub use scoring::{rank, score, score_all, BicMode, HindcastWindow, MapeBasis, Ranking, ScoreConfig, ScoreReport};
pub use synth::{generate, SynthSpec};
pub use temporal::{TemporalModel, Variant};
