//! Synthetic datasets drawn from a known FoR and temporal law.
//!
//! Years are uniform over the range and all attributes but one are
//! log-uniform; the remaining attribute is solved so that log₁₀ FoR equals the
//! temporal curve plus Gaussian noise. Solving for one attribute keeps every
//! other regressor noise-free, so recovery is ordinary least squares with no
//! errors-in-variables bias.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::dataset::{AttributeSchema, Dataset, TechRecord};
use crate::error::{Error, Result};
use crate::formodel::ForModel;
use crate::temporal::TemporalModel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub schema: AttributeSchema,
    pub truth_for: ForModel,
    pub truth_temporal: TemporalModel,
    pub n_points: usize,
    pub year_range: (f64, f64),
    /// log₁₀ ranges for every attribute, in schema order. The entry for the
    /// solved attribute is ignored.
    pub log10_ranges: Vec<(f64, f64)>,
    pub solved_attribute: usize,
    /// Standard deviation of the noise added to log₁₀ FoR.
    pub noise_sigma: f64,
    pub seed: u64,
}

impl SynthSpec {
    /// Small-arms schema with attribute magnitudes resembling the historical
    /// data: velocity 10–1000 m/s, range 10–1000 m, mass 1 g–1 kg, rate
    /// 0.1–1000 per minute.
    pub fn small_arms(truth_for: ForModel, truth_temporal: TemporalModel, n_points: usize, seed: u64) -> Self {
        Self {
            schema: AttributeSchema::small_arms(),
            truth_for,
            truth_temporal,
            n_points,
            year_range: (1200.0, 2000.0),
            log10_ranges: vec![(1.0, 3.0), (1.0, 3.0), (-3.0, 0.0), (-1.0, 3.0)],
            solved_attribute: 0,
            noise_sigma: 0.0,
            seed,
        }
    }

    pub fn with_noise(mut self, sigma: f64) -> Self {
        self.noise_sigma = sigma;
        self
    }

    fn validate(&self) -> Result<()> {
        let n = self.schema.count();
        if self.truth_for.alphas.len() != n || self.log10_ranges.len() != n {
            return Err(Error::Config(format!(
                "truth model has {} exponents and {} ranges for {n} attributes",
                self.truth_for.alphas.len(),
                self.log10_ranges.len()
            )));
        }
        if self.solved_attribute >= n {
            return Err(Error::Config(format!(
                "solved attribute {} out of range",
                self.solved_attribute
            )));
        }
        if self.truth_for.alphas[self.solved_attribute] == 0.0 {
            return Err(Error::Config("solved attribute has a zero exponent".into()));
        }
        let (lo, hi) = self.year_range;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::Config(format!("bad year range {lo}..{hi}")));
        }
        if self
            .log10_ranges
            .iter()
            .any(|(a, b)| !(a.is_finite() && b.is_finite() && a <= b))
        {
            return Err(Error::Config("bad attribute range".into()));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::Config(format!("noise sigma {} must be >= 0", self.noise_sigma)));
        }
        Ok(())
    }
}

/// Same spec and seed give the same dataset.
pub fn generate(spec: &SynthSpec) -> Result<Dataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let noise = Normal::new(0.0, spec.noise_sigma).map_err(|e| Error::Config(e.to_string()))?;
    let s = spec.solved_attribute;
    let alpha_s = spec.truth_for.alphas[s];
    let (y_lo, y_hi) = spec.year_range;

    let mut records = Vec::with_capacity(spec.n_points);
    for i in 0..spec.n_points {
        let year = if y_lo == y_hi {
            y_lo
        } else {
            rng.random_range(y_lo..y_hi)
        };
        let mut logs: Vec<f64> = spec
            .log10_ranges
            .iter()
            .map(|&(a, b)| if a == b { a } else { rng.random_range(a..b) })
            .collect();
        let target = spec.truth_temporal.eval(year)? + noise.sample(&mut rng);
        let others: f64 = (0..logs.len())
            .filter(|&j| j != s)
            .map(|j| spec.truth_for.alphas[j] * logs[j])
            .sum();
        logs[s] = (target - spec.truth_for.log10_k - others) / alpha_s;
        let attributes: Vec<f64> = logs.iter().map(|l| 10f64.powf(*l)).collect();
        if attributes.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(Error::Overflow {
                year,
                exponent: logs[s],
            });
        }
        records.push(TechRecord::new(format!("synthetic-{i:04}"), year, attributes));
    }
    Dataset::new(
        spec.schema.clone(),
        records,
        format!(
            "synthetic: n={} seed={} sigma={}",
            spec.n_points, spec.seed, spec.noise_sigma
        ),
    )
}
