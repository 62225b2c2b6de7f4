//! Power-law composite index `FoR = k · ∏ xᵢ^αᵢ`, held in log₁₀ space.

use serde::{Deserialize, Serialize};

use crate::dataset::{AttributeSchema, TechRecord};
use crate::error::{Error, Result};
use crate::temporal::TemporalModel;

/// Gauge and anchor conventions under which a fitted model was reported.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaugeConvention {
    pub alpha1_target: f64,
    pub anchor_year: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForModel {
    /// log₁₀ k; stored in log space since k is of order 10⁻⁶ for the
    /// small-arms fit.
    pub log10_k: f64,
    pub alphas: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauge: Option<GaugeConvention>,
}

impl ForModel {
    pub fn new(log10_k: f64, alphas: Vec<f64>) -> Result<Self> {
        if !log10_k.is_finite() || alphas.iter().any(|a| !a.is_finite()) {
            return Err(Error::Config("FoR coefficients must be finite".into()));
        }
        if alphas.is_empty() {
            return Err(Error::Config("FoR model needs at least one exponent".into()));
        }
        Ok(Self {
            log10_k,
            alphas,
            gauge: None,
        })
    }

    pub fn k(&self) -> f64 {
        10f64.powf(self.log10_k)
    }

    /// `log10_k + Σ αᵢ·log₁₀ xᵢ`.
    pub fn eval_log10_attrs(&self, attributes: &[f64]) -> f64 {
        debug_assert_eq!(attributes.len(), self.alphas.len());
        self.alphas
            .iter()
            .zip(attributes)
            .fold(self.log10_k, |acc, (a, x)| acc + a * x.log10())
    }

    pub fn eval_log10(&self, record: &TechRecord) -> f64 {
        self.eval_log10_attrs(&record.attributes)
    }

    /// Indices of negative exponents. These are reported, never clamped.
    pub fn negative_exponents(&self) -> Vec<usize> {
        self.alphas
            .iter()
            .enumerate()
            .filter(|(_, a)| **a < 0.0)
            .map(|(i, _)| i)
            .collect()
    }

    /// Rescales so that the first exponent equals `target_alpha1`, applying the
    /// same factor to the coupled temporal model. Returns the factor as well.
    pub fn rescale_gauge(&self, coupled: &TemporalModel, target_alpha1: f64) -> Result<(ForModel, TemporalModel, f64)> {
        let alpha1 = self.alphas[0];
        if alpha1 == 0.0 {
            return Err(Error::GaugeDegenerate("first exponent is zero".into()));
        }
        if target_alpha1 == 0.0 || !target_alpha1.is_finite() {
            return Err(Error::GaugeDegenerate(format!("gauge target {target_alpha1}")));
        }
        let c = target_alpha1 / alpha1;
        let temporal = coupled.apply_gauge(c)?;
        let mut alphas: Vec<f64> = self.alphas.iter().map(|a| a * c).collect();
        // land exactly on the target rather than on target/α₁·α₁
        alphas[0] = target_alpha1;
        let scaled = ForModel {
            log10_k: self.log10_k * c,
            alphas,
            gauge: self.gauge,
        };
        Ok((scaled, temporal, c))
    }

    /// Rewrites the small-arms model at the kinetic-energy gauge as
    /// `(2k)·(½·M·V²)·D^α₂·M^(α₃−1)·R^α₄`.
    pub fn to_kinetic_energy_form(&self, schema: &AttributeSchema) -> Result<KineticForm> {
        if !schema.is_small_arms() || self.alphas.len() != 4 {
            return Err(Error::FormUnavailable(
                "requires the (velocity, range, mass, rate) schema".into(),
            ));
        }
        if (self.alphas[0] - 2.0).abs() > 1e-9 {
            return Err(Error::FormUnavailable(format!(
                "velocity exponent is {}, not 2.0",
                self.alphas[0]
            )));
        }
        Ok(KineticForm {
            coefficient: 2.0 * self.k(),
            energy_exponent: self.alphas[0] / 2.0,
            range_exp: self.alphas[1],
            mass_correction_exp: self.alphas[2] - 1.0,
            rate_exp: self.alphas[3],
        })
    }
}

/// The FoR expressed around muzzle kinetic energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KineticForm {
    pub coefficient: f64,
    pub energy_exponent: f64,
    pub range_exp: f64,
    pub mass_correction_exp: f64,
    pub rate_exp: f64,
}

impl KineticForm {
    /// FoR (linear scale) for `(velocity, range, mass, rate)`.
    pub fn eval(&self, attributes: &[f64]) -> f64 {
        let [v, d, m, r] = [attributes[0], attributes[1], attributes[2], attributes[3]];
        let energy = muzzle_energy(v, m);
        self.coefficient
            * energy.powf(self.energy_exponent)
            * d.powf(self.range_exp)
            * m.powf(self.mass_correction_exp)
            * r.powf(self.rate_exp)
    }
}

/// `½·M·V²` in joules.
pub fn muzzle_energy(velocity: f64, mass: f64) -> f64 {
    0.5 * mass * velocity * velocity
}
