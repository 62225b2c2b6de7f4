//! Extrapolation to a horizon, gap to the best observed artifact, and R&D
//! scenario arithmetic.
//!
//! Scenario increments follow from the FoR being a power law: multiplying
//! attribute j by `m` adds `αⱼ·log₁₀ m` to log₁₀ FoR, whatever the others do.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dataset::{AttributeSchema, Dataset};
use crate::error::{Error, Result};
use crate::formodel::ForModel;
use crate::temporal::TemporalModel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extrapolation {
    pub horizon: f64,
    pub value: f64,
    pub warning: Option<String>,
}

/// Evaluates the temporal law at `horizon`. With `training_span` given, warns
/// when the horizon is further past the last training year than the span is
/// long.
pub fn extrapolate(tm: &TemporalModel, horizon: f64, training_span: Option<(f64, f64)>) -> Result<Extrapolation> {
    if !horizon.is_finite() {
        return Err(Error::Config(format!("horizon {horizon} is not finite")));
    }
    let value = tm.eval(horizon)?;
    let warning = training_span.and_then(|(first, last)| {
        let span = last - first;
        (horizon - last > span).then(|| {
            let msg = format!(
                "horizon {horizon} is {:.0} years past the data, more than the {:.0}-year training span",
                horizon - last,
                span
            );
            log::warn!("{msg}");
            msg
        })
    });
    Ok(Extrapolation {
        horizon,
        value,
        warning,
    })
}

/// Multiplicative change to each attribute.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub multipliers: Vec<f64>,
    pub rationale: String,
}

/// On-disk scenario: multipliers keyed by attribute name (or CSV column).
/// Attributes left out are unchanged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioFile {
    pub name: String,
    pub multipliers: BTreeMap<String, f64>,
    #[serde(default)]
    pub rationale: String,
}

impl ScenarioFile {
    pub fn resolve(&self, schema: &AttributeSchema) -> Result<Scenario> {
        let mut multipliers = vec![1.0; schema.count()];
        for (key, &m) in &self.multipliers {
            let j = schema
                .index_of(key)
                .ok_or_else(|| Error::Scenario(format!("unknown attribute `{key}`")))?;
            multipliers[j] = m;
        }
        let s = Scenario {
            name: self.name.clone(),
            multipliers,
            rationale: self.rationale.clone(),
        };
        s.validate(schema.count())?;
        Ok(s)
    }

    pub fn from_scenario(s: &Scenario, schema: &AttributeSchema) -> Self {
        Self {
            name: s.name.clone(),
            multipliers: schema
                .names()
                .iter()
                .cloned()
                .zip(s.multipliers.iter().copied())
                .collect(),
            rationale: s.rationale.clone(),
        }
    }
}

impl Scenario {
    fn validate(&self, n: usize) -> Result<()> {
        if self.multipliers.len() != n {
            return Err(Error::Scenario(format!(
                "{} multipliers for {n} attributes",
                self.multipliers.len()
            )));
        }
        if let Some(bad) = self.multipliers.iter().find(|m| !(m.is_finite() && **m > 0.0)) {
            return Err(Error::Scenario(format!("multiplier {bad} must be finite and > 0")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Increment {
    pub attribute: String,
    pub multiplier: f64,
    pub increment: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioIncrements {
    pub scenario: String,
    pub increments: Vec<Increment>,
    pub total: f64,
}

/// `αⱼ·log₁₀(multiplierⱼ)` per attribute, and their sum.
pub fn scenario_increments(m: &ForModel, s: &Scenario, schema: &AttributeSchema) -> Result<ScenarioIncrements> {
    s.validate(m.alphas.len())?;
    let increments: Vec<Increment> = m
        .alphas
        .iter()
        .zip(&s.multipliers)
        .zip(schema.names())
        .map(|((a, mult), name)| Increment {
            attribute: name.clone(),
            multiplier: *mult,
            increment: a * mult.log10(),
        })
        .collect();
    let total = increments.iter().map(|i| i.increment).sum();
    Ok(ScenarioIncrements {
        scenario: s.name.clone(),
        increments,
        total,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub horizon_year: f64,
    pub predicted_log10_for: f64,
    pub max_observed_log10_for: f64,
    pub max_observed_record: String,
    /// predicted − max observed.
    pub gap: f64,
    pub scenario: Option<String>,
    pub scenario_increments: Vec<Increment>,
    pub scenario_total: f64,
    /// scenario_total / gap; absent when the gap is zero.
    pub coverage_ratio: Option<f64>,
    pub warnings: Vec<String>,
}

impl GapReport {
    /// Gap against an externally supplied best observed value.
    pub fn from_values(horizon: Extrapolation, max_observed: f64, record: impl Into<String>) -> Self {
        let warnings = horizon.warning.into_iter().collect();
        GapReport {
            horizon_year: horizon.horizon,
            predicted_log10_for: horizon.value,
            max_observed_log10_for: max_observed,
            max_observed_record: record.into(),
            gap: horizon.value - max_observed,
            scenario: None,
            scenario_increments: vec![],
            scenario_total: 0.0,
            coverage_ratio: None,
            warnings,
        }
    }

    pub fn with_scenario(mut self, inc: ScenarioIncrements) -> Self {
        self.scenario = Some(inc.scenario);
        self.scenario_total = inc.total;
        self.scenario_increments = inc.increments;
        self.coverage_ratio = (self.gap != 0.0).then(|| self.scenario_total / self.gap);
        self
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "predicted log10 FoR at {}: {:.2}\n",
            self.horizon_year, self.predicted_log10_for
        ));
        out.push_str(&format!(
            "best observed log10 FoR:  {:.2} ({})\n",
            self.max_observed_log10_for, self.max_observed_record
        ));
        out.push_str(&format!("gap:                      {:.2}\n", self.gap));
        if let Some(name) = &self.scenario {
            out.push_str(&format!("scenario: {name}\n"));
            for i in &self.scenario_increments {
                out.push_str(&format!(
                    "  {:<10} x{:<6} {:+.2}\n",
                    i.attribute, i.multiplier, i.increment
                ));
            }
            out.push_str(&format!("  total              {:+.2}\n", self.scenario_total));
            match self.coverage_ratio {
                Some(c) => out.push_str(&format!("  coverage of gap    {c:.2}\n")),
                None => out.push_str("  coverage of gap    n/a (zero gap)\n"),
            }
        }
        for w in &self.warnings {
            out.push_str(&format!("warning: {w}\n"));
        }
        out
    }
}

/// Gap between the extrapolated curve at `horizon` and the best record in `d`
/// under `m`.
pub fn gap_to_best(d: &Dataset, m: &ForModel, tm: &TemporalModel, horizon: f64) -> Result<GapReport> {
    let best = d
        .records()
        .iter()
        .map(|r| (m.eval_log10(r), r))
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .ok_or(Error::EmptyDataset)?;
    let ex = extrapolate(tm, horizon, d.year_span())?;
    Ok(GapReport::from_values(ex, best.0, best.1.name.clone()))
}
