//! Temporal-dynamics laws for log₁₀ FoR.
//!
//! Every model predicts log₁₀ of the composite index at a calendar year:
//!
//! | variant | law |
//! |---|---|
//! | A exponential | `intercept + slope·t` |
//! | B quadratic-exponential | `offset + curvature·(t − vertex)²` |
//! | C cubic-exponential | `offset + coefficient·(t − inflection)³` |
//! | D double-exponential | `offset + exp(log_amplitude + rate·t)` |
//! | E piecewise-exponential | two independent affine segments split at `breakpoint` (inclusive on the left) |
//!
//! B and C carry an explicit additive offset; in a joint fit it cannot be told
//! apart from the FoR coefficient, and the anchor convention decides the split.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Natural-log exponent above which model D is reported as overflowing.
pub const DOUBLE_EXP_LIMIT: f64 = 700.0;

/// Default breakpoint year for model E.
pub const DEFAULT_BREAKPOINT: f64 = 1832.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Variant {
    A,
    B,
    C,
    D,
    E,
}

impl Variant {
    pub const ALL: [Variant; 5] = [Variant::A, Variant::B, Variant::C, Variant::D, Variant::E];

    pub fn describe(self) -> &'static str {
        match self {
            Variant::A => "exponential",
            Variant::B => "quadratic-exponential",
            Variant::C => "cubic-exponential",
            Variant::D => "double-exponential",
            Variant::E => "piecewise-exponential",
        }
    }

    /// Temporal shape parameters left free once the additive constant has been
    /// merged with the FoR coefficient.
    pub fn shape_params(self) -> usize {
        match self {
            Variant::A => 1,
            Variant::B | Variant::C | Variant::D => 2,
            Variant::E => 3,
        }
    }

    /// Free parameters of the gauge-fixed joint model for `n_attributes`
    /// attributes: the free exponents (all but the pinned first one), one
    /// combined constant and the temporal shape parameters.
    pub fn param_count(self, n_attributes: usize) -> usize {
        n_attributes.saturating_sub(1) + 1 + self.shape_params()
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Variant::A => "A",
            Variant::B => "B",
            Variant::C => "C",
            Variant::D => "D",
            Variant::E => "E",
        };
        f.pad(c)
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(Variant::A),
            "B" => Ok(Variant::B),
            "C" => Ok(Variant::C),
            "D" => Ok(Variant::D),
            "E" => Ok(Variant::E),
            other => Err(Error::Config(format!("unknown temporal variant `{other}`"))),
        }
    }
}

/// A temporal law with concrete parameters, in log₁₀ output units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "TemporalJson", try_from = "TemporalJson")]
pub enum TemporalModel {
    Exponential {
        slope: f64,
        intercept: f64,
    },
    QuadraticExponential {
        vertex_year: f64,
        curvature: f64,
        offset: f64,
    },
    CubicExponential {
        inflection_year: f64,
        coefficient: f64,
        offset: f64,
    },
    /// `offset + exp(log_amplitude + rate·t)`; the inner exponential is natural.
    DoubleExponential {
        offset: f64,
        log_amplitude: f64,
        rate: f64,
    },
    PiecewiseExponential {
        pre_slope: f64,
        pre_intercept: f64,
        post_slope: f64,
        post_intercept: f64,
        breakpoint: f64,
    },
}

impl TemporalModel {
    pub fn variant(&self) -> Variant {
        match self {
            TemporalModel::Exponential { .. } => Variant::A,
            TemporalModel::QuadraticExponential { .. } => Variant::B,
            TemporalModel::CubicExponential { .. } => Variant::C,
            TemporalModel::DoubleExponential { .. } => Variant::D,
            TemporalModel::PiecewiseExponential { .. } => Variant::E,
        }
    }

    /// Predicted log₁₀ FoR at `year`.
    pub fn eval(&self, year: f64) -> Result<f64> {
        Ok(match *self {
            TemporalModel::Exponential { slope, intercept } => intercept + slope * year,
            TemporalModel::QuadraticExponential {
                vertex_year,
                curvature,
                offset,
            } => {
                let d = year - vertex_year;
                offset + curvature * d * d
            }
            TemporalModel::CubicExponential {
                inflection_year,
                coefficient,
                offset,
            } => {
                let d = year - inflection_year;
                offset + coefficient * d * d * d
            }
            TemporalModel::DoubleExponential {
                offset,
                log_amplitude,
                rate,
            } => {
                let exponent = log_amplitude + rate * year;
                if exponent > DOUBLE_EXP_LIMIT {
                    return Err(Error::Overflow { year, exponent });
                }
                offset + exponent.exp()
            }
            TemporalModel::PiecewiseExponential {
                pre_slope,
                pre_intercept,
                post_slope,
                post_intercept,
                breakpoint,
            } => {
                if year <= breakpoint {
                    pre_intercept + pre_slope * year
                } else {
                    post_intercept + post_slope * year
                }
            }
        })
    }

    /// Scales the model's output by `c` at every year.
    pub fn apply_gauge(&self, c: f64) -> Result<Self> {
        if !c.is_finite() || c == 0.0 {
            return Err(Error::GaugeDegenerate(format!(
                "gauge factor {c} must be finite and non-zero"
            )));
        }
        Ok(match *self {
            TemporalModel::Exponential { slope, intercept } => TemporalModel::Exponential {
                slope: c * slope,
                intercept: c * intercept,
            },
            TemporalModel::QuadraticExponential {
                vertex_year,
                curvature,
                offset,
            } => TemporalModel::QuadraticExponential {
                vertex_year,
                curvature: c * curvature,
                offset: c * offset,
            },
            TemporalModel::CubicExponential {
                inflection_year,
                coefficient,
                offset,
            } => TemporalModel::CubicExponential {
                inflection_year,
                coefficient: c * coefficient,
                offset: c * offset,
            },
            TemporalModel::DoubleExponential {
                offset,
                log_amplitude,
                rate,
            } => {
                if c <= 0.0 {
                    return Err(Error::GaugeDegenerate(format!(
                        "double-exponential amplitude cannot absorb non-positive factor {c}"
                    )));
                }
                TemporalModel::DoubleExponential {
                    offset: c * offset,
                    log_amplitude: log_amplitude + c.ln(),
                    rate,
                }
            }
            TemporalModel::PiecewiseExponential {
                pre_slope,
                pre_intercept,
                post_slope,
                post_intercept,
                breakpoint,
            } => TemporalModel::PiecewiseExponential {
                pre_slope: c * pre_slope,
                pre_intercept: c * pre_intercept,
                post_slope: c * post_slope,
                post_intercept: c * post_intercept,
                breakpoint,
            },
        })
    }

    /// Adds `delta` to the output at every year.
    pub fn shift(&self, delta: f64) -> Self {
        let mut m = *self;
        match &mut m {
            TemporalModel::Exponential { intercept, .. } => *intercept += delta,
            TemporalModel::QuadraticExponential { offset, .. }
            | TemporalModel::CubicExponential { offset, .. }
            | TemporalModel::DoubleExponential { offset, .. } => *offset += delta,
            TemporalModel::PiecewiseExponential {
                pre_intercept,
                post_intercept,
                ..
            } => {
                *pre_intercept += delta;
                *post_intercept += delta;
            }
        }
        m
    }

    /// Shifts the additive constant so that `eval(anchor_year) == anchor_value`.
    /// Returns the shifted model and the shift applied.
    pub fn anchor(&self, anchor_year: f64, anchor_value: f64) -> Result<(Self, f64)> {
        let delta = anchor_value - self.eval(anchor_year)?;
        Ok((self.shift(delta), delta))
    }

    /// For model E: whether growth accelerates after the break. `None` for
    /// other variants.
    pub fn accelerates_after_break(&self) -> Option<bool> {
        match *self {
            TemporalModel::PiecewiseExponential {
                pre_slope, post_slope, ..
            } => Some(post_slope > pre_slope),
            _ => None,
        }
    }

    pub fn params(&self) -> BTreeMap<String, f64> {
        let entries: Vec<(&str, f64)> = match *self {
            TemporalModel::Exponential { slope, intercept } => vec![("slope", slope), ("intercept", intercept)],
            TemporalModel::QuadraticExponential {
                vertex_year,
                curvature,
                offset,
            } => vec![
                ("vertex_year", vertex_year),
                ("curvature", curvature),
                ("offset", offset),
            ],
            TemporalModel::CubicExponential {
                inflection_year,
                coefficient,
                offset,
            } => vec![
                ("inflection_year", inflection_year),
                ("coefficient", coefficient),
                ("offset", offset),
            ],
            TemporalModel::DoubleExponential {
                offset,
                log_amplitude,
                rate,
            } => vec![("offset", offset), ("log_amplitude", log_amplitude), ("rate", rate)],
            TemporalModel::PiecewiseExponential {
                pre_slope,
                pre_intercept,
                post_slope,
                post_intercept,
                ..
            } => vec![
                ("pre_slope", pre_slope),
                ("pre_intercept", pre_intercept),
                ("post_slope", post_slope),
                ("post_intercept", post_intercept),
            ],
        };
        entries.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }

    fn breakpoint(&self) -> Option<f64> {
        match *self {
            TemporalModel::PiecewiseExponential { breakpoint, .. } => Some(breakpoint),
            _ => None,
        }
    }

    fn validate(&self) -> Result<()> {
        let all_finite = self.params().values().all(|v| v.is_finite()) && self.breakpoint().is_none_or(f64::is_finite);
        if all_finite {
            Ok(())
        } else {
            Err(Error::Config(format!("non-finite parameter in {self:?}")))
        }
    }
}

/// Wire form: `{variant, params{...}, breakpoint?}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct TemporalJson {
    variant: Variant,
    params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    breakpoint: Option<f64>,
}

impl From<TemporalModel> for TemporalJson {
    fn from(m: TemporalModel) -> Self {
        TemporalJson {
            variant: m.variant(),
            params: m.params(),
            breakpoint: m.breakpoint(),
        }
    }
}

impl TryFrom<TemporalJson> for TemporalModel {
    type Error = Error;

    fn try_from(j: TemporalJson) -> Result<Self> {
        let get = |k: &str| {
            j.params
                .get(k)
                .copied()
                .ok_or_else(|| Error::Config(format!("variant {} is missing parameter `{k}`", j.variant)))
        };
        let m = match j.variant {
            Variant::A => TemporalModel::Exponential {
                slope: get("slope")?,
                intercept: get("intercept")?,
            },
            Variant::B => TemporalModel::QuadraticExponential {
                vertex_year: get("vertex_year")?,
                curvature: get("curvature")?,
                offset: get("offset")?,
            },
            Variant::C => TemporalModel::CubicExponential {
                inflection_year: get("inflection_year")?,
                coefficient: get("coefficient")?,
                offset: get("offset")?,
            },
            Variant::D => TemporalModel::DoubleExponential {
                offset: get("offset")?,
                log_amplitude: get("log_amplitude")?,
                rate: get("rate")?,
            },
            Variant::E => TemporalModel::PiecewiseExponential {
                pre_slope: get("pre_slope")?,
                pre_intercept: get("pre_intercept")?,
                post_slope: get("post_slope")?,
                post_intercept: get("post_intercept")?,
                breakpoint: j.breakpoint.unwrap_or(DEFAULT_BREAKPOINT),
            },
        };
        m.validate()?;
        Ok(m)
    }
}
