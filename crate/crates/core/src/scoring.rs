//! Goodness of fit, information criteria, hindcast MAPE and model ranking.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::fit::{fit, FitConfig, FitResult, VariantOutcome};
use crate::temporal::Variant;

/// `1 − SSE/SST` on the observed log₁₀ FoR values under the fitted gauge.
pub fn r_squared(res: &FitResult) -> Result<f64> {
    if res.n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: res.n });
    }
    let obs = res.observed();
    let mean = obs.iter().sum::<f64>() / obs.len() as f64;
    let sst: f64 = obs.iter().map(|y| (y - mean) * (y - mean)).sum();
    if sst == 0.0 {
        return Err(Error::UndefinedRSquared);
    }
    Ok(1.0 - res.sse / sst)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum BicMode {
    /// `−2L + 2k·ln n`: the penalty counted twice.
    PaperLiteral,
    /// `−2L + k·ln n`.
    #[default]
    Standard,
    /// `(n/σ̂ε²)·[err̄ + (k/n)·σ̂ε²·ln n]` with `err̄ = SSE/(n−1)` and σ̂ε² taken
    /// from a reference fit.
    Gaussian,
}

impl fmt::Display for BicMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BicMode::PaperLiteral => "paper-literal",
            BicMode::Standard => "standard",
            BicMode::Gaussian => "gaussian",
        })
    }
}

impl FromStr for BicMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper-literal" => Ok(BicMode::PaperLiteral),
            "standard" => Ok(BicMode::Standard),
            "gaussian" => Ok(BicMode::Gaussian),
            other => Err(Error::Config(format!("unknown BIC mode `{other}`"))),
        }
    }
}

/// A BIC value; `degenerate` marks a zero residual variance, where the value
/// is an infinite sentinel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BicScore {
    pub value: f64,
    pub degenerate: bool,
}

/// Maximized Gaussian log-likelihood `−(n/2)(ln(2πσ̂²) + 1)`, σ̂² = SSE/n.
pub fn gaussian_log_likelihood(sse: f64, n: usize) -> f64 {
    let n = n as f64;
    -(n / 2.0) * ((2.0 * PI * sse / n).ln() + 1.0)
}

/// BIC of a fit from its SSE, point count and parameter count.
/// `reference_variance` is required for [`BicMode::Gaussian`] only.
pub fn bic_from_sse(sse: f64, n: usize, k: usize, mode: BicMode, reference_variance: Option<f64>) -> Result<BicScore> {
    if n <= k {
        return Err(Error::InsufficientData { needed: k + 1, got: n });
    }
    let ln_n = (n as f64).ln();
    let kf = k as f64;
    match mode {
        BicMode::Standard | BicMode::PaperLiteral => {
            if sse == 0.0 {
                return Ok(BicScore {
                    value: f64::NEG_INFINITY,
                    degenerate: true,
                });
            }
            let standard = -2.0 * gaussian_log_likelihood(sse, n) + kf * ln_n;
            let value = match mode {
                BicMode::Standard => standard,
                _ => standard + kf * ln_n,
            };
            Ok(BicScore {
                value,
                degenerate: false,
            })
        }
        BicMode::Gaussian => {
            let var =
                reference_variance.ok_or_else(|| Error::Config("gaussian BIC needs a reference variance".into()))?;
            if var.is_nan() || var < 0.0 {
                return Err(Error::Config(format!("reference variance {var} must be >= 0")));
            }
            if var == 0.0 {
                let value = if sse == 0.0 { f64::NEG_INFINITY } else { f64::INFINITY };
                return Ok(BicScore {
                    value,
                    degenerate: true,
                });
            }
            let nf = n as f64;
            let err_bar = sse / (nf - 1.0);
            Ok(BicScore {
                value: (nf / var) * (err_bar + (kf / nf) * var * ln_n),
                degenerate: false,
            })
        }
    }
}

pub fn bic(res: &FitResult, mode: BicMode, reference_variance: Option<f64>) -> Result<BicScore> {
    bic_from_sse(res.sse, res.n, res.param_count, mode, reference_variance)
}

/// Mean of `|predᵢ − obsᵢ| / |obsᵢ|`.
pub fn mape(observed: &[f64], predicted: &[f64]) -> Result<f64> {
    if observed.len() != predicted.len() {
        return Err(Error::LengthMismatch(format!(
            "{} observed vs {} predicted values",
            observed.len(),
            predicted.len()
        )));
    }
    if observed.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let mut total = 0.0;
    for (i, (o, p)) in observed.iter().zip(predicted).enumerate() {
        if *o == 0.0 {
            return Err(Error::ZeroObserved { index: i });
        }
        total += (p - o).abs() / o.abs();
    }
    Ok(total / observed.len() as f64)
}

/// Which log₁₀ FoR values the hindcast MAPE is taken on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum MapeBasis {
    /// log₁₀ FoR minus the anchor value, i.e. log₁₀ of FoR relative to the
    /// curve's value at the anchor year. Invariant under gauge and anchor.
    #[default]
    AnchorRelative,
    /// log₁₀ FoR as reported under the anchor convention.
    Log10,
}

/// Train on records up to `cutoff`, score on `[eval_lo, eval_hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HindcastWindow {
    pub cutoff: f64,
    pub eval_lo: f64,
    pub eval_hi: f64,
}

impl HindcastWindow {
    /// Forecaster at 1800 scored on 1800–1900 and 1800–2015; forecaster at
    /// 1900 scored on 1900–2015.
    pub fn standard() -> Vec<HindcastWindow> {
        vec![
            HindcastWindow {
                cutoff: 1800.0,
                eval_lo: 1800.0,
                eval_hi: 1900.0,
            },
            HindcastWindow {
                cutoff: 1800.0,
                eval_lo: 1800.0,
                eval_hi: 2015.0,
            },
            HindcastWindow {
                cutoff: 1900.0,
                eval_lo: 1900.0,
                eval_hi: 2015.0,
            },
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowMape {
    pub window: HindcastWindow,
    pub mape: f64,
    pub n_train: usize,
    pub n_eval: usize,
    /// Latest year in the training subset; never exceeds the cutoff.
    pub max_train_year: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HindcastReport {
    pub windows: Vec<WindowMape>,
    pub mape_avg: f64,
}

/// Refits on each truncated history and scores the extrapolation.
///
/// For each window both the FoR exponents and the temporal parameters are
/// refit on records with `year <= cutoff`; the evaluation records are scored
/// with that window's FoR (observed) against its temporal curve (predicted).
/// Each training subset must hold at least `param_count + 2` records.
pub fn hindcast_mape(
    d: &Dataset,
    variant: Variant,
    cfg: &FitConfig,
    windows: &[HindcastWindow],
    basis: MapeBasis,
) -> Result<HindcastReport> {
    let results: Vec<Result<WindowMape>> = windows
        .par_iter()
        .enumerate()
        .map(|(index, w)| {
            score_window(d, variant, cfg, w, basis).map_err(|e| Error::Window {
                index,
                cutoff: w.cutoff,
                source: Box::new(e),
            })
        })
        .collect();
    let windows = results.into_iter().collect::<Result<Vec<_>>>()?;
    let mape_avg = windows.iter().map(|w| w.mape).sum::<f64>() / windows.len().max(1) as f64;
    Ok(HindcastReport { windows, mape_avg })
}

fn score_window(
    d: &Dataset,
    variant: Variant,
    cfg: &FitConfig,
    w: &HindcastWindow,
    basis: MapeBasis,
) -> Result<WindowMape> {
    let train = d.truncate_at(w.cutoff);
    let max_train_year = train.year_span().map_or(f64::NEG_INFINITY, |s| s.1);
    assert!(max_train_year <= w.cutoff, "training data beyond cutoff");

    let needed = variant.param_count(d.schema().count()) + 2;
    if train.len() < needed {
        return Err(Error::InsufficientData {
            needed,
            got: train.len(),
        });
    }
    let fitted = fit(&train, variant, cfg)?;
    let eval = d.filter_years(w.eval_lo, w.eval_hi);
    if eval.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let base = match basis {
        MapeBasis::AnchorRelative => cfg.anchor_value,
        MapeBasis::Log10 => 0.0,
    };
    let observed: Vec<f64> = eval
        .records()
        .iter()
        .map(|r| fitted.for_model.eval_log10(r) - base)
        .collect();
    let predicted = eval
        .records()
        .iter()
        .map(|r| Ok(fitted.temporal.eval(r.year)? - base))
        .collect::<Result<Vec<f64>>>()?;
    Ok(WindowMape {
        window: *w,
        mape: mape(&observed, &predicted)?,
        n_train: train.len(),
        n_eval: eval.len(),
        max_train_year,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreConfig {
    /// Criterion used for ranking.
    pub bic_mode: BicMode,
    /// σ̂ε² for gaussian BIC; `None` takes it from the lowest-SSE fit.
    pub reference_variance: Option<f64>,
    pub windows: Vec<HindcastWindow>,
    pub mape_basis: MapeBasis,
}

impl Default for ScoreConfig {
    fn default() -> Self {
        Self {
            bic_mode: BicMode::Standard,
            reference_variance: None,
            windows: HindcastWindow::standard(),
            mape_basis: MapeBasis::AnchorRelative,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub variant: Variant,
    pub r2: f64,
    pub bic_paper: f64,
    pub bic_standard: f64,
    pub bic_gaussian: f64,
    /// Set when any BIC reading hit the zero-variance sentinel.
    pub bic_degenerate: bool,
    pub mape_avg: Option<f64>,
    pub mape_windows: Vec<WindowMape>,
    /// Why the hindcast could not be computed, when it could not.
    pub mape_error: Option<String>,
    pub param_count: usize,
    pub n: usize,
}

impl ScoreReport {
    pub fn bic(&self, mode: BicMode) -> f64 {
        match mode {
            BicMode::PaperLiteral => self.bic_paper,
            BicMode::Standard => self.bic_standard,
            BicMode::Gaussian => self.bic_gaussian,
        }
    }
}

/// σ̂ε² = SSE/(n − k) of the lowest-SSE successful fit.
pub fn reference_variance(fits: &[VariantOutcome]) -> Option<f64> {
    fits.iter()
        .filter_map(|(_, r)| r.as_ref().ok())
        .min_by(|a, b| a.sse.total_cmp(&b.sse).then(a.variant.cmp(&b.variant)))
        .map(|best| best.sse / (best.n - best.param_count) as f64)
}

/// Scores one fit. The hindcast is attempted; its failure is recorded in the
/// report rather than returned.
pub fn score(
    d: &Dataset,
    res: &FitResult,
    fit_cfg: &FitConfig,
    cfg: &ScoreConfig,
    reference_var: Option<f64>,
) -> Result<ScoreReport> {
    let r2 = r_squared(res)?;
    let literal = bic(res, BicMode::PaperLiteral, None)?;
    let standard = bic(res, BicMode::Standard, None)?;
    let gaussian = bic(
        res,
        BicMode::Gaussian,
        Some(reference_var.unwrap_or(res.sse / (res.n - res.param_count) as f64)),
    )?;
    let (mape_avg, mape_windows, mape_error) =
        match hindcast_mape(d, res.variant, fit_cfg, &cfg.windows, cfg.mape_basis) {
            Ok(h) => (Some(h.mape_avg), h.windows, None),
            Err(e) => (None, vec![], Some(e.to_string())),
        };
    Ok(ScoreReport {
        variant: res.variant,
        r2,
        bic_paper: literal.value,
        bic_standard: standard.value,
        bic_gaussian: gaussian.value,
        bic_degenerate: literal.degenerate || standard.degenerate || gaussian.degenerate,
        mape_avg,
        mape_windows,
        mape_error,
        param_count: res.param_count,
        n: res.n,
    })
}

/// Scores every successful fit; failed fits pass their error through.
pub fn score_all(
    d: &Dataset,
    fits: &[VariantOutcome],
    fit_cfg: &FitConfig,
    cfg: &ScoreConfig,
) -> Vec<(Variant, Result<ScoreReport>)> {
    let ref_var = cfg.reference_variance.or_else(|| reference_variance(fits));
    fits.par_iter()
        .map(|(v, r)| {
            let scored = match r {
                Ok(res) => score(d, res, fit_cfg, cfg, ref_var),
                Err(e) => Err(Error::Config(format!("fit failed: {e}"))),
            };
            (*v, scored)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositeEntry {
    pub variant: Variant,
    /// Mean 1-based position over the criteria that were available.
    pub mean_position: f64,
    pub bic_position: usize,
    pub r2_position: usize,
    pub mape_position: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ranking {
    pub bic_mode: BicMode,
    pub by_bic: Vec<Variant>,
    pub by_r2: Vec<Variant>,
    /// Empty when no variant has a hindcast MAPE.
    pub by_mape: Vec<Variant>,
    pub composite: Vec<CompositeEntry>,
}

fn tie_break(a: &ScoreReport, b: &ScoreReport) -> Ordering {
    a.param_count.cmp(&b.param_count).then(a.variant.cmp(&b.variant))
}

/// Orders variants by BIC (ascending), R² (descending) and MAPE (ascending),
/// plus a composite by mean position. Ties go to fewer parameters, then to
/// the earlier variant letter.
pub fn rank(reports: &[ScoreReport], bic_mode: BicMode) -> Ranking {
    let order = |cmp: &dyn Fn(&ScoreReport, &ScoreReport) -> Ordering| -> Vec<Variant> {
        let mut idx: Vec<&ScoreReport> = reports.iter().collect();
        idx.sort_by(|a, b| cmp(a, b).then_with(|| tie_break(a, b)));
        idx.iter().map(|r| r.variant).collect()
    };
    let by_bic = order(&|a, b| a.bic(bic_mode).total_cmp(&b.bic(bic_mode)));
    let by_r2 = order(&|a, b| b.r2.total_cmp(&a.r2));
    let any_mape = reports.iter().any(|r| r.mape_avg.is_some());
    let by_mape = if any_mape {
        order(&|a, b| {
            a.mape_avg
                .unwrap_or(f64::INFINITY)
                .total_cmp(&b.mape_avg.unwrap_or(f64::INFINITY))
        })
    } else {
        vec![]
    };

    let position = |list: &[Variant], v: Variant| list.iter().position(|x| *x == v).map(|p| p + 1);
    let mut composite: Vec<CompositeEntry> = reports
        .iter()
        .map(|r| {
            let bic_position = position(&by_bic, r.variant).unwrap();
            let r2_position = position(&by_r2, r.variant).unwrap();
            let mape_position = position(&by_mape, r.variant);
            let (sum, count) = match mape_position {
                Some(m) => (bic_position + r2_position + m, 3),
                None => (bic_position + r2_position, 2),
            };
            CompositeEntry {
                variant: r.variant,
                mean_position: sum as f64 / count as f64,
                bic_position,
                r2_position,
                mape_position,
            }
        })
        .collect();
    let lookup = |v: Variant| reports.iter().find(|r| r.variant == v).unwrap();
    composite.sort_by(|a, b| {
        a.mean_position
            .total_cmp(&b.mean_position)
            .then_with(|| tie_break(lookup(a.variant), lookup(b.variant)))
    });

    Ranking {
        bic_mode,
        by_bic,
        by_r2,
        by_mape,
        composite,
    }
}
