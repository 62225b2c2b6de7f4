//! Joint least-squares fit of FoR exponents and a temporal law.
//!
//! The objective is `Σᵢ (log₁₀ f(xᵢ) − g(tᵢ))²`. It has two exact
//! degeneracies:
//!
//! * scale: multiplying every exponent, log k and g by the same factor keeps
//!   zero-residual solutions at zero and drives plain least squares to the
//!   trivial all-zero model. The solve therefore pins α₁ = 1 and rescales
//!   afterwards to [`FitConfig::gauge_alpha1`].
//! * offset: log k and the additive constant of g only enter as their
//!   difference. One combined constant is estimated; the anchor convention
//!   (`g(anchor_year) = anchor_value`) decides the split, and log k takes the
//!   remainder.
//!
//! With α₁ pinned the residual is `log x₁ − (g(t) − log k − Σⱼ αⱼ log xⱼ)`, i.e.
//! an ordinary regression of log x₁ on the remaining log-attributes and the
//! temporal basis. A, B and E are a single linear solve. C and D have one
//! nonlinear parameter (inflection year, rate) which is profiled on a grid and
//! refined by golden-section search.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::formodel::{ForModel, GaugeConvention};
use crate::lstsq;
use crate::temporal::{TemporalModel, Variant, DEFAULT_BREAKPOINT};

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Grid for a profiled nonlinear parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileGrid {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
    /// Points spaced evenly in log space (requires `lo > 0`).
    #[serde(default)]
    pub log_spaced: bool,
}

impl ProfileGrid {
    pub fn linear(lo: f64, hi: f64, steps: usize) -> Self {
        Self {
            lo,
            hi,
            steps,
            log_spaced: false,
        }
    }

    pub fn log(lo: f64, hi: f64, steps: usize) -> Self {
        Self {
            lo,
            hi,
            steps,
            log_spaced: true,
        }
    }

    fn validate(&self, what: &str) -> Result<()> {
        if self.steps < 3 {
            return Err(Error::Config(format!("{what} grid needs at least 3 steps")));
        }
        if !self.lo.is_finite() || !self.hi.is_finite() || self.lo >= self.hi {
            return Err(Error::Config(format!("{what} grid needs finite lo < hi")));
        }
        if self.log_spaced && self.lo <= 0.0 {
            return Err(Error::Config(format!("{what} log-spaced grid needs lo > 0")));
        }
        Ok(())
    }

    /// Grid coordinates in search space (log₁₀ for log-spaced grids).
    fn coords(&self) -> Vec<f64> {
        let (lo, hi) = self.search_bounds();
        let step = (hi - lo) / (self.steps - 1) as f64;
        (0..self.steps).map(|i| lo + step * i as f64).collect()
    }

    fn search_bounds(&self) -> (f64, f64) {
        if self.log_spaced {
            (self.lo.log10(), self.hi.log10())
        } else {
            (self.lo, self.hi)
        }
    }

    fn to_param(self, coord: f64) -> f64 {
        if self.log_spaced {
            10f64.powf(coord)
        } else {
            coord
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub gauge_alpha1: f64,
    pub anchor_year: f64,
    /// Target of the fitted temporal curve at `anchor_year`, in log₁₀ units.
    pub anchor_value: f64,
    pub breakpoint: f64,
    /// Inflection-year grid for model C.
    pub cubic_grid: ProfileGrid,
    /// Rate grid for model D.
    pub double_exp_grid: ProfileGrid,
    /// Golden-section iterations after the grid pass.
    pub refine_iters: usize,
    /// Fix model B's vertex instead of fitting it.
    #[serde(default)]
    pub pin_vertex: Option<f64>,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            gauge_alpha1: 2.0,
            anchor_year: 1200.0,
            anchor_value: 1.0,
            breakpoint: DEFAULT_BREAKPOINT,
            cubic_grid: ProfileGrid::linear(-1000.0, 1400.0, 481),
            double_exp_grid: ProfileGrid::log(1e-4, 10f64.powf(-1.5), 200),
            refine_iters: 40,
            pin_vertex: None,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if self.gauge_alpha1 == 0.0 || !self.gauge_alpha1.is_finite() {
            return Err(Error::Config("gauge_alpha1 must be finite and non-zero".into()));
        }
        for (name, v) in [
            ("anchor_year", self.anchor_year),
            ("anchor_value", self.anchor_value),
            ("breakpoint", self.breakpoint),
        ] {
            if !v.is_finite() {
                return Err(Error::Config(format!("{name} must be finite")));
            }
        }
        if self.pin_vertex.is_some_and(|v| !v.is_finite()) {
            return Err(Error::Config("pinned vertex must be finite".into()));
        }
        self.cubic_grid.validate("inflection-year")?;
        self.double_exp_grid.validate("rate")?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualRow {
    pub year: f64,
    pub observed: f64,
    pub predicted: f64,
    pub residual: f64,
}

/// How the raw α₁ = 1 solution was normalized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaugeApplied {
    /// Factor applied to exponents, log k and the temporal output.
    pub scale: f64,
    /// Additive shift applied to both log k and the temporal output.
    pub anchor_shift: f64,
    pub alpha1_target: f64,
    pub anchor_year: f64,
    pub anchor_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub variant: Variant,
    pub for_model: ForModel,
    pub temporal: TemporalModel,
    pub residuals: Vec<ResidualRow>,
    pub sse: f64,
    pub n: usize,
    pub param_count: usize,
    /// False when a profiled parameter ended on the edge of its grid.
    pub converged: bool,
    pub gauge_applied: GaugeApplied,
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl FitResult {
    pub fn observed(&self) -> Vec<f64> {
        self.residuals.iter().map(|r| r.observed).collect()
    }

    pub fn predicted(&self) -> Vec<f64> {
        self.residuals.iter().map(|r| r.predicted).collect()
    }

    /// Residual table as CSV `year,observed,predicted,residual`.
    pub fn residuals_csv(&self) -> String {
        let mut out = String::from("year,observed,predicted,residual\n");
        for r in &self.residuals {
            out.push_str(&format!("{},{},{},{}\n", r.year, r.observed, r.predicted, r.residual));
        }
        out
    }
}

/// Log-space view of a dataset, shared by every solve on it.
struct Prepared {
    years: Vec<f64>,
    /// log₁₀ of the gauge attribute (α₁ pinned to 1): the regression response.
    response: Vec<f64>,
    /// log₁₀ of each remaining attribute, one column per attribute.
    attrs: Vec<Vec<f64>>,
    attr_names: Vec<String>,
    /// Centering year for the temporal basis.
    t_ref: f64,
}

impl Prepared {
    fn new(d: &Dataset) -> Self {
        let years = d.years();
        let logs: Vec<Vec<f64>> = d.records().iter().map(|r| r.log_attributes()).collect();
        let m = d.schema().count();
        let response = logs.iter().map(|l| l[0]).collect();
        let attrs = (1..m).map(|j| logs.iter().map(|l| l[j]).collect()).collect();
        let t_ref = if years.is_empty() {
            0.0
        } else {
            years.iter().sum::<f64>() / years.len() as f64
        };
        Self {
            years,
            response,
            attrs,
            attr_names: d.schema().columns()[1..].to_vec(),
            t_ref,
        }
    }

    fn centered(&self, at: f64) -> Vec<f64> {
        self.years.iter().map(|t| t - at).collect()
    }
}

/// Coefficients of one linear solve, split by role.
#[derive(Debug, Clone)]
struct LinearFit {
    constants: Vec<f64>,
    /// Exponents α₂..αₙ (α₁ = 1).
    alphas: Vec<f64>,
    temporal: Vec<f64>,
    sse: f64,
}

type Basis = Vec<(String, Vec<f64>)>;

fn linear_fit(p: &Prepared, constants: Basis, temporal: Basis) -> Result<LinearFit> {
    let n_const = constants.len();
    let n_attr = p.attrs.len();
    let mut names: Vec<String> = Vec::new();
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for (name, col) in constants {
        names.push(name);
        columns.push(col);
    }
    for (name, col) in p.attr_names.iter().zip(&p.attrs) {
        names.push(format!("log10({name})"));
        columns.push(col.clone());
    }
    for (name, col) in temporal {
        names.push(name);
        columns.push(col);
    }
    let sol = lstsq::solve(&columns, &p.response).map_err(|rd| Error::Degenerate {
        columns: rd.columns.iter().map(|&j| names[j].clone()).collect(),
    })?;
    let beta = sol.coefficients;
    Ok(LinearFit {
        constants: beta[..n_const].to_vec(),
        // the regression coefficient of log xⱼ is −αⱼ
        alphas: beta[n_const..n_const + n_attr].iter().map(|b| -b).collect(),
        temporal: beta[n_const + n_attr..].to_vec(),
        sse: sol.sse,
    })
}

/// Raw (α₁ = 1, log k = 0) solution before gauge and anchor normalization.
struct RawFit {
    alphas: Vec<f64>,
    temporal: TemporalModel,
    param_count: usize,
    converged: bool,
    warnings: Vec<String>,
}

/// Fits one temporal variant jointly with the FoR exponents.
pub fn fit(d: &Dataset, variant: Variant, cfg: &FitConfig) -> Result<FitResult> {
    cfg.validate()?;
    let p = Prepared::new(d);
    let m = d.schema().count();
    let raw = match variant {
        Variant::A => fit_exponential(&p, m)?,
        Variant::B => match cfg.pin_vertex {
            Some(v) => fit_quadratic_pinned(&p, m, v)?,
            None => fit_quadratic(&p, m)?,
        },
        Variant::C => fit_cubic(&p, m, cfg)?,
        Variant::D => fit_double_exponential(&p, m, cfg)?,
        Variant::E => fit_piecewise(&p, m, cfg.breakpoint)?,
    };
    finalize(d, variant, raw, cfg)
}

/// Enforces `n > param_count` before any solve.
fn require_points(p: &Prepared, param_count: usize) -> Result<()> {
    let needed = param_count + 1;
    if p.years.len() < needed {
        return Err(Error::InsufficientData {
            needed,
            got: p.years.len(),
        });
    }
    Ok(())
}

fn intercept(p: &Prepared) -> Basis {
    vec![("intercept".into(), vec![1.0; p.years.len()])]
}

fn fit_exponential(p: &Prepared, m: usize) -> Result<RawFit> {
    let k = Variant::A.param_count(m);
    require_points(p, k)?;
    let lf = linear_fit(p, intercept(p), vec![("t".into(), p.centered(p.t_ref))])?;
    let slope = lf.temporal[0];
    Ok(RawFit {
        alphas: lf.alphas,
        temporal: TemporalModel::Exponential {
            slope,
            intercept: lf.constants[0] - slope * p.t_ref,
        },
        param_count: k,
        converged: true,
        warnings: vec![],
    })
}

fn fit_quadratic(p: &Prepared, m: usize) -> Result<RawFit> {
    let k = Variant::B.param_count(m);
    require_points(p, k)?;
    let u = p.centered(p.t_ref);
    let u2 = u.iter().map(|x| x * x).collect();
    let lf = linear_fit(p, intercept(p), vec![("t".into(), u), ("t^2".into(), u2)])?;
    let (b1, b2) = (lf.temporal[0], lf.temporal[1]);
    let mut warnings = vec![];
    let temporal = if b2 == 0.0 {
        if b1 != 0.0 {
            warnings.push("zero curvature: linear trend is not representable in the quadratic form".into());
        }
        TemporalModel::QuadraticExponential {
            vertex_year: p.t_ref,
            curvature: 0.0,
            offset: lf.constants[0],
        }
    } else {
        let shift = -b1 / (2.0 * b2);
        TemporalModel::QuadraticExponential {
            vertex_year: p.t_ref + shift,
            curvature: b2,
            offset: lf.constants[0] - b2 * shift * shift,
        }
    };
    if let TemporalModel::QuadraticExponential { vertex_year, .. } = temporal {
        let span = p.years.last().unwrap() - p.years.first().unwrap();
        if (vertex_year - p.t_ref).abs() > 100.0 * span.max(1.0) {
            warnings.push(format!(
                "vertex year {vertex_year:.0} lies far outside the data; the fit is effectively exponential"
            ));
        }
    }
    Ok(RawFit {
        alphas: lf.alphas,
        temporal,
        param_count: k,
        converged: true,
        warnings,
    })
}

fn fit_quadratic_pinned(p: &Prepared, m: usize, vertex: f64) -> Result<RawFit> {
    // the vertex is fixed, so one shape parameter fewer
    let k = Variant::B.param_count(m) - 1;
    require_points(p, k)?;
    let lf = quadratic_at_vertex(p, vertex)?;
    Ok(RawFit {
        alphas: lf.alphas,
        temporal: TemporalModel::QuadraticExponential {
            vertex_year: vertex,
            curvature: lf.temporal[0],
            offset: lf.constants[0],
        },
        param_count: k,
        converged: true,
        warnings: vec![],
    })
}

fn quadratic_at_vertex(p: &Prepared, vertex: f64) -> Result<LinearFit> {
    let sq = p.years.iter().map(|t| (t - vertex) * (t - vertex)).collect();
    linear_fit(p, intercept(p), vec![("(t-vertex)^2".into(), sq)])
}

fn cubic_at(p: &Prepared, inflection: f64) -> Result<LinearFit> {
    let cube = p.years.iter().map(|t| (t - inflection).powi(3)).collect();
    linear_fit(p, intercept(p), vec![("(t-inflection)^3".into(), cube)])
}

fn fit_cubic(p: &Prepared, m: usize, cfg: &FitConfig) -> Result<RawFit> {
    let k = Variant::C.param_count(m);
    require_points(p, k)?;
    let best = profile(&cfg.cubic_grid, cfg.refine_iters, |theta| cubic_at(p, theta).map(Some))?;
    let mut warnings = vec![];
    if !best.interior {
        warnings.push(format!(
            "inflection year {:.1} is on the edge of the profile grid",
            best.param
        ));
    }
    Ok(RawFit {
        alphas: best.fit.alphas,
        temporal: TemporalModel::CubicExponential {
            inflection_year: best.param,
            coefficient: best.fit.temporal[0],
            offset: best.fit.constants[0],
        },
        param_count: k,
        converged: best.interior,
        warnings,
    })
}

/// Inner solve of model D at a fixed rate; `None` when the fitted amplitude is
/// not positive (no real log-amplitude exists).
fn double_exp_at(p: &Prepared, rate: f64) -> Result<Option<LinearFit>> {
    let growth = p.years.iter().map(|t| (rate * (t - p.t_ref)).exp()).collect();
    let lf = linear_fit(p, intercept(p), vec![("exp(rate*t)".into(), growth)])?;
    Ok((lf.temporal[0] > 0.0).then_some(lf))
}

fn fit_double_exponential(p: &Prepared, m: usize, cfg: &FitConfig) -> Result<RawFit> {
    let k = Variant::D.param_count(m);
    require_points(p, k)?;
    let best = profile(&cfg.double_exp_grid, cfg.refine_iters, |rate| double_exp_at(p, rate))?;
    let mut warnings = vec![];
    if !best.interior {
        warnings.push(format!("rate {:.3e} is on the edge of the profile grid", best.param));
    }
    let amplitude = best.fit.temporal[0];
    Ok(RawFit {
        alphas: best.fit.alphas,
        temporal: TemporalModel::DoubleExponential {
            offset: best.fit.constants[0],
            log_amplitude: amplitude.ln() - best.param * p.t_ref,
            rate: best.param,
        },
        param_count: k,
        converged: best.interior,
        warnings,
    })
}

fn fit_piecewise(p: &Prepared, m: usize, breakpoint: f64) -> Result<RawFit> {
    let pre: Vec<f64> = p
        .years
        .iter()
        .map(|&t| if t <= breakpoint { 1.0 } else { 0.0 })
        .collect();
    let post: Vec<f64> = pre.iter().map(|x| 1.0 - x).collect();
    let n_pre = pre.iter().filter(|x| **x > 0.0).count();
    let n_post = p.years.len() - n_pre;

    if n_pre == 0 || n_post == 0 {
        // Only one segment has data. The other is the continuation of the
        // observed one; its slope and intercept are not free parameters.
        let k = Variant::E.param_count(m) - 2;
        require_points(p, k)?;
        let u = p.centered(breakpoint);
        let lf = linear_fit(p, intercept(p), vec![("t".into(), u)])?;
        let slope = lf.temporal[0];
        let icpt = lf.constants[0] - slope * breakpoint;
        let side = if n_post == 0 { "after" } else { "before" };
        return Ok(RawFit {
            alphas: lf.alphas,
            temporal: TemporalModel::PiecewiseExponential {
                pre_slope: slope,
                pre_intercept: icpt,
                post_slope: slope,
                post_intercept: icpt,
                breakpoint,
            },
            param_count: k,
            converged: true,
            warnings: vec![format!(
                "no records {side} breakpoint {breakpoint}; that segment continues the other"
            )],
        });
    }

    let k = Variant::E.param_count(m);
    require_points(p, k)?;
    let u = p.centered(breakpoint);
    let u_pre = u.iter().zip(&pre).map(|(u, i)| u * i).collect();
    let u_post = u.iter().zip(&post).map(|(u, i)| u * i).collect();
    let lf = linear_fit(
        p,
        vec![("intercept[pre]".into(), pre), ("intercept[post]".into(), post)],
        vec![("t[pre]".into(), u_pre), ("t[post]".into(), u_post)],
    )?;
    let (pre_slope, post_slope) = (lf.temporal[0], lf.temporal[1]);
    Ok(RawFit {
        alphas: lf.alphas,
        temporal: TemporalModel::PiecewiseExponential {
            pre_slope,
            pre_intercept: lf.constants[0] - pre_slope * breakpoint,
            post_slope,
            post_intercept: lf.constants[1] - post_slope * breakpoint,
            breakpoint,
        },
        param_count: k,
        converged: true,
        warnings: vec![],
    })
}

struct ProfileBest {
    param: f64,
    fit: LinearFit,
    /// The grid minimum was not at either end of the grid.
    interior: bool,
}

/// Grid search followed by golden-section refinement between the grid
/// neighbours of the best point. `objective` returns `Ok(None)` for infeasible
/// parameter values. Grid points are evaluated in parallel and reduced by index.
fn profile<F>(grid: &ProfileGrid, refine_iters: usize, objective: F) -> Result<ProfileBest>
where
    F: Fn(f64) -> Result<Option<LinearFit>> + Sync,
{
    let coords = grid.coords();
    let evaluated: Vec<Result<Option<LinearFit>>> = coords.par_iter().map(|&c| objective(grid.to_param(c))).collect();

    let mut best: Option<(usize, LinearFit)> = None;
    let mut first_err: Option<Error> = None;
    for (i, e) in evaluated.into_iter().enumerate() {
        match e {
            Ok(Some(lf)) => {
                if best.as_ref().is_none_or(|(_, b)| lf.sse < b.sse) {
                    best = Some((i, lf));
                }
            }
            Ok(None) => {}
            Err(err) => {
                first_err.get_or_insert(err);
            }
        }
    }
    let Some((i, grid_fit)) = best else {
        return Err(first_err.unwrap_or_else(|| {
            Error::NoFeasibleFit(format!(
                "no feasible point on the profile grid [{}, {}] × {}",
                grid.lo, grid.hi, grid.steps
            ))
        }));
    };
    let interior = i > 0 && i + 1 < coords.len();

    let sse_at = |c: f64| match objective(grid.to_param(c)) {
        Ok(Some(lf)) => (lf.sse, Some(lf)),
        _ => (f64::INFINITY, None),
    };
    let (mut a, mut b) = (coords[i.saturating_sub(1)], coords[(i + 1).min(coords.len() - 1)]);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut lc) = sse_at(c);
    let (mut fd, mut ld) = sse_at(d);
    for _ in 0..refine_iters {
        if fc <= fd {
            b = d;
            (d, fd, ld) = (c, fc, lc);
            c = b - INV_PHI * (b - a);
            (fc, lc) = sse_at(c);
        } else {
            a = c;
            (c, fc, lc) = (d, fd, ld);
            d = a + INV_PHI * (b - a);
            (fd, ld) = sse_at(d);
        }
    }

    let mut winner = (coords[i], grid_fit);
    for (coord, sse, lf) in [(c, fc, lc), (d, fd, ld)] {
        if let Some(lf) = lf {
            if sse < winner.1.sse {
                winner = (coord, lf);
            }
        }
    }
    Ok(ProfileBest {
        param: grid.to_param(winner.0),
        fit: winner.1,
        interior,
    })
}

/// Rescales the α₁ = 1 solution to the configured gauge, anchors the temporal
/// curve and lets log k absorb the anchor shift, then tabulates residuals.
fn finalize(d: &Dataset, variant: Variant, raw: RawFit, cfg: &FitConfig) -> Result<FitResult> {
    let mut alphas = Vec::with_capacity(raw.alphas.len() + 1);
    alphas.push(1.0);
    alphas.extend(raw.alphas);
    let unit = ForModel::new(0.0, alphas)?;
    let (scaled, temporal, scale) = unit.rescale_gauge(&raw.temporal, cfg.gauge_alpha1)?;
    let (temporal, anchor_shift) = temporal.anchor(cfg.anchor_year, cfg.anchor_value)?;
    let for_model = ForModel {
        log10_k: scaled.log10_k + anchor_shift,
        alphas: scaled.alphas,
        gauge: Some(GaugeConvention {
            alpha1_target: cfg.gauge_alpha1,
            anchor_year: cfg.anchor_year,
        }),
    };

    let residuals = d
        .records()
        .iter()
        .map(|r| {
            let observed = for_model.eval_log10(r);
            let predicted = temporal.eval(r.year)?;
            Ok(ResidualRow {
                year: r.year,
                observed,
                predicted,
                residual: observed - predicted,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let sse = residuals.iter().map(|r| r.residual * r.residual).sum();

    let mut warnings = raw.warnings;
    let names = d.schema().names();
    for j in for_model.negative_exponents() {
        let msg = format!("negative exponent {:.4} on `{}`", for_model.alphas[j], names[j]);
        log::warn!("variant {variant}: {msg}");
        warnings.push(msg);
    }

    Ok(FitResult {
        variant,
        for_model,
        temporal,
        residuals,
        sse,
        n: d.len(),
        param_count: raw.param_count,
        converged: raw.converged,
        gauge_applied: GaugeApplied {
            scale,
            anchor_shift,
            alpha1_target: cfg.gauge_alpha1,
            anchor_year: cfg.anchor_year,
            anchor_value: cfg.anchor_value,
        },
        warnings,
    })
}

/// Outcome of one variant inside [`fit_all`].
pub type VariantOutcome = (Variant, Result<FitResult>);

/// Fits the given variants independently; individual failures are kept.
pub fn fit_variants(d: &Dataset, variants: &[Variant], cfg: &FitConfig) -> Result<Vec<VariantOutcome>> {
    cfg.validate()?;
    let outcomes: Vec<VariantOutcome> = variants.par_iter().map(|&v| (v, fit(d, v, cfg))).collect();
    if !outcomes.is_empty() && outcomes.iter().all(|(_, r)| r.is_err()) {
        let failures = outcomes
            .into_iter()
            .map(|(v, r)| (v, r.expect_err("all failed")))
            .collect();
        return Err(Error::AllVariantsFailed(failures));
    }
    Ok(outcomes)
}

/// All five variants.
pub fn fit_all(d: &Dataset, cfg: &FitConfig) -> Result<Vec<VariantOutcome>> {
    fit_variants(d, &Variant::ALL, cfg)
}

/// Model B fitted by profiling the vertex year over `grid` with the inner
/// pinned-vertex solve. Independent of the closed-form quadratic route in
/// [`fit`]; the two must agree in SSE.
pub fn fit_quadratic_by_vertex_profile(d: &Dataset, grid: &ProfileGrid, cfg: &FitConfig) -> Result<FitResult> {
    cfg.validate()?;
    grid.validate("vertex-year")?;
    let p = Prepared::new(d);
    let m = d.schema().count();
    let k = Variant::B.param_count(m);
    require_points(&p, k)?;
    let best = profile(grid, cfg.refine_iters, |v| quadratic_at_vertex(&p, v).map(Some))?;
    let raw = RawFit {
        alphas: best.fit.alphas,
        temporal: TemporalModel::QuadraticExponential {
            vertex_year: best.param,
            curvature: best.fit.temporal[0],
            offset: best.fit.constants[0],
        },
        param_count: k,
        converged: best.interior,
        warnings: vec![],
    };
    finalize(d, Variant::B, raw, cfg)
}
