use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use regularity_core::reference::{self, SMALL_ARMS_REFERENCE};
use regularity_core::scoring::{hindcast_mape, HindcastReport};
use regularity_core::{
    extrapolate, fit_variants, gap_to_best, generate, scenario_increments, score_all, AttributeSchema, Dataset,
    FitConfig, ForModel, GapReport, Scenario, ScenarioFile, ScoreConfig, SynthSpec, TemporalModel, Variant,
};

use crate::args::{
    Cli, Command, DataArgs, FitArgs, FitOptions, ForecastArgs, ModelSource, PlotArgs, PortfolioArgs, SynthArgs,
};
use crate::plot;
use crate::report::{RunConfig, RunReport};

/// Runs a parsed command line and returns what goes to stdout.
pub fn run(cli: Cli) -> Result<String> {
    match cli.command {
        Command::Fit(a) => cmd_fit(&a),
        Command::Rank(a) => cmd_rank(&a),
        Command::Backtest(a) => cmd_backtest(&a),
        Command::Forecast(a) => cmd_forecast(&a),
        Command::Portfolio(a) => cmd_portfolio(&a),
        Command::Synth(a) => cmd_synth(&a),
        Command::Plot(a) => cmd_plot(&a),
    }
}

/// 2 for fit degeneracy anywhere in the error chain, 1 otherwise.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    let degenerate = err
        .chain()
        .filter_map(|c| c.downcast_ref::<regularity_core::Error>())
        .any(|e| e.is_fit_failure());
    if degenerate {
        2
    } else {
        1
    }
}

pub fn load_dataset(a: &DataArgs) -> Result<Dataset> {
    let schema = match &a.attributes {
        Some(cols) => AttributeSchema::new(cols.clone(), vec![String::new(); cols.len()])?,
        None => AttributeSchema::small_arms(),
    };
    match &a.data {
        Some(path) => Ok(Dataset::load_csv(path, schema).with_context(|| format!("loading {}", path.display()))?),
        None if a.attributes.is_some() => bail!("--attributes needs --data"),
        None => Ok(Dataset::builtin_sample()),
    }
}

pub fn fit_config(o: &FitOptions) -> FitConfig {
    FitConfig {
        gauge_alpha1: o.gauge_alpha,
        anchor_year: o.anchor_year,
        anchor_value: o.anchor_value,
        breakpoint: o.breakpoint,
        pin_vertex: o.pin_vertex,
        ..FitConfig::default()
    }
}

pub fn score_config(o: &FitOptions) -> ScoreConfig {
    ScoreConfig {
        bic_mode: o.bic_mode.into(),
        reference_variance: o.reference_variance,
        mape_basis: o.mape_basis.into(),
        ..ScoreConfig::default()
    }
}

fn dedup(models: &[Variant]) -> Vec<Variant> {
    let mut v = models.to_vec();
    v.sort();
    v.dedup();
    v
}

pub fn run_report(d: &Dataset, o: &FitOptions, models: &[Variant]) -> Result<RunReport> {
    let config = RunConfig {
        models: dedup(models),
        fit: fit_config(o),
        score: score_config(o),
    };
    let fits = fit_variants(d, &config.models, &config.fit)?;
    let scores = score_all(d, &fits, &config.fit, &config.score);
    Ok(RunReport::build(d, config, fits, scores))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    fs::write(path, s).with_context(|| format!("writing {}", path.display()))
}

fn json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn cmd_fit(a: &FitArgs) -> Result<String> {
    let d = load_dataset(&a.data)?;
    let report = run_report(&d, &a.fit, &a.fit.models)?;
    if let Some(dir) = &a.out {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        write_json(&dir.join("report.json"), &report)?;
        fs::write(dir.join("table.csv"), report.table_csv())?;
        for e in &report.variants {
            if let Some(f) = &e.fit {
                fs::write(dir.join(format!("residuals-{}.csv", e.variant)), f.residuals_csv())?;
            }
        }
    }
    if a.json {
        json_string(&report)
    } else {
        Ok(report.to_text())
    }
}

fn cmd_rank(a: &FitArgs) -> Result<String> {
    let d = load_dataset(&a.data)?;
    let report = run_report(&d, &a.fit, &a.fit.models)?;
    if let Some(dir) = &a.out {
        fs::create_dir_all(dir)?;
        write_json(&dir.join("ranking.json"), &report.ranking)?;
    }
    if a.json {
        json_string(&report.ranking)
    } else {
        Ok(report.ranking_text())
    }
}

#[derive(Debug, Serialize)]
struct BacktestEntry {
    variant: Variant,
    hindcast: Option<HindcastReport>,
    error: Option<String>,
}

fn cmd_backtest(a: &FitArgs) -> Result<String> {
    let d = load_dataset(&a.data)?;
    let cfg = fit_config(&a.fit);
    cfg.validate()?;
    let sc = score_config(&a.fit);
    let entries: Vec<BacktestEntry> = dedup(&a.fit.models)
        .into_iter()
        .map(|v| match hindcast_mape(&d, v, &cfg, &sc.windows, sc.mape_basis) {
            Ok(h) => BacktestEntry {
                variant: v,
                hindcast: Some(h),
                error: None,
            },
            Err(e) => BacktestEntry {
                variant: v,
                hindcast: None,
                error: Some(e.to_string()),
            },
        })
        .collect();
    if let Some(dir) = &a.out {
        fs::create_dir_all(dir)?;
        write_json(&dir.join("backtest.json"), &entries)?;
    }
    if a.json {
        return json_string(&entries);
    }
    let mut out = String::from("model  cutoff  evaluated    train  eval  MAPE\n");
    for e in &entries {
        match (&e.hindcast, &e.error) {
            (Some(h), _) => {
                for w in &h.windows {
                    let _ = writeln!(
                        out,
                        "{:<6} {:<7} {}–{:<6} {:>5} {:>5}  {:.4}",
                        e.variant, w.window.cutoff, w.window.eval_lo, w.window.eval_hi, w.n_train, w.n_eval, w.mape
                    );
                }
                let _ = writeln!(out, "{:<6} average {:>33.4}", e.variant, h.mape_avg);
            }
            (None, Some(err)) => {
                let _ = writeln!(out, "{:<6} {err}", e.variant);
            }
            (None, None) => {}
        }
    }
    Ok(out)
}

/// A fitted pair plus the data it describes.
struct Resolved {
    for_model: ForModel,
    temporal: TemporalModel,
    dataset: Dataset,
    label: String,
}

fn resolve_model(s: &ModelSource) -> Result<Resolved> {
    let dataset = load_dataset(&s.data)?;
    if let Some(name) = &s.reference_model {
        if name != SMALL_ARMS_REFERENCE {
            bail!("unknown reference model `{name}` (known: {SMALL_ARMS_REFERENCE})");
        }
        if !dataset.schema().is_small_arms() {
            bail!("reference model `{name}` needs the small-arms attributes");
        }
        return Ok(Resolved {
            for_model: reference::small_arms_for_model(),
            temporal: reference::small_arms_temporal_model(),
            dataset,
            label: name.clone(),
        });
    }
    if let Some(path) = &s.report {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let fit = fit_from_report(&text, s.variant).with_context(|| format!("in {}", path.display()))?;
        if fit.for_model.alphas.len() != dataset.schema().count() {
            bail!(
                "report model has {} exponents but the data has {} attributes",
                fit.for_model.alphas.len(),
                dataset.schema().count()
            );
        }
        return Ok(Resolved {
            label: format!("model {} from {}", fit.variant, path.display()),
            for_model: fit.for_model,
            temporal: fit.temporal,
            dataset,
        });
    }
    let models = match s.variant {
        Some(v) => vec![v],
        None => s.fit.models.clone(),
    };
    let report = run_report(&dataset, &s.fit, &models)?;
    let fit = match s.variant {
        Some(v) => report.fit_for(v),
        None => report.preferred(),
    }
    .ok_or_else(|| anyhow!("no model could be fitted"))?
    .clone();
    Ok(Resolved {
        label: format!("model {} refit", fit.variant),
        for_model: fit.for_model,
        temporal: fit.temporal,
        dataset,
    })
}

#[derive(Deserialize)]
struct LoadedVariant {
    variant: Variant,
    fit: Option<regularity_core::FitResult>,
}

#[derive(Deserialize)]
struct LoadedComposite {
    variant: Variant,
}

#[derive(Deserialize)]
struct LoadedRanking {
    composite: Vec<LoadedComposite>,
}

#[derive(Deserialize)]
struct LoadedReport {
    schema_version: u32,
    variants: Vec<LoadedVariant>,
    ranking: Option<LoadedRanking>,
}

/// Pulls one fit out of a report, reading only the fields it needs (scores
/// may hold nulls for non-finite BIC values).
fn fit_from_report(text: &str, variant: Option<Variant>) -> Result<regularity_core::FitResult> {
    let r: LoadedReport = serde_json::from_str(text).context("not a fit report")?;
    if r.schema_version != crate::report::SCHEMA_VERSION {
        bail!("report schema version {} is not supported", r.schema_version);
    }
    let wanted = variant
        .or_else(|| r.ranking.as_ref().and_then(|k| k.composite.first()).map(|c| c.variant))
        .or_else(|| r.variants.iter().find(|v| v.fit.is_some()).map(|v| v.variant))
        .ok_or_else(|| anyhow!("report holds no fitted model"))?;
    r.variants
        .into_iter()
        .find(|v| v.variant == wanted)
        .and_then(|v| v.fit)
        .ok_or_else(|| anyhow!("report has no fit for model {wanted}"))
}

fn load_scenario(path: &Path, schema: &AttributeSchema) -> Result<Scenario> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file: ScenarioFile =
        serde_json::from_str(&text).with_context(|| format!("parsing scenario {}", path.display()))?;
    Ok(file.resolve(schema)?)
}

pub fn forecast_report(
    r_for: &ForModel,
    tm: &TemporalModel,
    d: &Dataset,
    horizon: f64,
    max_observed: Option<f64>,
    scenario: Option<&Scenario>,
) -> Result<GapReport> {
    let gap = match max_observed {
        Some(best) => {
            let ex = extrapolate(tm, horizon, d.year_span())?;
            GapReport::from_values(ex, best, "supplied")
        }
        None => gap_to_best(d, r_for, tm, horizon)?,
    };
    Ok(match scenario {
        Some(s) => gap.with_scenario(scenario_increments(r_for, s, d.schema())?),
        None => gap,
    })
}

fn cmd_forecast(a: &ForecastArgs) -> Result<String> {
    let r = resolve_model(&a.source)?;
    let scenario = a
        .scenario
        .as_ref()
        .map(|p| load_scenario(p, r.dataset.schema()))
        .transpose()?;
    let gap = forecast_report(
        &r.for_model,
        &r.temporal,
        &r.dataset,
        a.horizon,
        a.max_observed,
        scenario.as_ref(),
    )?;
    if let Some(path) = &a.out {
        write_json(path, &gap)?;
    }
    if a.json {
        json_string(&gap)
    } else {
        Ok(format!("model: {}\n{}", r.label, gap.to_text()))
    }
}

fn cmd_portfolio(a: &PortfolioArgs) -> Result<String> {
    let r = resolve_model(&a.source)?;
    let s = load_scenario(&a.scenario, r.dataset.schema())?;
    let inc = scenario_increments(&r.for_model, &s, r.dataset.schema())?;
    if let Some(path) = &a.out {
        write_json(path, &inc)?;
    }
    if a.json {
        return json_string(&inc);
    }
    let mut out = format!("scenario: {}\n", inc.scenario);
    for i in &inc.increments {
        let _ = writeln!(out, "  {:<10} x{:<6} {:+.2}", i.attribute, i.multiplier, i.increment);
    }
    let _ = writeln!(out, "  total              {:+.2}", inc.total);
    Ok(out)
}

#[derive(Debug, Deserialize)]
struct Truth {
    for_model: ForModel,
    temporal: TemporalModel,
}

fn cmd_synth(a: &SynthArgs) -> Result<String> {
    let (truth_for, truth_temporal) = match &a.truth {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            let t: Truth = serde_json::from_str(&text).context("parsing truth model")?;
            (t.for_model, t.temporal)
        }
        None => (
            reference::small_arms_for_model(),
            reference::small_arms_temporal_model(),
        ),
    };
    let n_attr = truth_for.alphas.len();
    let mut spec = SynthSpec::small_arms(truth_for, truth_temporal, a.n, a.seed).with_noise(a.noise);
    if n_attr != spec.schema.count() {
        let names: Vec<String> = (1..=n_attr).map(|j| format!("x{j}")).collect();
        spec.schema = AttributeSchema::new(names, vec![String::new(); n_attr])?;
        spec.log10_ranges = vec![(0.0, 2.0); n_attr];
    }
    spec.year_range = (a.year_lo, a.year_hi);
    let d = generate(&spec)?;

    if let Some(dir) = a.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let file = fs::File::create(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    d.write_csv(file)?;
    let sidecar = a.out.with_extension("truth.json");
    write_json(&sidecar, &spec)?;
    Ok(format!(
        "wrote {} records to {} (truth in {})\n",
        d.len(),
        a.out.display(),
        sidecar.display()
    ))
}

fn cmd_plot(a: &PlotArgs) -> Result<String> {
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let mut out = String::new();

    let explicit = a.source.reference_model.is_some() || a.source.report.is_some();
    let (d, model) = if a.scatter_only && !explicit {
        let d = load_dataset(&a.source.data)?;
        if d.is_empty() {
            (d, None)
        } else {
            let r = resolve_model(&a.source)?;
            (r.dataset, Some((r.for_model, r.temporal)))
        }
    } else {
        let r = resolve_model(&a.source)?;
        (r.dataset, Some((r.for_model, r.temporal)))
    };

    let (m, tm) = match &model {
        Some((m, tm)) => (Some(m), (!a.scatter_only).then_some(tm)),
        None => (None, None),
    };
    let fig = plot::for_figure(&d, m, tm, a.horizon)?;
    fs::write(a.out.join("for.svg"), &fig.svg)?;
    fs::write(a.out.join("for-points.csv"), &fig.points_csv)?;
    out.push_str("wrote for.svg, for-points.csv");
    if let Some(c) = &fig.curve_csv {
        fs::write(a.out.join("for-curve.csv"), c)?;
        out.push_str(", for-curve.csv");
    }
    match plot::energy_figure(&d) {
        Ok(fig) => {
            fs::write(a.out.join("energy.svg"), &fig.svg)?;
            fs::write(a.out.join("energy.csv"), &fig.points_csv)?;
            out.push_str(", energy.svg, energy.csv");
        }
        Err(e) => log::info!("skipping energy plot: {e}"),
    }
    let _ = writeln!(out, " to {}", a.out.display());
    Ok(out)
}
