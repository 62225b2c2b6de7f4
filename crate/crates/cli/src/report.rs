//! The run report: everything a `fit` produced, plus enough configuration to
//! reproduce it.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use regularity_core::scoring::CompositeEntry;
use regularity_core::{
    Dataset, FitConfig, FitResult, GapReport, Ranking, ScoreConfig, ScoreReport, Variant, VariantOutcome,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tool {
    pub name: String,
    pub version: String,
}

impl Default for Tool {
    fn default() -> Self {
        Self {
            name: "regularity".into(),
            version: env!("CARGO_PKG_VERSION").into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeInfo {
    pub name: String,
    pub unit: String,
    pub column: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub provenance: String,
    pub records: usize,
    pub first_year: Option<f64>,
    pub last_year: Option<f64>,
    pub attributes: Vec<AttributeInfo>,
}

impl DatasetSummary {
    pub fn of(d: &Dataset) -> Self {
        let s = d.schema();
        let span = d.year_span();
        Self {
            provenance: d.provenance().to_string(),
            records: d.len(),
            first_year: span.map(|s| s.0),
            last_year: span.map(|s| s.1),
            attributes: (0..s.count())
                .map(|j| AttributeInfo {
                    name: s.names()[j].clone(),
                    unit: s.units()[j].clone(),
                    column: s.columns()[j].clone(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub models: Vec<Variant>,
    pub fit: FitConfig,
    pub score: ScoreConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamCount {
    pub variant: Variant,
    /// Free exponents (α₁ is pinned) plus the combined constant.
    pub shared: usize,
    pub temporal: usize,
    pub total: usize,
}

pub fn param_ledger(n_attributes: usize) -> Vec<ParamCount> {
    Variant::ALL
        .iter()
        .map(|&v| ParamCount {
            variant: v,
            shared: n_attributes,
            temporal: v.shape_params(),
            total: v.param_count(n_attributes),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conventions {
    pub gauge: String,
    pub anchor: String,
    pub breakpoint: String,
    pub bic_ranking_mode: String,
    pub mape: String,
    pub non_finite: String,
}

impl Conventions {
    fn new(cfg: &RunConfig) -> Self {
        let f = &cfg.fit;
        Self {
            gauge: format!(
                "solved with alpha1 = 1, then exponents, log10 k and the temporal curve scaled to alpha1 = {}",
                f.gauge_alpha1
            ),
            anchor: format!(
                "temporal curve shifted to log10 FoR = {} at year {}; log10 k absorbs the same shift",
                f.anchor_value, f.anchor_year
            ),
            breakpoint: format!(
                "model E splits at year {} (records at the breakpoint are pre-break)",
                f.breakpoint
            ),
            bic_ranking_mode: cfg.score.bic_mode.to_string(),
            mape: format!(
                "hindcast on {:?} log10 FoR, windows inclusive at both ends",
                cfg.score.mape_basis
            ),
            non_finite: "a BIC of a perfect fit is -inf and serializes as null; see bic_degenerate".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantEntry {
    pub variant: Variant,
    pub description: String,
    pub fit: Option<FitResult>,
    pub score: Option<ScoreReport>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub tool: Tool,
    pub dataset: DatasetSummary,
    pub config: RunConfig,
    pub conventions: Conventions,
    pub param_counts: Vec<ParamCount>,
    pub variants: Vec<VariantEntry>,
    pub ranking: Option<Ranking>,
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap: Option<GapReport>,
}

impl RunReport {
    pub fn build(
        d: &Dataset,
        config: RunConfig,
        fits: Vec<VariantOutcome>,
        scores: Vec<(Variant, regularity_core::Result<ScoreReport>)>,
    ) -> Self {
        let mut variants = Vec::with_capacity(fits.len());
        for ((v, fit), (_, score)) in fits.into_iter().zip(scores) {
            let (fit, score, error) = match (fit, score) {
                (Ok(f), Ok(s)) => (Some(f), Some(s), None),
                (Ok(f), Err(e)) => (Some(f), None, Some(format!("scoring failed: {e}"))),
                (Err(e), _) => (None, None, Some(e.to_string())),
            };
            variants.push(VariantEntry {
                variant: v,
                description: v.describe().to_string(),
                fit,
                score,
                error,
            });
        }
        let reports: Vec<ScoreReport> = variants.iter().filter_map(|e| e.score.clone()).collect();
        let ranking = (!reports.is_empty()).then(|| regularity_core::rank(&reports, config.score.bic_mode));
        let notes = notes(&variants, ranking.as_ref());
        Self {
            schema_version: SCHEMA_VERSION,
            tool: Tool::default(),
            dataset: DatasetSummary::of(d),
            conventions: Conventions::new(&config),
            param_counts: param_ledger(d.schema().count()),
            config,
            variants,
            ranking,
            notes,
            gap: None,
        }
    }

    pub fn fit_for(&self, v: Variant) -> Option<&FitResult> {
        self.variants
            .iter()
            .find(|e| e.variant == v)
            .and_then(|e| e.fit.as_ref())
    }

    /// Top of the composite ranking, falling back to the first successful fit.
    pub fn preferred(&self) -> Option<&FitResult> {
        self.ranking
            .as_ref()
            .and_then(|r| r.composite.first())
            .and_then(|c| self.fit_for(c.variant))
            .or_else(|| self.variants.iter().find_map(|e| e.fit.as_ref()))
    }

    /// `variant,alpha1..alphaN,r2,bic,mape`, with BIC in the ranking mode.
    pub fn table_csv(&self) -> String {
        let n = self.dataset.attributes.len();
        let mut out = String::from("variant");
        for j in 1..=n {
            let _ = write!(out, ",alpha{j}");
        }
        out.push_str(",r2,bic,mape\n");
        for e in &self.variants {
            let _ = write!(out, "{}", e.variant);
            match &e.fit {
                Some(f) => f.for_model.alphas.iter().for_each(|a| {
                    let _ = write!(out, ",{a}");
                }),
                None => out.push_str(&",".repeat(n)),
            }
            match &e.score {
                Some(s) => {
                    let mape = s.mape_avg.map(|m| m.to_string()).unwrap_or_default();
                    let _ = writeln!(out, ",{},{},{}", s.r2, s.bic(self.config.score.bic_mode), mape);
                }
                None => out.push_str(",,,\n"),
            }
        }
        out
    }

    pub fn table_text(&self) -> String {
        let mut out = String::new();
        let _ = write!(out, "{:<10}", "");
        for e in &self.variants {
            let _ = write!(out, "{:>10}", format!("Model {}", e.variant));
        }
        out.push('\n');
        let row = |out: &mut String, label: &str, cell: &dyn Fn(&VariantEntry) -> Option<String>| {
            let _ = write!(out, "{label:<10}");
            for e in &self.variants {
                let _ = write!(out, "{:>10}", cell(e).unwrap_or_else(|| "-".into()));
            }
            out.push('\n');
        };
        for (j, a) in self.dataset.attributes.iter().enumerate() {
            row(&mut out, &format!("α{} {}", j + 1, a.name), &|e| {
                e.fit.as_ref().map(|f| format!("{:.3}", f.for_model.alphas[j]))
            });
        }
        row(&mut out, "R²", &|e| e.score.as_ref().map(|s| format!("{:.3}", s.r2)));
        let mode = self.config.score.bic_mode;
        row(&mut out, "BIC", &|e| {
            e.score.as_ref().map(|s| format!("{:.1}", s.bic(mode)))
        });
        row(&mut out, "MAPE", &|e| {
            e.score.as_ref().and_then(|s| s.mape_avg).map(|m| format!("{m:.3}"))
        });
        row(&mut out, "k", &|e| {
            Some(e.variant.param_count(self.dataset.attributes.len()).to_string())
        });
        out
    }

    pub fn ranking_text(&self) -> String {
        let Some(r) = &self.ranking else {
            return "no variant could be scored\n".into();
        };
        let list = |vs: &[Variant]| vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" < ");
        let mut out = String::new();
        let _ = writeln!(out, "by BIC ({}): {}", r.bic_mode, list(&r.by_bic));
        let _ = writeln!(out, "by R²:        {}", list(&r.by_r2));
        if r.by_mape.is_empty() {
            out.push_str("by MAPE:      unavailable\n");
        } else {
            let _ = writeln!(out, "by MAPE:      {}", list(&r.by_mape));
        }
        out.push_str("composite:\n");
        for CompositeEntry {
            variant, mean_position, ..
        } in &r.composite
        {
            let _ = writeln!(out, "  {variant}  mean position {mean_position:.2}");
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{} records, {} ({})",
            self.dataset.records,
            match (self.dataset.first_year, self.dataset.last_year) {
                (Some(a), Some(b)) => format!("{a}–{b}"),
                _ => "no years".into(),
            },
            self.dataset.provenance
        );
        out.push('\n');
        out.push_str(&self.table_text());
        out.push('\n');
        out.push_str(&self.ranking_text());
        for e in &self.variants {
            if let Some(err) = &e.error {
                let _ = writeln!(out, "model {}: {err}", e.variant);
            }
            if let Some(s) = &e.score {
                if let Some(err) = &s.mape_error {
                    let _ = writeln!(out, "model {}: no MAPE: {err}", e.variant);
                }
            }
            if let Some(f) = &e.fit {
                for w in &f.warnings {
                    let _ = writeln!(out, "model {}: {w}", e.variant);
                }
            }
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        if let Some(g) = &self.gap {
            out.push('\n');
            out.push_str(&g.to_text());
        }
        out
    }
}

fn notes(variants: &[VariantEntry], ranking: Option<&Ranking>) -> Vec<String> {
    let mut notes = Vec::new();
    if let Some(r) = ranking {
        if let (Some(top), Some(bic)) = (r.composite.first(), r.by_bic.first()) {
            notes.push(format!(
                "model {} leads the composite ranking; model {} has the lowest BIC. No winner is imposed.",
                top.variant, bic
            ));
        }
    }
    if variants.iter().any(|e| e.variant == Variant::A && e.score.is_some()) {
        notes.push(
            "model A (plain exponential) is commonly set aside on domain-plausibility grounds when \
             the curved models fit comparably; it is kept in every ranking here"
                .into(),
        );
    }
    notes
}
