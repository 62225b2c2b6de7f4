use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use regularity_core::{BicMode, MapeBasis, Variant};

/// Fit, score and extrapolate Figures of Regularity for technology histories.
#[derive(Parser, Debug)]
#[command(name = "regularity", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Fit every requested temporal model jointly with the FoR and score them
    Fit(FitArgs),
    /// Fit and print only the per-criterion rankings
    Rank(FitArgs),
    /// Three-window hindcast MAPE per model
    Backtest(FitArgs),
    /// Extrapolate to a horizon and compare with the best observed record
    Forecast(ForecastArgs),
    /// FoR increments of a scenario of attribute multipliers
    Portfolio(PortfolioArgs),
    /// Generate a synthetic history from a known model
    Synth(SynthArgs),
    /// Write FoR and kinetic-energy charts as SVG plus CSV
    Plot(PlotArgs),
}

#[derive(Args, Debug, Clone)]
pub struct DataArgs {
    /// CSV with `name,year` and one column per attribute; the bundled
    /// eight-record small-arms sample when omitted
    #[arg(long)]
    pub data: Option<PathBuf>,

    /// Attribute columns for a non-small-arms CSV, first one is the gauge
    /// attribute (e.g. `power,weight,speed`)
    #[arg(long, value_delimiter = ',')]
    pub attributes: Option<Vec<String>>,
}

#[derive(Args, Debug, Clone)]
pub struct FitOptions {
    /// Temporal models to fit
    #[arg(long, value_delimiter = ',', default_value = "A,B,C,D,E")]
    pub models: Vec<Variant>,

    /// Exponent of the first attribute after normalization
    #[arg(long, default_value_t = 2.0)]
    pub gauge_alpha: f64,

    #[arg(long, default_value_t = 1200.0)]
    pub anchor_year: f64,

    /// log10 FoR of the fitted curve at the anchor year
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub anchor_value: f64,

    /// Break year of model E
    #[arg(long, default_value_t = 1832.0)]
    pub breakpoint: f64,

    /// Fix model B's vertex year instead of fitting it
    #[arg(long)]
    pub pin_vertex: Option<f64>,

    #[arg(long, value_enum, default_value_t = BicArg::Standard)]
    pub bic_mode: BicArg,

    /// Residual variance for gaussian BIC; defaults to that of the lowest-SSE model
    #[arg(long)]
    pub reference_variance: Option<f64>,

    #[arg(long, value_enum, default_value_t = MapeArg::AnchorRelative)]
    pub mape_basis: MapeArg,
}

#[derive(Args, Debug)]
pub struct FitArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub fit: FitOptions,

    /// Output directory for report.json, table.csv and residual CSVs
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Print JSON instead of text
    #[arg(long)]
    pub json: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum BicArg {
    PaperLiteral,
    Standard,
    Gaussian,
}

impl From<BicArg> for BicMode {
    fn from(b: BicArg) -> Self {
        match b {
            BicArg::PaperLiteral => BicMode::PaperLiteral,
            BicArg::Standard => BicMode::Standard,
            BicArg::Gaussian => BicMode::Gaussian,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum MapeArg {
    AnchorRelative,
    Log10,
}

impl From<MapeArg> for MapeBasis {
    fn from(m: MapeArg) -> Self {
        match m {
            MapeArg::AnchorRelative => MapeBasis::AnchorRelative,
            MapeArg::Log10 => MapeBasis::Log10,
        }
    }
}

/// Where the fitted (FoR, temporal) pair comes from.
#[derive(Args, Debug, Clone)]
pub struct ModelSource {
    /// Use a built-in published model (`paper-eq4-eq5`: the small-arms fit)
    #[arg(long, conflicts_with = "report")]
    pub reference_model: Option<String>,

    /// Take the model from a report.json written by `fit`
    #[arg(long)]
    pub report: Option<PathBuf>,

    /// Model to take from the report or refit; the composite leader by default
    #[arg(long)]
    pub variant: Option<Variant>,

    #[command(flatten)]
    pub data: DataArgs,

    #[command(flatten)]
    pub fit: FitOptions,
}

#[derive(Args, Debug)]
pub struct ForecastArgs {
    #[command(flatten)]
    pub source: ModelSource,

    #[arg(long, default_value_t = 2050.0)]
    pub horizon: f64,

    /// Best observed log10 FoR; computed from the data when omitted
    #[arg(long, allow_negative_numbers = true)]
    pub max_observed: Option<f64>,

    /// Scenario JSON `{name, multipliers: {attribute: factor}, rationale}`
    #[arg(long)]
    pub scenario: Option<PathBuf>,

    /// Write the gap report as JSON here
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct PortfolioArgs {
    #[command(flatten)]
    pub source: ModelSource,

    #[arg(long)]
    pub scenario: PathBuf,

    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 120)]
    pub n: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Standard deviation of log10 FoR noise
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,

    #[arg(long, default_value_t = 1200.0)]
    pub year_lo: f64,

    #[arg(long, default_value_t = 2015.0)]
    pub year_hi: f64,

    /// JSON `{"for_model": …, "temporal": …}`; the published small-arms
    /// model when omitted
    #[arg(long)]
    pub truth: Option<PathBuf>,

    /// CSV output path; a `.truth.json` sidecar is written next to it
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct PlotArgs {
    #[command(flatten)]
    pub source: ModelSource,

    /// Plot only the data, without a fitted curve
    #[arg(long)]
    pub scatter_only: bool,

    #[arg(long, default_value_t = 2050.0)]
    pub horizon: f64,

    /// Output directory
    #[arg(long)]
    pub out: PathBuf,
}
