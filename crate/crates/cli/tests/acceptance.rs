//! Acceptance checks, one line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so the PASS/FAIL lines are
//! always printed. Exits non-zero if any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use regularity_cli::args::FitOptions;
use regularity_cli::commands::{forecast_report, run_report};
use regularity_core::reference::{self, SMALL_ARMS_MAX_OBSERVED};
use regularity_core::scoring::{bic, hindcast_mape};
use regularity_core::{
    fit, generate, AttributeSchema, BicMode, Dataset, FitConfig, HindcastWindow, MapeBasis, ScenarioFile, SynthSpec,
    TemporalModel, Variant,
};

const TRUE_ALPHAS: [f64; 4] = [2.0, 2.35, 0.61, 0.39];

type Check = fn() -> Outcome;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn within(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

fn reference_history(n: usize, sigma: f64, seed: u64) -> Dataset {
    let mut spec = SynthSpec::small_arms(
        reference::small_arms_for_model(),
        reference::small_arms_temporal_model(),
        n,
        seed,
    )
    .with_noise(sigma);
    spec.year_range = (1200.0, 2015.0);
    generate(&spec).expect("synthetic data")
}

fn fit_options(gauge: f64, anchor_value: f64) -> FitOptions {
    use clap::Parser;
    #[derive(Parser)]
    struct Wrap {
        #[command(flatten)]
        o: FitOptions,
    }
    let mut o = Wrap::parse_from(["x"]).o;
    o.gauge_alpha = gauge;
    o.anchor_value = anchor_value;
    o
}

fn budget(elapsed: Duration, limit: Duration) -> (bool, String) {
    (
        elapsed < limit,
        format!("{:.3}s of {}s", elapsed.as_secs_f64(), limit.as_secs()),
    )
}

fn scenario_from_file() -> regularity_core::Scenario {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/scenario-2050.json");
    let f: ScenarioFile = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    f.resolve(&AttributeSchema::small_arms()).unwrap()
}

fn c1_reference_forecast() -> Outcome {
    let start = Instant::now();
    let scenario = scenario_from_file();
    let g = forecast_report(
        &reference::small_arms_for_model(),
        &reference::small_arms_temporal_model(),
        &Dataset::builtin_sample(),
        2050.0,
        Some(SMALL_ARMS_MAX_OBSERVED),
        Some(&scenario),
    )
    .unwrap();
    let (time_ok, time) = budget(start.elapsed(), Duration::from_secs(1));
    let inc: Vec<f64> = g.scenario_increments.iter().map(|i| i.increment).collect();
    let checks = [
        ("predicted", g.predicted_log10_for, 6.97, 0.005),
        ("inc velocity", inc[0], 0.083, 0.003),
        ("inc range", inc[1], 0.541, 0.003),
        ("inc mass", inc[2], 0.156, 0.003),
        ("total", g.scenario_total, 0.780, 0.005),
        ("gap", g.gap, 0.79, 0.005),
    ];
    let failed: Vec<String> = checks
        .iter()
        .filter(|(_, x, t, tol)| !within(*x, *t, *tol))
        .map(|(name, x, t, tol)| format!("{name} {x:.6} not within {t}±{tol}"))
        .collect();
    let detail = if failed.is_empty() {
        format!(
            "predicted {:.6}, gap {:.6}, total {:.6}, {time}",
            g.predicted_log10_for, g.gap, g.scenario_total
        )
    } else {
        format!("{}; {time}", failed.join("; "))
    };
    outcome(failed.is_empty() && time_ok, detail)
}

fn c2_kinetic_form() -> Outcome {
    let start = Instant::now();
    let m = reference::small_arms_for_model();
    let kf = m.to_kinetic_energy_form(&AttributeSchema::small_arms()).unwrap();
    let d = Dataset::builtin_sample();
    let worst = d
        .records()
        .iter()
        .map(|r| {
            let direct = 10f64.powf(m.eval_log10(r));
            ((kf.eval(&r.attributes) - direct) / direct).abs()
        })
        .fold(0.0, f64::max);
    let (time_ok, time) = budget(start.elapsed(), Duration::from_secs(1));
    let pass = within(kf.coefficient, 2.2e-6, 1e-8)
        && within(kf.mass_correction_exp, -0.39, 1e-9)
        && worst <= 1e-12
        && time_ok;
    outcome(
        pass,
        format!(
            "coefficient {:.6e}, mass exponent {}, worst relative disagreement {worst:.1e}, {time}",
            kf.coefficient, kf.mass_correction_exp
        ),
    )
}

fn c3_zero_noise_recovery() -> Outcome {
    let start = Instant::now();
    let d = reference_history(120, 0.0, 3);
    let r = fit(&d, Variant::B, &FitConfig::default()).unwrap();
    let (time_ok, time) = budget(start.elapsed(), Duration::from_secs(5));
    let alpha_err = r
        .for_model
        .alphas
        .iter()
        .zip(TRUE_ALPHAS)
        .map(|(a, t)| (a - t).abs())
        .fold(0.0, f64::max);
    let TemporalModel::QuadraticExponential { curvature, .. } = r.temporal else {
        return outcome(false, "fit did not return a quadratic model");
    };
    let pass = alpha_err <= 1e-6 && within(curvature, 8.27e-6, 1e-9) && r.sse <= 1e-12 * r.n as f64 && time_ok;
    outcome(
        pass,
        format!(
            "max |Δα| {alpha_err:.1e}, |Δcurvature| {:.1e}, sse {:.1e} (n={}), {time}",
            (curvature - 8.27e-6).abs(),
            r.sse,
            r.n
        ),
    )
}

fn c4_noisy_recovery() -> Outcome {
    let start = Instant::now();
    let cfg = FitConfig::default();
    let (mut alpha_ok, mut b_wins) = (0, 0);
    for seed in 0..100 {
        let d = reference_history(120, 0.1, 10_000 + seed);
        let b = fit(&d, Variant::B, &cfg).unwrap();
        let a = fit(&d, Variant::A, &cfg).unwrap();
        if b.for_model
            .alphas
            .iter()
            .zip(TRUE_ALPHAS)
            .all(|(x, t)| (x - t).abs() <= 0.1)
        {
            alpha_ok += 1;
        }
        let bic_b = bic(&b, BicMode::Standard, None).unwrap().value;
        let bic_a = bic(&a, BicMode::Standard, None).unwrap().value;
        if bic_b < bic_a {
            b_wins += 1;
        }
    }
    let (time_ok, time) = budget(start.elapsed(), Duration::from_secs(60));
    outcome(
        alpha_ok >= 95 && b_wins >= 95 && time_ok,
        format!("α within ±0.1 on {alpha_ok}/100 seeds, B beats A on BIC on {b_wins}/100, {time}"),
    )
}

fn c5_gauge_anchor_invariance() -> Outcome {
    let d = reference_history(120, 0.1, 55);
    let mut runs = vec![];
    for gauge in [1.0, 2.0] {
        for anchor in [0.0, 1.0] {
            let report = run_report(&d, &fit_options(gauge, anchor), &Variant::ALL).unwrap();
            runs.push(((gauge, anchor), report));
        }
    }
    let (_, base) = &runs[0];
    let mut worst_r2: f64 = 0.0;
    let mut worst_mape: f64 = 0.0;
    let mut ranking_same = true;
    let mut complete = true;
    for (_, r) in &runs[1..] {
        for (e0, e1) in base.variants.iter().zip(&r.variants) {
            let (Some(s0), Some(s1)) = (&e0.score, &e1.score) else {
                complete = false;
                continue;
            };
            worst_r2 = worst_r2.max((s0.r2 - s1.r2).abs());
            match (s0.mape_avg, s1.mape_avg) {
                (Some(a), Some(b)) => worst_mape = worst_mape.max((a - b).abs()),
                _ => complete = false,
            }
        }
        let (r0, r1) = (base.ranking.as_ref().unwrap(), r.ranking.as_ref().unwrap());
        ranking_same &= r0.by_bic == r1.by_bic && r0.by_r2 == r1.by_r2 && r0.by_mape == r1.by_mape;
        ranking_same &= r0
            .composite
            .iter()
            .map(|c| c.variant)
            .eq(r1.composite.iter().map(|c| c.variant));
    }
    outcome(
        complete && worst_r2 <= 1e-10 && worst_mape <= 1e-10 && ranking_same,
        format!(
            "4 configs × 5 models: max |ΔR²| {worst_r2:.1e}, max |ΔMAPE| {worst_mape:.1e}, rankings identical: {ranking_same}"
        ),
    )
}

fn c6_hindcast() -> Outcome {
    let d = reference_history(120, 0.0, 66);
    let h = hindcast_mape(
        &d,
        Variant::B,
        &FitConfig::default(),
        &HindcastWindow::standard(),
        MapeBasis::AnchorRelative,
    )
    .unwrap();
    let worst = h.windows.iter().map(|w| w.mape).fold(0.0, f64::max);
    let no_lookahead = h.windows.iter().all(|w| w.max_train_year <= w.window.cutoff)
        && h.windows.iter().all(|w| {
            d.truncate_at(w.window.cutoff)
                .records()
                .iter()
                .all(|r| r.year <= w.window.cutoff)
        });
    outcome(
        h.windows.len() == 3 && worst <= 1e-8 && no_lookahead,
        format!("window MAPEs ≤ {worst:.1e}, no lookahead: {no_lookahead}"),
    )
}

fn c7_bic_modes() -> Outcome {
    let mut count = 0;
    let mut worst: f64 = 0.0;
    let datasets = [
        Dataset::builtin_sample(),
        reference_history(120, 0.1, 77),
        reference_history(40, 0.3, 78),
    ];
    for d in &datasets {
        let report = run_report(d, &fit_options(2.0, 1.0), &Variant::ALL).unwrap();
        for s in report.variants.iter().filter_map(|e| e.score.as_ref()) {
            let expected = s.param_count as f64 * (s.n as f64).ln();
            let diff = s.bic_paper - s.bic_standard;
            // a difference of two doubles is exact only up to their rounding
            let ulp = f64::EPSILON * s.bic_paper.abs().max(s.bic_standard.abs());
            worst = worst.max((diff - expected).abs() / ulp.max(f64::MIN_POSITIVE));
            count += 1;
        }
    }
    outcome(
        count == 15 && worst <= 2.0,
        format!("{count} fits, |Δ − k ln n| ≤ {worst:.1} ulp of the BIC magnitude"),
    )
}

fn c8_sample_report() -> Outcome {
    let d = Dataset::builtin_sample();
    let report = run_report(&d, &fit_options(2.0, 1.0), &Variant::ALL).unwrap();
    let mut problems = vec![];
    if report.variants.len() != 5 {
        problems.push(format!("{} variants", report.variants.len()));
    }
    let mut mape_unavailable = 0;
    for e in &report.variants {
        let (Some(f), Some(s)) = (&e.fit, &e.score) else {
            problems.push(format!("model {} missing: {:?}", e.variant, e.error));
            continue;
        };
        if f.for_model.alphas[0] != 2.0 {
            problems.push(format!("model {} α₁ = {}", e.variant, f.for_model.alphas[0]));
        }
        let stats = [s.r2, s.bic_paper, s.bic_standard, s.bic_gaussian];
        if !stats.iter().all(|x| x.is_finite()) || !f.for_model.alphas.iter().all(|x| x.is_finite()) {
            problems.push(format!("model {} has non-finite statistics", e.variant));
        }
        match (s.mape_avg, &s.mape_error) {
            (Some(m), _) if !m.is_finite() => problems.push(format!("model {} MAPE {m}", e.variant)),
            (None, Some(_)) => mape_unavailable += 1,
            (None, None) => problems.push(format!("model {} MAPE silently missing", e.variant)),
            _ => {}
        }
    }
    let csv = report.table_csv();
    if !csv.starts_with("variant,alpha1,alpha2,alpha3,alpha4,r2,bic,mape\n") || csv.lines().count() != 6 {
        problems.push("table CSV shape".into());
    }
    let optional = match std::env::var("REGULARITY_FULL_DATASET") {
        Ok(path) => {
            let full = Dataset::load_csv(&path, AttributeSchema::small_arms()).unwrap();
            let b = fit(&full, Variant::B, &FitConfig::default()).unwrap();
            let ok = b.for_model.alphas[1..]
                .iter()
                .zip([2.35, 0.61, 0.39])
                .all(|(a, t)| (a - t).abs() <= 0.05);
            format!("optional full-dataset check: {}", if ok { "agrees" } else { "differs" })
        }
        Err(_) => "optional full-dataset check skipped (REGULARITY_FULL_DATASET unset)".into(),
    };
    outcome(
        problems.is_empty(),
        format!(
            "5 models, α₁ = 2 in each, R²/BIC finite; hindcast MAPE unavailable on {mape_unavailable} models \
             (6 records before 1800); {optional}{}",
            if problems.is_empty() {
                String::new()
            } else {
                format!("; {}", problems.join("; "))
            }
        ),
    )
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_regularity"))
}

fn run_ok(cmd: &mut Command) -> Vec<u8> {
    let out = cmd.output().expect("spawn");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn c9_energy_csv() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    run_ok(
        bin()
            .args(["plot", "--reference-model", "paper-eq4-eq5", "--out"])
            .arg(dir.path()),
    );
    let csv = std::fs::read_to_string(dir.path().join("energy.csv")).unwrap();
    let value = csv
        .lines()
        .find(|l| l.starts_with("Longbow,"))
        .and_then(|l| l.rsplit(',').next())
        .and_then(|v| v.parse::<f64>().ok());
    match value {
        Some(e) => outcome(within(e, 112.99, 0.01), format!("Longbow energy {e} J")),
        None => outcome(false, "no Longbow row in energy.csv"),
    }
}

fn c10_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name);
    let mut mismatches = vec![];
    let mut compare = |what: &str, a: Vec<u8>, b: Vec<u8>| {
        if a != b || a.is_empty() {
            mismatches.push(what.to_string());
        }
    };

    for i in 0..2 {
        run_ok(
            bin()
                .args(["synth", "--seed", "7", "--noise", "0.1", "--out"])
                .arg(p(&format!("s{i}.csv"))),
        );
    }
    compare(
        "synth csv",
        std::fs::read(p("s0.csv")).unwrap(),
        std::fs::read(p("s1.csv")).unwrap(),
    );
    compare(
        "synth truth",
        std::fs::read(p("s0.truth.json")).unwrap(),
        std::fs::read(p("s1.truth.json")).unwrap(),
    );

    for i in 0..2 {
        run_ok(
            bin()
                .args(["fit", "--data"])
                .arg(p("s0.csv"))
                .arg("--out")
                .arg(p(&format!("f{i}"))),
        );
    }
    for f in ["report.json", "table.csv", "residuals-B.csv", "residuals-D.csv"] {
        compare(
            f,
            std::fs::read(p("f0").join(f)).unwrap(),
            std::fs::read(p("f1").join(f)).unwrap(),
        );
    }

    let forecast = || {
        run_ok(
            bin()
                .args(["forecast", "--json", "--horizon", "2050", "--report"])
                .arg(p("f0").join("report.json"))
                .arg("--data")
                .arg(p("s0.csv")),
        )
    };
    compare("forecast json", forecast(), forecast());
    let reference = || {
        run_ok(bin().args([
            "forecast",
            "--json",
            "--reference-model",
            "paper-eq4-eq5",
            "--max-observed",
            "6.18",
        ]))
    };
    compare("reference forecast json", reference(), reference());

    outcome(
        mismatches.is_empty(),
        if mismatches.is_empty() {
            "synth --seed 7, fit and forecast outputs byte-identical across runs".to_string()
        } else {
            format!("differing outputs: {}", mismatches.join(", "))
        },
    )
}

fn main() {
    let criteria: [(&str, Check); 10] = [
        ("reference forecast and scenario", c1_reference_forecast),
        ("kinetic-energy form", c2_kinetic_form),
        ("zero-noise recovery", c3_zero_noise_recovery),
        ("noisy recovery, 100 seeds", c4_noisy_recovery),
        ("gauge/anchor invariance", c5_gauge_anchor_invariance),
        ("hindcast protocol", c6_hindcast),
        ("BIC mode relation", c7_bic_modes),
        ("sample report shape", c8_sample_report),
        ("kinetic-energy CSV datum", c9_energy_csv),
        ("determinism", c10_determinism),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = std::panic::catch_unwind(check).unwrap_or_else(|_| outcome(false, "panicked"));
        println!(
            "acceptance {:>2} {} {name}: {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        failures += usize::from(!o.pass);
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
