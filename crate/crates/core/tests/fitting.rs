use regularity_core::fit::fit_quadratic_by_vertex_profile;
use regularity_core::reference::{small_arms_for_model, small_arms_temporal_model};
use regularity_core::scoring::{hindcast_mape, r_squared};
use regularity_core::{
    fit, fit_all, generate, AttributeSchema, Dataset, Error, FitConfig, MapeBasis, ProfileGrid, SynthSpec, TechRecord,
    TemporalModel, Variant,
};

fn synth(truth: TemporalModel, n: usize, sigma: f64, seed: u64) -> Dataset {
    let mut spec = SynthSpec::small_arms(small_arms_for_model(), truth, n, seed).with_noise(sigma);
    spec.year_range = (1200.0, 2015.0);
    generate(&spec).unwrap()
}

fn reference_history(n: usize, sigma: f64, seed: u64) -> Dataset {
    synth(small_arms_temporal_model(), n, sigma, seed)
}

#[test]
fn zero_noise_b_recovers_truth() {
    let d = reference_history(120, 0.0, 1);
    let r = fit(&d, Variant::B, &FitConfig::default()).unwrap();
    for (got, want) in r.for_model.alphas.iter().zip([2.0, 2.35, 0.61, 0.39]) {
        assert!((got - want).abs() < 1e-6, "alpha {got} vs {want}");
    }
    let TemporalModel::QuadraticExponential {
        vertex_year,
        curvature,
        offset,
    } = r.temporal
    else {
        panic!("wrong variant")
    };
    assert!((curvature - 8.27e-6).abs() < 1e-9);
    assert!((vertex_year - 1200.0).abs() < 1e-3);
    assert!((offset - 1.0).abs() < 1e-6);
    assert!((r.for_model.log10_k + 5.96).abs() < 1e-6);
    assert!(r.sse <= 1e-12 * r.n as f64);
    assert!(r.converged);
}

#[test]
fn zero_noise_recovery_every_variant() {
    let truths = [
        TemporalModel::Exponential {
            slope: 0.004,
            intercept: -3.0,
        },
        small_arms_temporal_model(),
        TemporalModel::CubicExponential {
            inflection_year: 900.0,
            coefficient: 3e-9,
            offset: 0.5,
        },
        TemporalModel::DoubleExponential {
            offset: 0.8,
            log_amplitude: -9.0,
            rate: 0.006,
        },
        TemporalModel::PiecewiseExponential {
            pre_slope: 0.002,
            pre_intercept: -1.4,
            post_slope: 0.01,
            post_intercept: -16.0,
            breakpoint: 1832.0,
        },
    ];
    for truth in truths {
        let v = truth.variant();
        let d = synth(truth, 120, 0.0, 5);
        let r = fit(&d, v, &FitConfig::default()).unwrap();
        assert!(r.sse <= 1e-10 * r.n as f64, "{v}: sse {}", r.sse);
        for (got, want) in r.for_model.alphas.iter().zip([2.0, 2.35, 0.61, 0.39]) {
            assert!((got - want).abs() < 1e-5, "{v}: alpha {got} vs {want}");
        }
        // the anchor moves the curve by a constant, so compare shapes
        let shape = |m: &TemporalModel, y: f64| m.eval(y).unwrap() - m.eval(1200.0).unwrap();
        for year in [1300.0, 1700.0, 2000.0] {
            let (a, b) = (shape(&r.temporal, year), shape(&truth, year));
            assert!((a - b).abs() < 1e-6 * (1.0 + b.abs()), "{v} at {year}: {a} vs {b}");
        }
    }
}

#[test]
fn curved_data_b_beats_a_on_sse() {
    let d = reference_history(120, 0.05, 3);
    let fits = fit_all(&d, &FitConfig::default()).unwrap();
    let sse = |v: Variant| fits.iter().find(|(x, _)| *x == v).unwrap().1.as_ref().unwrap().sse;
    assert!(sse(Variant::B) <= sse(Variant::A));
}

#[test]
fn gauge_rescaling_scales_residuals() {
    let d = reference_history(60, 0.1, 9);
    for v in Variant::ALL {
        let one = fit(
            &d,
            v,
            &FitConfig {
                gauge_alpha1: 1.0,
                ..FitConfig::default()
            },
        )
        .unwrap();
        let two = fit(&d, v, &FitConfig::default()).unwrap();
        assert_eq!(two.for_model.alphas[0], 2.0);
        assert_eq!(one.for_model.alphas[0], 1.0);
        for (a, b) in one.residuals.iter().zip(&two.residuals) {
            assert!((2.0 * a.residual - b.residual).abs() < 1e-9, "{v}");
        }
        let (r1, r2) = (r_squared(&one).unwrap(), r_squared(&two).unwrap());
        assert!((r1 - r2).abs() < 1e-12, "{v}: {r1} vs {r2}");
    }
}

#[test]
fn anchor_value_is_neutral() {
    let d = reference_history(60, 0.1, 10);
    for v in Variant::ALL {
        let at = |value: f64| {
            fit(
                &d,
                v,
                &FitConfig {
                    anchor_value: value,
                    ..FitConfig::default()
                },
            )
            .unwrap()
        };
        let (zero, one) = (at(0.0), at(1.0));
        assert!((zero.sse - one.sse).abs() <= 1e-10 * (1.0 + one.sse));
        assert!((r_squared(&zero).unwrap() - r_squared(&one).unwrap()).abs() < 1e-12);
        assert!((one.temporal.eval(1200.0).unwrap() - 1.0).abs() < 1e-9, "{v}");
        assert!(zero.temporal.eval(1200.0).unwrap().abs() < 1e-9, "{v}");
        assert!((one.for_model.log10_k - zero.for_model.log10_k - 1.0).abs() < 1e-9);
    }
}

#[test]
fn duplicating_records_leaves_parameters_unchanged() {
    let d = reference_history(40, 0.1, 12);
    let twice = d.repeated(2);
    for v in Variant::ALL {
        let a = fit(&d, v, &FitConfig::default()).unwrap();
        let b = fit(&twice, v, &FitConfig::default()).unwrap();
        for (x, y) in a.for_model.alphas.iter().zip(&b.for_model.alphas) {
            assert!((x - y).abs() < 1e-8, "{v}: {x} vs {y}");
        }
        let (pa, pb) = (a.temporal.params(), b.temporal.params());
        for (k, x) in &pa {
            assert!((x - pb[k]).abs() <= 1e-6 * (1.0 + x.abs()), "{v} {k}: {x} vs {}", pb[k]);
        }
        assert!((2.0 * a.sse - b.sse).abs() < 1e-9 * (1.0 + b.sse));
    }
}

#[test]
fn quadratic_solve_matches_vertex_profile() {
    for seed in [1, 2, 3] {
        let d = reference_history(80, 0.1, seed);
        let cfg = FitConfig::default();
        let direct = fit(&d, Variant::B, &cfg).unwrap();
        let profiled = fit_quadratic_by_vertex_profile(&d, &ProfileGrid::linear(0.0, 1800.0, 361), &cfg).unwrap();
        assert!(
            (direct.sse - profiled.sse).abs() < 1e-8,
            "{} vs {}",
            direct.sse,
            profiled.sse
        );
    }
}

#[test]
fn sample_fits_all_five_variants() {
    let d = Dataset::builtin_sample();
    let fits = fit_all(&d, &FitConfig::default()).unwrap();
    assert_eq!(fits.len(), 5);
    for (v, r) in &fits {
        let r = r.as_ref().unwrap_or_else(|e| panic!("{v}: {e}"));
        assert_eq!(r.residuals.len(), 8);
        assert_eq!(r.for_model.alphas[0], 2.0);
        let sum: f64 = r.residuals.iter().map(|x| x.residual * x.residual).sum();
        assert!((sum - r.sse).abs() <= 1e-9 * r.sse.max(1e-300));
    }
}

#[test]
fn constant_attribute_fails_every_variant() {
    let base = reference_history(30, 0.1, 4);
    let records: Vec<TechRecord> = base
        .records()
        .iter()
        .map(|r| {
            let mut a = r.attributes.clone();
            a[2] = 0.01;
            TechRecord::new(r.name.clone(), r.year, a)
        })
        .collect();
    let d = Dataset::new(AttributeSchema::small_arms(), records, "constant mass").unwrap();
    let Err(Error::AllVariantsFailed(errors)) = fit_all(&d, &FitConfig::default()) else {
        panic!("expected every variant to fail")
    };
    assert_eq!(errors.len(), 5);
    for (v, e) in errors {
        assert!(e.is_fit_failure(), "{v}: {e}");
        assert!(e.to_string().contains("mass_kg"), "{v}: {e}");
    }
}

#[test]
fn hindcast_exact_on_zero_noise() {
    let d = reference_history(120, 0.0, 8);
    for v in [Variant::A, Variant::B] {
        let windows = regularity_core::HindcastWindow::standard();
        let cfg = FitConfig::default();
        if v == Variant::A {
            // A cannot represent the curve; it should still run
            assert!(hindcast_mape(&d, v, &cfg, &windows, MapeBasis::AnchorRelative).is_ok());
            continue;
        }
        let h = hindcast_mape(&d, v, &cfg, &windows, MapeBasis::AnchorRelative).unwrap();
        assert_eq!(h.windows.len(), 3);
        for w in &h.windows {
            assert!(w.mape.abs() <= 1e-8, "{:?}", w);
            assert!(w.max_train_year <= w.window.cutoff);
        }
        assert!(h.mape_avg <= 1e-8);
    }
}

#[test]
fn hindcast_fails_on_sample() {
    let d = Dataset::builtin_sample();
    let err = hindcast_mape(
        &d,
        Variant::B,
        &FitConfig::default(),
        &regularity_core::HindcastWindow::standard(),
        MapeBasis::AnchorRelative,
    )
    .unwrap_err();
    assert!(matches!(err, Error::Window { index: 0, .. }), "{err}");
}

#[test]
fn hindcast_under_small_noise() {
    let mut good = 0;
    for seed in 0..50 {
        let d = reference_history(120, 0.05, 1000 + seed);
        let h = hindcast_mape(
            &d,
            Variant::B,
            &FitConfig::default(),
            &regularity_core::HindcastWindow::standard(),
            MapeBasis::AnchorRelative,
        )
        .unwrap();
        if h.mape_avg < 0.2 {
            good += 1;
        }
    }
    assert!(good >= 45, "{good}/50");
}

#[test]
fn noisy_recovery_most_seeds() {
    let mut ok = 0;
    for seed in 0..20 {
        let d = reference_history(120, 0.1, seed);
        let r = fit(&d, Variant::B, &FitConfig::default()).unwrap();
        if r.for_model
            .alphas
            .iter()
            .zip([2.0, 2.35, 0.61, 0.39])
            .all(|(g, w)| (g - w).abs() < 0.1)
        {
            ok += 1;
        }
    }
    assert!(ok >= 18, "{ok}/20");
}

#[test]
fn fits_are_deterministic() {
    let d = reference_history(80, 0.1, 21);
    let a = serde_json::to_string(
        &fit_all(&d, &FitConfig::default())
            .unwrap()
            .into_iter()
            .map(|(_, r)| r.unwrap())
            .collect::<Vec<_>>(),
    )
    .unwrap();
    let b = serde_json::to_string(
        &fit_all(&d, &FitConfig::default())
            .unwrap()
            .into_iter()
            .map(|(_, r)| r.unwrap())
            .collect::<Vec<_>>(),
    )
    .unwrap();
    assert_eq!(a, b);
}
