//! Static SVG charts with a CSV dump of every plotted point.
//!
//! Each circle carries `data-x`/`data-y` attributes holding the exact values
//! written to the CSV, so the two outputs can be compared without parsing
//! geometry.

use std::fmt::Write as _;

use anyhow::{bail, Result};

use regularity_core::formodel::muzzle_energy;
use regularity_core::{Dataset, ForModel, TemporalModel};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 50.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub label: String,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Default)]
pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub points: Vec<Point>,
    pub curve: Vec<(f64, f64)>,
    pub log_y: bool,
}

/// A written figure: SVG plus its CSV dumps.
#[derive(Debug, Clone)]
pub struct Figure {
    pub svg: String,
    pub points_csv: String,
    pub curve_csv: Option<String>,
}

/// Muzzle kinetic energy `0.5·M·V²` per record.
pub fn energy_figure(d: &Dataset) -> Result<Figure> {
    let s = d.schema();
    let (Some(v), Some(m)) = (s.index_of("velocity"), s.index_of("mass")) else {
        bail!("kinetic-energy plot needs `velocity` and `mass` attributes");
    };
    let points: Vec<Point> = d
        .records()
        .iter()
        .map(|r| Point {
            label: r.name.clone(),
            x: r.year,
            y: muzzle_energy(r.attributes[v], r.attributes[m]),
        })
        .collect();
    let mut csv = String::from("name,year,energy_j\n");
    for p in &points {
        let _ = writeln!(csv, "{},{},{}", csv_field(&p.label), p.x, p.y);
    }
    let chart = Chart {
        title: "Muzzle kinetic energy".into(),
        x_label: "year".into(),
        y_label: "energy (J)".into(),
        points,
        curve: vec![],
        log_y: true,
    };
    Ok(Figure {
        svg: render(&chart),
        points_csv: csv,
        curve_csv: None,
    })
}

/// Observed log₁₀ FoR per record under `m`, with the temporal curve sampled
/// every year from the first record (or `horizon` if no data) to `horizon`.
pub fn for_figure(d: &Dataset, m: Option<&ForModel>, tm: Option<&TemporalModel>, horizon: f64) -> Result<Figure> {
    let points: Vec<Point> = match m {
        Some(m) => d
            .records()
            .iter()
            .map(|r| Point {
                label: r.name.clone(),
                x: r.year,
                y: m.eval_log10(r),
            })
            .collect(),
        None => vec![],
    };
    let mut csv = String::from("name,year,log10_for\n");
    for p in &points {
        let _ = writeln!(csv, "{},{},{}", csv_field(&p.label), p.x, p.y);
    }

    let mut curve = vec![];
    let mut curve_csv = None;
    if let Some(tm) = tm {
        let start = d.year_span().map_or(horizon, |s| s.0.min(horizon)).floor() as i64;
        let end = horizon.floor() as i64;
        let mut c = String::from("year,curve\n");
        for year in start..=end {
            let y = tm.eval(year as f64)?;
            curve.push((year as f64, y));
            let _ = writeln!(c, "{year},{y}");
        }
        curve_csv = Some(c);
    }

    let chart = Chart {
        title: "Figure of Regularity over time".into(),
        x_label: "year".into(),
        y_label: "log10 FoR".into(),
        points,
        curve,
        log_y: false,
    };
    Ok(Figure {
        svg: render(&chart),
        points_csv: csv,
        curve_csv,
    })
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Inclusive data range padded by 5 %, or `fallback` when empty.
fn range(values: impl Iterator<Item = f64>, fallback: (f64, f64)) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if lo > hi {
        return fallback;
    }
    if lo == hi {
        return (lo - 1.0, hi + 1.0);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

/// Five "nice" tick values covering `[lo, hi]`.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let raw = (hi - lo) / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

pub fn render(c: &Chart) -> String {
    let ty = |y: f64| if c.log_y { y.log10() } else { y };
    let (x0, x1) = range(
        c.points.iter().map(|p| p.x).chain(c.curve.iter().map(|p| p.0)),
        (1200.0, 2050.0),
    );
    let (y0, y1) = range(
        c.points.iter().map(|p| ty(p.y)).chain(c.curve.iter().map(|p| ty(p.1))),
        (0.0, 1.0),
    );
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = |x: f64| MARGIN_LEFT + (x - x0) / (x1 - x0) * plot_w;
    let sy = |y: f64| MARGIN_TOP + plot_h - (ty(y) - y0) / (y1 - y0) * plot_h;
    let bottom = MARGIN_TOP + plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">
<!-- regularity {} -->
<rect width="100%" height="100%" fill="white"/>
<text x="{}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
        env!("CARGO_PKG_VERSION"),
        WIDTH / 2.0,
        xml_escape(&c.title)
    );
    let _ = writeln!(
        s,
        r#"<g stroke="black" stroke-width="1"><line x1="{MARGIN_LEFT}" y1="{bottom}" x2="{}" y2="{bottom}"/><line x1="{MARGIN_LEFT}" y1="{MARGIN_TOP}" x2="{MARGIN_LEFT}" y2="{bottom}"/></g>"#,
        WIDTH - MARGIN_RIGHT
    );
    s.push_str(r#"<g font-family="sans-serif" font-size="11">"#);
    s.push('\n');
    for t in ticks(x0, x1) {
        let x = sx(t);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{bottom}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{t}</text>"#,
            bottom + 5.0,
            bottom + 18.0
        );
    }
    for t in ticks(y0, y1) {
        let y = MARGIN_TOP + plot_h - (t - y0) / (y1 - y0) * plot_h;
        let label = if c.log_y { format!("1e{t}") } else { format!("{t}") };
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{MARGIN_LEFT}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{label}</text>"#,
            MARGIN_LEFT - 5.0,
            MARGIN_LEFT - 8.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 10.0,
        xml_escape(&c.x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0,
        xml_escape(&c.y_label)
    );
    s.push_str("</g>\n");

    if !c.curve.is_empty() {
        s.push_str(r#"<polyline fill="none" stroke="steelblue" stroke-width="1.5" points=""#);
        for (i, (x, y)) in c.curve.iter().enumerate() {
            if i > 0 {
                s.push(' ');
            }
            let _ = write!(s, "{:.2},{:.2}", sx(*x), sy(*y));
        }
        s.push_str("\"/>\n");
    }
    s.push_str("<g fill=\"firebrick\">\n");
    for p in &c.points {
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="3.5" data-x="{}" data-y="{}"><title>{}</title></circle>"#,
            sx(p.x),
            sy(p.y),
            p.x,
            p.y,
            xml_escape(&p.label)
        );
    }
    s.push_str("</g>\n</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use regularity_core::reference;

    fn circles(svg: &str) -> Vec<(f64, f64)> {
        svg.lines()
            .filter(|l| l.starts_with("<circle"))
            .map(|l| {
                let attr = |name: &str| -> f64 {
                    let start = l.find(&format!("{name}=\"")).unwrap() + name.len() + 2;
                    l[start..].split('"').next().unwrap().parse().unwrap()
                };
                (attr("data-x"), attr("data-y"))
            })
            .collect()
    }

    fn csv_points(csv: &str) -> Vec<(f64, f64)> {
        csv.lines()
            .skip(1)
            .map(|l| {
                let f: Vec<&str> = l.rsplitn(3, ',').collect();
                (f[1].parse().unwrap(), f[0].parse().unwrap())
            })
            .collect()
    }

    #[test]
    fn longbow_energy() {
        let fig = energy_figure(&Dataset::builtin_sample()).unwrap();
        let longbow = fig.points_csv.lines().find(|l| l.starts_with("Longbow,")).unwrap();
        let e: f64 = longbow.rsplit(',').next().unwrap().parse().unwrap();
        assert!((e - 112.99035).abs() < 1e-9);
        assert_eq!(circles(&fig.svg), csv_points(&fig.points_csv));
    }

    #[test]
    fn for_figure_points_and_curve() {
        let d = Dataset::builtin_sample();
        let m = reference::small_arms_for_model();
        let tm = reference::small_arms_temporal_model();
        let fig = for_figure(&d, Some(&m), Some(&tm), 2050.0).unwrap();
        assert_eq!(circles(&fig.svg), csv_points(&fig.points_csv));
        assert_eq!(circles(&fig.svg).len(), 8);
        let curve = fig.curve_csv.unwrap();
        assert!(curve.lines().nth(1).unwrap().starts_with("1180,"));
        let last = curve.lines().last().unwrap();
        assert!(last.starts_with("2050,"));
        let v: f64 = last.split(',').nth(1).unwrap().parse().unwrap();
        assert!((v - 6.97).abs() < 0.01);
    }

    #[test]
    fn empty_scatter_is_valid_svg() {
        let d = Dataset::builtin_sample().filter_years(0.0, 0.0);
        let fig = for_figure(&d, None, None, 2050.0).unwrap();
        assert!(fig.svg.contains("<svg") && fig.svg.trim_end().ends_with("</svg>"));
        assert!(fig.svg.contains("<line"));
        assert!(circles(&fig.svg).is_empty());
        assert_eq!(fig.points_csv, "name,year,log10_for\n");
    }

    #[test]
    fn tick_steps_are_round() {
        assert_eq!(ticks(0.0, 10.0), vec![0.0, 2.0, 4.0, 6.0, 8.0, 10.0]);
        assert_eq!(ticks(1150.0, 2090.0).first(), Some(&1200.0));
    }
}
