//! SVG line chart of mean ARI against the varied parameter.

use std::fmt::Write as _;
use std::path::Path;

use super::{HarnessError, Method, ResultRow, Vary};
use crate::kernels::Measure;
use crate::lfr::LfrParams;

pub const Y_MIN: f64 = -0.1;
pub const Y_MAX: f64 = 1.05;

#[derive(Debug, Clone)]
pub struct PlotOptions {
    /// Parameters whose value of the varied field is highlighted.
    pub basic: Option<LfrParams>,
    pub title: Option<String>,
    pub width: f64,
    pub height: f64,
}

impl Default for PlotOptions {
    fn default() -> Self {
        Self {
            basic: Some(LfrParams::default()),
            title: None,
            width: 720.0,
            height: 440.0,
        }
    }
}

const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 190.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 60.0;

fn color(measure: Measure) -> &'static str {
    match measure {
        Measure::Walk => "#1f77b4",
        Measure::Communicability => "#ff7f0e",
        Measure::Forest => "#2ca02c",
        Measure::Heat => "#d62728",
        Measure::PageRank => "#9467bd",
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn nice_step(range: f64, target_ticks: f64) -> f64 {
    let raw = range / target_ticks;
    let mag = 10f64.powf(raw.log10().floor());
    let frac = raw / mag;
    let nice = if frac <= 1.0 {
        1.0
    } else if frac <= 2.0 {
        2.0
    } else if frac <= 5.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn tick_label(v: f64, step: f64) -> String {
    let decimals = if step >= 1.0 {
        0
    } else {
        (-step.log10().floor()) as usize
    };
    let s = format!("{v:.decimals$}");
    if s.trim_start_matches('-')
        .bytes()
        .all(|b| b == b'0' || b == b'.')
    {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

struct Series {
    measure: Measure,
    method: Method,
    twins: Vec<Measure>,
    /// `(x, y, is_basic)` sorted by x.
    points: Vec<(f64, f64, bool)>,
}

fn x_of(row: &ResultRow) -> f64 {
    if row.vary == Vary::SizeLimits {
        row.avg_clusters
    } else {
        row.value.as_f64()
    }
}

/// One series per (measure, method); rows marked equivalent to another
/// measure are folded into that measure's legend entry. `y` is clamped
/// to `[-0.1, 1.05]`.
pub fn emit_plot(rows: &[ResultRow], options: &PlotOptions) -> Result<String, HarnessError> {
    let vary = match rows.first() {
        Some(r) => r.vary,
        None => Vary::Mu,
    };
    if let Some(other) = rows.iter().find(|r| r.vary != vary) {
        return Err(HarnessError::MixedSweep(vary, other.vary));
    }
    let basic = options.basic.as_ref().map(|p| vary.value_of(p));

    let mut series: Vec<Series> = Vec::new();
    let mut sorted = rows.to_vec();
    sorted.sort_by_key(|r| (r.method, r.measure));
    for r in sorted.iter().filter(|r| r.equivalent_to.is_none()) {
        let is_basic = basic.is_some_and(|b| b.total_cmp(&r.value).is_eq());
        let point = (x_of(r), r.ari_mean.clamp(Y_MIN, Y_MAX), is_basic);
        match series
            .iter_mut()
            .find(|s| s.measure == r.measure && s.method == r.method)
        {
            Some(s) => s.points.push(point),
            None => series.push(Series {
                measure: r.measure,
                method: r.method,
                twins: Vec::new(),
                points: vec![point],
            }),
        }
    }
    for r in rows {
        if let Some(rep) = r.equivalent_to {
            if let Some(s) = series
                .iter_mut()
                .find(|s| s.measure == rep && s.method == r.method)
            {
                if !s.twins.contains(&r.measure) {
                    s.twins.push(r.measure);
                }
            }
        }
    }
    for s in &mut series {
        s.points.sort_by(|a, b| a.0.total_cmp(&b.0));
    }

    let xs: Vec<f64> = series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.0))
        .collect();
    let (mut x_lo, mut x_hi) = xs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
    if xs.is_empty() {
        (x_lo, x_hi) = (0.0, 1.0);
    } else if x_hi - x_lo < 1e-12 {
        let pad = x_lo.abs().max(1.0) * 0.5;
        (x_lo, x_hi) = (x_lo - pad, x_hi + pad);
    } else {
        let pad = 0.05 * (x_hi - x_lo);
        (x_lo, x_hi) = (x_lo - pad, x_hi + pad);
    }

    let (w, h) = (options.width, options.height);
    let (left, right) = (MARGIN_LEFT, w - MARGIN_RIGHT);
    let (top, bottom) = (MARGIN_TOP, h - MARGIN_BOTTOM);
    let px = |x: f64| left + (x - x_lo) / (x_hi - x_lo) * (right - left);
    let py = |y: f64| bottom - (y - Y_MIN) / (Y_MAX - Y_MIN) * (bottom - top);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    if let Some(title) = &options.title {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
            (left + right) / 2.0,
            escape(title)
        );
    }

    // axes and grid
    let _ = writeln!(
        svg,
        r##"<rect x="{left:.2}" y="{top:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#333"/>"##,
        right - left,
        bottom - top
    );
    for i in 0..=5 {
        let y = i as f64 * 0.2;
        let _ = writeln!(
            svg,
            r##"<line x1="{left:.2}" y1="{0:.2}" x2="{right:.2}" y2="{0:.2}" stroke="#ddd"/><text x="{1:.2}" y="{2:.2}" text-anchor="end">{3}</text>"##,
            py(y),
            left - 6.0,
            py(y) + 4.0,
            tick_label(y, 0.2)
        );
    }
    let step = nice_step(x_hi - x_lo, 6.0);
    let mut t = (x_lo / step).ceil() * step;
    while t <= x_hi + 1e-9 * step {
        let _ = writeln!(
            svg,
            r##"<line x1="{0:.2}" y1="{bottom:.2}" x2="{0:.2}" y2="{1:.2}" stroke="#333"/><text x="{0:.2}" y="{2:.2}" text-anchor="middle">{3}</text>"##,
            px(t),
            bottom + 5.0,
            bottom + 18.0,
            tick_label(t, step)
        );
        t += step;
    }
    let x_label = if vary == Vary::SizeLimits {
        "average number of clusters".to_string()
    } else {
        vary.name().to_string()
    };
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        (left + right) / 2.0,
        h - 18.0,
        escape(&x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{0:.2}" text-anchor="middle" transform="rotate(-90 18 {0:.2})">mean ARI</text>"#,
        (top + bottom) / 2.0
    );

    // series
    for s in &series {
        let c = color(s.measure);
        let dash = if s.method == Method::Ward {
            r#" stroke-dasharray="6 3""#
        } else {
            ""
        };
        if s.points.len() > 1 {
            let pts: Vec<String> = s
                .points
                .iter()
                .map(|&(x, y, _)| format!("{:.2},{:.2}", px(x), py(y)))
                .collect();
            let _ = writeln!(
                svg,
                r#"<polyline points="{}" fill="none" stroke="{c}" stroke-width="2"{dash}/>"#,
                pts.join(" ")
            );
        }
        for &(x, y, is_basic) in &s.points {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{c}"/>"#,
                px(x),
                py(y)
            );
            if is_basic {
                let _ = writeln!(
                    svg,
                    r#"<circle class="basic" cx="{:.2}" cy="{:.2}" r="7" fill="none" stroke="black" stroke-width="1.5"/>"#,
                    px(x),
                    py(y)
                );
            }
        }
    }

    // legend
    for (i, s) in series.iter().enumerate() {
        let y = top + 10.0 + 20.0 * i as f64;
        let x = right + 16.0;
        let c = color(s.measure);
        let dash = if s.method == Method::Ward {
            r#" stroke-dasharray="6 3""#
        } else {
            ""
        };
        let mut name = s.measure.name().to_string();
        for t in &s.twins {
            name.push_str(" = ");
            name.push_str(t.name());
        }
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{c}" stroke-width="2"{dash}/><text x="{:.2}" y="{:.2}">{} ({})</text>"#,
            x + 24.0,
            x + 30.0,
            y + 4.0,
            escape(&name),
            s.method
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn write_plot(
    rows: &[ResultRow],
    path: &Path,
    options: &PlotOptions,
) -> Result<(), HarnessError> {
    let svg = emit_plot(rows, options)?;
    std::fs::write(path, svg)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::VaryValue;

    fn row(measure: Measure, method: Method, vary: Vary, value: VaryValue, ari: f64) -> ResultRow {
        ResultRow {
            measure,
            method,
            vary,
            value,
            best_alpha: 0.5,
            ari_mean: ari,
            ari_std: 0.0,
            replicates_used: 10,
            skipped: 0,
            avg_clusters: 3.0,
            equivalent_to: None,
        }
    }

    fn mu_rows(measures: &[Measure]) -> Vec<ResultRow> {
        let mut rows = Vec::new();
        for &m in measures {
            for i in 1..=6 {
                let mu = i as f64 / 10.0;
                rows.push(row(
                    m,
                    Method::Spectral,
                    Vary::Mu,
                    VaryValue::Real(mu),
                    1.0 - mu,
                ));
            }
        }
        rows
    }

    #[test]
    fn one_polyline_per_series() {
        let rows = mu_rows(&[Measure::Walk, Measure::Forest, Measure::PageRank]);
        let svg = emit_plot(&rows, &PlotOptions::default()).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 3);
        for line in svg.lines().filter(|l| l.starts_with("<polyline")) {
            let pts = line.split('"').nth(1).unwrap();
            assert_eq!(pts.split(' ').count(), 6);
        }
        // mu = 0.2 is the reference value
        assert_eq!(svg.matches(r#"class="basic""#).count(), 3);
        assert!(svg.contains(">mu<") && svg.contains("mean ARI"));
        assert!(svg.contains("Walk (Spectral)"));
    }

    #[test]
    fn single_row_single_marker() {
        let rows = vec![row(
            Measure::Walk,
            Method::Ward,
            Vary::M,
            VaryValue::Real(7.0),
            0.4,
        )];
        let svg = emit_plot(&rows, &PlotOptions::default()).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 0);
        assert_eq!(svg.matches(r#"r="3""#).count(), 1);
        assert_eq!(svg.matches(r#"class="basic""#).count(), 0);
    }

    #[test]
    fn y_is_clamped() {
        let rows = vec![
            row(
                Measure::Walk,
                Method::Ward,
                Vary::Mu,
                VaryValue::Real(0.1),
                -0.5,
            ),
            row(
                Measure::Walk,
                Method::Ward,
                Vary::Mu,
                VaryValue::Real(0.3),
                2.0,
            ),
        ];
        let opts = PlotOptions::default();
        let svg = emit_plot(&rows, &opts).unwrap();
        let bottom = opts.height - MARGIN_BOTTOM;
        let line = svg.lines().find(|l| l.starts_with("<polyline")).unwrap();
        let pts = line.split('"').nth(1).unwrap();
        let ys: Vec<f64> = pts
            .split(' ')
            .map(|p| p.split(',').nth(1).unwrap().parse().unwrap())
            .collect();
        assert!((ys[0] - bottom).abs() < 0.01);
        assert!((ys[1] - MARGIN_TOP).abs() < 0.01);
    }

    #[test]
    fn equivalent_rows_fold_into_legend() {
        let mut rows = mu_rows(&[Measure::Walk, Measure::Communicability]);
        for r in rows
            .iter_mut()
            .filter(|r| r.measure == Measure::Communicability)
        {
            r.equivalent_to = Some(Measure::Walk);
        }
        let svg = emit_plot(&rows, &PlotOptions::default()).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert!(svg.contains("Walk = Comm (Spectral)"));
    }

    #[test]
    fn size_limits_use_cluster_count_axis() {
        let mut a = row(
            Measure::Walk,
            Method::Spectral,
            Vary::SizeLimits,
            VaryValue::Limits(20, 50),
            0.3,
        );
        a.avg_clusters = 9.0;
        let b = row(
            Measure::Walk,
            Method::Spectral,
            Vary::SizeLimits,
            VaryValue::Limits(80, 140),
            0.8,
        );
        let svg = emit_plot(&[a, b], &PlotOptions::default()).unwrap();
        assert!(svg.contains("average number of clusters"));
        assert_eq!(svg.matches(r#"class="basic""#).count(), 1);
    }

    #[test]
    fn mixed_sweep_rejected() {
        let rows = vec![
            row(
                Measure::Walk,
                Method::Ward,
                Vary::Mu,
                VaryValue::Real(0.1),
                0.5,
            ),
            row(
                Measure::Walk,
                Method::Ward,
                Vary::M,
                VaryValue::Real(5.0),
                0.5,
            ),
        ];
        assert!(matches!(
            emit_plot(&rows, &PlotOptions::default()),
            Err(HarnessError::MixedSweep(Vary::Mu, Vary::M))
        ));
    }
}
