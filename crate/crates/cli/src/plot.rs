//! Minimal self-contained SVG charts from bench records.

use std::fmt::Write as _;

use star_ci::bench::{ecdf, BenchRecord, DistributionSpec};
use star_ci::{Error, Result};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 170.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 55.0;
const PALETTE: [&str; 8] = [
    "#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf", "#7f7f7f",
];

/// Linear map from data to pixel coordinates.
struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        MARGIN_LEFT + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT
            - MARGIN_BOTTOM
            - (y - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    }
}

fn methods_in_order(records: &[BenchRecord]) -> Vec<String> {
    let mut methods: Vec<String> = Vec::new();
    for r in records {
        if !methods.contains(&r.method) {
            methods.push(r.method.clone());
        }
    }
    methods
}

fn header(title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="18" text-anchor="middle" font-size="14">{title}</text>"#,
        WIDTH / 2.0
    );
    s
}

fn axes(
    s: &mut String,
    frame: &Frame,
    x_ticks: &[(f64, String)],
    y_ticks: &[(f64, String)],
    x_label: &str,
    y_label: &str,
) {
    let (x0, x1) = (frame.px(frame.x.0), frame.px(frame.x.1));
    let (y0, y1) = (frame.py(frame.y.0), frame.py(frame.y.1));
    let _ = writeln!(
        s,
        r#"<line class="axis" x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y0:.2}" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<line class="axis" x1="{x0:.2}" y1="{y0:.2}" x2="{x0:.2}" y2="{y1:.2}" stroke="black"/>"#
    );
    for (v, label) in x_ticks {
        let x = frame.px(*v);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{y0:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#,
            y0 + 5.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{label}</text>"#,
            y0 + 18.0
        );
    }
    for (v, label) in y_ticks {
        let y = frame.py(*v);
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{x0:.2}" y2="{y:.2}" stroke="black"/>"#,
            x0 - 5.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{label}</text>"#,
            x0 - 8.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{x_label}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{y_label}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );
}

fn polyline(s: &mut String, points: &[(f64, f64)], frame: &Frame, color: &str, method: &str) {
    let coords: Vec<String> = points
        .iter()
        .map(|&(x, y)| format!("{:.2},{:.2}", frame.px(x), frame.py(y)))
        .collect();
    let _ = writeln!(
        s,
        r#"<polyline data-method="{method}" fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
        coords.join(" ")
    );
}

fn legend(s: &mut String, methods: &[String]) {
    let x = WIDTH - MARGIN_RIGHT + 15.0;
    for (i, method) in methods.iter().enumerate() {
        let y = MARGIN_TOP + 10.0 + 20.0 * i as f64;
        let color = PALETTE[i % PALETTE.len()];
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{color}" stroke-width="2"/>"#,
            x + 20.0
        );
        let _ = writeln!(
            s,
            r#"<text class="legend-entry" x="{:.2}" y="{:.2}">{method}</text>"#,
            x + 26.0,
            y + 4.0
        );
    }
}

fn log_ticks(lo: f64, hi: f64) -> Vec<(f64, String)> {
    // decade ticks, plus 2 and 5 multiples when the range is narrow
    let mut ticks = Vec::new();
    let narrow = hi - lo < 2.0;
    for e in (lo.floor() as i32)..=(hi.ceil() as i32) {
        for m in [1.0, 2.0, 5.0] {
            if m != 1.0 && !narrow {
                continue;
            }
            let v = m * 10f64.powi(e);
            let lv = v.log10();
            if lv >= lo - 1e-9 && lv <= hi + 1e-9 {
                ticks.push((lv, format!("{v}")));
            }
        }
    }
    ticks
}

/// Log-log curves of mean width against `n`, one polyline per method. For
/// lower-bound-only records (every upper bound is 1) the mean distance from
/// the lower bound to the true mean is plotted instead.
pub fn widths_svg(records: &[BenchRecord]) -> Result<String> {
    if records.is_empty() {
        return Err(Error::Config("no records to plot".into()));
    }
    let true_mean = records[0]
        .dist
        .parse::<DistributionSpec>()
        .ok()
        .map(|d| d.mean());
    let lower_only = records.iter().all(|r| r.upper == 1.0);
    let use_distance = lower_only && true_mean.is_some();
    let metric = |r: &BenchRecord| match (use_distance, true_mean) {
        (true, Some(mu)) => mu - r.lower,
        _ => r.width,
    };

    let methods = methods_in_order(records);
    let mut curves: Vec<Vec<(f64, f64)>> = Vec::new();
    for method in &methods {
        let mut ns: Vec<usize> = records
            .iter()
            .filter(|r| &r.method == method)
            .map(|r| r.n)
            .collect();
        ns.sort_unstable();
        ns.dedup();
        let curve = ns
            .iter()
            .map(|&n| {
                let cell: Vec<f64> = records
                    .iter()
                    .filter(|r| &r.method == method && r.n == n)
                    .map(metric)
                    .collect();
                let mean = cell.iter().sum::<f64>() / cell.len() as f64;
                ((n as f64).log10(), mean.max(1e-6).log10())
            })
            .collect();
        curves.push(curve);
    }

    let all = curves.iter().flatten();
    let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in all {
        xmin = xmin.min(x);
        xmax = xmax.max(x);
        ymin = ymin.min(y);
        ymax = ymax.max(y);
    }
    if xmax - xmin < 1e-9 {
        xmin -= 0.5;
        xmax += 0.5;
    }
    if ymax - ymin < 1e-9 {
        ymin -= 0.5;
        ymax += 0.5;
    }
    let pad = 0.05 * (ymax - ymin);
    let frame = Frame {
        x: (xmin, xmax),
        y: (ymin - pad, ymax + pad),
    };

    let y_label = if use_distance {
        "mean distance to the mean"
    } else {
        "mean width"
    };
    let mut s = header(&format!("{y_label} vs n ({})", records[0].dist));
    axes(
        &mut s,
        &frame,
        &log_ticks(frame.x.0, frame.x.1),
        &log_ticks(frame.y.0, frame.y.1),
        "n (log scale)",
        &format!("{y_label} (log scale)"),
    );
    for (i, (method, curve)) in methods.iter().zip(&curves).enumerate() {
        polyline(&mut s, curve, &frame, PALETTE[i % PALETTE.len()], method);
    }
    legend(&mut s, &methods);
    s.push_str("</svg>\n");
    Ok(s)
}

/// Step curves of the empirical CDF of lower bounds at sample size `n`, with
/// a vertical line at the true mean and a horizontal line at `1 - δ`.
pub fn ecdf_svg(records: &[BenchRecord], n: usize) -> Result<String> {
    let methods: Vec<String> = methods_in_order(records)
        .into_iter()
        .filter(|m| records.iter().any(|r| &r.method == m && r.n == n))
        .collect();
    if methods.is_empty() {
        return Err(Error::Config(format!("no records at n = {n}")));
    }
    let curves = methods
        .iter()
        .map(|m| ecdf(records, m, n))
        .collect::<Result<Vec<_>>>()?;
    let frame = Frame {
        x: (0.0, 1.0),
        y: (0.0, 1.0),
    };
    let ticks: Vec<(f64, String)> = (0..=5)
        .map(|i| (i as f64 / 5.0, format!("{:.1}", i as f64 / 5.0)))
        .collect();

    let mut s = header(&format!(
        "eCDF of lower bounds, n = {n} ({})",
        records[0].dist
    ));
    axes(
        &mut s,
        &frame,
        &ticks,
        &ticks,
        "lower bound",
        "fraction of lower bounds below",
    );
    if let Some(mu) = curves[0].true_mean {
        let x = frame.px(mu);
        let _ = writeln!(
            s,
            r#"<line class="true-mean" x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="magenta"/>"#,
            frame.py(0.0),
            frame.py(1.0)
        );
    }
    let y = frame.py(curves[0].target);
    let _ = writeln!(
        s,
        r#"<line class="target-coverage" x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="magenta"/>"#,
        frame.px(0.0),
        frame.px(1.0)
    );
    for (i, curve) in curves.iter().enumerate() {
        let mut steps = vec![(0.0, 0.0)];
        let mut prev = 0.0;
        for &(x, y) in &curve.points {
            steps.push((x, prev));
            steps.push((x, y));
            prev = y;
        }
        steps.push((1.0, prev));
        polyline(
            &mut s,
            &steps,
            &frame,
            PALETTE[i % PALETTE.len()],
            &curve.method,
        );
    }
    legend(&mut s, &methods);
    s.push_str("</svg>\n");
    Ok(s)
}
