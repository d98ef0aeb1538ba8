//! Ratio-vs-T trend curves as plain SVG.

use jacob_core::verify::{log_squared_window, GridOutcome, WindowChoice};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub name: String,
    /// (log10 T, ratio), sorted by T
    pub points: Vec<(f64, f64)>,
}

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"];

fn window_label(t: f64, u: f64, windows: &[WindowChoice]) -> String {
    let near = |v: f64| (v - u).abs() <= 1e-9 * u;
    if let Some(w) = windows.iter().find(|w| near(w.length(t))) {
        return w.to_string();
    }
    if near(log_squared_window(t)) {
        return WindowChoice::LogSquared.to_string();
    }
    format!("T^{:.3}", u.ln() / t.ln())
}

/// Groups outcomes into curves, one file stem per claim. Geometry ratios get
/// their own file with one curve per check and k.
pub fn collect(outcomes: &[GridOutcome], windows: &[WindowChoice]) -> BTreeMap<String, Vec<Series>> {
    let mut files: BTreeMap<String, BTreeMap<String, Vec<(f64, f64)>>> = BTreeMap::new();
    for o in outcomes {
        match o {
            GridOutcome::Report(r) => {
                let Some(ratio) = r.ratio else { continue };
                let p = &r.params;
                let name = format!("n={} U={} F={}", p.n, window_label(p.t, p.u, windows), p.f.label());
                files
                    .entry(r.claim_id.as_str().to_string())
                    .or_default()
                    .entry(name)
                    .or_default()
                    .push((p.t.log10(), ratio));
            }
            GridOutcome::Geometry(g) => {
                let p = &g.params;
                for c in g.checks.iter().filter(|c| c.name.ends_with("_ratio")) {
                    let name = format!("{} k={} n={} U={}", c.name, c.k, p.n, window_label(p.t, p.u, windows));
                    files.entry("geometry".into()).or_default().entry(name).or_default().push((p.t.log10(), c.value));
                }
            }
            _ => {}
        }
    }
    files
        .into_iter()
        .map(|(file, curves)| {
            let series = curves
                .into_iter()
                .map(|(name, mut points)| {
                    points.sort_by(|a, b| a.0.total_cmp(&b.0));
                    Series { name, points }
                })
                .collect();
            (file, series)
        })
        .collect()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn svg(title: &str, series: &[Series]) -> String {
    let (w, h) = (760.0, 440.0);
    let (left, right, top, bottom) = (70.0, 260.0, 40.0, 50.0);
    let pw = w - left - right;
    let ph = h - top - bottom;
    let all = series.iter().flat_map(|s| s.points.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, 1.0f64, 1.0f64);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        if y.is_finite() {
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
    }
    if !x0.is_finite() {
        (x0, x1) = (0.0, 1.0);
    }
    x0 -= 0.25;
    x1 += 0.25;
    let pad = 0.1 * (y1 - y0).max(0.05);
    y0 -= pad;
    y1 += pad;
    let sx = |x: f64| left + pw * (x - x0) / (x1 - x0);
    let sy = |y: f64| top + ph * (1.0 - (y - y0) / (y1 - y0));

    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(out, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{:.1}" y="24" font-size="15">{}</text>"#, left, escape(title));
    let _ = writeln!(out, r##"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="#444"/>"##);
    for d in (x0.ceil() as i32)..=(x1.floor() as i32) {
        let x = sx(d as f64);
        let _ = writeln!(out, r##"<line x1="{x:.1}" y1="{:.1}" x2="{x:.1}" y2="{:.1}" stroke="#444"/>"##, top + ph, top + ph + 5.0);
        let _ = writeln!(out, r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">1e{d}</text>"#, top + ph + 20.0);
    }
    for j in 0..=5 {
        let y = y0 + (y1 - y0) * j as f64 / 5.0;
        let py = sy(y);
        let _ = writeln!(out, r##"<line x1="{:.1}" y1="{py:.1}" x2="{left}" y2="{py:.1}" stroke="#444"/>"##, left - 5.0);
        let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{y:.3}</text>"#, left - 8.0, py + 4.0);
    }
    let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">T</text>"#, left + pw / 2.0, h - 10.0);
    let _ = writeln!(out, r#"<text x="16" y="{:.1}" transform="rotate(-90 16 {:.1})" text-anchor="middle">ratio</text>"#, top + ph / 2.0, top + ph / 2.0);
    let one = sy(1.0);
    let _ = writeln!(out, r##"<line x1="{left}" y1="{one:.1}" x2="{:.1}" y2="{one:.1}" stroke="#999" stroke-dasharray="4 4"/>"##, left + pw);

    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .filter(|p| p.1.is_finite())
            .map(|&(x, y)| format!("{:.1},{:.1}", sx(x), sy(y)))
            .collect();
        if pts.len() > 1 {
            let _ = writeln!(out, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#, pts.join(" "));
        }
        for p in &pts {
            let (cx, cy) = p.split_once(',').unwrap();
            let _ = writeln!(out, r#"<circle cx="{cx}" cy="{cy}" r="3" fill="{color}"/>"#);
        }
        let ly = top + 14.0 * i as f64 + 6.0;
        let lx = left + pw + 14.0;
        let _ = writeln!(out, r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/>"#, lx + 18.0);
        let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" font-size="10">{}</text>"#, lx + 22.0, ly + 3.5, escape(&s.name));
    }
    out.push_str("</svg>\n");
    out
}

/// Writes `<dir>/<claim>.svg` for every claim present; returns the paths.
pub fn write_plots(dir: &Path, outcomes: &[GridOutcome], windows: &[WindowChoice]) -> std::io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    for (stem, series) in collect(outcomes, windows) {
        let path = dir.join(format!("{stem}.svg"));
        std::fs::write(&path, svg(&format!("{stem}: ratio against T"), &series))?;
        paths.push(path);
    }
    Ok(paths)
}
