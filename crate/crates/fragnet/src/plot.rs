//! SVG scatter of `cd` (x) against `spl` (y), one mark per run.
//!
//! Marks are `<circle class="mark">` elements filled on a cool-to-warm ramp
//! by the chosen sigma: `#3b4cc0` at the smallest plotted value, `#dddddd`
//! halfway and `#b40426` at the largest, interpolated linearly per RGB
//! channel. When every plotted run shares one value all marks take the low
//! end color. Runs with undefined `spl` and failed runs are left out and
//! counted in a legend note. The optional trend is a least-squares cubic of
//! `spl` on `cd`, drawn as `<polyline class="trend">`.

use std::fmt::Write as _;

use fragnet_core::stats::linalg::{polyfit, polyval};
use fragnet_core::RunResult;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ColorBy {
    SigmaD,
    SigmaRs,
    SigmaRw,
}

impl ColorBy {
    pub fn name(self) -> &'static str {
        match self {
            ColorBy::SigmaD => "sigma_d",
            ColorBy::SigmaRs => "sigma_rs",
            ColorBy::SigmaRw => "sigma_rw",
        }
    }

    fn value(self, r: &RunResult) -> f64 {
        match self {
            ColorBy::SigmaD => r.sigma_d,
            ColorBy::SigmaRs => r.sigma_rs,
            ColorBy::SigmaRw => r.sigma_rw,
        }
    }
}

impl std::str::FromStr for ColorBy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.replace('-', "_").as_str() {
            "sigma_d" => Ok(Self::SigmaD),
            "sigma_rs" => Ok(Self::SigmaRs),
            "sigma_rw" => Ok(Self::SigmaRw),
            _ => Err(format!("unknown sigma {s:?} (expected sigma-d, sigma-rs or sigma-rw)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlotOptions {
    pub color_by: ColorBy,
    pub trend: bool,
    pub width: f64,
    pub height: f64,
}

impl Default for PlotOptions {
    fn default() -> Self {
        Self {
            color_by: ColorBy::SigmaD,
            trend: false,
            width: 720.0,
            height: 540.0,
        }
    }
}

const RAMP: [[f64; 3]; 3] = [[59.0, 76.0, 192.0], [221.0, 221.0, 221.0], [180.0, 4.0, 38.0]];
const STROKE: f64 = 2.0;
const TREND_SAMPLES: usize = 200;
const MARGIN: (f64, f64, f64, f64) = (70.0, 170.0, 30.0, 60.0); // left, right, top, bottom

/// Ramp color for `t` in `[0, 1]` as `#rrggbb`.
pub fn ramp(t: f64) -> String {
    let t = t.clamp(0.0, 1.0) * 2.0;
    let (a, b, f) = if t <= 1.0 { (RAMP[0], RAMP[1], t) } else { (RAMP[1], RAMP[2], t - 1.0) };
    let ch = |k: usize| (a[k] + (b[k] - a[k]) * f).round() as u8;
    format!("#{:02x}{:02x}{:02x}", ch(0), ch(1), ch(2))
}

/// Tick positions at 1, 2 or 5 times a power of ten, about five per axis.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let raw = (hi - lo) / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| raw <= *s).unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn padded_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders the scatter. Fails on an empty table.
pub fn scatter_svg(rows: &[RunResult], opts: &PlotOptions) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::Input("no rows to plot".into()));
    }
    let points: Vec<(f64, f64, f64)> = rows
        .iter()
        .filter(|r| !r.failed)
        .filter_map(|r| r.spl.map(|spl| (r.cd, spl, opts.color_by.value(r))))
        .collect();
    let omitted = rows.len() - points.len();

    let (w, h) = (opts.width, opts.height);
    let (ml, mr, mt, mb) = MARGIN;
    let (x0, x1) = padded_range(points.iter().map(|p| p.0));
    let (y0, y1) = padded_range(points.iter().map(|p| p.1));
    let px = |x: f64| ml + (x - x0) / (x1 - x0) * (w - ml - mr);
    let py = |y: f64| h - mb - (y - y0) / (y1 - y0) * (h - mt - mb);
    let (c0, c1) = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.2), b.max(p.2)));
    let shade = |v: f64| if c1 > c0 { (v - c0) / (c1 - c0) } else { 0.0 };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r##"<rect width="{w}" height="{h}" fill="#ffffff"/>"##);

    s.push_str("<g class=\"axes\" stroke=\"#000000\">\n");
    let (left, right, top, bottom) = (ml, w - mr, mt, h - mb);
    let _ = writeln!(s, r#"<line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}"/>"#);
    let _ = writeln!(s, r#"<line x1="{left}" y1="{bottom}" x2="{left}" y2="{top}"/>"#);
    for t in ticks(x0, x1) {
        let x = px(t);
        let _ = writeln!(s, r#"<line x1="{x:.3}" y1="{bottom}" x2="{x:.3}" y2="{}"/>"#, bottom + 5.0);
        let _ = writeln!(
            s,
            r#"<text x="{x:.3}" y="{}" text-anchor="middle" stroke="none">{}</text>"#,
            bottom + 18.0,
            fmt_tick(t)
        );
    }
    for t in ticks(y0, y1) {
        let y = py(t);
        let _ = writeln!(s, r#"<line x1="{}" y1="{y:.3}" x2="{left}" y2="{y:.3}"/>"#, left - 5.0);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.3}" text-anchor="end" stroke="none">{}</text>"#,
            left - 8.0,
            y + 4.0,
            fmt_tick(t)
        );
    }
    s.push_str("</g>\n");
    let _ = writeln!(
        s,
        r#"<text class="x-label" x="{:.3}" y="{}" text-anchor="middle">mean intergroup cultural distance (cd)</text>"#,
        (left + right) / 2.0,
        h - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text class="y-label" x="18" y="{:.3}" text-anchor="middle" transform="rotate(-90 18 {:.3})">average shortest path length (spl)</text>"#,
        (top + bottom) / 2.0,
        (top + bottom) / 2.0
    );

    s.push_str("<g class=\"marks\">\n");
    for &(x, y, v) in &points {
        let _ = writeln!(
            s,
            r#"<circle class="mark" cx="{:.3}" cy="{:.3}" r="3" fill="{}" fill-opacity="0.8"/>"#,
            px(x),
            py(y),
            ramp(shade(v))
        );
    }
    s.push_str("</g>\n");

    let mut notes = Vec::new();
    if omitted > 0 {
        notes.push(format!("{omitted} runs without spl omitted"));
    }
    if opts.trend {
        let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
        match polyfit(&xs, &ys, 3) {
            Ok(coef) => {
                let (lo, hi) = (xs.iter().copied().fold(f64::INFINITY, f64::min), xs.iter().copied().fold(f64::NEG_INFINITY, f64::max));
                let pts: Vec<String> = (0..=TREND_SAMPLES)
                    .map(|i| {
                        let x = lo + (hi - lo) * i as f64 / TREND_SAMPLES as f64;
                        format!("{:.3},{:.3}", px(x), py(polyval(&coef, x)))
                    })
                    .collect();
                let _ = writeln!(
                    s,
                    r##"<polyline class="trend" fill="none" stroke="#000000" stroke-width="{STROKE}" points="{}"/>"##,
                    pts.join(" ")
                );
            }
            Err(_) => notes.push("cubic trend needs 4 distinct cd values".into()),
        }
    }

    let lx = w - mr + 25.0;
    s.push_str("<g class=\"legend\">\n");
    s.push_str("<defs><linearGradient id=\"ramp\" x1=\"0\" y1=\"1\" x2=\"0\" y2=\"0\">");
    for (k, stop) in ["0", "0.5", "1"].iter().enumerate() {
        let _ = write!(s, r#"<stop offset="{stop}" stop-color="{}"/>"#, ramp(k as f64 / 2.0));
    }
    s.push_str("</linearGradient></defs>\n");
    let _ = writeln!(s, r#"<text x="{lx}" y="{}">{}</text>"#, mt + 10.0, opts.color_by.name());
    let _ = writeln!(s, r##"<rect x="{lx}" y="{}" width="16" height="150" fill="url(#ramp)" stroke="#000000"/>"##, mt + 20.0);
    if points.is_empty() {
        let _ = writeln!(s, r#"<text x="{}" y="{}">no plotted runs</text>"#, lx + 22.0, mt + 95.0);
    } else {
        let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, lx + 22.0, mt + 30.0, c1);
        let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, lx + 22.0, mt + 170.0, c0);
    }
    for (i, note) in notes.iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<text class="note" x="{lx}" y="{}" font-size="10">{}</text>"#,
            mt + 200.0 + 16.0 * i as f64,
            escape(note)
        );
    }
    s.push_str("</g>\n</svg>\n");
    Ok(s)
}

fn fmt_tick(t: f64) -> String {
    let s = format!("{t:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}
