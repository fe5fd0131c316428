//! Minimal deterministic SVG charts.

use std::fmt::Write as _;

const W: f64 = 640.0;
const H: f64 = 400.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 56.0;

pub const PALETTE: [&str; 8] = ["#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3", "#937860", "#da8bc3", "#8c8c8c"];

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Linear mapping from data to pixels.
#[derive(Debug, Clone, Copy)]
struct Axis {
    lo: f64,
    hi: f64,
    px_lo: f64,
    px_hi: f64,
}

impl Axis {
    fn new(lo: f64, hi: f64, px_lo: f64, px_hi: f64) -> Axis {
        let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 0.5, lo + 0.5) };
        Axis { lo, hi, px_lo, px_hi }
    }

    fn map(&self, v: f64) -> f64 {
        self.px_lo + (v - self.lo) / (self.hi - self.lo) * (self.px_hi - self.px_lo)
    }

    fn ticks(&self) -> Vec<f64> {
        let span = self.hi - self.lo;
        let raw = span / 5.0;
        let mag = 10f64.powf(raw.log10().floor());
        let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
        let mut t = (self.lo / step).ceil() * step;
        let mut out = Vec::new();
        while t <= self.hi + step * 1e-9 {
            out.push(if t.abs() < step * 1e-9 { 0.0 } else { t });
            t += step;
        }
        out
    }
}

fn fmt_tick(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".to_owned() } else { s.to_owned() }
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, esc(title));
}

fn y_axis(out: &mut String, y: &Axis, label: &str) {
    let x0 = LEFT;
    let _ = writeln!(out, r#"<line x1="{x0}" y1="{}" x2="{x0}" y2="{}" stroke="black"/>"#, TOP, H - BOTTOM);
    for t in y.ticks() {
        let py = y.map(t);
        let _ = writeln!(
            out,
            r##"<line x1="{x0}" y1="{py:.1}" x2="{:.1}" y2="{py:.1}" stroke="#e5e5e5"/><text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"##,
            W - RIGHT,
            x0 - 6.0,
            py + 4.0,
            fmt_tick(t)
        );
    }
    let _ = writeln!(
        out,
        r#"<text transform="translate(16 {:.1}) rotate(-90)" text-anchor="middle">{}</text>"#,
        (TOP + H - BOTTOM) / 2.0,
        esc(label)
    );
}

fn legend(out: &mut String, names: &[String]) {
    for (i, name) in names.iter().enumerate() {
        let y = TOP + 8.0 + i as f64 * 18.0;
        let x = W - RIGHT + 14.0;
        let _ = writeln!(
            out,
            r#"<rect x="{x}" y="{:.1}" width="10" height="10" fill="{}"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            y - 9.0,
            PALETTE[i % PALETTE.len()],
            x + 16.0,
            y,
            esc(name)
        );
    }
}

/// Grouped bars: one group per category, one bar per series.
pub fn bar_chart(title: &str, y_label: &str, categories: &[String], series: &[(String, Vec<f64>)], y_max: f64) -> String {
    let mut out = String::new();
    header(&mut out, title);
    let y = Axis::new(0.0, y_max, H - BOTTOM, TOP);
    y_axis(&mut out, &y, y_label);
    let plot_w = W - RIGHT - LEFT;
    let group_w = plot_w / categories.len().max(1) as f64;
    let bar_w = group_w * 0.8 / series.len().max(1) as f64;
    let _ = writeln!(out, r#"<line x1="{LEFT}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#, H - BOTTOM, W - RIGHT, H - BOTTOM);
    for (ci, cat) in categories.iter().enumerate() {
        let gx = LEFT + ci as f64 * group_w;
        for (si, (_, values)) in series.iter().enumerate() {
            let v = values.get(ci).copied().unwrap_or(f64::NAN);
            if !v.is_finite() {
                continue;
            }
            let x = gx + group_w * 0.1 + si as f64 * bar_w;
            let top = y.map(v.clamp(0.0, y_max));
            let _ = writeln!(
                out,
                r#"<rect x="{x:.1}" y="{top:.1}" width="{:.1}" height="{:.1}" fill="{}"><title>{}: {v:.3}</title></rect>"#,
                bar_w * 0.95,
                (H - BOTTOM - top).max(0.0),
                PALETTE[si % PALETTE.len()],
                esc(cat)
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            gx + group_w / 2.0,
            H - BOTTOM + 18.0,
            esc(cat)
        );
    }
    let names: Vec<String> = series.iter().map(|(n, _)| n.clone()).collect();
    legend(&mut out, &names);
    out.push_str("</svg>\n");
    out
}

/// A named set of points drawn as markers, a polyline, or both.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
    pub markers: bool,
    pub line: bool,
}

/// Scatter/line plot on numeric axes. `x_labels`, when given, replaces the
/// numeric x ticks with category names at 0, 1, 2, ...
pub fn xy_chart(title: &str, x_label: &str, y_label: &str, series: &[Series], x_labels: Option<&[String]>) -> String {
    let all: Vec<(f64, f64)> = series.iter().flat_map(|s| s.points.iter().copied()).filter(|(x, y)| x.is_finite() && y.is_finite()).collect();
    let (mut xlo, mut xhi, mut ylo, mut yhi) = all.iter().fold(
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
        |(a, b, c, d), (x, y)| (a.min(*x), b.max(*x), c.min(*y), d.max(*y)),
    );
    if all.is_empty() {
        (xlo, xhi, ylo, yhi) = (0.0, 1.0, 0.0, 1.0);
    }
    let pad_x = (xhi - xlo).max(1e-9) * 0.05;
    let pad_y = (yhi - ylo).max(1e-9) * 0.05;
    let x = Axis::new(xlo - pad_x, xhi + pad_x, LEFT, W - RIGHT);
    let y = Axis::new(ylo - pad_y, yhi + pad_y, H - BOTTOM, TOP);
    let mut out = String::new();
    header(&mut out, title);
    y_axis(&mut out, &y, y_label);
    let base = H - BOTTOM;
    let _ = writeln!(out, r#"<line x1="{LEFT}" y1="{base}" x2="{}" y2="{base}" stroke="black"/>"#, W - RIGHT);
    let xticks: Vec<(f64, String)> = match x_labels {
        Some(labels) => labels.iter().enumerate().map(|(i, l)| (i as f64, l.clone())).collect(),
        None => x.ticks().into_iter().map(|t| (t, fmt_tick(t))).collect(),
    };
    for (t, label) in xticks {
        let px = x.map(t);
        let _ = writeln!(
            out,
            r#"<line x1="{px:.1}" y1="{base}" x2="{px:.1}" y2="{:.1}" stroke="black"/><text x="{px:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            base + 4.0,
            base + 18.0,
            esc(&label)
        );
    }
    let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, (LEFT + W - RIGHT) / 2.0, H - 12.0, esc(x_label));
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<(f64, f64)> = s.points.iter().copied().filter(|(a, b)| a.is_finite() && b.is_finite()).collect();
        if s.line && pts.len() > 1 {
            let path: Vec<String> = pts.iter().map(|(a, b)| format!("{:.1},{:.1}", x.map(*a), y.map(*b))).collect();
            let _ = writeln!(out, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#, path.join(" "));
        }
        if s.markers {
            for (a, b) in &pts {
                let _ = writeln!(out, r#"<circle cx="{:.1}" cy="{:.1}" r="3" fill="{color}" fill-opacity="0.7"/>"#, x.map(*a), y.map(*b));
            }
        }
    }
    let names: Vec<String> = series.iter().map(|s| s.name.clone()).collect();
    legend(&mut out, &names);
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ticks_are_round() {
        let t: Vec<String> = Axis::new(0.0, 1.0, 0.0, 1.0).ticks().into_iter().map(fmt_tick).collect();
        assert_eq!(t, ["0", "0.2", "0.4", "0.6", "0.8", "1"]);
        assert_eq!(Axis::new(-3.0, 47.0, 0.0, 1.0).ticks().len(), 5);
        assert_eq!(fmt_tick(0.6000000000000001), "0.6");
        assert_eq!(fmt_tick(-0.0), "0");
    }

    #[test]
    fn charts_are_well_formed_and_deterministic() {
        let cats = vec!["able".to_owned(), "ish".to_owned()];
        let bars = bar_chart("t", "ratio", &cats, &[("a<b".to_owned(), vec![0.1, 0.9])], 1.0);
        assert!(bars.starts_with("<svg") && bars.ends_with("</svg>\n"));
        assert!(bars.contains("a&lt;b"));
        let s = vec![Series { name: "s".into(), points: vec![(0.0, 1.0), (1.0, 2.0)], markers: true, line: true }];
        let a = xy_chart("t", "x", "y", &s, None);
        assert_eq!(a, xy_chart("t", "x", "y", &s, None));
        assert_eq!(a.matches("<circle").count(), 2);
        assert!(xy_chart("t", "x", "y", &[], None).contains("</svg>"));
    }
}
