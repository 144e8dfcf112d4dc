//! Minimal self-contained SVG line plots (log-log convergence plots and
//! solution profiles). Output is byte-deterministic.

use std::fmt::Write as _;

use crate::metrics::OrderTable;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

/// Axis range `[lo, hi]` in plot coordinates (log10 for log axes).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
}

impl Range {
    /// Bounding range of `values` padded by 10% of its span on each side.
    pub fn padded(values: impl IntoIterator<Item = f64>) -> Option<Self> {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !(lo.is_finite() && hi.is_finite()) {
            return None;
        }
        let span = if hi > lo { hi - lo } else { 1.0 };
        Some(Self {
            lo: lo - 0.1 * span,
            hi: hi + 0.1 * span,
        })
    }

    fn map(&self, v: f64, a: f64, b: f64) -> f64 {
        a + (v - self.lo) / (self.hi - self.lo) * (b - a)
    }
}

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

struct Frame {
    x: Range,
    y: Range,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        self.x.map(x, LEFT, WIDTH - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        self.y.map(y, HEIGHT - BOTTOM, TOP)
    }
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        (LEFT + WIDTH - RIGHT) / 2.0,
        escape(title)
    );
    let _ = writeln!(
        out,
        r#"<defs><clipPath id="plot"><rect x="{LEFT}" y="{TOP}" width="{:.1}" height="{:.1}"/></clipPath></defs>"#,
        WIDTH - LEFT - RIGHT,
        HEIGHT - TOP - BOTTOM
    );
}

fn axes(out: &mut String, f: &Frame, log: bool, xlabel: &str, ylabel: &str) {
    let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP);
    let _ = writeln!(
        out,
        r#"<rect x="{x0}" y="{y1}" width="{:.1}" height="{:.1}" fill="none" stroke="black"/>"#,
        x1 - x0,
        y0 - y1
    );
    for (range, horizontal) in [(f.x, true), (f.y, false)] {
        for (v, label) in ticks(range, log) {
            if horizontal {
                let p = f.px(v);
                let _ = writeln!(
                    out,
                    r#"<line x1="{p:.2}" y1="{y0}" x2="{p:.2}" y2="{:.1}" stroke="black"/><text x="{p:.2}" y="{:.1}" text-anchor="middle">{label}</text>"#,
                    y0 - 5.0,
                    y0 + 18.0
                );
            } else {
                let p = f.py(v);
                let _ = writeln!(
                    out,
                    r#"<line x1="{x0}" y1="{p:.2}" x2="{:.1}" y2="{p:.2}" stroke="black"/><text x="{:.1}" y="{:.2}" text-anchor="end">{label}</text>"#,
                    x0 + 5.0,
                    x0 - 6.0,
                    p + 4.0
                );
            }
        }
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 15.0,
        escape(xlabel)
    );
    let _ = writeln!(
        out,
        r#"<text x="18" y="{:.1}" text-anchor="middle" transform="rotate(-90 18 {:.1})">{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(ylabel)
    );
}

fn ticks(r: Range, log: bool) -> Vec<(f64, String)> {
    if log {
        (r.lo.ceil() as i64..=r.hi.floor() as i64)
            .map(|e| (e as f64, format!("1e{e}")))
            .collect()
    } else {
        let step = nice_step((r.hi - r.lo) / 5.0);
        let first = (r.lo / step).ceil() as i64;
        let last = (r.hi / step).floor() as i64;
        (first..=last)
            .map(|k| {
                let v = k as f64 * step;
                (v, format!("{}", (v * 1e6).round() / 1e6))
            })
            .collect()
    }
}

fn nice_step(raw: f64) -> f64 {
    let mag = 10f64.powf(raw.log10().floor());
    let m = raw / mag;
    mag * if m < 1.5 {
        1.0
    } else if m < 3.5 {
        2.0
    } else if m < 7.5 {
        5.0
    } else {
        10.0
    }
}

fn polyline(out: &mut String, f: &Frame, pts: &[(f64, f64)], color: &str, markers: bool) {
    let coords: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", f.px(x), f.py(y))).collect();
    let _ = writeln!(
        out,
        r#"<polyline clip-path="url(#plot)" fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
        coords.join(" ")
    );
    if markers {
        for &(x, y) in pts {
            let _ = writeln!(
                out,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                f.px(x),
                f.py(y)
            );
        }
    }
}

fn legend_entry(out: &mut String, k: usize, label: &str, color: &str, dashed: bool) {
    let x = WIDTH - RIGHT + 12.0;
    let y = TOP + 10.0 + 18.0 * k as f64;
    let dash = if dashed { r#" stroke-dasharray="6,4""# } else { "" };
    let _ = writeln!(
        out,
        r#"<line x1="{x}" y1="{y}" x2="{:.1}" y2="{y}" stroke="{color}" stroke-width="1.5"{dash}/><text x="{:.1}" y="{:.1}">{}</text>"#,
        x + 22.0,
        x + 28.0,
        y + 4.0,
        escape(label)
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Log-log plot of error against `h`, one polyline per table, with dashed
/// reference slopes of orders 1, 2 and 3 through the finest point of the
/// first table. Non-positive errors are skipped.
pub fn convergence_svg(tables: &[OrderTable], title: &str) -> String {
    let series: Vec<Vec<(f64, f64)>> = tables
        .iter()
        .map(|t| {
            t.points
                .iter()
                .filter(|p| p.0 > 0.0 && p.1 > 0.0)
                .map(|&(h, e)| (h.log10(), e.log10()))
                .collect()
        })
        .collect();
    let all = || series.iter().flatten();
    let mut out = String::new();
    header(&mut out, title);
    let (Some(x), Some(y)) = (Range::padded(all().map(|p| p.0)), Range::padded(all().map(|p| p.1))) else {
        out.push_str("</svg>\n");
        return out;
    };
    let f = Frame { x, y };
    axes(&mut out, &f, true, "h", "L1 error");

    let mut k = 0;
    if let Some(&(hx, ey)) = series.iter().find_map(|s| s.last()) {
        for (order, gray) in [(1.0, "#bbbbbb"), (2.0, "#888888"), (3.0, "#444444")] {
            let line = [(x.lo, ey + order * (x.lo - hx)), (x.hi, ey + order * (x.hi - hx))];
            let coords = format!(
                "{:.2},{:.2} {:.2},{:.2}",
                f.px(line[0].0),
                f.py(line[0].1),
                f.px(line[1].0),
                f.py(line[1].1)
            );
            let _ = writeln!(
                out,
                r#"<polyline clip-path="url(#plot)" fill="none" stroke="{gray}" stroke-dasharray="6,4" points="{coords}"/>"#
            );
            legend_entry(&mut out, k, &format!("slope {order}"), gray, true);
            k += 1;
        }
    }
    for (j, (t, pts)) in tables.iter().zip(&series).enumerate() {
        let color = COLORS[j % COLORS.len()];
        polyline(&mut out, &f, pts, color, true);
        legend_entry(&mut out, k, &t.label, color, false);
        k += 1;
    }
    out.push_str("</svg>\n");
    out
}

/// Linear-axes plot of solution profiles.
pub fn profile_svg(series: &[Series], title: &str) -> String {
    let all = || series.iter().flat_map(|s| s.points.iter());
    let mut out = String::new();
    header(&mut out, title);
    let (Some(x), Some(y)) = (Range::padded(all().map(|p| p.0)), Range::padded(all().map(|p| p.1))) else {
        out.push_str("</svg>\n");
        return out;
    };
    let f = Frame { x, y };
    axes(&mut out, &f, false, "x", "u");
    for (j, s) in series.iter().enumerate() {
        let color = COLORS[j % COLORS.len()];
        polyline(&mut out, &f, &s.points, color, s.points.len() <= 64);
        legend_entry(&mut out, j, &s.label, color, false);
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(label: &str, k: f64) -> OrderTable {
        OrderTable::new(label, None, [0.1f64, 0.05, 0.025, 0.0125].iter().map(|&h| (h, k * h.powi(3))).collect())
    }

    #[test]
    fn one_polyline_per_scheme_plus_references() {
        let one = convergence_svg(&[table("a", 1.0)], "t");
        assert_eq!(one.matches("<circle").count(), 4);
        // three reference lines and one data line
        assert_eq!(one.matches("<polyline").count(), 4);
        let two = convergence_svg(&[table("a", 1.0), table("b", 2.0)], "t");
        assert_eq!(two.matches("<polyline").count(), 5);
        assert!(two.contains(">a</text>") && two.contains(">b</text>"));
        assert!(two.contains("stroke-dasharray"));
        assert_eq!(two, convergence_svg(&[table("a", 1.0), table("b", 2.0)], "t"));
    }

    #[test]
    fn padded_range_covers_data() {
        let r = Range::padded([1.0, 3.0]).unwrap();
        assert!((r.lo - 0.8).abs() < 1e-15 && (r.hi - 3.2).abs() < 1e-15);
        assert!(Range::padded(std::iter::empty()).is_none());
        let flat = Range::padded([2.0, 2.0]).unwrap();
        assert!(flat.lo < 2.0 && flat.hi > 2.0);
    }

    #[test]
    fn data_points_stay_inside_the_frame() {
        let svg = convergence_svg(&[table("a", 1.0)], "t");
        for c in svg.split("<circle").skip(1) {
            let cx: f64 = c.split("cx=\"").nth(1).unwrap().split('"').next().unwrap().parse().unwrap();
            let cy: f64 = c.split("cy=\"").nth(1).unwrap().split('"').next().unwrap().parse().unwrap();
            assert!(cx > LEFT && cx < WIDTH - RIGHT && cy > TOP && cy < HEIGHT - BOTTOM);
        }
    }

    #[test]
    fn profile_plot() {
        let s = Series {
            label: "u".into(),
            points: (0..10).map(|k| (k as f64 / 10.0, (k as f64).sin())).collect(),
        };
        let svg = profile_svg(&[s], "p");
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<circle").count(), 10);
    }
}
