//! Minimal SVG plots: axes, points, error segments and a diagonal.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 6] = ["#1b6ca8", "#d1495b", "#2e8b57", "#8a5a44", "#6a4c93", "#444444"];

/// One point of a line series with a symmetric error bar.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
    pub err: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<Point>,
}

#[derive(Debug, Clone, Copy)]
struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn new(values: impl Iterator<Item = f64>, log: bool) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values.filter(|v| v.is_finite() && (!log || *v > 0.0)) {
            let v = if log { v.log10() } else { v };
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        if hi - lo < 1e-12 {
            lo -= 0.5;
            hi += 0.5;
        }
        let pad = 0.04 * (hi - lo);
        Self {
            lo: lo - pad,
            hi: hi + pad,
            log,
        }
    }

    fn unit(&self, v: f64) -> Option<f64> {
        let v = if self.log {
            if v <= 0.0 {
                return None;
            }
            v.log10()
        } else {
            v
        };
        v.is_finite().then(|| (v - self.lo) / (self.hi - self.lo))
    }

    fn ticks(&self) -> Vec<(f64, String)> {
        if self.log {
            let (a, b) = (self.lo.ceil() as i32, self.hi.floor() as i32);
            return (a..=b).map(|e| (f64::from(e), format!("1e{e}"))).collect();
        }
        (0..=4)
            .map(|k| {
                let v = self.lo + (self.hi - self.lo) * f64::from(k) / 4.0;
                (v, format!("{v:.3}"))
            })
            .collect()
    }
}

struct Canvas {
    out: String,
    x: Axis,
    y: Axis,
}

impl Canvas {
    fn new(title: &str, x_label: &str, y_label: &str, x: Axis, y: Axis) -> Self {
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
            LEFT + plot_w() / 2.0,
            escape(title)
        );
        let (x0, y0, x1, y1) = (LEFT, TOP + plot_h(), LEFT + plot_w(), TOP);
        let _ = writeln!(
            out,
            r#"<path d="M{x0:.1},{y1:.1} L{x0:.1},{y0:.1} L{x1:.1},{y0:.1}" fill="none" stroke="black"/>"#
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            LEFT + plot_w() / 2.0,
            HEIGHT - 18.0,
            escape(x_label)
        );
        let _ = writeln!(
            out,
            r#"<text x="18" y="{:.1}" text-anchor="middle" transform="rotate(-90 18 {:.1})">{}</text>"#,
            TOP + plot_h() / 2.0,
            TOP + plot_h() / 2.0,
            escape(y_label)
        );
        let mut c = Self { out, x, y };
        for (v, label) in x.ticks() {
            let px = LEFT + plot_w() * (v - x.lo) / (x.hi - x.lo);
            let _ = writeln!(
                c.out,
                r#"<line x1="{px:.1}" y1="{y0:.1}" x2="{px:.1}" y2="{:.1}" stroke="black"/><text x="{px:.1}" y="{:.1}" text-anchor="middle">{label}</text>"#,
                y0 + 5.0,
                y0 + 19.0
            );
        }
        for (v, label) in y.ticks() {
            let py = TOP + plot_h() * (1.0 - (v - y.lo) / (y.hi - y.lo));
            let _ = writeln!(
                c.out,
                r#"<line x1="{:.1}" y1="{py:.1}" x2="{x0:.1}" y2="{py:.1}" stroke="black"/><text x="{:.1}" y="{:.1}" text-anchor="end">{label}</text>"#,
                x0 - 5.0,
                x0 - 8.0,
                py + 4.0
            );
        }
        c
    }

    fn px(&self, x: f64, y: f64) -> Option<(f64, f64)> {
        let u = self.x.unit(x)?;
        let v = self.y.unit(y)?;
        Some((LEFT + plot_w() * u, TOP + plot_h() * (1.0 - v)))
    }

    fn legend(&mut self, k: usize, name: &str, color: &str) {
        let y = TOP + 10.0 + 18.0 * k as f64;
        let x = LEFT + plot_w() + 15.0;
        let _ = writeln!(
            self.out,
            r#"<circle cx="{x:.1}" cy="{y:.1}" r="4" fill="{color}"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            x + 10.0,
            y + 4.0,
            escape(name)
        );
    }

    fn finish(mut self) -> String {
        self.out.push_str("</svg>\n");
        self.out
    }
}

fn plot_w() -> f64 {
    WIDTH - LEFT - RIGHT
}

fn plot_h() -> f64 {
    HEIGHT - TOP - BOTTOM
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Line chart with vertical error segments (`y ± err`).
pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series], log_x: bool) -> String {
    let all = || series.iter().flat_map(|s| s.points.iter());
    let x = Axis::new(all().map(|p| p.x), log_x);
    let y = Axis::new(all().flat_map(|p| [p.y - p.err, p.y + p.err]), false);
    let mut c = Canvas::new(title, x_label, y_label, x, y);
    for (k, s) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let mut path = String::new();
        for p in &s.points {
            let Some((px, py)) = c.px(p.x, p.y) else { continue };
            let cmd = if path.is_empty() { 'M' } else { 'L' };
            let _ = write!(path, "{cmd}{px:.1},{py:.1} ");
            if let (Some((_, lo)), Some((_, hi))) = (c.px(p.x, p.y - p.err), c.px(p.x, p.y + p.err)) {
                let _ = writeln!(
                    c.out,
                    r#"<line x1="{px:.1}" y1="{lo:.1}" x2="{px:.1}" y2="{hi:.1}" stroke="{color}"/>"#
                );
            }
            let _ = writeln!(c.out, r#"<circle cx="{px:.1}" cy="{py:.1}" r="3" fill="{color}"/>"#);
        }
        let _ = writeln!(
            c.out,
            r#"<path d="{}" fill="none" stroke="{color}"/>"#,
            path.trim_end()
        );
        c.legend(k, &s.name, color);
    }
    c.finish()
}

/// Log-log scatter of `(x, y)` groups with the dashed `y = x` diagonal.
/// Non-positive values cannot be placed and are left out.
pub fn scatter_loglog(title: &str, x_label: &str, y_label: &str, groups: &[(String, Vec<(f64, f64)>)]) -> String {
    let all = || groups.iter().flat_map(|g| g.1.iter());
    let both = || all().flat_map(|&(a, b)| [a, b]);
    let axis = Axis::new(both(), true);
    let mut c = Canvas::new(title, x_label, y_label, axis, axis);
    let lo = 10f64.powf(axis.lo);
    let hi = 10f64.powf(axis.hi);
    if let (Some((x0, y0)), Some((x1, y1))) = (c.px(lo, lo), c.px(hi, hi)) {
        let _ = writeln!(
            c.out,
            r#"<line x1="{x0:.1}" y1="{y0:.1}" x2="{x1:.1}" y2="{y1:.1}" stroke="gray" stroke-dasharray="6,4"/>"#
        );
    }
    for (k, (name, pts)) in groups.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        for &(x, y) in pts {
            if let Some((px, py)) = c.px(x, y) {
                let _ = writeln!(
                    c.out,
                    r#"<circle cx="{px:.1}" cy="{py:.1}" r="3" fill="{color}" fill-opacity="0.8"/>"#
                );
            }
        }
        c.legend(k, name, color);
    }
    c.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_chart_has_error_segments() {
        let s = Series {
            name: "a".into(),
            points: vec![
                Point { x: 1.0, y: 0.5, err: 0.1 },
                Point { x: 2.0, y: 0.7, err: 0.05 },
            ],
        };
        let svg = line_chart("t", "x", "y", &[s], false);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<circle").count(), 3);
        assert!(svg.contains("M"));
    }

    #[test]
    fn scatter_skips_non_positive() {
        let svg = scatter_loglog("t", "obs", "boot", &[("g".into(), vec![(0.1, 0.2), (0.0, 0.3), (1.0, 0.9)])]);
        assert!(svg.contains("stroke-dasharray"));
        assert_eq!(svg.matches("<circle").count(), 3);
    }

    #[test]
    fn labels_are_escaped() {
        let svg = line_chart("a<b", "x", "y", &[], false);
        assert!(svg.contains("a&lt;b"));
    }
}
