//! Minimal static SVG plots: heatmaps with contour lines and line plots.

use std::fmt::Write as _;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 130.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

const PALETTE: [&str; 10] =
    ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn format_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if !(1e-2..1e4).contains(&a) {
        let s = format!("{v:.1e}");
        return s.replace(".0e", "e");
    }
    let s = format!("{v:.3}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// Blue at 0, white at 0.5, red at 1.
pub fn diverging(f: f64) -> String {
    let f = f.clamp(0.0, 1.0);
    let (r, g, b) = if f < 0.5 {
        let s = f / 0.5;
        (40.0 + 215.0 * s, 90.0 + 165.0 * s, 200.0 + 55.0 * s)
    } else {
        let s = (f - 0.5) / 0.5;
        (255.0 - 55.0 * s, 255.0 - 215.0 * s, 255.0 - 215.0 * s)
    };
    format!("#{:02x}{:02x}{:02x}", r as u8, g as u8, b as u8)
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
}

fn axis_labels(out: &mut String, x_label: &str, y_label: &str) {
    let plot_mid_x = LEFT + (WIDTH - LEFT - RIGHT) / 2.0;
    let plot_mid_y = TOP + (HEIGHT - TOP - BOTTOM) / 2.0;
    let _ = writeln!(
        out,
        r#"<text x="{plot_mid_x}" y="{}" text-anchor="middle">{}</text>"#,
        HEIGHT - 15.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="20" y="{plot_mid_y}" text-anchor="middle" transform="rotate(-90 20 {plot_mid_y})">{}</text>"#,
        escape(y_label)
    );
}

/// Segments of the `level` contour through a grid of cell-centred values,
/// in index coordinates (`x` = column, `y` = row).
pub fn contour_segments(values: &[Vec<Option<f64>>], level: f64) -> Vec<[(f64, f64); 2]> {
    let ny = values.len();
    let nx = values.first().map_or(0, Vec::len);
    let mut segments = Vec::new();
    if nx < 2 || ny < 2 {
        return segments;
    }
    for iy in 0..ny - 1 {
        for ix in 0..nx - 1 {
            let corners = [(ix, iy), (ix + 1, iy), (ix + 1, iy + 1), (ix, iy + 1)];
            let Some(v): Option<Vec<f64>> = corners.iter().map(|&(x, y)| values[y][x]).collect() else {
                continue;
            };
            let inside: Vec<bool> = v.iter().map(|&x| x >= level).collect();
            let mut crossings = Vec::new();
            for e in 0..4 {
                let (a, b) = (e, (e + 1) % 4);
                if inside[a] != inside[b] {
                    let w = (level - v[a]) / (v[b] - v[a]);
                    let (xa, ya) = corners[a];
                    let (xb, yb) = corners[b];
                    crossings.push((
                        e,
                        (xa as f64 + w * (xb as f64 - xa as f64), ya as f64 + w * (yb as f64 - ya as f64)),
                    ));
                }
            }
            match crossings.len() {
                2 => segments.push([crossings[0].1, crossings[1].1]),
                4 => {
                    let centre = v.iter().sum::<f64>() / 4.0 >= level;
                    let p = |e: usize| crossings[e].1;
                    if centre == inside[0] {
                        segments.push([p(0), p(1)]);
                        segments.push([p(2), p(3)]);
                    } else {
                        segments.push([p(3), p(0)]);
                        segments.push([p(1), p(2)]);
                    }
                }
                _ => {}
            }
        }
    }
    segments
}

pub struct Heatmap<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    /// Displayed column and row coordinates.
    pub x_ticks: &'a [f64],
    pub y_ticks: &'a [f64],
    /// `values[row][column]`, row 0 at the bottom.
    pub values: &'a [Vec<Option<f64>>],
    pub range: (f64, f64),
    pub contour: Option<f64>,
}

impl Heatmap<'_> {
    pub fn render(&self) -> String {
        let mut out = String::new();
        header(&mut out, self.title);
        let ny = self.values.len().max(1);
        let nx = self.values.first().map_or(1, Vec::len).max(1);
        let pw = WIDTH - LEFT - RIGHT;
        let ph = HEIGHT - TOP - BOTTOM;
        let (cw, ch) = (pw / nx as f64, ph / ny as f64);
        let (lo, hi) = self.range;
        let scale = |v: f64| if hi > lo { (v - lo) / (hi - lo) } else { 0.5 };
        for (iy, row) in self.values.iter().enumerate() {
            for (ix, v) in row.iter().enumerate() {
                let x = LEFT + ix as f64 * cw;
                let y = TOP + (ny - 1 - iy) as f64 * ch;
                let fill = v.map_or("#dddddd".to_string(), |v| diverging(scale(v)));
                let _ = writeln!(
                    out,
                    r#"<rect x="{x:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="{fill}"/>"#,
                    cw + 0.3,
                    ch + 0.3
                );
            }
        }
        if let Some(level) = self.contour {
            let px = |x: f64| LEFT + (x + 0.5) * cw;
            let py = |y: f64| TOP + (ny as f64 - 0.5 - y) * ch;
            for [a, b] in contour_segments(self.values, level) {
                let _ = writeln!(
                    out,
                    r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black" stroke-width="2"/>"#,
                    px(a.0),
                    py(a.1),
                    px(b.0),
                    py(b.1)
                );
            }
        }
        let _ = writeln!(out, r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);
        let every = |n: usize| n.div_ceil(10).max(1);
        for (ix, t) in self.x_ticks.iter().enumerate().step_by(every(self.x_ticks.len())) {
            let x = LEFT + (ix as f64 + 0.5) * cw;
            let _ = writeln!(
                out,
                r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                TOP + ph + 18.0,
                format_tick(*t)
            );
        }
        for (iy, t) in self.y_ticks.iter().enumerate().step_by(every(self.y_ticks.len())) {
            let y = TOP + (ny as f64 - 0.5 - iy as f64) * ch;
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
                LEFT - 6.0,
                y + 4.0,
                format_tick(*t)
            );
        }
        axis_labels(&mut out, self.x_label, self.y_label);
        let bx = WIDTH - RIGHT + 25.0;
        let steps = 50;
        for s in 0..steps {
            let f = s as f64 / (steps - 1) as f64;
            let y = TOP + ph * (1.0 - f) - ph / steps as f64;
            let _ = writeln!(
                out,
                r#"<rect x="{bx}" y="{y:.2}" width="18" height="{:.2}" fill="{}"/>"#,
                ph / steps as f64 + 0.5,
                diverging(f)
            );
        }
        for (f, v) in [(0.0, lo), (0.5, (lo + hi) / 2.0), (1.0, hi)] {
            let y = TOP + ph * (1.0 - f);
            let _ = writeln!(out, r#"<text x="{}" y="{:.2}">{}</text>"#, bx + 24.0, y + 4.0, format_tick(v));
        }
        if let Some(level) = self.contour {
            let y = TOP + ph * (1.0 - scale(level));
            let _ = writeln!(out, r#"<line x1="{bx}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="black" stroke-width="2"/>"#, bx + 18.0);
        }
        out.push_str("</svg>\n");
        out
    }
}

#[derive(Clone, Debug, Default)]
pub struct Series {
    pub label: Option<String>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub y_err: Option<Vec<f64>>,
}

pub struct LinePlot<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub log_x: bool,
    pub log_y: bool,
    pub series: &'a [Series],
    pub threshold: Option<(f64, &'a str)>,
}

struct Scale {
    lo: f64,
    hi: f64,
    log: bool,
    from: f64,
    to: f64,
}

impl Scale {
    fn new(values: impl Iterator<Item = f64>, log: bool, from: f64, to: f64) -> Self {
        let usable = |v: &f64| v.is_finite() && (!log || *v > 0.0);
        let (mut lo, mut hi) = values.filter(usable).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        if !lo.is_finite() {
            (lo, hi) = if log { (0.1, 10.0) } else { (0.0, 1.0) };
        }
        if log {
            lo = 10f64.powf(lo.log10().floor());
            hi = 10f64.powf(hi.log10().ceil());
            if hi <= lo {
                hi = lo * 10.0;
            }
        } else if hi <= lo {
            let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
            lo -= pad;
            hi += pad;
        } else {
            let pad = (hi - lo) * 0.05;
            lo -= pad;
            hi += pad;
        }
        Self { lo, hi, log, from, to }
    }

    fn map(&self, v: f64) -> Option<f64> {
        let f = if self.log {
            if v <= 0.0 {
                return None;
            }
            (v.log10() - self.lo.log10()) / (self.hi.log10() - self.lo.log10())
        } else {
            (v - self.lo) / (self.hi - self.lo)
        };
        f.is_finite().then(|| self.from + f * (self.to - self.from))
    }

    fn ticks(&self) -> Vec<f64> {
        if self.log {
            let (a, b) = (self.lo.log10().round() as i32, self.hi.log10().round() as i32);
            let stride = ((b - a) as usize).div_ceil(8).max(1);
            (a..=b).step_by(stride).map(|e| 10f64.powi(e)).collect()
        } else {
            (0..=5).map(|k| self.lo + (self.hi - self.lo) * k as f64 / 5.0).collect()
        }
    }
}

impl LinePlot<'_> {
    pub fn render(&self) -> String {
        let mut out = String::new();
        header(&mut out, self.title);
        let pw = WIDTH - LEFT - RIGHT;
        let ph = HEIGHT - TOP - BOTTOM;
        let xs = Scale::new(self.series.iter().flat_map(|s| s.x.iter().copied()), self.log_x, LEFT, LEFT + pw);
        let ys = Scale::new(
            self.series.iter().flat_map(|s| s.y.iter().copied()).chain(self.threshold.map(|t| t.0)),
            self.log_y,
            TOP + ph,
            TOP,
        );
        let _ = writeln!(out, r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);
        for t in xs.ticks() {
            if let Some(x) = xs.map(t) {
                let _ = writeln!(
                    out,
                    r##"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{}" stroke="#eeeeee"/><text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"##,
                    TOP + ph,
                    TOP + ph + 18.0,
                    format_tick(t)
                );
            }
        }
        for t in ys.ticks() {
            if let Some(y) = ys.map(t) {
                let _ = writeln!(
                    out,
                    r##"<line x1="{LEFT}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#eeeeee"/><text x="{}" y="{:.2}" text-anchor="end">{}</text>"##,
                    LEFT + pw,
                    LEFT - 6.0,
                    y + 4.0,
                    format_tick(t)
                );
            }
        }
        for (k, s) in self.series.iter().enumerate() {
            let colour = PALETTE[k % PALETTE.len()];
            let points: Vec<(f64, f64)> =
                s.x.iter().zip(&s.y).filter_map(|(&x, &y)| Some((xs.map(x)?, ys.map(y)?))).collect();
            let path: Vec<String> = points.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
            let width = if self.series.len() > 20 { 0.6 } else { 1.8 };
            let _ = writeln!(
                out,
                r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="{width}"/>"#,
                path.join(" ")
            );
            if self.series.len() <= 20 {
                for (x, y) in &points {
                    let _ = writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="2.5" fill="{colour}"/>"#);
                }
            }
            if let Some(err) = &s.y_err {
                for ((&x, &y), &e) in s.x.iter().zip(&s.y).zip(err) {
                    if let (Some(px), Some(lo), Some(hi)) = (xs.map(x), ys.map((y - e).max(y * 1e-3)), ys.map(y + e)) {
                        let _ = writeln!(
                            out,
                            r#"<line x1="{px:.2}" y1="{lo:.2}" x2="{px:.2}" y2="{hi:.2}" stroke="{colour}"/>"#
                        );
                    }
                }
            }
        }
        if let Some((level, label)) = self.threshold {
            if let Some(y) = ys.map(level) {
                let _ = writeln!(
                    out,
                    r#"<line x1="{LEFT}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="black" stroke-dasharray="6,4" stroke-width="1.5"/><text x="{}" y="{:.2}">{}</text>"#,
                    LEFT + pw,
                    LEFT + pw + 6.0,
                    y + 4.0,
                    escape(label)
                );
            }
        }
        let labelled: Vec<(usize, &String)> =
            self.series.iter().enumerate().filter_map(|(k, s)| s.label.as_ref().map(|l| (k, l))).collect();
        if labelled.len() <= 12 {
            for (row, (k, label)) in labelled.iter().enumerate() {
                let y = TOP + 16.0 + row as f64 * 16.0;
                let x = LEFT + pw + 8.0;
                let _ = writeln!(
                    out,
                    r#"<rect x="{x}" y="{:.2}" width="10" height="10" fill="{}"/><text x="{}" y="{:.2}">{}</text>"#,
                    y + 14.0,
                    PALETTE[k % PALETTE.len()],
                    x + 14.0,
                    y + 23.0,
                    escape(label)
                );
            }
        }
        axis_labels(&mut out, self.x_label, self.y_label);
        out.push_str("</svg>\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contour_of_a_ramp_is_a_straight_line() {
        let values: Vec<Vec<Option<f64>>> = (0..4).map(|_| (0..5).map(|x| Some(x as f64 / 4.0)).collect()).collect();
        let segs = contour_segments(&values, 0.5);
        assert_eq!(segs.len(), 3);
        for [a, b] in segs {
            assert!((a.0 - 2.0).abs() < 1e-12 && (b.0 - 2.0).abs() < 1e-12);
        }
        assert!(contour_segments(&values, 2.0).is_empty());
    }

    #[test]
    fn saddle_produces_two_segments() {
        let values = vec![vec![Some(1.0), Some(0.0)], vec![Some(0.0), Some(1.0)]];
        assert_eq!(contour_segments(&values, 0.5).len(), 2);
        let gap = vec![vec![Some(1.0), None], vec![Some(0.0), Some(1.0)]];
        assert!(contour_segments(&gap, 0.5).is_empty());
    }

    #[test]
    fn plots_are_well_formed() {
        let values = vec![vec![Some(0.1), Some(0.9)], vec![Some(0.2), None]];
        let svg = Heatmap {
            title: "a < b",
            x_label: "T (MHz)",
            y_label: "E_J (GHz)",
            x_ticks: &[1.0, 10.0],
            y_ticks: &[10.0, 100.0],
            values: &values,
            range: (0.0, 1.0),
            contour: Some(0.5),
        }
        .render();
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("a &lt; b"));
        let series = [Series { label: Some("d=1".into()), x: vec![0.0, 1.0, 10.0], y: vec![1e-6, 1e-5, 1e-3], y_err: None }];
        let svg = LinePlot {
            title: "w",
            x_label: "T",
            y_label: "|c|",
            log_x: true,
            log_y: true,
            series: &series,
            threshold: Some((1e-4, "100 kHz")),
        }
        .render();
        assert!(svg.contains("stroke-dasharray"));
        assert!(svg.contains("100 kHz"));
    }

    #[test]
    fn colour_map_endpoints() {
        assert_eq!(diverging(0.5), "#ffffff");
        assert_ne!(diverging(0.0), diverging(1.0));
        assert_eq!(format_tick(0.001), "1e-3");
        assert_eq!(format_tick(12.5), "12.5");
    }
}
