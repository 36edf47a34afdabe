//! SVG renderings of the Z surface and the min-cvm-by-nzero envelope.
//!
//! The contour colors `log10(Z)` with ten equal-width viridis bins between the
//! smallest and largest value on the surface.

use std::fmt::Write;

use enetsearch::{CvRecord, ZSurface};

pub const WIDTH: f64 = 640.0;
pub const HEIGHT: f64 = 480.0;
const LEFT: f64 = 72.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 56.0;
const RIGHT_CONTOUR: f64 = 136.0;
const RIGHT_LINE: f64 = 24.0;

/// Ten samples of the viridis colormap, dark to light.
pub const VIRIDIS: [&str; 10] = [
    "#440154", "#482878", "#3e4a89", "#31688e", "#26828e", "#1f9e89", "#35b779", "#6dcd59",
    "#b4de2c", "#fde725",
];

/// Linear map from a data interval onto a pixel interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub px_lo: f64,
    pub px_hi: f64,
}

impl Axis {
    fn new(lo: f64, hi: f64, px_lo: f64, px_hi: f64) -> Self {
        let (lo, hi) = if hi > lo {
            (lo, hi)
        } else {
            let pad = if lo == 0.0 { 0.5 } else { lo.abs() * 0.1 };
            (lo - pad, lo + pad)
        };
        Axis { lo, hi, px_lo, px_hi }
    }

    pub fn map(&self, v: f64) -> f64 {
        self.px_lo + (v - self.lo) / (self.hi - self.lo) * (self.px_hi - self.px_lo)
    }
}

/// Cell edges around sorted centers: midpoints inside, half a spacing past
/// each end. A lone center gets a cell of width `2 * lone_half`.
fn edges(centers: &[f64], lone_half: f64) -> Vec<f64> {
    if centers.len() == 1 {
        return vec![centers[0] - lone_half, centers[0] + lone_half];
    }
    let n = centers.len();
    let mut e = Vec::with_capacity(n + 1);
    e.push(centers[0] - (centers[1] - centers[0]) / 2.0);
    for w in centers.windows(2) {
        e.push((w[0] + w[1]) / 2.0);
    }
    e.push(centers[n - 1] + (centers[n - 1] - centers[n - 2]) / 2.0);
    e
}

fn sorted_unique(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Placement of the contour cells: `x` is alpha, `y` is `log10(lambda)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContourLayout {
    pub x: Axis,
    pub y: Axis,
    pub alpha_edges: Vec<f64>,
    pub log_lambda_edges: Vec<f64>,
    alphas: Vec<f64>,
    log_lambdas: Vec<f64>,
}

impl ContourLayout {
    pub fn new(surface: &ZSurface) -> Self {
        let alphas = sorted_unique(surface.points.iter().map(|p| p.alpha).collect());
        let log_lambdas = sorted_unique(surface.points.iter().map(|p| p.lambda.log10()).collect());
        let alpha_edges = edges(&alphas, 0.05);
        let log_lambda_edges = edges(&log_lambdas, 0.5);
        let x = Axis::new(
            alpha_edges[0],
            *alpha_edges.last().unwrap(),
            LEFT,
            WIDTH - RIGHT_CONTOUR,
        );
        let y = Axis::new(
            log_lambda_edges[0],
            *log_lambda_edges.last().unwrap(),
            HEIGHT - BOTTOM,
            TOP,
        );
        ContourLayout {
            x,
            y,
            alpha_edges,
            log_lambda_edges,
            alphas,
            log_lambdas,
        }
    }

    /// Pixel position of grid point `(alpha, lambda)`.
    pub fn position(&self, alpha: f64, lambda: f64) -> (f64, f64) {
        (self.x.map(alpha), self.y.map(lambda.log10()))
    }

    fn cell(&self, alpha: f64, lambda: f64) -> (f64, f64, f64, f64) {
        let i = self.alphas.partition_point(|&a| a < alpha);
        let ll = lambda.log10();
        let k = self.log_lambdas.partition_point(|&l| l < ll);
        let x0 = self.x.map(self.alpha_edges[i]);
        let x1 = self.x.map(self.alpha_edges[i + 1]);
        let y0 = self.y.map(self.log_lambda_edges[k + 1]);
        let y1 = self.y.map(self.log_lambda_edges[k]);
        (x0, y0, x1 - x0, y1 - y0)
    }
}

/// Bin of `v` among ten equal-width levels over `[lo, hi]`.
pub fn level(v: f64, lo: f64, hi: f64) -> usize {
    if hi <= lo {
        return 0;
    }
    (((v - lo) / (hi - lo) * 10.0).floor() as isize).clamp(0, 9) as usize
}

/// Round tick values covering `[lo, hi]`, roughly `target` of them.
pub fn nice_ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let span = hi - lo;
    if !(span > 0.0) {
        return vec![lo];
    }
    let raw = span / target.max(1) as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| span / s <= target as f64)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

fn tick_label(v: f64) -> String {
    let v = if v.abs() < 1e-12 { 0.0 } else { v };
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, "<title>{title}</title>");
    let _ = writeln!(out, r##"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>"##);
}

fn axes(out: &mut String, x: &Axis, y: &Axis, x_ticks: &[f64], y_ticks: &[f64], x_label: &str, y_label: &str) {
    let (xb, yb) = (y.px_lo, x.px_lo);
    let _ = writeln!(out, r#"<g id="axes" stroke="black" fill="none">"#);
    let _ = writeln!(out, r#"<line x1="{:.3}" y1="{xb:.3}" x2="{:.3}" y2="{xb:.3}"/>"#, x.px_lo, x.px_hi);
    let _ = writeln!(out, r#"<line x1="{yb:.3}" y1="{:.3}" x2="{yb:.3}" y2="{:.3}"/>"#, y.px_lo, y.px_hi);
    for &t in x_ticks {
        let px = x.map(t);
        let _ = writeln!(out, r#"<line x1="{px:.3}" y1="{xb:.3}" x2="{px:.3}" y2="{:.3}"/>"#, xb + 5.0);
    }
    for &t in y_ticks {
        let py = y.map(t);
        let _ = writeln!(out, r#"<line x1="{:.3}" y1="{py:.3}" x2="{yb:.3}" y2="{py:.3}"/>"#, yb - 5.0);
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, r#"<g id="tick-labels" fill="black">"#);
    for &t in x_ticks {
        let _ = writeln!(
            out,
            r#"<text x="{:.3}" y="{:.3}" text-anchor="middle">{}</text>"#,
            x.map(t),
            xb + 18.0,
            tick_label(t)
        );
    }
    for &t in y_ticks {
        let _ = writeln!(
            out,
            r#"<text x="{:.3}" y="{:.3}" text-anchor="end">{}</text>"#,
            yb - 8.0,
            y.map(t) + 4.0,
            tick_label(t)
        );
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(
        out,
        r#"<text x="{:.3}" y="{:.3}" text-anchor="middle">{x_label}</text>"#,
        (x.px_lo + x.px_hi) / 2.0,
        HEIGHT - 14.0
    );
    let cy = (y.px_lo + y.px_hi) / 2.0;
    let _ = writeln!(
        out,
        r#"<text x="18" y="{cy:.3}" text-anchor="middle" transform="rotate(-90 18 {cy:.3})">{y_label}</text>"#
    );
}

/// Filled `log10(Z)` cells over alpha and `log10(lambda)`, with a legend and
/// the global minimum circled in red.
pub fn contour_svg(surface: &ZSurface) -> String {
    let layout = ContourLayout::new(surface);
    let (zlo, zhi) = surface
        .points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.log10z), hi.max(p.log10z)));

    let mut out = String::new();
    header(&mut out, "log10(Z) over the lambda-alpha grid");
    let _ = writeln!(out, r#"<g id="cells" stroke="none">"#);
    for p in &surface.points {
        let (x, y, w, h) = layout.cell(p.alpha, p.lambda);
        let _ = writeln!(
            out,
            r#"<rect x="{x:.3}" y="{y:.3}" width="{w:.3}" height="{h:.3}" fill="{}"/>"#,
            VIRIDIS[level(p.log10z, zlo, zhi)]
        );
    }
    let _ = writeln!(out, "</g>");

    let x_ticks: Vec<f64> = nice_ticks(layout.x.lo, layout.x.hi, 6);
    let y_ticks: Vec<f64> = nice_ticks(layout.y.lo, layout.y.hi, 6);
    axes(&mut out, &layout.x, &layout.y, &x_ticks, &y_ticks, "alpha", "log10(lambda)");

    let min = surface.minimum();
    let (mx, my) = layout.position(min.alpha, min.lambda);
    let _ = writeln!(
        out,
        r##"<circle id="global-minimum" cx="{mx:.3}" cy="{my:.3}" r="5" fill="#ff0000" stroke="#ffffff" stroke-width="1.5"/>"##
    );

    let lx = WIDTH - RIGHT_CONTOUR + 24.0;
    let sw = 18.0;
    let sh = (HEIGHT - TOP - BOTTOM) / 10.0;
    let _ = writeln!(out, r#"<g id="legend">"#);
    let _ = writeln!(
        out,
        r#"<text x="{lx:.3}" y="{:.3}">log10(Z)</text>"#,
        TOP - 12.0
    );
    let step = if zhi > zlo { (zhi - zlo) / 10.0 } else { 0.0 };
    for i in 0..10 {
        let y = HEIGHT - BOTTOM - (i + 1) as f64 * sh;
        let _ = writeln!(
            out,
            r#"<rect x="{lx:.3}" y="{y:.3}" width="{sw}" height="{sh:.3}" fill="{}"/>"#,
            VIRIDIS[i]
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.3}" y="{:.3}">{:.2}</text>"#,
            lx + sw + 6.0,
            y + sh / 2.0 + 4.0,
            zlo + step * i as f64
        );
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, "</svg>");
    out
}

/// Pixel transform of the nzero plot: `x` is nzero, `y` is min cvm.
pub fn nzero_axes(rows: &[CvRecord]) -> (Axis, Axis) {
    let (nlo, nhi) = rows
        .iter()
        .fold((usize::MAX, 0), |(lo, hi), r| (lo.min(r.nzero), hi.max(r.nzero)));
    let (clo, chi) = rows
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r.cvm), hi.max(r.cvm)));
    let pad = (chi - clo) * 0.05;
    (
        Axis::new(nlo as f64 - 0.5, nhi as f64 + 0.5, LEFT, WIDTH - RIGHT_LINE),
        Axis::new(clo - pad, chi + pad, HEIGHT - BOTTOM, TOP),
    )
}

/// Minimum cvm for each model size, as points joined by a line.
pub fn nzero_svg(rows: &[CvRecord]) -> String {
    let (x, y) = nzero_axes(rows);
    let mut out = String::new();
    header(&mut out, "minimum cvm by number of nonzero coefficients");
    let x_ticks: Vec<f64> = nice_ticks(x.lo, x.hi, 8)
        .into_iter()
        .filter(|t| t.fract() == 0.0)
        .collect();
    let y_ticks = nice_ticks(y.lo, y.hi, 6);
    axes(&mut out, &x, &y, &x_ticks, &y_ticks, "nzero", "min cvm");

    let pts: Vec<String> = rows
        .iter()
        .map(|r| format!("{:.3},{:.3}", x.map(r.nzero as f64), y.map(r.cvm)))
        .collect();
    let _ = writeln!(
        out,
        r##"<polyline id="envelope" points="{}" fill="none" stroke="#31688e" stroke-width="1.5"/>"##,
        pts.join(" ")
    );
    let _ = writeln!(out, r##"<g id="points" fill="#31688e">"##);
    for r in rows {
        let _ = writeln!(
            out,
            r#"<circle cx="{:.3}" cy="{:.3}" r="3.5"/>"#,
            x.map(r.nzero as f64),
            y.map(r.cvm)
        );
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, "</svg>");
    out
}
