//! Eigenvalue scatter plots over a shaded region raster, as standalone SVG.
//!
//! The viewport is a fixed 800 x 800. The world-to-viewport map is affine
//! and is recorded in a comment near the top of the file:
//! `px = ax * re + bx`, `py = ay * im + by`.

use std::fmt::Write as _;

use dhstab::regions::Raster;
use dhstab::{Complex64, Region, Window};

pub const SIZE: f64 = 800.0;
const PAD: f64 = 60.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

#[derive(Clone, Debug)]
pub struct Series {
    pub label: String,
    pub points: Vec<Complex64>,
}

/// Affine world-to-viewport map of a window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Transform {
    pub ax: f64,
    pub bx: f64,
    pub ay: f64,
    pub by: f64,
}

impl Transform {
    pub fn for_window(w: &Window) -> Transform {
        let span = SIZE - 2.0 * PAD;
        let ax = span / (w.xmax - w.xmin);
        let ay = -span / (w.ymax - w.ymin);
        Transform { ax, bx: PAD - ax * w.xmin, ay, by: SIZE - PAD - ay * w.ymin }
    }

    pub fn apply(&self, z: Complex64) -> (f64, f64) {
        (self.ax * z.re + self.bx, self.ay * z.im + self.by)
    }
}

/// Square window around the points (and the origin), padded by a quarter.
pub fn auto_window(points: &[Complex64]) -> Window {
    let mut lo = Complex64::new(0.0, 0.0);
    let mut hi = lo;
    for z in points.iter().filter(|z| z.is_finite()) {
        lo = Complex64::new(lo.re.min(z.re), lo.im.min(z.im));
        hi = Complex64::new(hi.re.max(z.re), hi.im.max(z.im));
    }
    let c = (lo + hi) / 2.0;
    let half = 0.625 * (hi.re - lo.re).max(hi.im - lo.im) + 0.5;
    Window::new(c.re - half, c.re + half, c.im - half, c.im + half).expect("padded window is valid")
}

/// A raster cell is shaded when any of its four corner nodes lies in the
/// region.
pub fn cell_shaded(r: &Raster, i: usize, j: usize) -> bool {
    [(i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)].iter().any(|&(a, b)| r.at(a, b) < 0.0)
}

/// Draws the marker shape of a series centred at `(x, y)`. Data points carry
/// their eigenvalue; legend swatches pass `None`.
fn marker(out: &mut String, series: usize, x: f64, y: f64, z: Option<Complex64>) {
    let color = COLORS[series % COLORS.len()];
    let data = match z {
        Some(z) => format!(r#"class="marker" data-series="{series}" data-re="{:e}" data-im="{:e}""#, z.re, z.im),
        None => r#"class="legend""#.to_string(),
    };
    let _ = match series % 4 {
        0 => writeln!(out, r#"<circle {data} cx="{x:.3}" cy="{y:.3}" r="4" fill="none" stroke="{color}" stroke-width="1.5"/>"#),
        1 => writeln!(
            out,
            r#"<path {data} d="M{:.3} {:.3}L{:.3} {:.3}M{:.3} {:.3}L{:.3} {:.3}" stroke="{color}" stroke-width="1.5"/>"#,
            x - 4.0, y - 4.0, x + 4.0, y + 4.0, x - 4.0, y + 4.0, x + 4.0, y - 4.0
        ),
        2 => writeln!(
            out,
            r#"<rect {data} x="{:.3}" y="{:.3}" width="7" height="7" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            x - 3.5, y - 3.5
        ),
        _ => writeln!(
            out,
            r#"<path {data} d="M{x:.3} {:.3}L{:.3} {:.3}L{:.3} {:.3}Z" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            y - 4.5, x + 4.0, y + 3.0, x - 4.0, y + 3.0
        ),
    };
}

pub fn render_svg(region: &Region, raster: &Raster, series: &[Series]) -> String {
    let w = raster.window;
    let t = Transform::for_window(&w);
    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="800" height="800" viewBox="0 0 800 800">"#);
    let _ = writeln!(out, "<!-- region: {} -->", region.descriptor());
    let _ = writeln!(out, "<!-- window: xmin={:e} xmax={:e} ymin={:e} ymax={:e} -->", w.xmin, w.xmax, w.ymin, w.ymax);
    let _ = writeln!(
        out,
        "<!-- transform: px = {:e} * re + {:e}; py = {:e} * im + {:e} -->",
        t.ax, t.bx, t.ay, t.by
    );
    let _ = writeln!(out, "<!-- raster: nx={} ny={} -->", raster.nx, raster.ny);
    let _ = writeln!(out, r#"<rect x="0" y="0" width="800" height="800" fill="white"/>"#);

    // Shaded cells, merged into horizontal runs.
    let _ = writeln!(out, r##"<g id="region" fill="#f2c46d" fill-opacity="0.6" stroke="none">"##);
    for j in 0..raster.ny - 1 {
        let mut i = 0;
        while i < raster.nx - 1 {
            if !cell_shaded(raster, i, j) {
                i += 1;
                continue;
            }
            let start = i;
            while i < raster.nx - 1 && cell_shaded(raster, i, j) {
                i += 1;
            }
            let (x0, y1) = t.apply(Complex64::new(raster.xs[start], raster.ys[j + 1]));
            let (x1, y0) = t.apply(Complex64::new(raster.xs[i], raster.ys[j]));
            let _ = writeln!(
                out,
                r#"<rect class="cell" x="{x0:.3}" y="{y1:.3}" width="{:.3}" height="{:.3}"/>"#,
                x1 - x0,
                y0 - y1
            );
        }
    }
    let _ = writeln!(out, "</g>");

    // Frame, axes through the origin when visible, and bound labels.
    let _ = writeln!(out, r#"<g id="axes" stroke="black" stroke-width="1" fill="none">"#);
    let _ = writeln!(out, r#"<rect x="{PAD}" y="{PAD}" width="{0}" height="{0}"/>"#, SIZE - 2.0 * PAD);
    if w.xmin < 0.0 && w.xmax > 0.0 {
        let (x, _) = t.apply(Complex64::new(0.0, 0.0));
        let _ = writeln!(out, r#"<line x1="{x:.3}" y1="{PAD}" x2="{x:.3}" y2="{}" stroke-dasharray="4 3"/>"#, SIZE - PAD);
    }
    if w.ymin < 0.0 && w.ymax > 0.0 {
        let (_, y) = t.apply(Complex64::new(0.0, 0.0));
        let _ = writeln!(out, r#"<line x1="{PAD}" y1="{y:.3}" x2="{}" y2="{y:.3}" stroke-dasharray="4 3"/>"#, SIZE - PAD);
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, r#"<g id="labels" font-family="sans-serif" font-size="13" fill="black">"#);
    let _ = writeln!(out, r#"<text x="{PAD}" y="{}" text-anchor="middle">{:.3}</text>"#, SIZE - PAD + 20.0, w.xmin);
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{:.3}</text>"#, SIZE - PAD, SIZE - PAD + 20.0, w.xmax);
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{:.3}</text>"#, PAD - 6.0, SIZE - PAD, w.ymin);
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{:.3}</text>"#, PAD - 6.0, PAD + 4.0, w.ymax);
    let _ = writeln!(out, r#"<text x="400" y="{}" text-anchor="middle">Re</text>"#, SIZE - 15.0);
    let _ = writeln!(out, r#"<text x="20" y="400" text-anchor="middle">Im</text>"#);
    let _ = writeln!(out, "</g>");

    for (k, s) in series.iter().enumerate() {
        let _ = writeln!(out, r#"<g class="series" data-series="{k}" data-label="{}">"#, escape(&s.label));
        let mut hidden = 0;
        for &z in &s.points {
            if !(w.xmin..=w.xmax).contains(&z.re) || !(w.ymin..=w.ymax).contains(&z.im) {
                hidden += 1;
                continue;
            }
            let (x, y) = t.apply(z);
            marker(&mut out, k, x, y, Some(z));
        }
        if hidden > 0 {
            let _ = writeln!(out, "<!-- {hidden} point(s) outside the window -->");
        }
        let ly = PAD + 18.0 * (k as f64 + 1.0);
        marker(&mut out, k, SIZE - PAD - 110.0, ly - 4.0, None);
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{ly}" font-family="sans-serif" font-size="13">{}</text>"#,
            SIZE - PAD - 100.0,
            escape(&s.label)
        );
        let _ = writeln!(out, "</g>");
    }
    let _ = writeln!(out, "</svg>");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// `series,label,re,im,margin` rows.
pub fn eigen_csv(region: &Region, series: &[Series]) -> String {
    let mut out = String::from("series,label,re,im,margin\n");
    for (k, s) in series.iter().enumerate() {
        for z in &s.points {
            let _ = writeln!(out, "{k},{},{:e},{:e},{:e}", s.label, z.re, z.im, region.membership_margin(*z));
        }
    }
    out
}

/// `re,im,margin` rows in raster order.
pub fn raster_csv(r: &Raster) -> String {
    let mut out = String::from("re,im,margin\n");
    for j in 0..r.ny {
        for i in 0..r.nx {
            let _ = writeln!(out, "{:e},{:e},{:e}", r.xs[i], r.ys[j], r.at(i, j));
        }
    }
    out
}
