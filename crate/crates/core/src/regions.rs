//! LMI regions `{z : B + zC + conj(z) C^H < 0}` of the complex plane.
//!
//! Real-mode regions have real `B` (symmetric) and `C`, which makes them
//! symmetric about the real axis. Extended-mode regions allow complex `B`
//! (Hermitian) and `C`; they arise from rotating, scaling or translating a
//! real region.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{block_diag, fro, hermitian_part, lambda_max};

type CMat = DMatrix<Complex64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Real,
    Extended,
}

/// The twelve closed-form regions together with their parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Catalog {
    /// Sector with apex `a` opening to the left, half-angle measured from the
    /// imaginary axis: `|cos(theta) y| < sin(theta) (a - x)`.
    LeftConic { a: f64, theta: f64 },
    /// `|cos(theta) y| < sin(theta) (x - a)`.
    RightConic { a: f64, theta: f64 },
    /// `|z - q| < r`.
    Disk { q: f64, r: f64 },
    /// `h < Re z < k`; infinite bounds become half-planes.
    VerticalStrip { h: f64, k: f64 },
    /// `Re z < k`.
    LeftHalfPlane { k: f64 },
    /// `Re z > h`.
    RightHalfPlane { h: f64 },
    /// `(x - q_e)^2 / a_e^2 + y^2 / b_e^2 < 1`.
    Ellipse { q_e: f64, a_e: f64, b_e: f64 },
    /// `y^2 < -(2 / c_p) (x - q_p)`.
    LeftParabola { q_p: f64, c_p: f64 },
    /// `y^2 < (2 / c_p) (x - q_p)`.
    RightParabola { q_p: f64, c_p: f64 },
    /// `x < 0` and `x^2 / a_h^2 - y^2 / b_h^2 > 1`.
    LeftHyperbola { a_h: f64, b_h: f64 },
    /// `x > 0` and `x^2 / a_h^2 - y^2 / b_h^2 > 1`.
    RightHyperbola { a_h: f64, b_h: f64 },
    /// `|Im z| < w`.
    HorizontalStrip { w: f64 },
}

impl Catalog {
    pub const IDENTIFIERS: [&'static str; 12] = [
        "left_conic",
        "right_conic",
        "disk",
        "vertical_strip",
        "left_half_plane",
        "right_half_plane",
        "ellipse",
        "left_parabola",
        "right_parabola",
        "left_hyperbola",
        "right_hyperbola",
        "horizontal_strip",
    ];

    pub fn identifier(&self) -> &'static str {
        use Catalog::*;
        match self {
            LeftConic { .. } => "left_conic",
            RightConic { .. } => "right_conic",
            Disk { .. } => "disk",
            VerticalStrip { .. } => "vertical_strip",
            LeftHalfPlane { .. } => "left_half_plane",
            RightHalfPlane { .. } => "right_half_plane",
            Ellipse { .. } => "ellipse",
            LeftParabola { .. } => "left_parabola",
            RightParabola { .. } => "right_parabola",
            LeftHyperbola { .. } => "left_hyperbola",
            RightHyperbola { .. } => "right_hyperbola",
            HorizontalStrip { .. } => "horizontal_strip",
        }
    }

    /// Parameter names and values, in declaration order.
    pub fn params(&self) -> Vec<(&'static str, f64)> {
        use Catalog::*;
        match *self {
            LeftConic { a, theta } | RightConic { a, theta } => vec![("a", a), ("theta", theta)],
            Disk { q, r } => vec![("q", q), ("r", r)],
            VerticalStrip { h, k } => vec![("h", h), ("k", k)],
            LeftHalfPlane { k } => vec![("k", k)],
            RightHalfPlane { h } => vec![("h", h)],
            Ellipse { q_e, a_e, b_e } => vec![("q_e", q_e), ("a_e", a_e), ("b_e", b_e)],
            LeftParabola { q_p, c_p } | RightParabola { q_p, c_p } => {
                vec![("q_p", q_p), ("c_p", c_p)]
            }
            LeftHyperbola { a_h, b_h } | RightHyperbola { a_h, b_h } => {
                vec![("a_h", a_h), ("b_h", b_h)]
            }
            HorizontalStrip { w } => vec![("w", w)],
        }
    }

    fn validate(&self) -> Result<()> {
        use Catalog::*;
        let fail = |msg: String| Err(Error::Validation(msg));
        for (name, v) in self.params() {
            let may_be_infinite = matches!(self, VerticalStrip { .. });
            if v.is_nan() || (!may_be_infinite && v.is_infinite()) {
                return fail(format!("{}: parameter {name} must be finite, got {v}", self.identifier()));
            }
        }
        match *self {
            LeftConic { theta, .. } | RightConic { theta, .. } => {
                if !(0.0..=FRAC_PI_2).contains(&theta) {
                    return fail(format!("conic sector requires 0 <= theta <= pi/2, got {theta}"));
                }
            }
            Disk { r, .. } if r <= 0.0 => return fail(format!("disk requires r > 0, got {r}")),
            VerticalStrip { h, k } => {
                if h >= k {
                    return fail(format!("vertical strip requires h < k, got h={h}, k={k}"));
                }
                if h == f64::NEG_INFINITY && k == f64::INFINITY {
                    return fail("vertical strip needs at least one finite bound".into());
                }
                if h == f64::INFINITY || k == f64::NEG_INFINITY {
                    return fail(format!("vertical strip bounds out of range: h={h}, k={k}"));
                }
            }
            Ellipse { a_e, b_e, .. } if a_e <= 0.0 || b_e <= 0.0 => {
                return fail(format!("ellipse requires a_e > 0 and b_e > 0, got {a_e}, {b_e}"))
            }
            LeftParabola { c_p, .. } | RightParabola { c_p, .. } if c_p <= 0.0 => {
                return fail(format!("parabola requires c_p > 0, got {c_p}"))
            }
            LeftHyperbola { a_h, b_h } | RightHyperbola { a_h, b_h } if a_h <= 0.0 || b_h <= 0.0 => {
                return fail(format!("hyperbola requires a_h > 0 and b_h > 0, got {a_h}, {b_h}"))
            }
            HorizontalStrip { w } if w <= 0.0 => {
                return fail(format!("horizontal strip requires w > 0, got {w}"))
            }
            _ => {}
        }
        Ok(())
    }

    /// Replaces a vertical strip with an infinite bound by the matching half-plane.
    fn canonical(self) -> Catalog {
        match self {
            Catalog::VerticalStrip { h, k } if h == f64::NEG_INFINITY => Catalog::LeftHalfPlane { k },
            Catalog::VerticalStrip { h, k } if k == f64::INFINITY => Catalog::RightHalfPlane { h },
            other => other,
        }
    }

    /// The `(B, C)` pair of order 2.
    fn matrices(&self) -> (DMatrix<f64>, DMatrix<f64>) {
        use Catalog::*;
        let m = |a: f64, b: f64, c: f64, d: f64| DMatrix::from_row_slice(2, 2, &[a, b, c, d]);
        match *self {
            LeftConic { a, theta } => {
                let (s, c) = theta.sin_cos();
                (m(-a * s, 0.0, 0.0, -a * s), m(s, c, -c, s) * 0.5)
            }
            RightConic { a, theta } => {
                let (s, c) = theta.sin_cos();
                (m(a * s, 0.0, 0.0, a * s), m(-s, c, -c, -s) * 0.5)
            }
            Disk { q, r } => (m(-r, q, q, -r), m(0.0, 0.0, -1.0, 0.0)),
            VerticalStrip { h, k } => (m(-k, 0.0, 0.0, h), m(1.0, 0.0, 0.0, -1.0) * 0.5),
            LeftHalfPlane { k } => (m(-k, 0.0, 0.0, -1.0), m(1.0, 0.0, 0.0, 0.0) * 0.5),
            RightHalfPlane { h } => (m(h, 0.0, 0.0, -1.0), m(-1.0, 0.0, 0.0, 0.0) * 0.5),
            Ellipse { q_e, a_e, b_e } => {
                let ratio = a_e / b_e;
                (
                    m(-2.0 * a_e, -2.0 * q_e, -2.0 * q_e, -2.0 * a_e),
                    m(0.0, 1.0 + ratio, 1.0 - ratio, 0.0),
                )
            }
            LeftParabola { q_p, c_p } => {
                let sq = (c_p / 2.0).sqrt();
                (m(-1.0, 0.0, 0.0, -q_p), m(0.0, sq, -sq, 1.0) * 0.5)
            }
            RightParabola { q_p, c_p } => {
                let sq = (c_p / 2.0).sqrt();
                (m(-1.0, 0.0, 0.0, q_p), m(0.0, sq, -sq, -1.0) * 0.5)
            }
            LeftHyperbola { a_h, b_h } => (
                m(0.0, 1.0, 1.0, 0.0),
                m(1.0 / a_h, 1.0 / b_h, -1.0 / b_h, 1.0 / a_h) * 0.5,
            ),
            RightHyperbola { a_h, b_h } => (
                m(0.0, 1.0, 1.0, 0.0),
                m(-1.0 / a_h, 1.0 / b_h, -1.0 / b_h, -1.0 / a_h) * 0.5,
            ),
            HorizontalStrip { w } => (m(-w, 0.0, 0.0, -w), m(0.0, 1.0, -1.0, 0.0) * 0.5),
        }
    }
}

/// How a region was built. Margins never consult this; it exists so that
/// front ends can echo the construction.
#[derive(Clone, Debug, PartialEq)]
pub enum Descriptor {
    Catalog(Catalog),
    Custom,
    Intersection(Vec<Descriptor>),
    Translate { alpha: Complex64, base: Box<Descriptor> },
    ScaleRotate { alpha: Complex64, base: Box<Descriptor> },
}

impl fmt::Display for Descriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Descriptor::Catalog(c) => {
                write!(f, "{}(", c.identifier())?;
                for (i, (name, v)) in c.params().iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{name}={v}")?;
                }
                write!(f, ")")
            }
            Descriptor::Custom => write!(f, "custom"),
            Descriptor::Intersection(members) => {
                write!(f, "intersection[")?;
                for (i, m) in members.iter().enumerate() {
                    if i > 0 {
                        write!(f, " & ")?;
                    }
                    write!(f, "{m}")?;
                }
                write!(f, "]")
            }
            Descriptor::Translate { alpha, base } => write!(f, "translate({alpha}, {base})"),
            Descriptor::ScaleRotate { alpha, base } => write!(f, "scale_rotate({alpha}, {base})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Region {
    b: CMat,
    c: CMat,
    mode: Mode,
    descriptor: Descriptor,
}

fn to_complex(m: &DMatrix<f64>) -> CMat {
    m.map(|x| Complex64::new(x, 0.0))
}

fn is_real(m: &CMat) -> bool {
    m.iter().all(|z| z.im == 0.0)
}

impl Region {
    /// Builds a catalog region from its closed-form `(B, C)` pair.
    pub fn catalog(kind: Catalog) -> Result<Region> {
        kind.validate()?;
        let kind = kind.canonical();
        let (b, c) = kind.matrices();
        Ok(Region {
            b: to_complex(&b),
            c: to_complex(&c),
            mode: Mode::Real,
            descriptor: Descriptor::Catalog(kind),
        })
    }

    /// Region from explicit matrices. `B` must be Hermitian; real mode
    /// additionally requires both matrices to be real.
    pub fn custom(b: CMat, c: CMat, mode: Mode) -> Result<Region> {
        let s = b.nrows();
        if s == 0 || b.ncols() != s || c.shape() != (s, s) {
            return Err(Error::Dimension(format!(
                "region matrices must be square of equal order, got B {:?}, C {:?}",
                b.shape(),
                c.shape()
            )));
        }
        let asym = fro(&(&b - b.adjoint()));
        if asym > 1e-12 * fro(&b) {
            return Err(Error::Validation(format!(
                "B must be Hermitian (||B - B^H|| = {asym:e})"
            )));
        }
        if mode == Mode::Real && !(is_real(&b) && is_real(&c)) {
            return Err(Error::Mode(
                "real-mode region requires real B and C".into(),
            ));
        }
        Ok(Region {
            b: hermitian_part(&b),
            c,
            mode,
            descriptor: Descriptor::Custom,
        })
    }

    /// Custom region whose mode is inferred from the entries.
    pub fn custom_inferred(b: CMat, c: CMat) -> Result<Region> {
        let mode = if is_real(&b) && is_real(&c) {
            Mode::Real
        } else {
            Mode::Extended
        };
        Region::custom(b, c, mode)
    }

    /// Open left half-plane with the order-1 pair `B = 0`, `C = 1`.
    pub fn hurwitz() -> Region {
        Region::custom(DMatrix::zeros(1, 1), DMatrix::identity(1, 1), Mode::Real)
            .expect("valid Hurwitz pair")
    }

    /// Open unit disk with `B = -I`, `C = [[0, 1], [0, 0]]`.
    pub fn schur() -> Region {
        let b = -CMat::identity(2, 2);
        let mut c = CMat::zeros(2, 2);
        c[(0, 1)] = Complex64::new(1.0, 0.0);
        Region::custom(b, c, Mode::Real).expect("valid Schur pair")
    }

    pub fn order(&self) -> usize {
        self.b.nrows()
    }

    pub fn b(&self) -> &CMat {
        &self.b
    }

    pub fn c(&self) -> &CMat {
        &self.c
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn descriptor(&self) -> &Descriptor {
        &self.descriptor
    }

    pub fn with_descriptor(mut self, descriptor: Descriptor) -> Region {
        self.descriptor = descriptor;
        self
    }

    /// `f(z) = B + zC + conj(z) C^H`.
    pub fn char_fn(&self, z: Complex64) -> CMat {
        let f = &self.b + &self.c * z + self.c.adjoint() * z.conj();
        hermitian_part(&f)
    }

    /// Largest eigenvalue of `f(z)`; `z` lies in the region iff this is negative.
    pub fn membership_margin(&self, z: Complex64) -> f64 {
        let f = self.char_fn(z);
        if self.mode == Mode::Real && z.im == 0.0 {
            lambda_max(&f.map(|x| x.re)).expect("square")
        } else {
            lambda_max(&f).expect("square")
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        self.membership_margin(z) < 0.0
    }

    /// Groups of indices of `(B, C)` that form independent diagonal blocks.
    ///
    /// For an intersection these are (at least) the member regions; the
    /// LMI `f(z) < 0` splits along them.
    pub fn diagonal_blocks(&self) -> Vec<Vec<usize>> {
        let s = self.order();
        let mut parent: Vec<usize> = (0..s).collect();
        fn find(p: &mut [usize], i: usize) -> usize {
            let mut r = i;
            while p[r] != r {
                r = p[r];
            }
            p[i] = r;
            r
        }
        for i in 0..s {
            for j in 0..s {
                if i != j && (self.b[(i, j)].norm() != 0.0 || self.c[(i, j)].norm() != 0.0) {
                    let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                    if ri != rj {
                        parent[ri.max(rj)] = ri.min(rj);
                    }
                }
            }
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut root_of_group: Vec<usize> = Vec::new();
        for i in 0..s {
            let r = find(&mut parent, i);
            match root_of_group.iter().position(|&x| x == r) {
                Some(g) => groups[g].push(i),
                None => {
                    root_of_group.push(r);
                    groups.push(vec![i]);
                }
            }
        }
        groups
    }

    /// The sub-region on a subset of indices (a diagonal block of `(B, C)`).
    pub fn sub_block(&self, idx: &[usize]) -> Region {
        let k = idx.len();
        let b = CMat::from_fn(k, k, |i, j| self.b[(idx[i], idx[j])]);
        let c = CMat::from_fn(k, k, |i, j| self.c[(idx[i], idx[j])]);
        Region {
            b,
            c,
            mode: self.mode,
            descriptor: Descriptor::Custom,
        }
    }
}

/// Block-diagonal combination; the margin of the result is the maximum of
/// the member margins.
pub fn intersect(members: &[Region]) -> Result<Region> {
    let first = members
        .first()
        .ok_or_else(|| Error::Validation("intersection of an empty list".into()))?;
    if members.iter().any(|m| m.mode != first.mode) {
        return Err(Error::Mode("intersection members have mixed modes".into()));
    }
    let bs: Vec<&CMat> = members.iter().map(|m| &m.b).collect();
    let cs: Vec<&CMat> = members.iter().map(|m| &m.c).collect();
    Ok(Region {
        b: block_diag(&bs),
        c: block_diag(&cs),
        mode: first.mode,
        descriptor: Descriptor::Intersection(members.iter().map(|m| m.descriptor.clone()).collect()),
    })
}

/// `alpha * region`, i.e. `C <- C / alpha`.
pub fn transform_scale_rotate(region: &Region, alpha: Complex64) -> Result<Region> {
    if alpha.norm() == 0.0 || !alpha.is_finite() {
        return Err(Error::Validation(format!(
            "scale/rotation factor must be finite and nonzero, got {alpha}"
        )));
    }
    Ok(Region {
        b: region.b.clone(),
        c: &region.c / alpha,
        mode: Mode::Extended,
        descriptor: Descriptor::ScaleRotate {
            alpha,
            base: Box::new(region.descriptor.clone()),
        },
    })
}

/// `region + alpha`, i.e. `B <- B - alpha C - conj(alpha) C^H`.
pub fn transform_translate(region: &Region, alpha: Complex64) -> Result<Region> {
    if !alpha.is_finite() {
        return Err(Error::Validation(format!(
            "translation must be finite, got {alpha}"
        )));
    }
    let b = &region.b - &region.c * alpha - region.c.adjoint() * alpha.conj();
    Ok(Region {
        b: hermitian_part(&b),
        c: region.c.clone(),
        mode: Mode::Extended,
        descriptor: Descriptor::Translate {
            alpha,
            base: Box::new(region.descriptor.clone()),
        },
    })
}

/// Rectangular window `[xmin, xmax] x [ymin, ymax]` of the complex plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
}

impl Window {
    pub fn new(xmin: f64, xmax: f64, ymin: f64, ymax: f64) -> Result<Window> {
        let ok = [xmin, xmax, ymin, ymax].iter().all(|v| v.is_finite());
        if !ok || xmin >= xmax || ymin >= ymax {
            return Err(Error::Validation(format!(
                "degenerate window ({xmin}, {xmax}, {ymin}, {ymax})"
            )));
        }
        Ok(Window {
            xmin,
            xmax,
            ymin,
            ymax,
        })
    }
}

/// Margins sampled on a grid; `margins[j * nx + i]` is the margin at
/// `xs[i] + i ys[j]`.
#[derive(Clone, Debug)]
pub struct Raster {
    pub window: Window,
    pub nx: usize,
    pub ny: usize,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub margins: Vec<f64>,
}

impl Raster {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.margins[j * self.nx + i]
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            if i + 1 == n {
                b
            } else {
                a + (b - a) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

pub fn raster(region: &Region, window: Window, nx: usize, ny: usize) -> Result<Raster> {
    Window::new(window.xmin, window.xmax, window.ymin, window.ymax)?;
    if nx < 2 || ny < 2 {
        return Err(Error::Validation(format!(
            "raster resolution must be at least 2x2, got {nx}x{ny}"
        )));
    }
    let xs = linspace(window.xmin, window.xmax, nx);
    let ys = linspace(window.ymin, window.ymax, ny);
    let mut margins = Vec::with_capacity(nx * ny);
    for &y in &ys {
        for &x in &xs {
            margins.push(region.membership_margin(Complex64::new(x, y)));
        }
    }
    Ok(Raster {
        window,
        nx,
        ny,
        xs,
        ys,
        margins,
    })
}
