//! Region specification documents.
//!
//! A spec is a TOML document whose top-level table is one region node.
//! Every node has a `kind`:
//!
//! ```toml
//! kind = "intersection"
//!
//! [[members]]
//! kind = "vertical_strip"
//! h = -5.0
//! k = 5.0
//!
//! [[members]]
//! kind = "translate"
//! alpha = "1-2i"
//! base = { kind = "disk", q = 0.0, r = 1.0 }
//! ```
//!
//! Kinds: the twelve catalog identifiers with their named parameters,
//! `hurwitz`, `schur`, `custom` (`b`, `c` as arrays of rows whose entries are
//! numbers or `{ re, im }` tables, optional `mode = "real" | "extended"`),
//! `intersection` (`members`), and `translate` / `scale_rotate` (`alpha` as a
//! complex literal, `base`).

use dhstab::{intersect, Catalog, Complex64, DMatrix, Mode, Region};
use dhstab::regions::{transform_scale_rotate, transform_translate};
use serde::{Deserialize, Serialize};

use crate::complex::{format_complex_literal, parse_complex_literal};
use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex { re: f64, im: f64 },
}

impl Entry {
    fn value(&self) -> Complex64 {
        match *self {
            Entry::Real(x) => Complex64::new(x, 0.0),
            Entry::Complex { re, im } => Complex64::new(re, im),
        }
    }

    fn from_value(z: Complex64) -> Entry {
        if z.im == 0.0 {
            Entry::Real(z.re)
        } else {
            Entry::Complex { re: z.re, im: z.im }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeName {
    Real,
    Extended,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RegionSpec {
    LeftConic { a: f64, theta: f64 },
    RightConic { a: f64, theta: f64 },
    Disk { q: f64, r: f64 },
    VerticalStrip { h: f64, k: f64 },
    LeftHalfPlane { k: f64 },
    RightHalfPlane { h: f64 },
    Ellipse { q_e: f64, a_e: f64, b_e: f64 },
    LeftParabola { q_p: f64, c_p: f64 },
    RightParabola { q_p: f64, c_p: f64 },
    LeftHyperbola { a_h: f64, b_h: f64 },
    RightHyperbola { a_h: f64, b_h: f64 },
    HorizontalStrip { w: f64 },
    Hurwitz,
    Schur,
    Custom {
        b: Vec<Vec<Entry>>,
        c: Vec<Vec<Entry>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mode: Option<ModeName>,
    },
    Intersection { members: Vec<RegionSpec> },
    Translate { alpha: String, base: Box<RegionSpec> },
    ScaleRotate { alpha: String, base: Box<RegionSpec> },
}

fn matrix(rows: &[Vec<Entry>], what: &str) -> CliResult<DMatrix<Complex64>> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(CliError::Input(format!("custom region: {what} must be a non-empty square array of rows")));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j].value()))
}

fn rows(m: &DMatrix<Complex64>) -> Vec<Vec<Entry>> {
    m.row_iter().map(|r| r.iter().map(|&z| Entry::from_value(z)).collect()).collect()
}

fn alpha(text: &str) -> CliResult<Complex64> {
    parse_complex_literal(text).map_err(|e| CliError::Input(e.to_string()))
}

impl RegionSpec {
    pub fn parse(text: &str) -> CliResult<RegionSpec> {
        toml::from_str(text).map_err(|e| CliError::Input(format!("region spec: {e}")))
    }

    pub fn echo(&self) -> String {
        toml::to_string(self).expect("region specs always serialize")
    }

    pub fn catalog(&self) -> Option<Catalog> {
        use RegionSpec as S;
        Some(match *self {
            S::LeftConic { a, theta } => Catalog::LeftConic { a, theta },
            S::RightConic { a, theta } => Catalog::RightConic { a, theta },
            S::Disk { q, r } => Catalog::Disk { q, r },
            S::VerticalStrip { h, k } => Catalog::VerticalStrip { h, k },
            S::LeftHalfPlane { k } => Catalog::LeftHalfPlane { k },
            S::RightHalfPlane { h } => Catalog::RightHalfPlane { h },
            S::Ellipse { q_e, a_e, b_e } => Catalog::Ellipse { q_e, a_e, b_e },
            S::LeftParabola { q_p, c_p } => Catalog::LeftParabola { q_p, c_p },
            S::RightParabola { q_p, c_p } => Catalog::RightParabola { q_p, c_p },
            S::LeftHyperbola { a_h, b_h } => Catalog::LeftHyperbola { a_h, b_h },
            S::RightHyperbola { a_h, b_h } => Catalog::RightHyperbola { a_h, b_h },
            S::HorizontalStrip { w } => Catalog::HorizontalStrip { w },
            _ => return None,
        })
    }

    pub fn from_catalog(kind: Catalog) -> RegionSpec {
        use RegionSpec as S;
        match kind {
            Catalog::LeftConic { a, theta } => S::LeftConic { a, theta },
            Catalog::RightConic { a, theta } => S::RightConic { a, theta },
            Catalog::Disk { q, r } => S::Disk { q, r },
            Catalog::VerticalStrip { h, k } => S::VerticalStrip { h, k },
            Catalog::LeftHalfPlane { k } => S::LeftHalfPlane { k },
            Catalog::RightHalfPlane { h } => S::RightHalfPlane { h },
            Catalog::Ellipse { q_e, a_e, b_e } => S::Ellipse { q_e, a_e, b_e },
            Catalog::LeftParabola { q_p, c_p } => S::LeftParabola { q_p, c_p },
            Catalog::RightParabola { q_p, c_p } => S::RightParabola { q_p, c_p },
            Catalog::LeftHyperbola { a_h, b_h } => S::LeftHyperbola { a_h, b_h },
            Catalog::RightHyperbola { a_h, b_h } => S::RightHyperbola { a_h, b_h },
            Catalog::HorizontalStrip { w } => S::HorizontalStrip { w },
        }
    }

    /// Custom node holding the matrices of `region` verbatim.
    pub fn from_matrices(region: &Region) -> RegionSpec {
        RegionSpec::Custom {
            b: rows(region.b()),
            c: rows(region.c()),
            mode: Some(match region.mode() {
                Mode::Real => ModeName::Real,
                Mode::Extended => ModeName::Extended,
            }),
        }
    }

    pub fn translate(alpha: Complex64, base: RegionSpec) -> RegionSpec {
        RegionSpec::Translate { alpha: format_complex_literal(alpha), base: Box::new(base) }
    }

    pub fn scale_rotate(alpha: Complex64, base: RegionSpec) -> RegionSpec {
        RegionSpec::ScaleRotate { alpha: format_complex_literal(alpha), base: Box::new(base) }
    }

    pub fn build(&self) -> CliResult<Region> {
        if let Some(kind) = self.catalog() {
            return Ok(Region::catalog(kind)?);
        }
        Ok(match self {
            RegionSpec::Hurwitz => Region::hurwitz(),
            RegionSpec::Schur => Region::schur(),
            RegionSpec::Custom { b, c, mode } => {
                let (b, c) = (matrix(b, "b")?, matrix(c, "c")?);
                match mode {
                    Some(ModeName::Real) => Region::custom(b, c, Mode::Real)?,
                    Some(ModeName::Extended) => Region::custom(b, c, Mode::Extended)?,
                    None => Region::custom_inferred(b, c)?,
                }
            }
            RegionSpec::Intersection { members } => {
                let built = members.iter().map(RegionSpec::build).collect::<CliResult<Vec<_>>>()?;
                intersect(&built)?
            }
            RegionSpec::Translate { alpha: a, base } => transform_translate(&base.build()?, alpha(a)?)?,
            RegionSpec::ScaleRotate { alpha: a, base } => transform_scale_rotate(&base.build()?, alpha(a)?)?,
            _ => unreachable!("catalog kinds handled above"),
        })
    }
}

/// Reads and builds a spec file.
pub fn load_region(path: &std::path::Path) -> CliResult<(RegionSpec, Region)> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let spec = RegionSpec::parse(&text)?;
    let region = spec.build()?;
    Ok((spec, region))
}
