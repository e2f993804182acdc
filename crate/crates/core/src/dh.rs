//! Dissipative-Hamiltonian triplets and the Kronecker LMIs that tie them to
//! LMI regions.
//!
//! A triplet `(J, R, P)` with `J` skew, `R` Hermitian and `P` positive
//! definite represents `A = (J - R) P^{-1}`. `A` has all eigenvalues in the
//! region `{z : B + zC + conj(z) C^H < 0}` exactly when some triplet for it
//! satisfies
//!
//! ```text
//! M(J, R, P) = B (x) P + (C - C^H) (x) J - (C + C^H) (x) R  < 0.
//! ```
//!
//! `P` plays the role of `Q^{-1}` throughout, so assembling `M` never
//! inverts anything.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::conicqp::{ConicConfig, ProgramBuilder, Status, Structure};
use crate::error::{Error, Result};
use crate::linalg::{
    cholesky, ensure_square, fro, general_eig, herm_eig, hermitian_part, kron, lambda_max,
    lambda_min, skew_part, Scalar,
};
use crate::regions::{Catalog, Mode, Region};

#[derive(Clone, Debug, PartialEq)]
pub struct DhTriplet<T: Scalar> {
    pub j: DMatrix<T>,
    pub r: DMatrix<T>,
    pub p: DMatrix<T>,
}

impl<T: Scalar> DhTriplet<T> {
    /// Validates the structure, then stores the exactly (skew-)symmetrized parts.
    pub fn new(j: DMatrix<T>, r: DMatrix<T>, p: DMatrix<T>) -> Result<Self> {
        let n = ensure_square(&j, "J")?;
        if r.shape() != (n, n) || p.shape() != (n, n) {
            return Err(Error::Dimension(format!(
                "triplet blocks disagree: J {:?}, R {:?}, P {:?}",
                j.shape(),
                r.shape(),
                p.shape()
            )));
        }
        let j_err = fro(&(&j + j.adjoint()));
        if j_err > 1e-12 * (1.0 + fro(&j)) {
            return Err(Error::Validation(format!("J is not skew (||J + J^H|| = {j_err:e})")));
        }
        let r_err = fro(&(&r - r.adjoint()));
        if r_err > 1e-12 * (1.0 + fro(&r)) {
            return Err(Error::Validation(format!("R is not Hermitian (||R - R^H|| = {r_err:e})")));
        }
        cholesky(&p)?;
        Ok(DhTriplet {
            j: skew_part(&j),
            r: hermitian_part(&r),
            p: hermitian_part(&p),
        })
    }

    pub fn dim(&self) -> usize {
        self.j.nrows()
    }

    pub fn to_complex(&self) -> DhTriplet<Complex64> {
        let c = |m: &DMatrix<T>| m.map(|x| x.to_c64());
        DhTriplet {
            j: c(&self.j),
            r: c(&self.r),
            p: c(&self.p),
        }
    }

    /// Multiplies all three blocks by `s > 0`; `compose` is unchanged.
    pub fn scaled(&self, s: f64) -> Self {
        let s = T::from_real(s);
        DhTriplet {
            j: &self.j * s,
            r: &self.r * s,
            p: &self.p * s,
        }
    }
}

/// `(X, delta)` with `X >= I` and `M(A, X) <= -delta I`.
#[derive(Clone, Debug)]
pub struct StabilityCertificate<T: Scalar> {
    pub x: DMatrix<T>,
    pub delta: f64,
}

/// `B` and `C` of `region` as matrices over `T`.
pub fn region_matrices<T: Scalar>(region: &Region) -> Result<(DMatrix<T>, DMatrix<T>)> {
    if region.mode() == Mode::Extended && !T::IS_COMPLEX {
        return Err(Error::Mode(
            "an extended region needs complex matrices; promote the input to complex".into(),
        ));
    }
    let conv = |m: &DMatrix<Complex64>| -> Result<DMatrix<T>> {
        let mut out = DMatrix::<T>::zeros(m.nrows(), m.ncols());
        for (o, z) in out.iter_mut().zip(m.iter()) {
            *o = T::from_c64(*z).ok_or_else(|| Error::Mode("complex entry in real region".into()))?;
        }
        Ok(out)
    };
    Ok((conv(region.b())?, conv(region.c())?))
}

pub(crate) fn assemble_with<T: Scalar>(
    b: &DMatrix<T>,
    c: &DMatrix<T>,
    j: &DMatrix<T>,
    r: &DMatrix<T>,
    p: &DMatrix<T>,
) -> DMatrix<T> {
    let ch = c.adjoint();
    let m = kron(b, p) + kron(&(c - &ch), j) - kron(&(c + &ch), r);
    hermitian_part(&m)
}

/// `B (x) P + (C - C^H) (x) J - (C + C^H) (x) R`, of order `s n`.
pub fn assemble_m_triplet<T: Scalar>(region: &Region, t: &DhTriplet<T>) -> Result<DMatrix<T>> {
    let (b, c) = region_matrices::<T>(region)?;
    Ok(assemble_with(&b, &c, &t.j, &t.r, &t.p))
}

/// `B (x) X + C (x) (AX) + C^H (x) (AX)^H`, of order `s n`.
pub fn assemble_m_ax<T: Scalar>(region: &Region, a: &DMatrix<T>, x: &DMatrix<T>) -> Result<DMatrix<T>> {
    let n = ensure_square(a, "A")?;
    if x.shape() != (n, n) {
        return Err(Error::Dimension(format!(
            "X is {:?} but A is {n}x{n}",
            x.shape()
        )));
    }
    let (b, c) = region_matrices::<T>(region)?;
    let ax = a * x;
    let m = kron(&b, x) + kron(&c, &ax) + kron(&c.adjoint(), &ax.adjoint());
    Ok(hermitian_part(&m))
}

/// `lambda_max(M(J, R, P))`; the LMI holds strictly iff this is negative.
pub fn lmi_margin<T: Scalar>(region: &Region, t: &DhTriplet<T>) -> Result<f64> {
    lambda_max(&assemble_m_triplet(region, t)?)
}

/// Numerical threshold below which `lambda_max(M)` counts as strictly
/// negative: `1e-8 (1 + ||B|| ||P|| + ||C|| (||J|| + ||R||))`.
pub fn lmi_strictness<T: Scalar>(region: &Region, t: &DhTriplet<T>) -> f64 {
    1e-8 * (1.0 + fro(region.b()) * fro(&t.p) + fro(region.c()) * (fro(&t.j) + fro(&t.r)))
}

/// `(J, R, P)` from a certificate: `P = X`, `J = skew(AX)`, `R = -sym(AX)`.
pub fn triplet_from_certificate<T: Scalar>(
    a: &DMatrix<T>,
    cert: &StabilityCertificate<T>,
) -> Result<DhTriplet<T>> {
    let n = ensure_square(a, "A")?;
    if cert.x.shape() != (n, n) {
        return Err(Error::Dimension("certificate and matrix sizes differ".into()));
    }
    cholesky(&cert.x).map_err(|e| Error::InvalidCertificate(e.to_string()))?;
    let ax = a * &cert.x;
    Ok(DhTriplet {
        j: skew_part(&ax),
        r: -hermitian_part(&ax),
        p: hermitian_part(&cert.x),
    })
}

/// `(J - R) P^{-1}`, via a Cholesky solve with `P` from the right.
pub fn compose<T: Scalar>(t: &DhTriplet<T>) -> Result<DMatrix<T>> {
    let chol = cholesky(&t.p)?;
    let rhs = (&t.j - &t.r).adjoint();
    Ok(chol.solve(&rhs).adjoint())
}

#[derive(Clone, Debug)]
pub struct StabilityVerdict {
    pub stable: bool,
    pub eigenvalues: Vec<Complex64>,
    /// Membership margin of each eigenvalue, same order.
    pub margins: Vec<f64>,
    pub worst_margin: f64,
}

/// Eigenvalue test: stable iff every eigenvalue has negative margin.
pub fn is_stable_eig<T: Scalar>(region: &Region, a: &DMatrix<T>) -> Result<StabilityVerdict> {
    ensure_square(a, "A")?;
    let eig = general_eig(a)?;
    let margins: Vec<f64> = eig
        .values
        .iter()
        .map(|&z| region.membership_margin(z))
        .collect();
    let worst_margin = margins.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(StabilityVerdict {
        stable: worst_margin < 0.0,
        eigenvalues: eig.values,
        margins,
        worst_margin,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InfeasibilityReason {
    NumericallyInfeasible,
    IterationCap,
}

#[derive(Clone, Debug)]
pub struct InfeasibilityReport {
    pub reason: InfeasibilityReason,
    /// Best `-lambda_max(M(A, X))` seen (negative: no certificate).
    pub best_delta: f64,
    pub iterations: usize,
    pub primal_residual: f64,
}

#[derive(Clone, Debug)]
pub enum CertifyOutcome<T: Scalar> {
    Certified(StabilityCertificate<T>),
    Infeasible(InfeasibilityReport),
}

impl<T: Scalar> CertifyOutcome<T> {
    pub fn certificate(&self) -> Option<&StabilityCertificate<T>> {
        match self {
            CertifyOutcome::Certified(c) => Some(c),
            CertifyOutcome::Infeasible(_) => None,
        }
    }
}

/// Searches for a Lyapunov-type certificate by projecting `I` onto
/// `{X >= I} & {M(A, X) <= -delta0 I}` with `delta0 = 1e-6 (1 + ||A||_F)`.
/// One retry at `delta0 / 100` is made before giving up.
///
/// When `A` is badly scaled (widely spread spectrum, large norm) the solver
/// may stall just outside the feasible set. Two congruence preconditioners
/// are then tried: the same program is solved for `L^{-1} A L` and mapped
/// back, first with `L` a real block eigenbasis of `A` and then with the
/// Cholesky factor of the best iterate so far.
///
/// The returned certificate is verified independently of the solver:
/// `X` is rescaled so that `lambda_min(X) >= 1` and `delta` is recomputed
/// from an eigendecomposition of the full `M(A, X)`.
pub fn certify_stability<T: Scalar>(
    region: &Region,
    a: &DMatrix<T>,
    cfg: &ConicConfig,
) -> Result<CertifyOutcome<T>> {
    ensure_square(a, "A")?;
    let delta0 = 1e-6 * (1.0 + fro(a));
    let mut report = InfeasibilityReport {
        reason: InfeasibilityReason::NumericallyInfeasible,
        best_delta: f64::NEG_INFINITY,
        iterations: 0,
        primal_residual: f64::INFINITY,
    };
    let mut best_x: Option<DMatrix<T>> = None;

    for round in 0..4 {
        let x = match round {
            0 => certificate_program(region, a, delta0, cfg, &mut report)?,
            1 => certificate_program(region, a, delta0 / 100.0, cfg, &mut report)?,
            2 => match eigenbasis(a)? {
                Some(w) => match preconditioned(region, a, &w, cfg, &mut report)? {
                    Some(x) => x,
                    None => continue,
                },
                None => continue,
            },
            _ => {
                let Some(x) = &best_x else { break };
                let l = cholesky(x)?.l();
                match preconditioned(region, a, &l, cfg, &mut report)? {
                    Some(x) => x,
                    None => break,
                }
            }
        };
        let lmin = lambda_min(&x)?;
        if !(lmin > 0.0) || cholesky(&x).is_err() {
            continue;
        }
        let x = if lmin < 1.0 { x / T::from_real(lmin) } else { x };
        let delta = -lambda_max(&assemble_m_ax(region, a, &x)?)?;
        if delta > 0.0 {
            return Ok(CertifyOutcome::Certified(StabilityCertificate { x, delta }));
        }
        if delta > report.best_delta {
            report.best_delta = delta;
            best_x = Some(x);
        }
    }
    Ok(CertifyOutcome::Infeasible(report))
}

/// Solves the certificate program for `L^{-1} A L` and maps the result
/// back through `X = L Y L^H`, which is a congruence of `M`.
fn preconditioned<T: Scalar>(
    region: &Region,
    a: &DMatrix<T>,
    l: &DMatrix<T>,
    cfg: &ConicConfig,
    report: &mut InfeasibilityReport,
) -> Result<Option<DMatrix<T>>> {
    let Some(a_pre) = l.clone().lu().solve(&(a * l)) else {
        return Ok(None);
    };
    let target = 1e-6 * (1.0 + fro(&a_pre));
    let y = certificate_program(region, &a_pre, target, cfg, report)?;
    Ok(Some(hermitian_part(&(l * y * l.adjoint()))))
}

/// Basis in which `A` is block diagonal with normal blocks: eigenvectors
/// for complex `T`, and `(Re v, Im v)` pairs for conjugate eigenvalues of
/// a real `A`. `None` when the eigenvector matrix is numerically singular.
fn eigenbasis<T: Scalar>(a: &DMatrix<T>) -> Result<Option<DMatrix<T>>> {
    let n = a.nrows();
    let eig = general_eig(a)?;
    let Some(v) = eig.vectors else { return Ok(None) };
    let scale = 1e-8 * (1.0 + fro(a));
    let mut cols: Vec<DMatrix<T>> = Vec::with_capacity(n);
    for (k, lambda) in eig.values.iter().enumerate() {
        let col = v.column(k);
        if T::IS_COMPLEX {
            cols.push(DMatrix::from_iterator(n, 1, col.iter().map(|&z| T::from_c64(z).unwrap())));
        } else if lambda.im.abs() <= scale {
            // Remove the arbitrary phase before dropping the imaginary part.
            let pivot = col.iter().copied().max_by(|x, y| x.norm().total_cmp(&y.norm())).unwrap_or_default();
            let phase = if pivot.norm() > 0.0 { pivot.conj() / pivot.norm() } else { Complex64::new(1.0, 0.0) };
            cols.push(DMatrix::from_iterator(n, 1, col.iter().map(|&z| T::from_real((z * phase).re))));
        } else if lambda.im > 0.0 {
            cols.push(DMatrix::from_iterator(n, 1, col.iter().map(|z| T::from_real(z.re))));
            cols.push(DMatrix::from_iterator(n, 1, col.iter().map(|z| T::from_real(z.im))));
        }
    }
    if cols.len() != n {
        return Ok(None);
    }
    let refs: Vec<_> = cols.iter().map(|c| c.column(0)).collect();
    let w = DMatrix::from_columns(&refs);
    let sv = w.clone().singular_values();
    let (smax, smin) = (sv.max(), sv.min());
    Ok((smin > 1e-10 * smax).then_some(w))
}

/// Projects `I` onto `{X >= I} & {M(A, X) <= -target I}` and folds the
/// solver's statistics into `report`.
fn certificate_program<T: Scalar>(
    region: &Region,
    a: &DMatrix<T>,
    target: f64,
    cfg: &ConicConfig,
    report: &mut InfeasibilityReport,
) -> Result<DMatrix<T>> {
    let n = a.nrows();
    let blocks: Vec<(DMatrix<T>, DMatrix<T>)> = region
        .diagonal_blocks()
        .iter()
        .map(|idx| region_matrices::<T>(&region.sub_block(idx)))
        .collect::<Result<_>>()?;
    // Scaling a PSD constraint leaves its feasible set alone but keeps the
    // LMI block comparable to X - I when A is large.
    let weight = 1.0 / (1.0 + fro(a));
    let mut pb = ProgramBuilder::<T>::new();
    pb.block("X", Structure::Hermitian, n);
    pb.proximal(1.0, vec![DMatrix::identity(n, n)]);
    pb.psd_constraint(move |x| &x[0] - DMatrix::<T>::identity(n, n));
    for (b, c) in blocks {
        let a = a.clone();
        pb.psd_constraint(move |x| {
            let ax = &a * &x[0];
            let m = kron(&b, &x[0]) + kron(&c, &ax) + kron(&c.adjoint(), &ax.adjoint());
            let s = m.nrows();
            (-m - DMatrix::<T>::identity(s, s) * T::from_real(target)) * T::from_real(weight)
        });
    }
    let sol = crate::conicqp::solve(pb.build()?, cfg)?;
    report.iterations += sol.iterations;
    report.primal_residual = sol.primal_residual;
    report.reason = if sol.status == Status::MaxIterations {
        InfeasibilityReason::IterationCap
    } else {
        InfeasibilityReason::NumericallyInfeasible
    };
    Ok(hermitian_part(&sol.x[0]))
}

/// The block inequality from the closed-form parametrization table
/// (with `Q^{-1}` written as `P`); the triplet satisfies the region's LMI
/// iff the returned matrix is positive definite.
pub fn table1_constraint(kind: &Catalog, t: &DhTriplet<f64>) -> DMatrix<f64> {
    let (j, r, p) = (&t.j, &t.r, &t.p);
    let blk = |a: DMatrix<f64>, b: DMatrix<f64>, c: DMatrix<f64>, d: DMatrix<f64>| {
        let n = a.nrows();
        let mut out = DMatrix::zeros(2 * n, 2 * n);
        out.view_mut((0, 0), (n, n)).copy_from(&a);
        out.view_mut((0, n), (n, n)).copy_from(&b);
        out.view_mut((n, 0), (n, n)).copy_from(&c);
        out.view_mut((n, n), (n, n)).copy_from(&d);
        hermitian_part(&out)
    };
    let zero = || DMatrix::<f64>::zeros(j.nrows(), j.nrows());
    match *kind {
        Catalog::LeftConic { a, theta } => {
            let (s, c) = theta.sin_cos();
            let d = (p * a + r) * s;
            blk(d.clone(), -j * c, j * c, d)
        }
        Catalog::RightConic { a, theta } => {
            let (s, c) = theta.sin_cos();
            let d = (p * a + r) * (-s);
            blk(d.clone(), -j * c, j * c, d)
        }
        Catalog::Disk { q, r: rad } => blk(p * rad, p * q - j + r, p * q + j + r, p * rad),
        Catalog::VerticalStrip { h, k } => blk(p * k + r, zero(), zero(), -(p * h) - r),
        Catalog::LeftHalfPlane { k } => hermitian_part(&(p * k + r)),
        Catalog::RightHalfPlane { h } => hermitian_part(&(-(p * h) - r)),
        Catalog::Ellipse { q_e, a_e, b_e } => {
            let ratio = a_e / b_e;
            blk(
                p * a_e,
                p * q_e - j * ratio + r,
                p * q_e + j * ratio + r,
                p * a_e,
            )
        }
        Catalog::LeftParabola { q_p, c_p } => {
            let sq = (c_p / 2.0).sqrt();
            blk(p.clone(), -j * sq, j * sq, p * q_p + r)
        }
        Catalog::RightParabola { q_p, c_p } => {
            let sq = (c_p / 2.0).sqrt();
            blk(p.clone(), -j * sq, j * sq, -(p * q_p) - r)
        }
        Catalog::LeftHyperbola { a_h, b_h } => blk(
            r / a_h,
            -p - j / b_h,
            -p + j / b_h,
            r / a_h,
        ),
        Catalog::RightHyperbola { a_h, b_h } => blk(
            -r / a_h,
            -p - j / b_h,
            -p + j / b_h,
            -r / a_h,
        ),
        Catalog::HorizontalStrip { w } => blk(p * w, -j, j.clone(), p * w),
    }
}

/// Two-sided test `-w P < iJ < w P` for the horizontal strip `|Im z| < w`.
/// Returns whether it holds and `min(lambda_min(wP + iJ), lambda_min(wP - iJ))`.
pub fn hstrip_appendix_check(t: &DhTriplet<f64>, w: f64) -> Result<(bool, f64)> {
    if !(w > 0.0) {
        return Err(Error::Validation(format!("strip half-height must be positive, got {w}")));
    }
    let i = Complex64::new(0.0, 1.0);
    let wp = t.p.map(|x| Complex64::new(w * x, 0.0));
    let ij = t.j.map(|x| i * x);
    let plus = herm_eig(&(&wp + &ij))?;
    let minus = herm_eig(&(&wp - &ij))?;
    let margin = plus.values.last().unwrap().min(*minus.values.last().unwrap());
    Ok((margin > 0.0, margin))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::dmatrix;

    fn scalar(j: f64, r: f64, p: f64) -> DhTriplet<f64> {
        DhTriplet::new(dmatrix![j], dmatrix![r], dmatrix![p]).unwrap()
    }

    #[test]
    fn triplet_validation() {
        let i2 = DMatrix::<f64>::identity(2, 2);
        assert!(DhTriplet::new(i2.clone(), i2.clone(), i2.clone()).is_err());
        assert!(DhTriplet::new(DMatrix::zeros(2, 2), dmatrix![0.0, 1.0; 0.0, 0.0], i2.clone()).is_err());
        assert!(matches!(
            DhTriplet::new(DMatrix::zeros(2, 2), i2.clone(), -i2.clone()),
            Err(Error::NotPositiveDefinite { .. })
        ));
        assert!(DhTriplet::new(DMatrix::zeros(2, 2), i2.clone(), DMatrix::identity(3, 3)).is_err());
    }

    #[test]
    fn assemble_triplet_examples() {
        let m = assemble_m_triplet(&Region::hurwitz(), &scalar(0.0, 0.7, 2.0)).unwrap();
        assert_abs_diff_eq!(m[(0, 0)], -1.4, epsilon = 1e-15);

        let n = 3;
        let t = DhTriplet::new(DMatrix::zeros(n, n), DMatrix::zeros(n, n), DMatrix::identity(n, n)).unwrap();
        let m = assemble_m_triplet(&Region::schur(), &t).unwrap();
        assert_eq!(m, -DMatrix::<f64>::identity(2 * n, 2 * n));

        let w = 2.5;
        let h = Region::catalog(Catalog::HorizontalStrip { w }).unwrap();
        let m = assemble_m_triplet(&h, &scalar(0.0, 17.0, 0.4)).unwrap();
        assert_abs_diff_eq!(m, DMatrix::identity(2, 2) * (-w * 0.4), epsilon = 1e-15);
    }

    #[test]
    fn assemble_ax_examples() {
        let a = dmatrix![1.0, 2.0; -3.0, 0.5];
        let m = assemble_m_ax(&Region::hurwitz(), &a, &DMatrix::identity(2, 2)).unwrap();
        assert_abs_diff_eq!(m, &a + a.transpose(), epsilon = 1e-15);

        let m = assemble_m_ax(&Region::schur(), &DMatrix::zeros(2, 2), &DMatrix::identity(2, 2)).unwrap();
        assert_eq!(m, -DMatrix::<f64>::identity(4, 4));

        let d = Region::catalog(Catalog::Disk { q: 0.0, r: 1.0 }).unwrap();
        let m = assemble_m_ax(&d, &dmatrix![0.3], &dmatrix![1.0]).unwrap();
        let f = d.char_fn(Complex64::new(0.3, 0.0)).map(|z| z.re);
        assert_abs_diff_eq!(m, f, epsilon = 1e-15);
    }

    #[test]
    fn triplet_from_certificate_examples() {
        let a = dmatrix![-1.0, 1.0; 0.0, -1.0];
        let cert = StabilityCertificate { x: DMatrix::identity(2, 2), delta: 1.0 };
        let t = triplet_from_certificate(&a, &cert).unwrap();
        assert_abs_diff_eq!(t.j, dmatrix![0.0, 0.5; -0.5, 0.0], epsilon = 1e-15);
        assert_abs_diff_eq!(t.r, dmatrix![1.0, -0.5; -0.5, 1.0], epsilon = 1e-15);
        assert_eq!(t.p, DMatrix::identity(2, 2));
        assert_abs_diff_eq!(&t.j - &t.r, a, epsilon = 1e-15);

        let t = triplet_from_certificate(&-DMatrix::<f64>::identity(2, 2), &cert).unwrap();
        assert_eq!(t.j, DMatrix::zeros(2, 2));
        assert_eq!(t.r, DMatrix::identity(2, 2));

        let k = dmatrix![0.0, 3.0; -3.0, 0.0];
        let t = triplet_from_certificate(&k, &cert).unwrap();
        assert_eq!(t.r, DMatrix::zeros(2, 2));
        assert_eq!(t.j, k);

        let bad = StabilityCertificate { x: -DMatrix::<f64>::identity(2, 2), delta: 1.0 };
        assert!(matches!(triplet_from_certificate(&k, &bad), Err(Error::InvalidCertificate(_))));
    }

    #[test]
    fn compose_examples() {
        let i2 = DMatrix::<f64>::identity(2, 2);
        let t = DhTriplet::new(DMatrix::zeros(2, 2), i2.clone(), i2.clone()).unwrap();
        assert_abs_diff_eq!(compose(&t).unwrap(), -i2.clone(), epsilon = 1e-15);

        let j = dmatrix![0.0, 1.0; -1.0, 0.0];
        let t = DhTriplet::new(j.clone(), DMatrix::zeros(2, 2), i2.clone()).unwrap();
        assert_abs_diff_eq!(compose(&t).unwrap(), j, epsilon = 1e-15);

        let t = DhTriplet::new(DMatrix::zeros(2, 2), dmatrix![1.0, 0.0; 0.0, 2.0], dmatrix![2.0, 0.0; 0.0, 4.0]).unwrap();
        assert_abs_diff_eq!(compose(&t).unwrap(), dmatrix![-0.5, 0.0; 0.0, -0.5], epsilon = 1e-15);
    }

    #[test]
    fn stability_by_eigenvalues() {
        let v = is_stable_eig(&Region::hurwitz(), &-DMatrix::<f64>::identity(2, 2)).unwrap();
        assert!(v.stable);
        assert_abs_diff_eq!(v.worst_margin, -2.0, epsilon = 1e-14);

        let d = Region::catalog(Catalog::Disk { q: 0.0, r: 1.0 }).unwrap();
        let v = is_stable_eig(&d, &DMatrix::<f64>::identity(2, 2)).unwrap();
        assert!(!v.stable);
        assert_abs_diff_eq!(v.worst_margin, 0.0, epsilon = 1e-14);

        let v = is_stable_eig(&Region::hurwitz(), &dmatrix![0.0, 1.0; -1.0, -1.0]).unwrap();
        assert!(v.stable);
        assert_abs_diff_eq!(v.worst_margin, -1.0, epsilon = 1e-12);
    }

    #[test]
    fn certify_examples() {
        let cfg = ConicConfig::default();
        let out = certify_stability(&Region::hurwitz(), &-DMatrix::<f64>::identity(2, 2), &cfg).unwrap();
        let cert = out.certificate().expect("certificate");
        assert_abs_diff_eq!(cert.x, DMatrix::identity(2, 2), epsilon = 1e-6);
        assert_abs_diff_eq!(cert.delta, 2.0, epsilon = 1e-5);

        let out = certify_stability(&Region::hurwitz(), &DMatrix::<f64>::identity(2, 2), &cfg).unwrap();
        assert!(out.certificate().is_none());

        let d = Region::catalog(Catalog::Disk { q: 0.0, r: 1.0 }).unwrap();
        let a = dmatrix![0.5, 0.0; 0.0, -0.5];
        let out = certify_stability(&d, &a, &cfg).unwrap();
        let cert = out.certificate().expect("certificate");
        assert!(cert.delta > 0.0);
        // X = I is itself a certificate: f(+-0.5) has eigenvalues -0.5, -1.5
        let m = assemble_m_ax(&d, &a, &DMatrix::identity(2, 2)).unwrap();
        assert_abs_diff_eq!(lambda_max(&m).unwrap(), -0.5, epsilon = 1e-14);
    }

    #[test]
    fn block_form_examples() {
        let n = 3;
        let i = DMatrix::<f64>::identity(n, n);
        let t = DhTriplet::new(DMatrix::zeros(n, n), i.clone(), i.clone()).unwrap();
        assert_eq!(table1_constraint(&Catalog::LeftHalfPlane { k: 0.0 }, &t), i);

        let t = DhTriplet::new(DMatrix::zeros(n, n), DMatrix::zeros(n, n), i.clone()).unwrap();
        let h = table1_constraint(&Catalog::HorizontalStrip { w: 1.0 }, &t);
        assert_eq!(h, DMatrix::identity(2 * n, 2 * n));
        let d = table1_constraint(&Catalog::Disk { q: 0.0, r: 1.0 }, &t);
        assert_eq!(d, DMatrix::identity(2 * n, 2 * n));
    }

    #[test]
    fn hstrip_check_examples() {
        let p = dmatrix![2.0, 0.5; 0.5, 1.0];
        let t = DhTriplet::new(DMatrix::zeros(2, 2), DMatrix::zeros(2, 2), p.clone()).unwrap();
        let (holds, margin) = hstrip_appendix_check(&t, 0.7).unwrap();
        assert!(holds);
        assert_abs_diff_eq!(margin, 0.7 * lambda_min(&p).unwrap(), epsilon = 1e-14);

        for (jv, w, expect) in [(0.5, 1.0, true), (1.5, 1.0, false), (-0.9, 1.0, true)] {
            let t = DhTriplet::new(dmatrix![0.0, jv; -jv, 0.0], DMatrix::zeros(2, 2), DMatrix::identity(2, 2)).unwrap();
            let (holds, margin) = hstrip_appendix_check(&t, w).unwrap();
            assert_eq!(holds, expect);
            assert_abs_diff_eq!(margin, w - f64::abs(jv), epsilon = 1e-14);
        }

        let t = DhTriplet::new(dmatrix![0.0, 2.0; -2.0, 0.0], DMatrix::zeros(2, 2), DMatrix::identity(2, 2)).unwrap();
        let (holds, margin) = hstrip_appendix_check(&t, 1.0).unwrap();
        assert!(!holds);
        assert_abs_diff_eq!(margin, -1.0, epsilon = 1e-14);
    }

    #[test]
    fn extended_region_needs_complex_triplet() {
        let d = Region::catalog(Catalog::Disk { q: 0.0, r: 1.0 }).unwrap();
        let e = crate::regions::transform_translate(&d, Complex64::new(0.0, 1.0)).unwrap();
        let t = scalar(0.0, 1.0, 1.0);
        assert!(matches!(assemble_m_triplet(&e, &t), Err(Error::Mode(_))));
        assert!(assemble_m_triplet(&e, &t.to_complex()).is_ok());
    }
}
