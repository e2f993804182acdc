//! Dense real/complex matrix kernels.
//!
//! Storage, products and the Cholesky factorization come from `nalgebra`;
//! the Hermitian eigensolver (cyclic Jacobi) and the general eigensolver
//! (Hessenberg reduction plus shifted complex QR) are implemented here.
//!
//! Every routine is generic over [`Scalar`], which is implemented for `f64`
//! (real mode) and `Complex64` (complex mode). Sizes are desk scale: the
//! algorithms are O(n^3) per sweep and untested beyond n = 64.

use nalgebra::{ComplexField, DMatrix};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// A matrix entry type: `f64` for real mode, `Complex64` for complex mode.
pub trait Scalar: ComplexField<RealField = f64> + Copy + Send + Sync + 'static {
    const IS_COMPLEX: bool;

    /// Narrow a complex number; `None` when a real scalar cannot hold it.
    fn from_c64(z: Complex64) -> Option<Self>;
    fn to_c64(self) -> Complex64;
}

impl Scalar for f64 {
    const IS_COMPLEX: bool = false;

    fn from_c64(z: Complex64) -> Option<Self> {
        (z.im == 0.0).then_some(z.re)
    }

    fn to_c64(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
}

impl Scalar for Complex64 {
    const IS_COMPLEX: bool = true;

    fn from_c64(z: Complex64) -> Option<Self> {
        Some(z)
    }

    fn to_c64(self) -> Complex64 {
        self
    }
}

/// Spectrum of a Hermitian matrix, eigenvalues in descending order.
#[derive(Clone, Debug)]
pub struct HermEig<T: Scalar> {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors, column `i` belongs to `values[i]`.
    pub vectors: DMatrix<T>,
    pub residual: f64,
}

/// Spectrum of a general square matrix.
#[derive(Clone, Debug)]
pub struct EigResult {
    /// Descending by real part, ties broken by descending imaginary part.
    pub values: Vec<Complex64>,
    pub vectors: Option<DMatrix<Complex64>>,
    /// max_i ||A v_i - lambda_i v_i|| / ||A||_F (zero for the zero matrix).
    pub residual: f64,
}

pub fn ensure_square<T: Scalar>(m: &DMatrix<T>, what: &str) -> Result<usize> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::Dimension(format!(
            "{what} must be square and non-empty, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(m.nrows())
}

pub fn fro<T: Scalar>(m: &DMatrix<T>) -> f64 {
    m.norm()
}

/// (M + M^H) / 2.
pub fn hermitian_part<T: Scalar>(m: &DMatrix<T>) -> DMatrix<T> {
    (m + m.adjoint()) * T::from_real(0.5)
}

/// (M - M^H) / 2.
pub fn skew_part<T: Scalar>(m: &DMatrix<T>) -> DMatrix<T> {
    (m - m.adjoint()) * T::from_real(0.5)
}

/// Splits `m` into its Hermitian and skew-Hermitian parts.
pub fn split_sym_skew<T: Scalar>(m: &DMatrix<T>) -> Result<(DMatrix<T>, DMatrix<T>)> {
    ensure_square(m, "split_sym_skew input")?;
    Ok((hermitian_part(m), skew_part(m)))
}

pub fn kron<T: Scalar>(a: &DMatrix<T>, b: &DMatrix<T>) -> DMatrix<T> {
    a.kronecker(b)
}

pub fn block_diag<T: Scalar>(blocks: &[&DMatrix<T>]) -> DMatrix<T> {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let (mut r, mut c) = (0, 0);
    for b in blocks {
        out.view_mut((r, c), (b.nrows(), b.ncols())).copy_from(*b);
        r += b.nrows();
        c += b.ncols();
    }
    out
}

/// Solves `P X = rhs` for Hermitian positive definite `P`.
pub fn chol_solve<T: Scalar>(p: &DMatrix<T>, rhs: &DMatrix<T>) -> Result<DMatrix<T>> {
    let n = ensure_square(p, "Cholesky operand")?;
    if rhs.nrows() != n {
        return Err(Error::Dimension(format!(
            "right-hand side has {} rows, expected {n}",
            rhs.nrows()
        )));
    }
    let chol = cholesky(p)?;
    Ok(chol.solve(rhs))
}

pub fn cholesky<T: Scalar>(p: &DMatrix<T>) -> Result<nalgebra::Cholesky<T, nalgebra::Dyn>> {
    ensure_square(p, "Cholesky operand")?;
    let h = hermitian_part(p);
    // nalgebra does not report the failing pivot; find it with a leading-minor scan.
    nalgebra::Cholesky::new(h.clone()).ok_or_else(|| Error::NotPositiveDefinite {
        pivot: failing_pivot(&h),
    })
}

fn failing_pivot<T: Scalar>(h: &DMatrix<T>) -> usize {
    (1..=h.nrows())
        .find(|&k| nalgebra::Cholesky::new(h.view((0, 0), (k, k)).into_owned()).is_none())
        .map_or(0, |k| k - 1)
}

/// Hermitian eigendecomposition by cyclic Jacobi rotations.
///
/// The input is symmetrized first. Sweeps stop once the off-diagonal
/// Frobenius mass falls below `1e-14 * ||M||_F`.
pub fn herm_eig<T: Scalar>(m: &DMatrix<T>) -> Result<HermEig<T>> {
    ensure_square(m, "herm_eig input")?;
    let herm = hermitian_part(m);
    let (values, vectors) = jacobi_eig(herm.clone(), None, true);
    let vectors = vectors.expect("vectors requested");
    let residual = eig_residual(&herm, &vectors, values.iter().map(|&x| T::from_real(x)));
    Ok(HermEig {
        values,
        vectors,
        residual,
    })
}

/// Eigenvalues only (descending), skipping the eigenvector accumulation.
pub fn herm_eigenvalues<T: Scalar>(m: &DMatrix<T>) -> Result<Vec<f64>> {
    ensure_square(m, "herm_eig input")?;
    Ok(jacobi_eig(hermitian_part(m), None, false).0)
}

/// Jacobi started in a given unitary basis: `basis^H M basis` is
/// diagonalized and the rotations are accumulated onto `basis`. When the
/// basis nearly diagonalizes `M` (e.g. eigenvectors of a nearby matrix)
/// one or two sweeps suffice.
pub fn herm_eig_in_basis<T: Scalar>(
    m: &DMatrix<T>,
    basis: &DMatrix<T>,
) -> Result<(Vec<f64>, DMatrix<T>)> {
    let n = ensure_square(m, "herm_eig input")?;
    if basis.shape() != (n, n) {
        return Err(Error::Dimension(format!(
            "basis is {:?}, expected {n}x{n}",
            basis.shape()
        )));
    }
    let a = hermitian_part(&(basis.adjoint() * m * basis));
    let (values, vectors) = jacobi_eig(a, Some(basis.clone()), true);
    Ok((values, vectors.expect("vectors requested")))
}

fn jacobi_eig<T: Scalar>(
    mut a: DMatrix<T>,
    basis: Option<DMatrix<T>>,
    want_vectors: bool,
) -> (Vec<f64>, Option<DMatrix<T>>) {
    let n = a.nrows();
    for i in 0..n {
        a[(i, i)] = T::from_real(a[(i, i)].real());
    }
    let scale = fro(&a);
    let target = 1e-14 * scale;
    let mut v = want_vectors.then(|| basis.unwrap_or_else(|| DMatrix::identity(n, n)));

    for _sweep in 0..100 {
        if off_diag_norm(&a) <= target {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                jacobi_rotate(&mut a, v.as_mut(), p, q, scale);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].real()).collect();
    order.sort_by(|&i, &j| diag[j].total_cmp(&diag[i]));
    let values: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let vectors = v.map(|v| {
        let mut out = DMatrix::<T>::zeros(n, n);
        for (k, &i) in order.iter().enumerate() {
            out.set_column(k, &v.column(i));
        }
        out
    });
    (values, vectors)
}

fn off_diag_norm<T: Scalar>(a: &DMatrix<T>) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for j in 0..n {
        for i in 0..n {
            if i != j {
                s += a[(i, j)].modulus_squared();
            }
        }
    }
    s.sqrt()
}

/// One two-sided rotation zeroing `a[(p, q)]`. Columns `p` and `q` are
/// updated in place and mirrored into rows `p` and `q`, which keeps `a`
/// exactly Hermitian.
fn jacobi_rotate<T: Scalar>(a: &mut DMatrix<T>, v: Option<&mut DMatrix<T>>, p: usize, q: usize, scale: f64) {
    let n = a.nrows();
    let s = a.as_mut_slice();
    let apq = s[p + q * n];
    let mag = apq.modulus();
    if mag <= 1e-300 || mag <= 1e-18 * scale {
        s[p + q * n] = T::zero();
        s[q + p * n] = T::zero();
        return;
    }
    let phase = apq * T::from_real(1.0 / mag);
    let app = s[p + p * n].real();
    let aqq = s[q + q * n].real();
    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta == 0.0 {
        1.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let sn = t * c;

    // V = D * G with D = diag(1, conj(phase)) on (p, q) and G the real rotation.
    let vpp = T::from_real(c);
    let vpq = T::from_real(sn);
    let vqp = phase.conjugate() * T::from_real(-sn);
    let vqq = phase.conjugate() * T::from_real(c);

    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = s[k + p * n];
        let akq = s[k + q * n];
        let nkp = akp * vpp + akq * vqp;
        let nkq = akp * vpq + akq * vqq;
        s[k + p * n] = nkp;
        s[k + q * n] = nkq;
        s[p + k * n] = nkp.conjugate();
        s[q + k * n] = nkq.conjugate();
    }
    s[p + p * n] = T::from_real(app - t * mag);
    s[q + q * n] = T::from_real(aqq + t * mag);
    s[p + q * n] = T::zero();
    s[q + p * n] = T::zero();

    if let Some(v) = v {
        let vs = v.as_mut_slice();
        for k in 0..n {
            let vkp = vs[k + p * n];
            let vkq = vs[k + q * n];
            vs[k + p * n] = vkp * vpp + vkq * vqp;
            vs[k + q * n] = vkp * vpq + vkq * vqq;
        }
    }
}

fn eig_residual<T: Scalar>(
    m: &DMatrix<T>,
    vectors: &DMatrix<T>,
    values: impl Iterator<Item = T>,
) -> f64 {
    let norm = fro(m);
    if norm == 0.0 {
        return 0.0;
    }
    values
        .enumerate()
        .map(|(i, lam)| {
            let col = vectors.column(i);
            (m * col - col * lam).norm() / col.norm().max(f64::MIN_POSITIVE)
        })
        .fold(0.0, f64::max)
        / norm
}

/// Largest eigenvalue of a Hermitian matrix.
pub fn lambda_max<T: Scalar>(m: &DMatrix<T>) -> Result<f64> {
    Ok(herm_eigenvalues(m)?[0])
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn lambda_min<T: Scalar>(m: &DMatrix<T>) -> Result<f64> {
    Ok(*herm_eigenvalues(m)?.last().expect("non-empty spectrum"))
}

/// Eigenvalues and eigenvectors of a general square matrix.
///
/// Real input is promoted to complex, reduced to upper Hessenberg form by
/// Householder reflections, then driven to upper triangular (Schur) form by
/// single-shift QR sweeps with a Wilkinson shift. At most `100 * n` sweeps
/// are performed in total.
pub fn general_eig<T: Scalar>(m: &DMatrix<T>) -> Result<EigResult> {
    let n = ensure_square(m, "general_eig input")?;
    let a: DMatrix<Complex64> = m.map(|x| x.to_c64());
    let norm = fro(&a);
    if n == 1 {
        return Ok(EigResult {
            values: vec![a[(0, 0)]],
            vectors: Some(DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0))),
            residual: 0.0,
        });
    }

    let (mut h, mut z) = hessenberg(&a);
    schur_qr(&mut h, &mut z)?;

    let values_raw: Vec<Complex64> = (0..n).map(|i| h[(i, i)]).collect();
    let vectors_raw = schur_eigenvectors(&h, &z);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = (values_raw[i], values_raw[j]);
        b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im))
    });
    let values: Vec<Complex64> = order.iter().map(|&i| values_raw[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vectors.set_column(k, &vectors_raw.column(i));
    }
    let residual = if norm == 0.0 {
        0.0
    } else {
        eig_residual(&a, &vectors, values.iter().copied())
    };
    Ok(EigResult {
        values,
        vectors: Some(vectors),
        residual,
    })
}

/// Householder reduction A = Z H Z^H with H upper Hessenberg.
fn hessenberg(a: &DMatrix<Complex64>) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
    let n = a.nrows();
    let mut h = a.clone();
    let mut z = DMatrix::<Complex64>::identity(n, n);
    for k in 0..n.saturating_sub(2) {
        let x: Vec<Complex64> = ((k + 1)..n).map(|i| h[(i, k)]).collect();
        let alpha = x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if alpha == 0.0 {
            continue;
        }
        let phase = if x[0].norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x[0] / x[0].norm()
        };
        let mut u = x.clone();
        u[0] += phase * alpha;
        let unorm = u.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if unorm == 0.0 {
            continue;
        }
        for c in u.iter_mut() {
            *c /= unorm;
        }
        // H <- (I - 2uu^H) H (I - 2uu^H), acting on rows/cols k+1..n.
        for j in 0..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for (t, ui) in u.iter().enumerate() {
                dot += ui.conj() * h[(k + 1 + t, j)];
            }
            for (t, ui) in u.iter().enumerate() {
                h[(k + 1 + t, j)] -= *ui * dot * 2.0;
            }
        }
        for i in 0..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for (t, ui) in u.iter().enumerate() {
                dot += h[(i, k + 1 + t)] * *ui;
            }
            for (t, ui) in u.iter().enumerate() {
                h[(i, k + 1 + t)] -= dot * ui.conj() * 2.0;
            }
            let mut dotz = Complex64::new(0.0, 0.0);
            for (t, ui) in u.iter().enumerate() {
                dotz += z[(i, k + 1 + t)] * *ui;
            }
            for (t, ui) in u.iter().enumerate() {
                z[(i, k + 1 + t)] -= dotz * ui.conj() * 2.0;
            }
        }
        for i in (k + 2)..n {
            h[(i, k)] = Complex64::new(0.0, 0.0);
        }
    }
    (h, z)
}

fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    // Returns (c, s) with [c s; -conj(s) c] [a; b] = [r; 0], c real.
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    let an = a.norm();
    if an == 0.0 {
        return (0.0, b.conj() / bn);
    }
    let r = (an * an + bn * bn).sqrt();
    let c = an / r;
    let s = (a / an) * b.conj() / r;
    (c, s)
}

fn schur_qr(h: &mut DMatrix<Complex64>, z: &mut DMatrix<Complex64>) -> Result<()> {
    let n = h.nrows();
    let cap = 100 * n;
    let mut total = 0usize;
    let mut since_deflation = 0usize;
    let mut hi = n - 1;
    let eps = f64::EPSILON;

    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let sub = h[(l, l - 1)].norm();
            let mut s = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            if s == 0.0 {
                s = fro(h);
            }
            if sub <= eps * s {
                h[(l, l - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        if total >= cap {
            let partial = ((hi + 1)..n).map(|i| h[(i, i)]).collect::<Vec<_>>();
            return Err(Error::NoConvergence {
                iterations: total,
                found: partial.len(),
                n,
                partial,
            });
        }
        total += 1;
        since_deflation += 1;

        let shift = if since_deflation % 11 == 10 {
            // exceptional shift to break cycles
            h[(hi, hi)] + Complex64::new(h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };

        let mut rots = Vec::with_capacity(hi - l);
        for k in l..=hi {
            h[(k, k)] -= shift;
        }
        for k in l..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            rots.push((c, s));
            for j in k..n {
                let x = h[(k, j)];
                let y = h[(k + 1, j)];
                h[(k, j)] = x * c + s * y;
                h[(k + 1, j)] = -s.conj() * x + y * c;
            }
        }
        for (idx, &(c, s)) in rots.iter().enumerate() {
            let k = l + idx;
            let top = (k + 2).min(hi);
            for i in 0..=top {
                let x = h[(i, k)];
                let y = h[(i, k + 1)];
                h[(i, k)] = x * c + y * s.conj();
                h[(i, k + 1)] = -x * s + y * c;
            }
            for i in 0..n {
                let x = z[(i, k)];
                let y = z[(i, k + 1)];
                z[(i, k)] = x * c + y * s.conj();
                z[(i, k + 1)] = -x * s + y * c;
            }
        }
        for k in l..=hi {
            h[(k, k)] += shift;
        }
    }
    Ok(())
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let tr_half = (a + d) * 0.5;
    let det = a * d - b * c;
    let disc = (tr_half * tr_half - det).sqrt();
    let l1 = tr_half + disc;
    let l2 = tr_half - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Eigenvectors of A = Z T Z^H from the upper triangular T.
fn schur_eigenvectors(t: &DMatrix<Complex64>, z: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = t.nrows();
    let tiny = f64::EPSILON * fro(t).max(f64::MIN_POSITIVE);
    let mut y = DMatrix::<Complex64>::zeros(n, n);
    for k in 0..n {
        let lam = t[(k, k)];
        y[(k, k)] = Complex64::new(1.0, 0.0);
        for j in (0..k).rev() {
            let mut acc = Complex64::new(0.0, 0.0);
            for m in (j + 1)..=k {
                acc += t[(j, m)] * y[(m, k)];
            }
            let mut den = t[(j, j)] - lam;
            if den.norm() < tiny {
                den = Complex64::new(tiny, 0.0);
            }
            y[(j, k)] = -acc / den;
        }
    }
    let mut v = z * y;
    for k in 0..n {
        let nrm = v.column(k).norm();
        if nrm > 0.0 {
            let inv = Complex64::new(1.0 / nrm, 0.0);
            for i in 0..n {
                v[(i, k)] *= inv;
            }
        }
    }
    v
}
