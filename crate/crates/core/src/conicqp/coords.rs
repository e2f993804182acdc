//! Orthonormal real coordinates for structured matrix subspaces.
//!
//! Each structure gets a basis that is orthonormal for the real Frobenius
//! inner product `Re tr(X^H Y)`, so Euclidean geometry on coordinate
//! vectors is Frobenius geometry on matrices. `encode` is the orthogonal
//! projection onto the subspace followed by taking coordinates.

use std::f64::consts::SQRT_2;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::linalg::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Structure {
    /// Skew-symmetric (real) / skew-Hermitian (complex).
    Skew,
    /// `M^T = M`; coincides with `Hermitian` in real mode.
    Symmetric,
    /// `M^H = M`.
    Hermitian,
    /// Unstructured square matrix.
    Full,
}

impl Structure {
    pub fn coord_len<T: Scalar>(self, n: usize) -> usize {
        let pairs = n * n.saturating_sub(1) / 2;
        match (self, T::IS_COMPLEX) {
            (Structure::Skew, false) => pairs,
            (Structure::Symmetric | Structure::Hermitian, false) => n + pairs,
            (Structure::Full, false) => n * n,
            (Structure::Skew | Structure::Hermitian, true) => n * n,
            (Structure::Symmetric, true) => 2 * (n + pairs),
            (Structure::Full, true) => 2 * n * n,
        }
    }

    pub fn encode<T: Scalar>(self, m: &DMatrix<T>, out: &mut [f64]) {
        let n = m.nrows();
        debug_assert_eq!(out.len(), self.coord_len::<T>(n));
        let e = |i: usize, j: usize| m[(i, j)].to_c64();
        let mut k = 0;
        let mut push = |v: f64| {
            out[k] = v;
            k += 1;
        };
        match (self, T::IS_COMPLEX) {
            (Structure::Full, false) => m.iter().for_each(|x| push(x.to_c64().re)),
            (Structure::Full, true) => m.iter().for_each(|x| {
                let z = x.to_c64();
                push(z.re);
                push(z.im);
            }),
            (Structure::Skew, false) => {
                for j in 0..n {
                    for i in 0..j {
                        push((e(i, j).re - e(j, i).re) / SQRT_2);
                    }
                }
            }
            (Structure::Symmetric | Structure::Hermitian, false) => {
                for j in 0..n {
                    push(e(j, j).re);
                    for i in 0..j {
                        push((e(i, j).re + e(j, i).re) / SQRT_2);
                    }
                }
            }
            (Structure::Hermitian, true) => {
                for j in 0..n {
                    push(e(j, j).re);
                    for i in 0..j {
                        let (a, b) = (e(i, j), e(j, i));
                        push((a.re + b.re) / SQRT_2);
                        push((a.im - b.im) / SQRT_2);
                    }
                }
            }
            (Structure::Skew, true) => {
                for j in 0..n {
                    push(e(j, j).im);
                    for i in 0..j {
                        let (a, b) = (e(i, j), e(j, i));
                        push((a.re - b.re) / SQRT_2);
                        push((a.im + b.im) / SQRT_2);
                    }
                }
            }
            (Structure::Symmetric, true) => {
                for j in 0..n {
                    push(e(j, j).re);
                    push(e(j, j).im);
                    for i in 0..j {
                        let (a, b) = (e(i, j), e(j, i));
                        push((a.re + b.re) / SQRT_2);
                        push((a.im + b.im) / SQRT_2);
                    }
                }
            }
        }
    }

    pub fn decode<T: Scalar>(self, x: &[f64], n: usize) -> DMatrix<T> {
        debug_assert_eq!(x.len(), self.coord_len::<T>(n));
        let mut m = DMatrix::<Complex64>::zeros(n, n);
        let mut it = x.iter().copied();
        let mut next = || it.next().expect("coordinate count");
        let c = Complex64::new;
        match (self, T::IS_COMPLEX) {
            (Structure::Full, false) => m.iter_mut().for_each(|z| *z = c(next(), 0.0)),
            (Structure::Full, true) => m.iter_mut().for_each(|z| {
                let re = next();
                *z = c(re, next());
            }),
            (Structure::Skew, false) => {
                for j in 0..n {
                    for i in 0..j {
                        let a = next() / SQRT_2;
                        m[(i, j)] = c(a, 0.0);
                        m[(j, i)] = c(-a, 0.0);
                    }
                }
            }
            (Structure::Symmetric | Structure::Hermitian, false) => {
                for j in 0..n {
                    m[(j, j)] = c(next(), 0.0);
                    for i in 0..j {
                        let a = next() / SQRT_2;
                        m[(i, j)] = c(a, 0.0);
                        m[(j, i)] = c(a, 0.0);
                    }
                }
            }
            (Structure::Hermitian, true) => {
                for j in 0..n {
                    m[(j, j)] = c(next(), 0.0);
                    for i in 0..j {
                        let a = next() / SQRT_2;
                        let b = next() / SQRT_2;
                        m[(i, j)] = c(a, b);
                        m[(j, i)] = c(a, -b);
                    }
                }
            }
            (Structure::Skew, true) => {
                for j in 0..n {
                    m[(j, j)] = c(0.0, next());
                    for i in 0..j {
                        let a = next() / SQRT_2;
                        let b = next() / SQRT_2;
                        m[(i, j)] = c(a, b);
                        m[(j, i)] = c(-a, b);
                    }
                }
            }
            (Structure::Symmetric, true) => {
                for j in 0..n {
                    let re = next();
                    m[(j, j)] = c(re, next());
                    for i in 0..j {
                        let a = next() / SQRT_2;
                        let b = next() / SQRT_2;
                        m[(i, j)] = c(a, b);
                        m[(j, i)] = c(a, b);
                    }
                }
            }
        }
        m.map(|z| T::from_c64(z).expect("real-mode coordinates decode to real entries"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const ALL: [Structure; 4] = [
        Structure::Skew,
        Structure::Symmetric,
        Structure::Hermitian,
        Structure::Full,
    ];

    fn check_orthonormal<T: Scalar>() {
        let n = 3;
        for s in ALL {
            let len = s.coord_len::<T>(n);
            for a in 0..len {
                let mut ea = vec![0.0; len];
                ea[a] = 1.0;
                let ma: DMatrix<T> = s.decode(&ea, n);
                let mut back = vec![0.0; len];
                s.encode(&ma, &mut back);
                for (x, y) in back.iter().zip(&ea) {
                    assert_abs_diff_eq!(x, y, epsilon = 1e-15);
                }
                for b in 0..len {
                    let mut eb = vec![0.0; len];
                    eb[b] = 1.0;
                    let mb: DMatrix<T> = s.decode(&eb, n);
                    let ip: f64 = ma
                        .iter()
                        .zip(mb.iter())
                        .map(|(x, y)| (x.to_c64().conj() * y.to_c64()).re)
                        .sum();
                    assert_abs_diff_eq!(ip, if a == b { 1.0 } else { 0.0 }, epsilon = 1e-15);
                }
            }
        }
    }

    #[test]
    fn bases_are_orthonormal() {
        check_orthonormal::<f64>();
        check_orthonormal::<Complex64>();
    }

    #[test]
    fn encode_projects_onto_structure() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 3.0]);
        let mut x = vec![0.0; 1];
        Structure::Skew.encode(&m, &mut x);
        let skew: DMatrix<f64> = Structure::Skew.decode(&x, 2);
        assert_abs_diff_eq!(skew, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]), epsilon = 1e-15);
    }
}
