#![allow(dead_code)]

use dhstab::linalg::{hermitian_part, skew_part};
use dhstab::{Catalog, Complex64, DMatrix, DhTriplet, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal<T: Scalar>(rng: &mut ChaCha8Rng) -> T {
    let re: f64 = rng.sample(StandardNormal);
    if T::IS_COMPLEX {
        let im: f64 = rng.sample(StandardNormal);
        T::from_c64(Complex64::new(re, im)).unwrap()
    } else {
        T::from_real(re)
    }
}

pub fn normal_matrix<T: Scalar>(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<T> {
    DMatrix::from_fn(rows, cols, |_, _| normal::<T>(rng))
}

pub fn hermitian<T: Scalar>(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<T> {
    hermitian_part(&normal_matrix::<T>(rng, n, n))
}

/// `G G^H + floor I` for a Gaussian `G`.
pub fn pos_def<T: Scalar>(rng: &mut ChaCha8Rng, n: usize, floor: f64) -> DMatrix<T> {
    let g = normal_matrix::<T>(rng, n, n) * T::from_real(1.0 / (n as f64).sqrt());
    hermitian_part(&(&g * g.adjoint())) + DMatrix::<T>::identity(n, n) * T::from_real(floor)
}

pub fn random_triplet<T: Scalar>(rng: &mut ChaCha8Rng, n: usize) -> DhTriplet<T> {
    let j = skew_part(&normal_matrix::<T>(rng, n, n));
    let r = hermitian::<T>(rng, n);
    let p = pos_def::<T>(rng, n, 0.1);
    DhTriplet::new(j, r, p).unwrap()
}

/// Triplet with `R` pushed towards positive definiteness, so that a useful
/// fraction of draws satisfies the region LMIs.
pub fn dissipative_triplet<T: Scalar>(rng: &mut ChaCha8Rng, n: usize) -> DhTriplet<T> {
    let scale: f64 = rng.random_range(0.05..1.0);
    let j = skew_part(&normal_matrix::<T>(rng, n, n)) * T::from_real(scale);
    let floor: f64 = rng.random_range(0.0..0.5);
    let r = pos_def::<T>(rng, n, floor) - hermitian::<T>(rng, n) * T::from_real(0.2);
    let p = pos_def::<T>(rng, n, 0.2);
    DhTriplet::new(j, r, p).unwrap()
}

/// One representative parameter set for each catalog kind.
pub fn catalog_samples() -> Vec<Catalog> {
    vec![
        Catalog::LeftConic { a: 1.0, theta: 1.0 },
        Catalog::RightConic { a: -1.0, theta: 0.8 },
        Catalog::Disk { q: -0.5, r: 2.0 },
        Catalog::VerticalStrip { h: -3.0, k: 1.0 },
        Catalog::LeftHalfPlane { k: 0.5 },
        Catalog::RightHalfPlane { h: -2.0 },
        Catalog::Ellipse { q_e: -1.0, a_e: 3.0, b_e: 2.0 },
        Catalog::LeftParabola { q_p: 1.0, c_p: 1.5 },
        Catalog::RightParabola { q_p: -1.0, c_p: 0.7 },
        Catalog::LeftHyperbola { a_h: 0.5, b_h: 0.8 },
        Catalog::RightHyperbola { a_h: 1.0, b_h: 0.5 },
        Catalog::HorizontalStrip { w: 1.5 },
    ]
}

/// Catalog kinds whose sets are reachable by matrices near the origin.
pub fn stable_friendly_catalog() -> Vec<Catalog> {
    vec![
        Catalog::LeftConic { a: 0.5, theta: 1.0 },
        Catalog::Disk { q: -0.5, r: 2.0 },
        Catalog::VerticalStrip { h: -4.0, k: 0.5 },
        Catalog::LeftHalfPlane { k: 0.5 },
        Catalog::Ellipse { q_e: -1.0, a_e: 3.0, b_e: 2.0 },
        Catalog::LeftParabola { q_p: 1.0, c_p: 0.5 },
        Catalog::HorizontalStrip { w: 1.5 },
    ]
}

pub fn rel_err<T: Scalar>(a: &DMatrix<T>, b: &DMatrix<T>) -> f64 {
    (a - b).norm() / (1.0 + b.norm())
}
