mod common;

use common::{catalog_samples, dissipative_triplet, normal_matrix, random_triplet, rel_err, rng};
use dhstab::conicqp::project_triplet;
use dhstab::dh::{assemble_m_ax, assemble_m_triplet, hstrip_appendix_check, lmi_margin, table1_constraint};
use dhstab::linalg::{lambda_max, lambda_min};
use dhstab::regions::{transform_scale_rotate, transform_translate};
use dhstab::{
    certify_stability, compose, is_stable_eig, triplet_from_certificate, Catalog, CertifyOutcome, Complex64,
    ConicConfig, DMatrix, DhTriplet, Region, Scalar,
};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

const BAND: f64 = 1e-8;

fn catalog_regions() -> Vec<Region> {
    catalog_samples().into_iter().map(|k| Region::catalog(k).unwrap()).collect()
}

fn extended_regions() -> Vec<Region> {
    let disk = Region::catalog(Catalog::Disk { q: -0.5, r: 2.0 }).unwrap();
    let cone = Region::catalog(Catalog::LeftConic { a: 0.5, theta: 1.0 }).unwrap();
    let strip = Region::catalog(Catalog::HorizontalStrip { w: 1.5 }).unwrap();
    vec![
        transform_scale_rotate(&cone, Complex64::from_polar(1.0, 0.4)).unwrap(),
        transform_translate(&disk, Complex64::new(0.3, 1.0)).unwrap(),
        transform_translate(&transform_scale_rotate(&strip, Complex64::new(0.0, 2.0)).unwrap(), Complex64::new(-1.0, 0.0))
            .unwrap(),
    ]
}

/// A point with margin below `-0.05`, on the real axis when `real` is set.
fn interior_point(region: &Region, g: &mut ChaCha8Rng, real: bool) -> Complex64 {
    loop {
        let x = g.random_range(-6.0..6.0);
        let y = if real { 0.0 } else { g.random_range(-6.0..6.0) };
        let z = Complex64::new(x, y);
        if region.membership_margin(z) < -0.05 {
            return z;
        }
    }
}

/// Real diagonalizable matrix with prescribed interior eigenvalues,
/// conjugated by a well-conditioned similarity.
fn stable_real_matrix(region: &Region, n: usize, g: &mut ChaCha8Rng) -> DMatrix<f64> {
    let mut d = DMatrix::<f64>::zeros(n, n);
    let mut k = 0;
    while k < n {
        if n - k >= 2 && g.random_bool(0.5) {
            let z = interior_point(region, g, false);
            if z.im.abs() < 0.05 {
                continue;
            }
            d[(k, k)] = z.re;
            d[(k + 1, k + 1)] = z.re;
            d[(k, k + 1)] = z.im;
            d[(k + 1, k)] = -z.im;
            k += 2;
        } else {
            d[(k, k)] = interior_point(region, g, true).re;
            k += 1;
        }
    }
    similar(d, g)
}

fn stable_complex_matrix(region: &Region, n: usize, g: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    let values: Vec<Complex64> = (0..n).map(|_| interior_point(region, g, false)).collect();
    similar(DMatrix::from_diagonal(&values.into()), g)
}

fn similar<T: Scalar>(d: DMatrix<T>, g: &mut ChaCha8Rng) -> DMatrix<T> {
    let n = d.nrows();
    let s = DMatrix::<T>::identity(n, n) + normal_matrix::<T>(g, n, n) * T::from_real(0.3 / (n as f64).sqrt());
    let s_inv = s.clone().try_inverse().unwrap();
    s * d * s_inv
}

fn forward_suite<T: Scalar>(regions: &[Region], seed: u64) {
    let cfg = ConicConfig::default();
    let mut g = rng(seed);
    for region in regions {
        for trial in 0..50 {
            let n = g.random_range(1..=4);
            let t = project_triplet(region, &random_triplet::<T>(&mut g, n), 1e-3, 1e-3, &cfg).unwrap();
            let m = lmi_margin(region, &t).unwrap();
            assert!(m <= -1e-6, "{:?} trial {trial}: projected margin {m:e}", region.descriptor());
            let verdict = is_stable_eig(region, &compose(&t).unwrap()).unwrap();
            assert!(
                verdict.worst_margin < 0.0,
                "{:?} trial {trial}: LMI margin {m:e} but eigenvalue margin {}",
                region.descriptor(),
                verdict.worst_margin
            );
        }
    }
}

fn converse_case<T: Scalar>(region: &Region, a: &DMatrix<T>, cfg: &ConicConfig) {
    let outcome = certify_stability(region, a, cfg).unwrap();
    let cert = match outcome {
        CertifyOutcome::Certified(c) => c,
        CertifyOutcome::Infeasible(r) => panic!(
            "{:?}: stable matrix not certified ({r:?}), eigenvalues {:?}",
            region.descriptor(),
            is_stable_eig(region, a).unwrap().eigenvalues
        ),
    };
    assert!(cert.delta > 0.0);
    assert!(lambda_min(&cert.x).unwrap() >= 1.0 - 1e-8);
    let t = triplet_from_certificate(a, &cert).unwrap();
    let back = compose(&t).unwrap();
    assert!(rel_err(&back, a) <= 1e-8, "reconstruction error {:e}", rel_err(&back, a));
    assert!(lmi_margin(region, &t).unwrap() < 0.0);
}

#[test]
fn forward_characterization_real() {
    forward_suite::<f64>(&catalog_regions(), 1);
}

#[test]
fn forward_characterization_complex() {
    forward_suite::<Complex64>(&extended_regions(), 2);
}

#[test]
fn converse_characterization_real() {
    let cfg = ConicConfig::default();
    let mut g = rng(3);
    for region in catalog_regions() {
        for _ in 0..50 {
            let n = g.random_range(1..=8);
            let a = stable_real_matrix(&region, n, &mut g);
            assert!(is_stable_eig(&region, &a).unwrap().stable);
            converse_case(&region, &a, &cfg);
        }
    }
}

#[test]
fn converse_characterization_complex() {
    let cfg = ConicConfig::default();
    let mut g = rng(4);
    for region in extended_regions() {
        for _ in 0..50 {
            let n = g.random_range(1..=8);
            let a = stable_complex_matrix(&region, n, &mut g);
            assert!(is_stable_eig(&region, &a).unwrap().stable);
            converse_case(&region, &a, &cfg);
        }
    }
}

#[test]
fn unstable_matrices_are_not_certified() {
    let cfg = ConicConfig::default();
    let a = DMatrix::<f64>::identity(2, 2);
    assert!(matches!(certify_stability(&Region::hurwitz(), &a, &cfg).unwrap(), CertifyOutcome::Infeasible(_)));
    let a = nalgebra::dmatrix![0.0, 2.0; -2.0, -1.0];
    let disk = Region::catalog(Catalog::Disk { q: 0.0, r: 1.0 }).unwrap();
    assert!(!is_stable_eig(&disk, &a).unwrap().stable);
    assert!(matches!(certify_stability(&disk, &a, &cfg).unwrap(), CertifyOutcome::Infeasible(_)));
}

#[test]
fn triplet_and_ax_forms_agree() {
    let mut g = rng(5);
    let mut all = catalog_regions();
    all.push(Region::schur());
    for region in &all {
        for _ in 0..20 {
            let n = g.random_range(1..=6);
            let t = random_triplet::<f64>(&mut g, n);
            let lhs = assemble_m_ax(region, &compose(&t).unwrap(), &t.p).unwrap();
            let rhs = assemble_m_triplet(region, &t).unwrap();
            assert!(rel_err(&lhs, &rhs) <= 1e-10, "{:?}: {:e}", region.descriptor(), rel_err(&lhs, &rhs));
        }
    }
    for region in &extended_regions() {
        for _ in 0..20 {
            let n = g.random_range(1..=6);
            let t = random_triplet::<Complex64>(&mut g, n);
            let lhs = assemble_m_ax(region, &compose(&t).unwrap(), &t.p).unwrap();
            let rhs = assemble_m_triplet(region, &t).unwrap();
            assert!(rel_err(&lhs, &rhs) <= 1e-10);
        }
    }
}

/// Counts decided agreements, panicking on a disagreement outside the band.
#[derive(Default)]
struct Tally {
    holds: usize,
    fails: usize,
}

impl Tally {
    fn record(&mut self, what: &str, lhs_margin: f64, rhs_margin: f64) {
        if lhs_margin.abs() <= BAND || rhs_margin.abs() <= BAND {
            return;
        }
        assert_eq!(lhs_margin > 0.0, rhs_margin > 0.0, "{what}: margins {lhs_margin:e} and {rhs_margin:e} disagree");
        if lhs_margin > 0.0 {
            self.holds += 1;
        } else {
            self.fails += 1;
        }
    }
}

/// Triplet of `compose(t) + c I`: `R -> R - c P`.
fn shifted(t: DhTriplet<f64>, c: f64) -> DhTriplet<f64> {
    let r = &t.r - &t.p * c;
    DhTriplet::new(t.j, r, t.p).unwrap()
}

#[test]
fn block_forms_match_kronecker_form() {
    let mut g = rng(6);
    for kind in catalog_samples() {
        let region = Region::catalog(kind).unwrap();
        let mut tally = Tally::default();
        for _ in 0..100 {
            let n = g.random_range(1..=4);
            let t = shifted(dissipative_triplet::<f64>(&mut g, n), g.random_range(-3.0..3.0));
            let table = lambda_min(&table1_constraint(&kind, &t)).unwrap();
            let kron = -lambda_max(&assemble_m_triplet(&region, &t).unwrap()).unwrap();
            tally.record(kind.identifier(), table, kron);
        }
        assert!(tally.holds >= 5 && tally.fails >= 5, "{kind:?}: {} / {}", tally.holds, tally.fails);
    }
}

#[test]
fn hurwitz_lmi_is_minus_two_r() {
    let mut g = rng(8);
    for _ in 0..50 {
        let n = g.random_range(1..=6);
        let t = random_triplet::<f64>(&mut g, n);
        let m = assemble_m_triplet(&Region::hurwitz(), &t).unwrap();
        assert!((m + &t.r * 2.0).norm() <= 1e-14 * (1.0 + t.r.norm()));
    }
}

#[test]
fn schur_lmi_matches_stein_inequality() {
    let mut g = rng(9);
    let mut tally = Tally::default();
    for _ in 0..100 {
        let n = g.random_range(1..=5);
        let mut t = dissipative_triplet::<f64>(&mut g, n);
        // Spread |A| around the unit circle.
        let s = g.random_range(0.1..2.0);
        t = DhTriplet::new(t.j * s, t.r * s, t.p).unwrap();
        let a = compose(&t).unwrap();
        let stein = lambda_min(&(&t.p - &a * &t.p * a.transpose())).unwrap();
        let kron = -lambda_max(&assemble_m_triplet(&Region::schur(), &t).unwrap()).unwrap();
        tally.record("schur", stein, kron);
    }
    assert!(tally.holds > 10 && tally.fails > 10, "{} / {}", tally.holds, tally.fails);
}

#[test]
fn hstrip_check_matches_strip_block_form() {
    let mut g = rng(10);
    let mut tally = Tally::default();
    for _ in 0..200 {
        let n = g.random_range(1..=5);
        let t = random_triplet::<f64>(&mut g, n);
        let w = g.random_range(0.1..3.0);
        let (holds, margin) = hstrip_appendix_check(&t, w).unwrap();
        assert_eq!(holds, margin > 0.0);
        let table = lambda_min(&table1_constraint(&Catalog::HorizontalStrip { w }, &t)).unwrap();
        tally.record("strip", margin, table);
    }
    assert!(tally.holds > 10 && tally.fails > 10, "{} / {}", tally.holds, tally.fails);
}

#[test]
fn hstrip_check_holds_for_semisimple_certificates() {
    let cfg = ConicConfig::default();
    let mut g = rng(12);
    for _ in 0..30 {
        let w = g.random_range(0.5..3.0);
        let strip = Region::catalog(Catalog::HorizontalStrip { w }).unwrap();
        let n = g.random_range(1..=6);
        let a = stable_real_matrix(&strip, n, &mut g);
        let cert = certify_stability(&strip, &a, &cfg).unwrap().certificate().cloned().expect("certificate");
        let t = triplet_from_certificate(&a, &cert).unwrap();
        let (holds, margin) = hstrip_appendix_check(&t, w).unwrap();
        assert!(holds && margin > 0.0, "margin {margin:e}");
    }
}
