mod common;

use common::{hermitian, normal_matrix, pos_def, rng};
use dhstab::linalg::{chol_solve, general_eig, herm_eig, kron};
use dhstab::{Complex64, DMatrix, Scalar};
use proptest::prelude::*;

fn check_reconstruction<T: Scalar>(n: usize, seed: u64) -> Result<(), TestCaseError> {
    let m = hermitian::<T>(&mut rng(seed), n);
    let eig = herm_eig(&m).unwrap();
    let d = DMatrix::from_diagonal(&eig.values.iter().map(|&v| T::from_real(v)).collect::<Vec<_>>().into());
    let rebuilt = &eig.vectors * d * eig.vectors.adjoint();
    let err = (&rebuilt - &m).norm();
    prop_assert!(err <= 1e-9 * (1.0 + m.norm()), "n = {n}: reconstruction error {err:e}");

    let gram = eig.vectors.adjoint() * &eig.vectors;
    let orth = (gram - DMatrix::<T>::identity(n, n)).norm();
    prop_assert!(orth <= 1e-10, "n = {n}: orthonormality defect {orth:e}");
    prop_assert!(eig.values.windows(2).all(|w| w[0] >= w[1]));
    Ok(())
}

fn det_lu(m: &DMatrix<Complex64>) -> Complex64 {
    m.clone().lu().determinant()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn herm_eig_reconstructs_real(n in 1usize..=40, seed in any::<u64>()) {
        check_reconstruction::<f64>(n, seed)?;
    }

    #[test]
    fn herm_eig_reconstructs_complex(n in 1usize..=40, seed in any::<u64>()) {
        check_reconstruction::<Complex64>(n, seed)?;
    }

    #[test]
    fn herm_eig_matches_nalgebra(n in 1usize..=30, seed in any::<u64>()) {
        let m = hermitian::<f64>(&mut rng(seed), n);
        let ours = herm_eig(&m).unwrap().values;
        let mut theirs: Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        theirs.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (a, b) in ours.iter().zip(&theirs) {
            prop_assert!((a - b).abs() <= 1e-10 * (1.0 + m.norm()), "{a} vs {b}");
        }
    }

    #[test]
    fn general_eig_trace_and_determinant(n in 1usize..=20, seed in any::<u64>(), complex in any::<bool>()) {
        let mut g = rng(seed);
        let m: DMatrix<Complex64> = if complex {
            normal_matrix::<Complex64>(&mut g, n, n)
        } else {
            normal_matrix::<f64>(&mut g, n, n).map(|v| Complex64::new(v, 0.0))
        };
        let eig = general_eig(&m).unwrap();
        prop_assert_eq!(eig.values.len(), n);
        let tol = 1e-8 * (1.0 + m.norm());

        let sum: Complex64 = eig.values.iter().sum();
        prop_assert!((sum - m.trace()).norm() <= tol, "trace mismatch {sum} vs {}", m.trace());

        let prod: Complex64 = eig.values.iter().product();
        let det = det_lu(&m);
        prop_assert!(
            (prod - det).norm() <= tol * det.norm().max(1.0),
            "determinant mismatch {prod} vs {det}"
        );
    }

    #[test]
    fn kron_mixed_product(
        (ra, ca, rb, cb, cc, cd) in (1usize..4, 1usize..4, 1usize..4, 1usize..4, 1usize..4, 1usize..4),
        seed in any::<u64>(),
    ) {
        let mut g = rng(seed);
        let a = normal_matrix::<Complex64>(&mut g, ra, ca);
        let b = normal_matrix::<Complex64>(&mut g, rb, cb);
        let c = normal_matrix::<Complex64>(&mut g, ca, cc);
        let d = normal_matrix::<Complex64>(&mut g, cb, cd);
        let lhs = kron(&a, &b) * kron(&c, &d);
        let rhs = kron(&(&a * &c), &(&b * &d));
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + a.norm() * b.norm() * c.norm() * d.norm()));
    }

    #[test]
    fn chol_solve_self_is_identity(n in 1usize..=20, seed in any::<u64>(), complex in any::<bool>()) {
        let mut g = rng(seed);
        if complex {
            let p = pos_def::<Complex64>(&mut g, n, 0.1);
            let x = chol_solve(&p, &p).unwrap();
            prop_assert!((x - DMatrix::identity(n, n)).norm() <= 1e-10);
        } else {
            let p = pos_def::<f64>(&mut g, n, 0.1);
            let x = chol_solve(&p, &p).unwrap();
            prop_assert!((x - DMatrix::identity(n, n)).norm() <= 1e-10);
        }
    }
}
