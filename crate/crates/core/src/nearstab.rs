//! Nearest Ω-stable matrix in the Frobenius norm.
//!
//! Over the convex set of admissible triplets the problem reads
//!
//! ```text
//! minimize ||A - (J - R) P^{-1}||_F^2   over (J, R, P) with M(J, R, P) <= -delta I, P >= eps I
//! ```
//!
//! which is nonconvex in the objective only. The solver starts from
//! `P = I` with the best `(J, R)` for that `P`, then runs projected
//! gradient descent with backtracking, periodically re-optimizing `(J, R)`
//! for the current `P` with a conic program.

use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::conicqp::{self, ConicConfig, ProgramBuilder, Status, Structure, TripletProjector};
use crate::dh::{
    assemble_with, compose, is_stable_eig, lmi_margin, region_matrices, DhTriplet,
};
use crate::error::{Error, Result};
use crate::linalg::{cholesky, ensure_square, fro, hermitian_part, lambda_min, skew_part, Scalar};
use crate::regions::Region;

#[derive(Clone, Debug)]
pub struct NearStabConfig {
    pub max_outer_iterations: usize,
    /// Stop when the objective improves by less than this fraction over
    /// the last five outer iterations.
    pub rel_improvement_tol: f64,
    /// LMI margin; `None` means `1e-6 (1 + ||A||_F)`.
    pub delta: Option<f64>,
    /// Lower bound on the eigenvalues of `P`.
    pub eps: f64,
    /// Initial step; `None` means `1 / (1 + ||A||_F)`.
    pub gamma_init: Option<f64>,
    pub shrink: f64,
    pub growth: f64,
    pub max_halvings: usize,
    /// Outer iterations between `(J, R)` re-optimizations; 0 disables them.
    pub refine_period: usize,
    pub seed: u64,
    pub conic: ConicConfig,
}

impl Default for NearStabConfig {
    fn default() -> Self {
        NearStabConfig {
            max_outer_iterations: 500,
            rel_improvement_tol: 1e-6,
            delta: None,
            eps: 1e-6,
            gamma_init: None,
            shrink: 0.5,
            growth: 1.2,
            max_halvings: 30,
            refine_period: 10,
            seed: 0,
            conic: ConicConfig::default(),
        }
    }
}

impl NearStabConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Validation(what.to_string()));
        if self.max_outer_iterations == 0 {
            return bad("max_outer_iterations must be positive");
        }
        if !(self.rel_improvement_tol > 0.0) {
            return bad("rel_improvement_tol must be positive");
        }
        if matches!(self.delta, Some(d) if !(d > 0.0)) {
            return bad("delta must be positive");
        }
        if !(self.eps > 0.0) {
            return bad("eps must be positive");
        }
        if matches!(self.gamma_init, Some(g) if !(g > 0.0)) {
            return bad("gamma_init must be positive");
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return bad("shrink factor must lie in (0, 1)");
        }
        if !(self.growth > 1.0) {
            return bad("growth factor must exceed 1");
        }
        Ok(())
    }

    pub fn delta_for<T: Scalar>(&self, a: &DMatrix<T>) -> f64 {
        self.delta.unwrap_or(1e-6 * (1.0 + fro(a)))
    }
}

#[derive(Clone, Debug)]
pub struct Instance<T: Scalar> {
    pub a: DMatrix<T>,
    pub region: Region,
    pub eps_noise: f64,
    pub seed: u64,
    /// The projected random triplet whose composition was perturbed.
    pub ground_truth: Option<DhTriplet<T>>,
}

#[derive(Clone, Debug)]
pub struct NearStabResult<T: Scalar> {
    pub triplet: DhTriplet<T>,
    pub a_tilde: DMatrix<T>,
    pub relative_error: f64,
    /// Objective after initialization and after every accepted step.
    pub objective_trajectory: Vec<f64>,
    /// Worst membership margin over the eigenvalues of `a_tilde`.
    pub stability_margin: f64,
    pub iterations: usize,
    pub wall_time: f64,
}

/// `||A - (J - R) P^{-1}||_F^2`.
pub fn objective<T: Scalar>(a: &DMatrix<T>, t: &DhTriplet<T>) -> Result<f64> {
    let n = ensure_square(a, "A")?;
    if t.dim() != n {
        return Err(Error::Dimension(format!("A is {n}x{n} but the triplet has size {}", t.dim())));
    }
    let e = a - compose(t)?;
    Ok(fro(&e).powi(2))
}

#[derive(Clone, Debug)]
pub struct Gradient<T: Scalar> {
    pub j: DMatrix<T>,
    pub r: DMatrix<T>,
    pub p: DMatrix<T>,
}

/// Gradient of [`objective`] restricted to the skew / Hermitian subspaces.
///
/// With `E = A - (J - R) P^{-1}`:
/// `gJ = skew(-2 E P^{-1})`, `gR = herm(2 E P^{-1})`,
/// `gP = herm(2 P^{-1} (J - R)^H E P^{-1})`.
pub fn gradient<T: Scalar>(a: &DMatrix<T>, t: &DhTriplet<T>) -> Result<Gradient<T>> {
    let n = ensure_square(a, "A")?;
    if t.dim() != n {
        return Err(Error::Dimension(format!("A is {n}x{n} but the triplet has size {}", t.dim())));
    }
    let chol = cholesky(&t.p)?;
    let p_inv = chol.inverse();
    let k = &t.j - &t.r;
    let e = a - &k * &p_inv;
    let ep = &e * &p_inv;
    let two = T::from_real(2.0);
    Ok(Gradient {
        j: skew_part(&(&ep * (-two))),
        r: hermitian_part(&(&ep * two)),
        p: hermitian_part(&(&p_inv * k.adjoint() * &ep * two)),
    })
}

fn lmi_program_parts<T: Scalar>(region: &Region) -> Result<Vec<(DMatrix<T>, DMatrix<T>)>> {
    region
        .diagonal_blocks()
        .iter()
        .map(|idx| region_matrices::<T>(&region.sub_block(idx)))
        .collect()
}

/// Best `(J, R)` for a fixed `P`: minimizes `||A - (J - R) P^{-1}||_F^2`
/// subject to `M(J, R, P) <= -delta I`.
pub fn refine_jr<T: Scalar>(
    a: &DMatrix<T>,
    region: &Region,
    p: &DMatrix<T>,
    delta: f64,
    cfg: &ConicConfig,
) -> Result<(DMatrix<T>, DMatrix<T>)> {
    let n = ensure_square(a, "A")?;
    if p.shape() != (n, n) {
        return Err(Error::Dimension("P and A sizes differ".into()));
    }
    let chol = cholesky(p)?;
    let p_inv = chol.inverse();

    // Unconstrained optimum: J - R = A P.
    let ap = a * p;
    let (j0, r0) = (skew_part(&ap), -hermitian_part(&ap));
    let parts = lmi_program_parts::<T>(region)?;
    let feasible = parts.iter().try_fold(true, |ok, (b, c)| {
        let m = assemble_with(b, c, &j0, &r0, p);
        Ok::<_, Error>(ok && crate::linalg::lambda_max(&m)? <= -delta)
    })?;
    if feasible {
        return Ok((j0, r0));
    }

    let mut pb = ProgramBuilder::<T>::new();
    pb.block("J", Structure::Skew, n);
    pb.block("R", Structure::Hermitian, n);
    let pi = p_inv.clone();
    pb.least_squares(move |x| (&x[0] - &x[1]) * &pi, a.clone());
    for (b, c) in parts {
        let p = p.clone();
        pb.psd_constraint(move |x| {
            let m = assemble_with(&b, &c, &x[0], &x[1], &p);
            let s = m.nrows();
            -m - DMatrix::<T>::identity(s, s) * T::from_real(delta)
        });
    }
    let sol = conicqp::solve(pb.build()?, cfg)?;
    if sol.status == Status::InfeasibleSuspected {
        return Err(Error::Projection(format!(
            "(J, R) subproblem reported infeasible (primal residual {:e})",
            sol.primal_residual
        )));
    }
    Ok((skew_part(&sol.x[0]), hermitian_part(&sol.x[1])))
}

/// Feasibility of an iterate with the slack the solver tolerance needs.
fn nearly_feasible<T: Scalar>(region: &Region, t: &DhTriplet<T>, delta: f64, eps: f64) -> Result<bool> {
    Ok(lmi_margin(region, t)? <= -delta / 2.0 && lambda_min(&t.p)? >= eps / 2.0)
}

/// `P = I` with the best `(J, R)` for it.
pub fn init_triplet<T: Scalar>(
    a: &DMatrix<T>,
    region: &Region,
    cfg: &NearStabConfig,
) -> Result<DhTriplet<T>> {
    cfg.validate()?;
    let n = ensure_square(a, "A")?;
    let delta = cfg.delta_for(a);
    let p = DMatrix::<T>::identity(n, n);
    let (j, r) = refine_jr(a, region, &p, delta, &cfg.conic)?;
    let t = DhTriplet { j, r, p };
    if nearly_feasible(region, &t, delta, cfg.eps)? {
        Ok(t)
    } else {
        conicqp::project_triplet(region, &t, delta, cfg.eps, &cfg.conic)
    }
}

/// Projected gradient descent with backtracking from the identity
/// initialization. The result is verified by an eigenvalue check; an
/// unstable output is reported as an error, never returned.
pub fn solve_nearest<T: Scalar>(
    a: &DMatrix<T>,
    region: &Region,
    cfg: &NearStabConfig,
) -> Result<NearStabResult<T>> {
    let start = Instant::now();
    cfg.validate()?;
    let n = ensure_square(a, "A")?;
    let delta = cfg.delta_for(a);
    let eps = cfg.eps;
    let norm_a = fro(a);

    let mut projector = TripletProjector::<T>::new(region, n, delta, eps, &cfg.conic)?;
    let mut t = init_triplet(a, region, cfg)?;
    let mut f = objective(a, &t)?;
    let mut trajectory = vec![f];
    let mut history = vec![f];
    let gamma0 = cfg.gamma_init.unwrap_or(1.0 / (1.0 + norm_a));
    let mut gamma = gamma0;
    let mut iterations = 0;

    for it in 1..=cfg.max_outer_iterations {
        iterations = it;
        let g = gradient(a, &t)?;
        let gnorm = (fro(&g.j).powi(2) + fro(&g.r).powi(2) + fro(&g.p).powi(2)).sqrt();
        if f == 0.0 || gnorm == 0.0 {
            break;
        }

        let gamma_start = gamma;
        let mut accepted = false;
        for _ in 0..=cfg.max_halvings {
            let step = T::from_real(gamma);
            let cand = DhTriplet {
                j: skew_part(&(&t.j - &g.j * step)),
                r: hermitian_part(&(&t.r - &g.r * step)),
                p: hermitian_part(&(&t.p - &g.p * step)),
            };
            let proj = projector.project(&cand)?;
            let fc = objective(a, &proj)?;
            if fc < f {
                t = proj;
                f = fc;
                trajectory.push(f);
                gamma *= cfg.growth;
                accepted = true;
                break;
            }
            gamma *= cfg.shrink;
        }
        if !accepted {
            gamma = gamma_start;
        }

        if cfg.refine_period > 0 && it % cfg.refine_period == 0 {
            let (j, r) = refine_jr(a, region, &t.p, delta, &cfg.conic)?;
            let mut cand = DhTriplet { j, r, p: t.p.clone() };
            if !nearly_feasible(region, &cand, delta, eps)? {
                cand = projector.project(&cand)?;
            }
            let fc = objective(a, &cand)?;
            if fc < f {
                t = cand;
                f = fc;
                trajectory.push(f);
            }
        }

        history.push(f);
        if history.len() > 5 {
            let old = history[history.len() - 6];
            if old - f <= cfg.rel_improvement_tol * old {
                break;
            }
        }
    }

    let a_tilde = compose(&t)?;
    let verdict = is_stable_eig(region, &a_tilde)?;
    if !verdict.stable {
        return Err(Error::Postcondition(format!(
            "approximation is not stable: worst eigenvalue margin {:e}, LMI margin {:e}, \
             lambda_min(P) {:e}",
            verdict.worst_margin,
            lmi_margin(region, &t)?,
            lambda_min(&t.p)?
        )));
    }
    let relative_error = if norm_a > 0.0 { fro(&(a - &a_tilde)) / norm_a } else { fro(&a_tilde) };
    Ok(NearStabResult {
        triplet: t,
        a_tilde,
        relative_error,
        objective_trajectory: trajectory,
        stability_margin: verdict.worst_margin,
        iterations,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

/// Margin and floor used for generated instances.
pub const GEN_DELTA: f64 = 1e-3;
pub const GEN_EPS: f64 = 1e-3;

/// Standard normal draws from a seeded ChaCha8 stream. Complex entries take
/// two consecutive draws (real part first) and are scaled by `1/sqrt(2)` so
/// that `E|z|^2 = 1`.
struct NormalStream(ChaCha8Rng);

impl NormalStream {
    fn new(seed: u64) -> Self {
        NormalStream(ChaCha8Rng::seed_from_u64(seed))
    }

    fn draw<T: Scalar>(&mut self) -> T {
        let re: f64 = StandardNormal.sample(&mut self.0);
        if T::IS_COMPLEX {
            let im: f64 = StandardNormal.sample(&mut self.0);
            let s = std::f64::consts::FRAC_1_SQRT_2;
            T::from_c64(Complex64::new(re * s, im * s)).expect("complex scalar")
        } else {
            T::from_real(re)
        }
    }

    /// Row-major fill.
    fn matrix<T: Scalar>(&mut self, n: usize) -> DMatrix<T> {
        DMatrix::from_row_iterator(n, n, (0..n * n).map(|_| self.draw::<T>()).collect::<Vec<_>>())
    }
}

/// Random Ω-stable matrix plus Gaussian noise of relative size `eps_noise`.
///
/// Draws `J0, R0, P0, N` (in that order, each row-major) with standard
/// normal entries, structures them (`P0` is shifted so that its smallest
/// eigenvalue is at least [`GEN_EPS`]), projects the triplet onto the
/// admissible set with margin [`GEN_DELTA`] and floor [`GEN_EPS`], composes
/// it and adds
/// `N` scaled to standard deviation `eps_noise ||A||_F / n`.
pub fn gen_instance<T: Scalar>(
    region: &Region,
    n: usize,
    eps_noise: f64,
    seed: u64,
    cfg: &ConicConfig,
) -> Result<Instance<T>> {
    if n == 0 {
        return Err(Error::Validation("n must be at least 1".into()));
    }
    if !(eps_noise >= 0.0) || !eps_noise.is_finite() {
        return Err(Error::Validation(format!("noise level must be finite and >= 0, got {eps_noise}")));
    }
    let mut rng = NormalStream::new(seed);
    let j0 = skew_part(&rng.matrix::<T>(n));
    let r0 = hermitian_part(&rng.matrix::<T>(n));
    let mut p0 = hermitian_part(&rng.matrix::<T>(n));
    let noise = rng.matrix::<T>(n);

    let shift = (GEN_EPS - lambda_min(&p0)?).max(0.0);
    for k in 0..n {
        p0[(k, k)] += T::from_real(shift);
    }
    let t0 = DhTriplet { j: j0, r: r0, p: p0 };
    let t = conicqp::project_triplet(region, &t0, GEN_DELTA, GEN_EPS, cfg)?;
    let clean = compose(&t)?;
    let sigma = eps_noise * fro(&clean) / n as f64;
    let a = &clean + noise * T::from_real(sigma);
    Ok(Instance {
        a,
        region: region.clone(),
        eps_noise,
        seed,
        ground_truth: Some(t),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regions::Catalog;
    use approx::assert_abs_diff_eq;
    use nalgebra::dmatrix;

    #[test]
    fn objective_examples() {
        let i3 = DMatrix::<f64>::identity(3, 3);
        let t = DhTriplet::new(DMatrix::zeros(3, 3), i3.clone(), i3.clone()).unwrap();
        assert_abs_diff_eq!(objective(&DMatrix::zeros(3, 3), &t).unwrap(), 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(objective(&-i3.clone(), &t).unwrap(), 0.0, epsilon = 1e-14);
        let t = DhTriplet::new(dmatrix![0.0], dmatrix![1.0], dmatrix![1.0]).unwrap();
        assert_abs_diff_eq!(objective(&dmatrix![2.0], &t).unwrap(), 9.0, epsilon = 1e-14);
    }

    #[test]
    fn gradient_examples() {
        let t = DhTriplet::new(dmatrix![0.0], dmatrix![1.0], dmatrix![1.0]).unwrap();
        let g = gradient(&dmatrix![0.0], &t).unwrap();
        assert_abs_diff_eq!(g.j[(0, 0)], 0.0);
        assert_abs_diff_eq!(g.r[(0, 0)], 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(g.p[(0, 0)], -2.0, epsilon = 1e-14);

        let i2 = DMatrix::<f64>::identity(2, 2);
        let t = DhTriplet::new(DMatrix::zeros(2, 2), i2.clone(), i2.clone()).unwrap();
        let g = gradient(&-i2.clone(), &t).unwrap();
        assert_eq!(fro(&g.j) + fro(&g.r) + fro(&g.p), 0.0);

        let a = dmatrix![1.0, 2.0; 2.0, -3.0];
        let g = gradient(&a, &t).unwrap();
        assert_abs_diff_eq!(fro(&g.j), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn init_keeps_an_admissible_split() {
        let a = dmatrix![-2.0, 1.0; -1.0, -3.0];
        let t = init_triplet(&a, &Region::hurwitz(), &NearStabConfig::default()).unwrap();
        assert_eq!(t.j, skew_part(&a));
        assert_eq!(t.r, -hermitian_part(&a));
        assert_eq!(t.p, DMatrix::identity(2, 2));
        assert_eq!(objective(&a, &t).unwrap(), 0.0);
    }

    #[test]
    fn init_clips_for_hurwitz_identity() {
        let n = 3;
        let a = DMatrix::<f64>::identity(n, n);
        let cfg = NearStabConfig::default();
        let delta = cfg.delta_for(&a);
        let t = init_triplet(&a, &Region::hurwitz(), &cfg).unwrap();
        assert_abs_diff_eq!(fro(&t.j), 0.0, epsilon = 1e-6);
        assert_abs_diff_eq!(t.r, DMatrix::identity(n, n) * (delta / 2.0), epsilon = 1e-6);
        let f = objective(&a, &t).unwrap();
        assert_abs_diff_eq!(f, (1.0 + delta / 2.0).powi(2) * n as f64, epsilon = 1e-5);
    }

    #[test]
    fn refine_for_horizontal_strip_keeps_r_free() {
        let w = 1.0;
        let region = Region::catalog(Catalog::HorizontalStrip { w }).unwrap();
        let a = dmatrix![1.0, 3.0; -3.0, 2.0];
        let (j, r) = refine_jr(&a, &region, &DMatrix::identity(2, 2), 1e-6, &ConicConfig::default()).unwrap();
        assert_abs_diff_eq!(r, -hermitian_part(&a), epsilon = 1e-5);
        // |J_12| must shrink to w - delta so that the eigenvalues i J stay in the strip
        assert_abs_diff_eq!(j[(0, 1)], w - 1e-6, epsilon = 1e-5);
    }

    #[test]
    fn stable_input_is_returned() {
        let a = dmatrix![-1.0, 0.5; -0.5, -2.0];
        let res = solve_nearest(&a, &Region::hurwitz(), &NearStabConfig::default()).unwrap();
        assert!(res.relative_error <= 1e-6);
        assert_eq!(res.iterations, 1);
        assert!(res.stability_margin < 0.0);
    }

    #[test]
    fn generation_is_deterministic() {
        let d = Region::catalog(Catalog::Disk { q: 0.0, r: 1.0 }).unwrap();
        let cfg = ConicConfig::default();
        let a = gen_instance::<f64>(&d, 4, 0.5, 7, &cfg).unwrap();
        let b = gen_instance::<f64>(&d, 4, 0.5, 7, &cfg).unwrap();
        assert_eq!(a.a, b.a);
        let c = gen_instance::<f64>(&d, 4, 0.5, 8, &cfg).unwrap();
        assert_ne!(a.a, c.a);
    }

    #[test]
    fn noiseless_instances_are_stable() {
        let d = Region::catalog(Catalog::Disk { q: 0.0, r: 1.0 }).unwrap();
        let inst = gen_instance::<f64>(&d, 5, 0.0, 3, &ConicConfig::default()).unwrap();
        assert!(is_stable_eig(&d, &inst.a).unwrap().stable);
        assert_eq!(inst.a, compose(inst.ground_truth.as_ref().unwrap()).unwrap());
    }

    #[test]
    fn config_validation() {
        let mut cfg = NearStabConfig::default();
        cfg.shrink = 1.0;
        assert!(cfg.validate().is_err());
        let mut cfg = NearStabConfig::default();
        cfg.growth = 1.0;
        assert!(cfg.validate().is_err());
        let mut cfg = NearStabConfig::default();
        cfg.delta = Some(0.0);
        assert!(cfg.validate().is_err());
    }
}
