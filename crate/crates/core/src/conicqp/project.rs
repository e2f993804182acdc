//! Frobenius projection of a triplet onto the set of triplets whose region
//! LMI holds with margin `delta` and whose `P` is at least `eps I`.

use nalgebra::DMatrix;

use super::{ConicConfig, ConicSolver, ProgramBuilder, Status, Structure};
use crate::dh::{assemble_with, region_matrices, DhTriplet};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_part, skew_part, Scalar};
use crate::regions::Region;

/// Projection program built once for a region, size and margins; each
/// call to [`TripletProjector::project`] only moves the proximal center and
/// warm-starts from the previous iterates.
pub struct TripletProjector<T: Scalar> {
    solver: ConicSolver<T>,
    n: usize,
    delta: f64,
    eps: f64,
    /// Number of LMI blocks; the last constraint is `P - eps I`.
    lmi_blocks: usize,
}

impl<T: Scalar> TripletProjector<T> {
    pub fn new(region: &Region, n: usize, delta: f64, eps: f64, cfg: &ConicConfig) -> Result<Self> {
        if !(delta > 0.0 && eps > 0.0) {
            return Err(Error::Validation(format!(
                "projection margins must be positive (delta = {delta}, eps = {eps})"
            )));
        }
        let blocks: Vec<(DMatrix<T>, DMatrix<T>)> = region
            .diagonal_blocks()
            .iter()
            .map(|idx| region_matrices::<T>(&region.sub_block(idx)))
            .collect::<Result<_>>()?;
        let lmi_blocks = blocks.len();

        let mut pb = ProgramBuilder::<T>::new();
        pb.block("J", Structure::Skew, n);
        pb.block("R", Structure::Hermitian, n);
        pb.block("P", Structure::Hermitian, n);
        pb.proximal(1.0, vec![DMatrix::zeros(n, n); 3]);
        for (b, c) in blocks {
            pb.psd_constraint(move |x| {
                let m = assemble_with(&b, &c, &x[0], &x[1], &x[2]);
                let s = m.nrows();
                -m - DMatrix::<T>::identity(s, s) * T::from_real(delta)
            });
        }
        pb.psd_constraint(move |x| &x[2] - DMatrix::<T>::identity(n, n) * T::from_real(eps));
        let solver = ConicSolver::new(pb.build()?, *cfg)?;
        Ok(TripletProjector {
            solver,
            n,
            delta,
            eps,
            lmi_blocks,
        })
    }

    /// `(lambda_max(M), lambda_min(P))` for a triplet.
    fn margins(&self, x: &[DMatrix<T>]) -> Result<(f64, f64)> {
        let mins = self.solver.program.constraint_min_eigenvalues(x)?;
        let m_max = mins[..self.lmi_blocks]
            .iter()
            .map(|&l| -l - self.delta)
            .fold(f64::NEG_INFINITY, f64::max);
        Ok((m_max, mins[self.lmi_blocks] + self.eps))
    }

    pub fn project(&mut self, t: &DhTriplet<T>) -> Result<DhTriplet<T>> {
        if t.dim() != self.n {
            return Err(Error::Dimension(format!(
                "projector built for n = {}, got a triplet of size {}",
                self.n,
                t.dim()
            )));
        }
        let x0 = [t.j.clone(), t.r.clone(), t.p.clone()];
        let (m0, p0) = self.margins(&x0)?;
        if m0 <= -self.delta && p0 >= self.eps {
            return Ok(t.clone());
        }

        self.solver.program.set_center(&x0)?;
        let sol = self.solver.solve()?;
        if sol.status == Status::InfeasibleSuspected {
            return Err(Error::Projection(format!(
                "solver reports the constraint set as infeasible (primal residual {:e})",
                sol.primal_residual
            )));
        }
        let out = DhTriplet {
            j: skew_part(&sol.x[0]),
            r: hermitian_part(&sol.x[1]),
            p: hermitian_part(&sol.x[2]),
        };

        // ADMM satisfies the constraints only up to its tolerance. M is
        // homogeneous in (J, R, P), so a uniform scaling restores the margins
        // without changing the represented matrix.
        let (m, p) = self.margins(&[out.j.clone(), out.r.clone(), out.p.clone()])?;
        if m <= -self.delta / 2.0 && p >= self.eps / 2.0 {
            return Ok(out);
        }
        if !(m < 0.0 && p > 0.0) {
            return Err(Error::Projection(format!(
                "projected triplet misses the constraint set (lambda_max(M) = {m:e}, \
                 lambda_min(P) = {p:e}, status {:?})",
                sol.status
            )));
        }
        let s = (self.delta / -m).max(self.eps / p).max(1.0);
        Ok(out.scaled(s))
    }
}

/// One-shot projection; see [`TripletProjector`] for repeated use.
pub fn project_triplet<T: Scalar>(
    region: &Region,
    t: &DhTriplet<T>,
    delta: f64,
    eps: f64,
    cfg: &ConicConfig,
) -> Result<DhTriplet<T>> {
    TripletProjector::new(region, t.dim(), delta, eps, cfg)?.project(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dh::lmi_margin;
    use crate::linalg::lambda_min;
    use crate::conicqp::psd_project;
    use approx::assert_abs_diff_eq;
    use nalgebra::dmatrix;

    #[test]
    fn feasible_input_is_unchanged() {
        let i2 = DMatrix::<f64>::identity(2, 2);
        let t = DhTriplet::new(DMatrix::zeros(2, 2), i2.clone(), i2.clone()).unwrap();
        let out = project_triplet(&Region::hurwitz(), &t, 0.1, 0.1, &ConicConfig::default()).unwrap();
        assert_eq!(out, t);
    }

    #[test]
    fn hurwitz_projection_clips_r() {
        // For s = 1, B = 0, C = 1 the constraints decouple: R >= delta/2, P >= eps.
        let j = dmatrix![0.0, 1.2; -1.2, 0.0];
        let r = dmatrix![1.0, 0.3; 0.3, -2.0];
        let p = dmatrix![2.0, 0.0; 0.0, 0.5];
        let t = DhTriplet::new(j.clone(), r.clone(), p.clone()).unwrap();
        let (delta, eps) = (0.1, 0.01);
        let out = project_triplet(&Region::hurwitz(), &t, delta, eps, &ConicConfig::default()).unwrap();
        assert_abs_diff_eq!(out.j, j, epsilon = 1e-5);
        assert_abs_diff_eq!(out.r, psd_project(&r, delta / 2.0).unwrap(), epsilon = 1e-5);
        assert_abs_diff_eq!(out.p, p, epsilon = 1e-5);
        assert!(lmi_margin(&Region::hurwitz(), &out).unwrap() <= -delta / 2.0);
        assert!(lambda_min(&out.p).unwrap() >= eps / 2.0);
    }
}
