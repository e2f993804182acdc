//! Strongly convex quadratic programs over structured matrix variables with
//! positive-semidefinite constraints:
//!
//! ```text
//! minimize   1/2 ||L(x) - b||_F^2 + mu/2 ||x - x0||_F^2
//! subject to A_i(x) + B_i  is PSD            (i = 1..m)
//! ```
//!
//! Solved by ADMM on the splitting `S_i = A_i(x) + B_i`, with the slack
//! update a PSD-cone projection and the x-update a fixed positive definite
//! linear system. Affine maps are supplied as closures and turned into
//! explicit coordinate matrices by probing a basis of the variable space.

mod coords;
mod project;

pub use coords::Structure;
pub use project::{project_triplet, TripletProjector};

use std::marker::PhantomData;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{fro, herm_eig, herm_eig_in_basis, herm_eigenvalues, hermitian_part, Scalar};

/// Nearest Hermitian matrix (Frobenius) with every eigenvalue `>= floor`.
pub fn psd_project<T: Scalar>(m: &DMatrix<T>, floor: f64) -> Result<DMatrix<T>> {
    let eig = herm_eig(m)?;
    Ok(clip_spectrum(m, floor, &eig.values, &eig.vectors))
}

/// `herm(m) - sum_{lam < floor} (lam - floor) v v^H`.
fn clip_spectrum<T: Scalar>(m: &DMatrix<T>, floor: f64, values: &[f64], vectors: &DMatrix<T>) -> DMatrix<T> {
    let mut out = hermitian_part(m);
    let low: Vec<usize> = (0..values.len()).filter(|&k| values[k] < floor).collect();
    if !low.is_empty() {
        let v = vectors.select_columns(&low);
        let mut vd = v.clone();
        for (c, &k) in low.iter().enumerate() {
            vd.column_mut(c).scale_mut(values[k] - floor);
        }
        out.gemm(T::from_real(-1.0), &vd, &v.adjoint(), T::one());
    }
    hermitian_part(&out)
}

#[derive(Clone, Debug)]
pub struct VarBlock {
    pub name: String,
    pub structure: Structure,
    pub dim: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConicConfig {
    pub tol_p: f64,
    pub tol_d: f64,
    pub max_iterations: usize,
    pub rho_init: f64,
    pub rho_min: f64,
    pub rho_max: f64,
    /// Over-relaxation factor in (0, 2).
    pub relaxation: f64,
    /// Iterations between penalty adaptations.
    pub adapt_interval: usize,
}

impl Default for ConicConfig {
    fn default() -> Self {
        ConicConfig {
            tol_p: 1e-7,
            tol_d: 1e-7,
            max_iterations: 20_000,
            rho_init: 1.0,
            rho_min: 1e-4,
            rho_max: 1e4,
            relaxation: 1.6,
            adapt_interval: 25,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Optimal,
    MaxIterations,
    InfeasibleSuspected,
}

#[derive(Clone, Debug)]
pub struct ConicSolution<T: Scalar> {
    /// One matrix per variable block, in declaration order.
    pub x: Vec<DMatrix<T>>,
    pub status: Status,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub iterations: usize,
    pub objective_value: f64,
    /// PSD multipliers `Z_i` with `grad f(x) = sum_i A_i^*(Z_i)` at optimality.
    pub duals: Vec<DMatrix<T>>,
}

/// Constraint `i` occupies rows `start..start + len` of the stacked map.
struct Constraint {
    dim: usize,
    start: usize,
    len: usize,
}

/// An immutable, fully assembled program.
pub struct ConicProgram<T: Scalar> {
    blocks: Vec<VarBlock>,
    offsets: Vec<usize>,
    nvar: usize,
    /// `L^T L` and `L^T b`.
    ls_gram: DMatrix<f64>,
    ls_rhs: DVector<f64>,
    ls_const: f64,
    ls_map: Option<DMatrix<f64>>,
    mu: f64,
    center: DVector<f64>,
    constraints: Vec<Constraint>,
    /// All constraint maps stacked in coordinates: `s = A x + b`.
    a: DMatrix<f64>,
    at: DMatrix<f64>,
    b: DVector<f64>,
    _scalar: PhantomData<T>,
}

type MapFn<'a, T> = Box<dyn Fn(&[DMatrix<T>]) -> DMatrix<T> + 'a>;

/// Collects variable blocks, the objective and constraints, then assembles
/// them into a [`ConicProgram`].
pub struct ProgramBuilder<'a, T: Scalar> {
    blocks: Vec<VarBlock>,
    least_squares: Option<(MapFn<'a, T>, DMatrix<T>)>,
    mu: f64,
    center: Option<Vec<DMatrix<T>>>,
    constraints: Vec<MapFn<'a, T>>,
}

impl<T: Scalar> Default for ProgramBuilder<'_, T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<'a, T: Scalar> ProgramBuilder<'a, T> {
    pub fn new() -> Self {
        ProgramBuilder {
            blocks: Vec::new(),
            least_squares: None,
            mu: 0.0,
            center: None,
            constraints: Vec::new(),
        }
    }

    /// Adds a variable block and returns its index.
    pub fn block(&mut self, name: &str, structure: Structure, dim: usize) -> usize {
        self.blocks.push(VarBlock {
            name: name.to_string(),
            structure,
            dim,
        });
        self.blocks.len() - 1
    }

    /// Objective term `1/2 ||map(x) - target||_F^2`; `map` must be linear.
    pub fn least_squares(
        &mut self,
        map: impl Fn(&[DMatrix<T>]) -> DMatrix<T> + 'a,
        target: DMatrix<T>,
    ) -> &mut Self {
        self.least_squares = Some((Box::new(map), target));
        self
    }

    /// Objective term `mu/2 ||x - center||_F^2`.
    pub fn proximal(&mut self, mu: f64, center: Vec<DMatrix<T>>) -> &mut Self {
        self.mu = mu;
        self.center = Some(center);
        self
    }

    /// Constraint `map(x)` PSD, where `map` is affine with Hermitian output.
    pub fn psd_constraint(&mut self, map: impl Fn(&[DMatrix<T>]) -> DMatrix<T> + 'a) -> &mut Self {
        self.constraints.push(Box::new(map));
        self
    }

    pub fn build(self) -> Result<ConicProgram<T>> {
        if self.blocks.is_empty() {
            return Err(Error::IllPosed("program has no variable blocks".into()));
        }
        if self.mu < 0.0 || !self.mu.is_finite() {
            return Err(Error::IllPosed(format!("proximal weight must be >= 0, got {}", self.mu)));
        }
        let mut offsets = Vec::with_capacity(self.blocks.len());
        let mut nvar = 0;
        for b in &self.blocks {
            offsets.push(nvar);
            nvar += b.structure.coord_len::<T>(b.dim);
        }
        let zero: Vec<DMatrix<T>> = self
            .blocks
            .iter()
            .map(|b| DMatrix::zeros(b.dim, b.dim))
            .collect();

        let basis = |k: usize| -> Vec<DMatrix<T>> {
            let mut x = DVector::zeros(nvar);
            x[k] = 1.0;
            unpack(&self.blocks, &offsets, &x)
        };

        let (ls_gram, ls_rhs, ls_const, ls_map) = match &self.least_squares {
            Some((map, target)) => {
                let out0 = map(&zero);
                if out0.shape() != target.shape() {
                    return Err(Error::Dimension(format!(
                        "least-squares map output {:?} does not match target {:?}",
                        out0.shape(),
                        target.shape()
                    )));
                }
                if fro(&out0) > 0.0 {
                    return Err(Error::IllPosed("least-squares map must be linear".into()));
                }
                let rows = target.nrows() * target.ncols() * if T::IS_COMPLEX { 2 } else { 1 };
                let mut l = DMatrix::<f64>::zeros(rows, nvar);
                let mut col = vec![0.0; rows];
                for k in 0..nvar {
                    flatten(&map(&basis(k)), &mut col);
                    l.set_column(k, &DVector::from_column_slice(&col));
                }
                let mut b = vec![0.0; rows];
                flatten(target, &mut b);
                let b = DVector::from_vec(b);
                let gram = l.transpose() * &l;
                let rhs = l.transpose() * &b;
                (gram, rhs, 0.5 * b.norm_squared(), Some(l))
            }
            None => (DMatrix::zeros(nvar, nvar), DVector::zeros(nvar), 0.0, None),
        };

        let center = match &self.center {
            Some(c) => {
                if c.len() != self.blocks.len()
                    || c.iter().zip(&self.blocks).any(|(m, b)| m.shape() != (b.dim, b.dim))
                {
                    return Err(Error::Dimension("proximal center does not match blocks".into()));
                }
                pack(&self.blocks, &offsets, c)
            }
            None => DVector::zeros(nvar),
        };

        let mut constraints = Vec::with_capacity(self.constraints.len());
        let mut parts = Vec::with_capacity(self.constraints.len());
        let mut rows = 0;
        for (ci, map) in self.constraints.iter().enumerate() {
            let off = map(&zero);
            let dim = off.nrows();
            if off.ncols() != dim {
                return Err(Error::Dimension(format!("constraint {ci} output is not square")));
            }
            check_hermitian(&off, ci)?;
            let len = Structure::Hermitian.coord_len::<T>(dim);
            let mut offset = vec![0.0; len];
            Structure::Hermitian.encode(&off, &mut offset);
            let mut a = DMatrix::<f64>::zeros(len, nvar);
            let mut col = vec![0.0; len];
            for k in 0..nvar {
                let out = map(&basis(k)) - &off;
                check_hermitian(&out, ci)?;
                Structure::Hermitian.encode(&out, &mut col);
                a.set_column(k, &DVector::from_column_slice(&col));
            }
            constraints.push(Constraint { dim, start: rows, len });
            rows += len;
            parts.push((a, offset));
        }
        let mut a = DMatrix::<f64>::zeros(rows, nvar);
        let mut b = DVector::<f64>::zeros(rows);
        for (c, (ai, bi)) in constraints.iter().zip(&parts) {
            a.rows_mut(c.start, c.len).copy_from(ai);
            b.rows_mut(c.start, c.len).copy_from_slice(bi);
        }

        Ok(ConicProgram {
            blocks: self.blocks,
            offsets,
            nvar,
            ls_gram,
            ls_rhs,
            ls_const,
            ls_map,
            mu: self.mu,
            center,
            constraints,
            at: a.transpose(),
            a,
            b,
            _scalar: PhantomData,
        })
    }
}

fn check_hermitian<T: Scalar>(m: &DMatrix<T>, ci: usize) -> Result<()> {
    let asym = fro(&(m - m.adjoint()));
    if asym > 1e-12 * (1.0 + fro(m)) {
        return Err(Error::IllPosed(format!(
            "constraint {ci} map is not Hermitian-valued (asymmetry {asym:e})"
        )));
    }
    Ok(())
}

fn flatten<T: Scalar>(m: &DMatrix<T>, out: &mut [f64]) {
    if T::IS_COMPLEX {
        for (k, z) in m.iter().enumerate() {
            let z = z.to_c64();
            out[2 * k] = z.re;
            out[2 * k + 1] = z.im;
        }
    } else {
        for (k, z) in m.iter().enumerate() {
            out[k] = z.to_c64().re;
        }
    }
}

fn unpack<T: Scalar>(blocks: &[VarBlock], offsets: &[usize], x: &DVector<f64>) -> Vec<DMatrix<T>> {
    blocks
        .iter()
        .zip(offsets)
        .map(|(b, &o)| {
            let len = b.structure.coord_len::<T>(b.dim);
            b.structure.decode(&x.as_slice()[o..o + len], b.dim)
        })
        .collect()
}

fn pack<T: Scalar>(blocks: &[VarBlock], offsets: &[usize], m: &[DMatrix<T>]) -> DVector<f64> {
    let total: usize = blocks.iter().map(|b| b.structure.coord_len::<T>(b.dim)).sum();
    let mut x = DVector::zeros(total);
    for ((b, &o), mat) in blocks.iter().zip(offsets).zip(m) {
        let len = b.structure.coord_len::<T>(b.dim);
        b.structure.encode(mat, &mut x.as_mut_slice()[o..o + len]);
    }
    x
}

impl<T: Scalar> ConicProgram<T> {
    pub fn blocks(&self) -> &[VarBlock] {
        &self.blocks
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    /// Replaces the proximal center, keeping everything else.
    pub fn set_center(&mut self, center: &[DMatrix<T>]) -> Result<()> {
        if center.len() != self.blocks.len()
            || center.iter().zip(&self.blocks).any(|(m, b)| m.shape() != (b.dim, b.dim))
        {
            return Err(Error::Dimension("proximal center does not match blocks".into()));
        }
        self.center = pack(&self.blocks, &self.offsets, center);
        Ok(())
    }

    fn objective(&self, x: &DVector<f64>) -> f64 {
        let mut f = 0.0;
        if let Some(l) = &self.ls_map {
            // 1/2 ||Lx - b||^2 = 1/2 x'L'Lx - x'L'b + 1/2 ||b||^2
            let lx = l * x;
            f += 0.5 * lx.norm_squared() - x.dot(&self.ls_rhs) + self.ls_const;
        }
        if self.mu > 0.0 {
            f += 0.5 * self.mu * (x - &self.center).norm_squared();
        }
        f.max(0.0)
    }

    fn system(&self, rho: f64) -> Result<nalgebra::Cholesky<f64, nalgebra::Dyn>> {
        let mut h = self.ls_gram.clone();
        for i in 0..self.nvar {
            h[(i, i)] += self.mu;
        }
        h.gemm(rho, &self.at, &self.a, 1.0);
        nalgebra::Cholesky::new(h).ok_or_else(|| {
            Error::IllPosed("normal-equations system is not positive definite".into())
        })
    }

    /// Smallest eigenvalue of each constraint evaluated at `x`.
    pub fn constraint_min_eigenvalues(&self, x: &[DMatrix<T>]) -> Result<Vec<f64>> {
        let v = pack(&self.blocks, &self.offsets, x);
        let s = &self.a * &v + &self.b;
        self.constraints
            .iter()
            .map(|c| {
                let m: DMatrix<T> =
                    Structure::Hermitian.decode(&s.as_slice()[c.start..c.start + c.len], c.dim);
                Ok(*herm_eigenvalues(&m)?.last().unwrap())
            })
            .collect()
    }

    /// Evaluates every constraint at `x` and returns the smallest eigenvalue.
    pub fn min_constraint_eigenvalue(&self, x: &[DMatrix<T>]) -> Result<f64> {
        Ok(self
            .constraint_min_eigenvalues(x)?
            .into_iter()
            .fold(f64::INFINITY, f64::min))
    }
}

/// Reusable ADMM state for one program. Repeated solves (e.g. after
/// [`ConicProgram::set_center`]) start from the previous slack and dual
/// iterates.
///
/// The ADMM map on the stacked slack/dual state `(s, u)` is accelerated by
/// type-II Anderson extrapolation with a residual-decrease safeguard: an
/// extrapolated point is kept only if the next fixed-point residual does
/// not exceed the one it was extrapolated from.
pub struct ConicSolver<T: Scalar> {
    pub program: ConicProgram<T>,
    cfg: ConicConfig,
    rho: f64,
    factor: nalgebra::Cholesky<f64, nalgebra::Dyn>,
    x: DVector<f64>,
    s: DVector<f64>,
    u: DVector<f64>,
    /// Eigenvectors from the previous cone projection of each constraint;
    /// successive slacks are close, so they nearly diagonalize the next one.
    eig_basis: Vec<Option<(DMatrix<T>, usize)>>,
}

struct Step {
    x: DVector<f64>,
    s: DVector<f64>,
    u: DVector<f64>,
    prim: f64,
    dual: f64,
    eps_p: f64,
    eps_d: f64,
    rel_prim: f64,
}

const ANDERSON_MEMORY: usize = 10;

/// Type-II Anderson acceleration for a fixed-point map `z -> T(z)`.
struct Anderson {
    dz: Vec<DVector<f64>>,
    dg: Vec<DVector<f64>>,
    last: Option<(DVector<f64>, DVector<f64>)>,
}

impl Anderson {
    fn new() -> Self {
        Anderson {
            dz: Vec::new(),
            dg: Vec::new(),
            last: None,
        }
    }

    fn reset(&mut self) {
        self.dz.clear();
        self.dg.clear();
        self.last = None;
    }

    /// Records `(z, g = T(z) - z)` and returns the extrapolated next point.
    fn next(&mut self, z: &DVector<f64>, g: &DVector<f64>) -> Option<DVector<f64>> {
        if let Some((z0, g0)) = self.last.take() {
            if self.dz.len() == ANDERSON_MEMORY {
                self.dz.remove(0);
                self.dg.remove(0);
            }
            self.dz.push(z - z0);
            self.dg.push(g - g0);
        }
        self.last = Some((z.clone(), g.clone()));
        let m = self.dg.len();
        if m == 0 {
            return None;
        }
        let mut gram = DMatrix::<f64>::zeros(m, m);
        let mut rhs = DVector::<f64>::zeros(m);
        for i in 0..m {
            rhs[i] = self.dg[i].dot(g);
            for j in 0..=i {
                let v = self.dg[i].dot(&self.dg[j]);
                gram[(i, j)] = v;
                gram[(j, i)] = v;
            }
        }
        let reg = 1e-10 * (gram.trace() / m as f64) + 1e-300;
        for i in 0..m {
            gram[(i, i)] += reg;
        }
        let gamma = nalgebra::Cholesky::new(gram)?.solve(&rhs);
        if !gamma.iter().all(|v| v.is_finite()) {
            return None;
        }
        let mut out = z + g;
        for i in 0..m {
            out.axpy(-gamma[i], &self.dz[i], 1.0);
            out.axpy(-gamma[i], &self.dg[i], 1.0);
        }
        Some(out)
    }
}

/// Projects `v` (Hermitian coordinates) onto the PSD cone, reusing and
/// refreshing the cached eigenbasis.
fn project_cone<T: Scalar>(
    cache: &mut Option<(DMatrix<T>, usize)>,
    dim: usize,
    v: &[f64],
    out: &mut [f64],
) -> Result<()> {
    // Rounding drifts the cached basis away from unitarity; restart it
    // from scratch periodically.
    const BASIS_REUSE: usize = 200;
    let m: DMatrix<T> = Structure::Hermitian.decode(v, dim);
    let (values, vectors, uses) = match cache.take() {
        Some((basis, uses)) if uses < BASIS_REUSE => {
            let (values, vectors) = herm_eig_in_basis(&m, &basis)?;
            (values, vectors, uses + 1)
        }
        _ => {
            let e = herm_eig(&m)?;
            (e.values, e.vectors, 0)
        }
    };
    if values.iter().all(|&l| l >= 0.0) {
        out.copy_from_slice(v);
    } else {
        let p = clip_spectrum(&m, 0.0, &values, &vectors);
        Structure::Hermitian.encode(&p, out);
    }
    *cache = Some((vectors, uses));
    Ok(())
}

impl<T: Scalar> ConicSolver<T> {
    pub fn new(program: ConicProgram<T>, cfg: ConicConfig) -> Result<Self> {
        let rho = cfg.rho_init.clamp(cfg.rho_min, cfg.rho_max);
        let factor = program.system(rho)?;
        let rows = program.b.len();
        let x = program.center.clone();
        let eig_basis = vec![None; program.constraints.len()];
        Ok(ConicSolver {
            program,
            cfg,
            rho,
            factor,
            x,
            s: DVector::zeros(rows),
            u: DVector::zeros(rows),
            eig_basis,
        })
    }

    pub fn config(&self) -> &ConicConfig {
        &self.cfg
    }

    fn set_rho(&mut self, rho: f64) -> Result<bool> {
        let rho = rho.clamp(self.cfg.rho_min, self.cfg.rho_max);
        if rho == self.rho {
            return Ok(false);
        }
        self.factor = self.program.system(rho)?;
        self.rho = rho;
        Ok(true)
    }

    /// One over-relaxed ADMM iteration from `(s, u)`; `q` is the fixed part
    /// of the x-update right-hand side.
    fn step(&mut self, s: &DVector<f64>, u: &DVector<f64>, q: &DVector<f64>) -> Result<Step> {
        let prog = &self.program;
        let alpha = self.cfg.relaxation;
        let mut rhs = q.clone();
        rhs.gemv(self.rho, &prog.at, &(s - &prog.b - u), 1.0);
        let x = self.factor.solve(&rhs);

        let ax = &prog.a * &x;
        let affine = &ax + &prog.b;
        let v = &affine * alpha + s * (1.0 - alpha);
        let w = &v + u;
        let mut s_new = DVector::<f64>::zeros(w.len());
        for (k, c) in prog.constraints.iter().enumerate() {
            let range = c.start..c.start + c.len;
            project_cone(
                &mut self.eig_basis[k],
                c.dim,
                &w.as_slice()[range.clone()],
                &mut s_new.as_mut_slice()[range],
            )?;
        }
        let u_new = &w - &s_new;

        let prim = (&affine - &s_new).norm();
        let mut pair = DMatrix::<f64>::zeros(s.len(), 2);
        pair.set_column(0, &(&s_new - s));
        pair.set_column(1, &u_new);
        let at_pair = &prog.at * pair;
        let dual = self.rho * at_pair.column(0).norm();
        let scale_p = 1.0 + ax.norm().max(s_new.norm()).max(prog.b.norm());
        Ok(Step {
            eps_p: self.cfg.tol_p * scale_p,
            eps_d: self.cfg.tol_d * (1.0 + self.rho * at_pair.column(1).norm()),
            rel_prim: prim / scale_p,
            prim,
            dual,
            x,
            s: s_new,
            u: u_new,
        })
    }

    pub fn solve(&mut self) -> Result<ConicSolution<T>> {
        let prog = &self.program;
        let q = &prog.ls_rhs + &prog.center * prog.mu;

        if prog.constraints.is_empty() {
            let x = self.factor.solve(&q);
            self.x = x.clone();
            return Ok(self.finish(x, Status::Optimal, 0.0, 0.0, 0));
        }

        let rows = prog.b.len();
        let s0_norm = self.s.norm();
        let mut stagnant = 0usize;
        let mut status = Status::MaxIterations;
        let mut iterations = 0;
        let mut z = DVector::<f64>::zeros(2 * rows);
        z.rows_mut(0, rows).copy_from(&self.s);
        z.rows_mut(rows, rows).copy_from(&self.u);
        let mut aa = Anderson::new();
        // (residual norm at the point we extrapolated from, its plain image)
        let mut guard: Option<(f64, DVector<f64>)> = None;
        let mut last: Option<Step> = None;

        for it in 1..=self.cfg.max_iterations {
            iterations = it;
            let s = z.rows(0, rows).into_owned();
            let u = z.rows(rows, rows).into_owned();
            let step = self.step(&s, &u, &q)?;
            let mut tz = DVector::<f64>::zeros(2 * rows);
            tz.rows_mut(0, rows).copy_from(&step.s);
            tz.rows_mut(rows, rows).copy_from(&step.u);
            let g = &tz - &z;
            let g_norm = g.norm();

            let converged = step.prim <= step.eps_p && step.dual <= step.eps_d;
            let diverged = step.s.norm() > 1e6 * (1.0 + s0_norm) + 1e12;
            if step.rel_prim > 1e-2 {
                stagnant += 1;
            } else {
                stagnant = 0;
            }
            let (prim, dual, eps_p, eps_d) = (step.prim, step.dual, step.eps_p, step.eps_d);
            last = Some(step);
            if converged {
                status = Status::Optimal;
                break;
            }
            if diverged || stagnant >= 2000 {
                status = Status::InfeasibleSuspected;
                break;
            }

            if let Some((g_ref, fallback)) = guard.take() {
                if g_norm > g_ref {
                    aa.reset();
                    z = fallback;
                    continue;
                }
            }
            match aa.next(&z, &g) {
                Some(z_aa) => {
                    guard = Some((g_norm, tz));
                    z = z_aa;
                }
                None => z = tz,
            }

            if it % self.cfg.adapt_interval == 0 {
                let rp = prim / eps_p;
                let rd = dual / eps_d;
                let target = if rp > 10.0 * rd {
                    self.rho * 2.0
                } else if rd > 10.0 * rp {
                    self.rho / 2.0
                } else {
                    self.rho
                };
                let old = self.rho;
                if self.set_rho(target)? {
                    // Restart from the last plain iterate with u rescaled to the
                    // new penalty (the scaled dual is y / rho).
                    let step = last.as_ref().expect("at least one step");
                    z.rows_mut(0, rows).copy_from(&step.s);
                    z.rows_mut(rows, rows).copy_from(&(&step.u * (old / self.rho)));
                    aa.reset();
                    guard = None;
                    if let Some(st) = last.as_mut() {
                        st.u *= old / self.rho;
                    }
                }
            }
        }
        let step = last.expect("at least one iteration");
        self.s = step.s;
        self.u = step.u;
        self.x = step.x.clone();
        Ok(self.finish(step.x, status, step.prim, step.dual, iterations))
    }

    fn finish(
        &self,
        x: DVector<f64>,
        status: Status,
        prim: f64,
        dual: f64,
        iterations: usize,
    ) -> ConicSolution<T> {
        let prog = &self.program;
        let duals = prog
            .constraints
            .iter()
            .map(|c| {
                let y = self.u.rows(c.start, c.len) * (-self.rho);
                Structure::Hermitian.decode(y.as_slice(), c.dim)
            })
            .collect();
        ConicSolution {
            objective_value: prog.objective(&x),
            x: unpack(&prog.blocks, &prog.offsets, &x),
            status,
            primal_residual: prim,
            dual_residual: dual,
            iterations,
            duals,
        }
    }
}

/// One-shot solve of `prog`.
pub fn solve<T: Scalar>(prog: ConicProgram<T>, cfg: &ConicConfig) -> Result<ConicSolution<T>> {
    ConicSolver::new(prog, *cfg)?.solve()
}

/// Adjoint of constraint `i` applied to a Hermitian matrix, in block form.
/// Used to check stationarity of returned solutions.
pub fn constraint_adjoint<T: Scalar>(
    prog: &ConicProgram<T>,
    i: usize,
    z: &DMatrix<T>,
) -> Vec<DMatrix<T>> {
    let c = &prog.constraints[i];
    let mut zc = vec![0.0; c.len];
    Structure::Hermitian.encode(z, &mut zc);
    let v = prog.at.columns(c.start, c.len) * DVector::from_vec(zc);
    unpack(&prog.blocks, &prog.offsets, &v)
}
