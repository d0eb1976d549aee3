//! Linear solvers for the assembled systems.
//!
//! Factorisations come from `faer`'s sparse Cholesky and LU. Every solve is
//! followed by a residual check; up to two steps of iterative refinement are
//! applied before a solve is reported as failed. A Jacobi-preconditioned CG
//! is kept as the fallback for SPD systems whose factorisation fails.

use std::sync::Once;

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::{Llt, Lu};
use faer::sparse::{SparseColMat, Triplet};
use faer::{Col, Par, Side};

use crate::error::{check_len, Error, Result};
use crate::sparse::{dot, norm2, CsrMatrix};

/// Relative residual every solve must reach.
pub const SOLVE_TOL: f64 = 1e-10;

const REFINEMENT_STEPS: usize = 2;

fn serial_faer() {
    static ONCE: Once = Once::new();
    // Serial kernels keep repeated solves bitwise reproducible.
    ONCE.call_once(|| faer::set_global_parallelism(Par::Seq));
}

fn to_faer(matrix: &CsrMatrix, context: &str) -> Result<SparseColMat<usize, f64>> {
    let t: Vec<_> = matrix.triplets().map(|(i, j, v)| Triplet::new(i, j, v)).collect();
    SparseColMat::try_new_from_triplets(matrix.dim(), matrix.dim(), &t)
        .map_err(|e| Error::Factorisation { context: context.into(), reason: format!("{e:?}") })
}

/// `‖b - A x‖ / ‖b‖`, or `‖A x‖` when `b = 0`.
pub fn relative_residual(matrix: &CsrMatrix, x: &[f64], b: &[f64]) -> f64 {
    let ax = matrix.mul_vec(x);
    let r: f64 = ax.iter().zip(b).map(|(a, b)| (b - a) * (b - a)).sum::<f64>().sqrt();
    let nb = norm2(b);
    if nb > 0.0 {
        r / nb
    } else {
        r
    }
}

fn refine_solution(
    matrix: &CsrMatrix,
    rhs: &[f64],
    mut x: Vec<f64>,
    context: &str,
    solve: impl Fn(&[f64]) -> Vec<f64>,
) -> Result<Vec<f64>> {
    let mut res = relative_residual(matrix, &x, rhs);
    for _ in 0..REFINEMENT_STEPS {
        if res <= SOLVE_TOL {
            break;
        }
        let ax = matrix.mul_vec(&x);
        let r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let dx = solve(&r);
        x.iter_mut().zip(&dx).for_each(|(xi, di)| *xi += di);
        res = relative_residual(matrix, &x, rhs);
    }
    if res <= SOLVE_TOL && x.iter().all(|v| v.is_finite()) {
        Ok(x)
    } else {
        Err(Error::Solver { context: context.into(), residual: res })
    }
}

fn col_solve(solver: &impl Solve<f64>, rhs: &[f64]) -> Vec<f64> {
    let b = Col::<f64>::from_fn(rhs.len(), |i| rhs[i]);
    let x = solver.solve(&b);
    (0..rhs.len()).map(|i| x[i]).collect()
}

enum SpdBackend {
    Cholesky(Llt<usize, f64>),
    Cg { inv_diag: Vec<f64> },
}

/// Solver for a symmetric positive definite system such as `M` or `A + M`.
pub struct SpdSolver {
    matrix: CsrMatrix,
    backend: SpdBackend,
    context: String,
}

impl SpdSolver {
    pub fn new(matrix: &CsrMatrix, context: &str) -> Self {
        serial_faer();
        let backend = match to_faer(matrix, context).ok().and_then(|m| m.sp_cholesky(Side::Lower).ok()) {
            Some(llt) => SpdBackend::Cholesky(llt),
            None => SpdBackend::Cg { inv_diag: matrix.diagonal().iter().map(|d| 1.0 / d).collect() },
        };
        SpdSolver { matrix: matrix.clone(), backend, context: context.into() }
    }

    /// Forces the conjugate-gradient backend.
    pub fn new_iterative(matrix: &CsrMatrix, context: &str) -> Self {
        SpdSolver {
            matrix: matrix.clone(),
            backend: SpdBackend::Cg { inv_diag: matrix.diagonal().iter().map(|d| 1.0 / d).collect() },
            context: context.into(),
        }
    }

    pub fn is_direct(&self) -> bool {
        matches!(self.backend, SpdBackend::Cholesky(_))
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        check_len(self.matrix.dim(), rhs.len())?;
        match &self.backend {
            SpdBackend::Cholesky(llt) => {
                let x = col_solve(llt, rhs);
                refine_solution(&self.matrix, rhs, x, &self.context, |r| col_solve(llt, r))
            }
            SpdBackend::Cg { inv_diag } => {
                let (x, res) = pcg(&self.matrix, inv_diag, rhs, 0.1 * SOLVE_TOL, 20 * rhs.len() + 100);
                if res <= SOLVE_TOL {
                    Ok(x)
                } else {
                    Err(Error::Solver { context: self.context.clone(), residual: res })
                }
            }
        }
    }
}

/// Jacobi-preconditioned conjugate gradients from a zero initial guess.
/// Returns the iterate and its relative residual.
pub fn pcg(matrix: &CsrMatrix, inv_diag: &[f64], rhs: &[f64], tol: f64, max_iter: usize) -> (Vec<f64>, f64) {
    let n = rhs.len();
    let nb = norm2(rhs);
    let mut x = vec![0.0; n];
    if nb == 0.0 {
        return (x, 0.0);
    }
    let mut r = rhs.to_vec();
    let mut z: Vec<f64> = r.iter().zip(inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    for _ in 0..max_iter {
        if norm2(&r) <= tol * nb {
            break;
        }
        matrix.mul_vec_into(&p, &mut ap);
        let alpha = rz / dot(&p, &ap);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        z.iter_mut().zip(r.iter().zip(inv_diag)).for_each(|(z, (r, d))| *z = r * d);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        p.iter_mut().zip(&z).for_each(|(p, z)| *p = z + beta * *p);
    }
    let res = relative_residual(matrix, &x, rhs);
    (x, res)
}

/// Sparse LU with partial pivoting for general square systems.
pub struct LuSolver {
    matrix: CsrMatrix,
    lu: Lu<usize, f64>,
    context: String,
}

impl LuSolver {
    pub fn new(matrix: &CsrMatrix, context: &str) -> Result<Self> {
        serial_faer();
        let lu = to_faer(matrix, context)?
            .sp_lu()
            .map_err(|e| Error::Factorisation { context: context.into(), reason: format!("{e:?}") })?;
        Ok(LuSolver { matrix: matrix.clone(), lu, context: context.into() })
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        check_len(self.matrix.dim(), rhs.len())?;
        let x = col_solve(&self.lu, rhs);
        refine_solution(&self.matrix, rhs, x, &self.context, |r| col_solve(&self.lu, r))
    }
}
