//! Matrix-free linear solvers for the second-kind density equation.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// A real linear operator given by its action.
pub trait LinearMap {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

impl LinearMap for DMatrix<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let xv = DVector::from_column_slice(x);
        let yv = self * xv;
        y.copy_from_slice(yv.as_slice());
    }
}

#[derive(Debug, Clone)]
pub struct SolveStats {
    pub iterations: usize,
    pub residual: f64,
    pub history: Vec<f64>,
}

/// Restarted GMRES with modified Gram-Schmidt and Givens rotations.
/// Converges mesh-independently here: the system is identity plus a
/// contraction (|2 a_mu| ||D|| < 1 in the flat-norm operating range).
pub fn gmres(
    op: &dyn LinearMap,
    b: &[f64],
    tol: f64,
    max_iterations: usize,
    restart: usize,
) -> Result<(Vec<f64>, SolveStats)> {
    let n = op.dim();
    assert_eq!(b.len(), n, "rhs dimension mismatch");
    let b_norm = norm(b);
    let mut history = Vec::new();
    if b_norm == 0.0 {
        return Ok((
            vec![0.0; n],
            SolveStats {
                iterations: 0,
                residual: 0.0,
                history,
            },
        ));
    }
    let mut x = vec![0.0; n];
    let mut total_iter = 0usize;
    let mut work = vec![0.0; n];
    loop {
        // r = b - A x
        op.apply(&x, &mut work);
        let mut r: Vec<f64> = b.iter().zip(&work).map(|(bi, wi)| bi - wi).collect();
        let r_norm = norm(&r);
        history.push(r_norm / b_norm);
        if r_norm / b_norm <= tol {
            return Ok((
                x,
                SolveStats {
                    iterations: total_iter,
                    residual: r_norm / b_norm,
                    history,
                },
            ));
        }
        if total_iter >= max_iterations {
            return Err(Error::SolverFailure {
                residual: r_norm / b_norm,
                iterations: total_iter,
                history,
            });
        }

        let m = restart.min(n);
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
        let mut hess = vec![vec![0.0; m + 1]; m];
        for ri in r.iter_mut() {
            *ri /= r_norm;
        }
        basis.push(r);
        let mut g = vec![0.0; m + 1];
        g[0] = r_norm;
        let mut cs = vec![0.0; m];
        let mut sn = vec![0.0; m];

        let mut k = 0;
        while k < m && total_iter < max_iterations {
            total_iter += 1;
            op.apply(&basis[k], &mut work);
            let mut w = work.clone();
            for j in 0..=k {
                let hjk = dot(&basis[j], &w);
                hess[k][j] = hjk;
                for i in 0..n {
                    w[i] -= hjk * basis[j][i];
                }
            }
            let w_norm = norm(&w);
            hess[k][k + 1] = w_norm;
            let breakdown = w_norm <= 1e-300;
            if !breakdown {
                for wi in w.iter_mut() {
                    *wi /= w_norm;
                }
                basis.push(w);
            }
            for j in 0..k {
                let tmp = cs[j] * hess[k][j] + sn[j] * hess[k][j + 1];
                hess[k][j + 1] = -sn[j] * hess[k][j] + cs[j] * hess[k][j + 1];
                hess[k][j] = tmp;
            }
            let (c, s) = givens(hess[k][k], hess[k][k + 1]);
            cs[k] = c;
            sn[k] = s;
            hess[k][k] = c * hess[k][k] + s * hess[k][k + 1];
            hess[k][k + 1] = 0.0;
            let tmp = c * g[k] + s * g[k + 1];
            g[k + 1] = -s * g[k] + c * g[k + 1];
            g[k] = tmp;
            k += 1;
            history.push(g[k].abs() / b_norm);
            if g[k].abs() / b_norm <= tol || breakdown {
                break;
            }
        }

        // back-substitute and update x
        let mut y = vec![0.0; k];
        for i in (0..k).rev() {
            let mut sum = g[i];
            for j in i + 1..k {
                sum -= hess[j][i] * y[j];
            }
            if hess[i][i].abs() > 1e-300 {
                y[i] = sum / hess[i][i];
            }
        }
        for j in 0..k {
            for i in 0..n {
                x[i] += basis[j][i] * y[j];
            }
        }
    }
}

/// Dense LU solve; the termination guarantee behind the Krylov path.
pub fn solve_dense(a: &DMatrix<f64>, b: &[f64]) -> Result<Vec<f64>> {
    let lu = a.clone().lu();
    let rhs = DVector::from_column_slice(b);
    match lu.solve(&rhs) {
        Some(x) => Ok(x.as_slice().to_vec()),
        None => Err(Error::SolverFailure {
            residual: f64::INFINITY,
            iterations: 0,
            history: vec![],
        }),
    }
}

fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

fn givens(a: f64, b: f64) -> (f64, f64) {
    if b == 0.0 {
        (1.0, 0.0)
    } else {
        let r = a.hypot(b);
        (a / r, b / r)
    }
}
