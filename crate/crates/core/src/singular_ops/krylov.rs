//! Restarted GMRES for real, matrix-free operators.

use crate::error::{Error, Result};
use crate::geometry::max_abs;

#[derive(Clone, Debug, PartialEq)]
pub struct KrylovSolution {
    pub x: Vec<f64>,
    /// `‖A x - b‖∞ / ‖b‖∞` of the returned iterate (0 for `b = 0`).
    pub residual: f64,
    pub iterations: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Solves `A x = b` with GMRES(`restart`), stopping once `‖A x - b‖∞ <= tol ‖b‖∞`
/// holds for the true (recomputed) residual.
pub fn gmres<F>(mut apply: F, b: &[f64], tol: f64, restart: usize, max_iter: usize) -> Result<KrylovSolution>
where
    F: FnMut(&[f64]) -> Vec<f64>,
{
    let n = b.len();
    let b_inf = max_abs(b);
    let mut x = vec![0.0; n];
    if b_inf == 0.0 {
        return Ok(KrylovSolution {
            x,
            residual: 0.0,
            iterations: 0,
        });
    }
    let target = tol * b_inf;
    let restart = restart.clamp(1, n);
    let mut iterations = 0;

    loop {
        let ax = apply(&x);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let r_inf = max_abs(&r);
        if r_inf <= target {
            return Ok(KrylovSolution {
                x,
                residual: r_inf / b_inf,
                iterations,
            });
        }
        if iterations >= max_iter {
            return Err(Error::NoConvergence {
                residual: r_inf / b_inf,
                iterations,
            });
        }

        let beta = norm2(&r);
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(restart + 1);
        basis.push(r.iter().map(|v| v / beta).collect());
        // Hessenberg columns after Givens rotation
        let mut h: Vec<Vec<f64>> = Vec::with_capacity(restart);
        let mut cs: Vec<f64> = Vec::with_capacity(restart);
        let mut sn: Vec<f64> = Vec::with_capacity(restart);
        let mut g = vec![0.0; restart + 1];
        g[0] = beta;

        let mut cols = 0;
        while cols < restart && iterations < max_iter {
            let mut w = apply(&basis[cols]);
            let mut col = vec![0.0; cols + 2];
            // modified Gram-Schmidt, twice for stability
            for _ in 0..2 {
                for (i, v) in basis.iter().enumerate() {
                    let hij = dot(v, &w);
                    col[i] += hij;
                    w.iter_mut().zip(v).for_each(|(wk, vk)| *wk -= hij * vk);
                }
            }
            let wn = norm2(&w);
            col[cols + 1] = wn;

            for i in 0..cols {
                let t = cs[i] * col[i] + sn[i] * col[i + 1];
                col[i + 1] = -sn[i] * col[i] + cs[i] * col[i + 1];
                col[i] = t;
            }
            let (c, s) = givens(col[cols], col[cols + 1]);
            col[cols] = c * col[cols] + s * col[cols + 1];
            col[cols + 1] = 0.0;
            g[cols + 1] = -s * g[cols];
            g[cols] *= c;
            cs.push(c);
            sn.push(s);
            h.push(col);

            iterations += 1;
            cols += 1;

            if wn <= f64::EPSILON * beta || g[cols].abs() <= 0.5 * target {
                break;
            }
            basis.push(w.iter().map(|v| v / wn).collect());
        }

        // back substitution on the triangular system
        let mut y = vec![0.0; cols];
        for i in (0..cols).rev() {
            let mut acc = g[i];
            for (k, yk) in y.iter().enumerate().skip(i + 1) {
                acc -= h[k][i] * yk;
            }
            y[i] = acc / h[i][i];
        }
        for (i, yi) in y.iter().enumerate() {
            x.iter_mut().zip(&basis[i]).for_each(|(xk, vk)| *xk += yi * vk);
        }
    }
}

fn givens(a: f64, b: f64) -> (f64, f64) {
    if b == 0.0 {
        (1.0, 0.0)
    } else {
        let r = a.hypot(b);
        (a / r, b / r)
    }
}
