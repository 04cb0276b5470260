//! Closed-form checks of the quadrature on the unit circle and the flat line.

use num_complex::Complex64;

use super::{apply_t, birkhoff_rott, solve_second_kind};
use crate::error::Result;
use crate::geometry::{Contour, GeometryKind, Grid};

#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult {
    pub name: &'static str,
    pub error: f64,
    pub tolerance: f64,
}

impl OracleResult {
    pub fn passed(&self) -> bool {
        self.error < self.tolerance
    }
}

pub fn unit_circle(n: usize) -> Result<Contour> {
    let g = Grid::new(n)?;
    let x = g.nodes().iter().map(|a| a.cos()).collect();
    let y = g.nodes().iter().map(|a| a.sin()).collect();
    Contour::from_samples(g, GeometryKind::ClosedContour, x, y)
}

/// Exact BR on the unit circle for `ϖ = 1/(b - cos α)`, `b > 1`.
///
/// `ϖ = Σ r^|n| e^{inα} / √(b²-1)` with `r = b - √(b²-1)`; each Fourier mode of a
/// sheet on the circle has a closed-form principal value.
pub fn poisson_circle_velocity(alpha: f64, b: f64) -> [f64; 2] {
    let s = (b * b - 1.0).sqrt();
    let r = b - s;
    let zeta = Complex64::from_polar(1.0, alpha);
    let w = Complex64::i() / (2.0 * s) * (r / (1.0 - r * zeta) - 1.0 / (zeta - r));
    [w.re, -w.im]
}

/// Max BR error on the circle for the Poisson density.
pub fn poisson_circle_error(n: usize, b: f64) -> Result<f64> {
    let z = unit_circle(n)?;
    let nodes = z.grid().nodes();
    let u: Vec<f64> = nodes.iter().map(|a| 1.0 / (b - a.cos())).collect();
    let br = birkhoff_rott(&z, &u)?;
    Ok(nodes
        .iter()
        .enumerate()
        .map(|(j, &a)| {
            let e = poisson_circle_velocity(a, b);
            (br.x[j] - e[0]).abs().max((br.y[j] - e[1]).abs())
        })
        .fold(0.0, f64::max))
}

fn max_abs(v: impl Iterator<Item = f64>) -> f64 {
    v.fold(0.0, |m, x| m.max(x.abs()))
}

/// Runs every oracle at `N` nodes.
pub fn operator_oracles(n: usize) -> Result<Vec<OracleResult>> {
    let circle = unit_circle(n)?;
    let grid = circle.grid().clone();
    let nodes = grid.nodes();
    let flat = Contour::flat(grid.clone());
    let mut out = Vec::new();

    // constant sheet on the circle: BR = (ϖ₀/2) ∂_α z
    let w0 = 1.0;
    let br = birkhoff_rott(&circle, &vec![w0; n])?;
    let err = max_abs(nodes.iter().enumerate().flat_map(|(j, a)| {
        [br.x[j] + 0.5 * w0 * a.sin(), br.y[j] - 0.5 * w0 * a.cos()]
    }));
    out.push(OracleResult {
        name: "br_circle",
        error: err,
        tolerance: 1e-10,
    });

    let t = apply_t(&circle, &vec![w0; n])?;
    out.push(OracleResult {
        name: "t_circle_const",
        error: max_abs(t.iter().map(|v| v - w0)),
        tolerance: 1e-10,
    });

    let u: Vec<f64> = nodes.iter().map(|a| (3.0 * a).cos() + 0.5 * a.sin() + 0.25).collect();
    let t = apply_t(&flat, &u)?;
    out.push(OracleResult {
        name: "t_flat_zero",
        error: t.max_abs(),
        tolerance: 1e-12,
    });

    // residual of the second-kind solve, measured against the original right-hand side
    let wavy = Contour::from_samples(
        grid.clone(),
        GeometryKind::HorizontallyPeriodic,
        vec![0.0; n],
        nodes.iter().map(|a| 0.1 * a.cos()).collect(),
    )?;
    let b: Vec<f64> = nodes.iter().map(|a| a.cos().exp() + (2.0 * a).sin()).collect();
    let b_inf = max_abs(b.iter().copied());
    let mut worst = 0.0_f64;
    for (z, a_rho) in [(&circle, 1.0), (&circle, 0.5), (&wavy, 1.0), (&wavy, -0.5)] {
        let s = solve_second_kind(z, a_rho, &b, 1e-13, 400)?;
        let t = apply_t(z, &s.x)?;
        let r = max_abs((0..n).map(|j| s.x[j] + a_rho * t[j] - b[j]));
        worst = worst.max(r / b_inf);
    }
    out.push(OracleResult {
        name: "solve_residual",
        error: worst,
        tolerance: 1e-12,
    });

    out.push(OracleResult {
        name: "br_circle_poisson",
        error: poisson_circle_error(n, 1.25)?,
        // the odd-offset rule sees N/2 sources, so the error goes like r^(N/2), r = 1/2
        tolerance: 1e-13 + 4.0 * 0.5_f64.powi(n as i32 / 2),
    });
    Ok(out)
}
