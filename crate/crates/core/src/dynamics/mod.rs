//! Right-hand side of the evolution for `(z, ϖ)`.
//!
//! The curve moves with `z_t = BR(z,ϖ) + c ∂_α z`, where the tangential speed `c` keeps
//! `|∂_α z|²` independent of `α`. The sheet strength obeys a second-kind equation
//! `(I + A_ρ T) ϖ_t = R`; the part of `∂_t BR` that depends on `ϖ_t` sits inside `T`.
//!
//! With `A_ρ = 1` the right-hand side is assembled in the transport form
//!
//! `R = -2 K(ϖ, z_t)·∂z - ∂(φ²) + c A' - 2g ∂z₂ [+ 2ε|∂z| ∂²φ]`,
//!
//! where `K` is the `z_t` part of `∂_t BR` and `φ = ϖ/(2|∂z|) - c|∂z|`. Other Atwood
//! numbers use
//!
//! `R = A_ρ(-2K·∂z - ∂(ϖ²/4|∂z|²) + 2c ∂BR·∂z - 2g ∂z₂) + ∂(cϖ) [+ 2ε|∂z| ∂²φ]`.
//!
//! Both agree when `|∂_α z|` is uniform.

#[cfg(test)]
mod tests;

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{Contour, ScalarField, VectorField};
use crate::singular_ops::{BRKernelEval, SecondKindOperator};

/// Physical and numerical parameters of the evolution.
#[derive(Clone, Debug, PartialEq)]
pub struct Params {
    /// Atwood number `(ρ₂ - ρ₁)/(ρ₂ + ρ₁)`; 1 for water under vacuum.
    pub a_rho: f64,
    pub g: f64,
    pub rho2: f64,
    pub epsilon: f64,
    /// Must be set to run with `a_rho = 0`, the ill-posed vortex sheet.
    pub allow_kelvin_helmholtz: bool,
    pub solver_tol: f64,
    pub solver_max_iter: usize,
    pub filter_threshold: f64,
    pub uniformity_tol: f64,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            a_rho: 1.0,
            g: 1.0,
            rho2: 1.0,
            epsilon: 0.0,
            allow_kelvin_helmholtz: false,
            solver_tol: 1e-12,
            solver_max_iter: 200,
            filter_threshold: 1e-13,
            uniformity_tol: 1e-6,
        }
    }
}

impl Params {
    /// Checks ranges. Negative `g` is accepted: it models the heavy fluid on top.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParam(m));
        if !(-1.0..=1.0).contains(&self.a_rho) {
            return bad(format!("a_rho must lie in [-1, 1], got {}", self.a_rho));
        }
        if self.a_rho == 0.0 && !(self.allow_kelvin_helmholtz && self.epsilon > 0.0) {
            return bad("a_rho = 0 is the Kelvin-Helmholtz vortex sheet; it needs allow_kelvin_helmholtz and epsilon > 0".into());
        }
        if !self.g.is_finite() {
            return bad(format!("g must be finite, got {}", self.g));
        }
        if !(self.rho2 > 0.0 && self.rho2.is_finite()) {
            return bad(format!("rho2 must be positive, got {}", self.rho2));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return bad(format!("epsilon must be >= 0, got {}", self.epsilon));
        }
        if !(self.solver_tol > 0.0) {
            return bad(format!("solver_tol must be positive, got {}", self.solver_tol));
        }
        if self.solver_max_iter == 0 {
            return bad("solver_max_iter must be at least 1".into());
        }
        if !(self.filter_threshold >= 0.0) {
            return bad(format!("filter_threshold must be >= 0, got {}", self.filter_threshold));
        }
        if !(self.uniformity_tol > 0.0) {
            return bad(format!("uniformity_tol must be positive, got {}", self.uniformity_tol));
        }
        Ok(())
    }
}

/// The evolved unknowns at time `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct SimState {
    pub t: f64,
    pub z: Contour,
    pub omega: ScalarField,
}

impl SimState {
    pub fn new(t: f64, z: Contour, omega: ScalarField) -> Result<Self> {
        if z.len() != omega.len() {
            return Err(Error::GridMismatch(z.len(), omega.len()));
        }
        Ok(SimState { t, z, omega })
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        let (x, y) = self.z.samples();
        self.omega.is_finite() && x.iter().chain(y).all(|v| v.is_finite())
    }
}

/// Intermediate fields from one derivative evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct Aux {
    pub br: VectorField,
    pub c: ScalarField,
    pub b: f64,
    pub a_prime: f64,
    pub phi: ScalarField,
    pub solver_residual: f64,
    pub solver_iters: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateDerivative {
    pub z_t: VectorField,
    pub omega_t: ScalarField,
    pub aux: Aux,
}

/// `(∂_α z/|∂_α z|²)·∂_α BR` and `∂_α z·∂_α BR`.
fn speed_integrands(z: &Contour, br: &VectorField) -> (Vec<f64>, Vec<f64>) {
    let grid = z.grid();
    let dbr = VectorField::new(grid.derivative(&br.x, 1), grid.derivative(&br.y, 1));
    let tangent = z.tangent();
    let stretch = tangent.dot(&dbr).0;
    let sq = tangent.dot(&tangent);
    let weighted = stretch.iter().zip(sq.iter()).map(|(s, a)| s / a).collect();
    (weighted, stretch)
}

/// Tangential speed keeping `|∂_α z|²` constant in `α`:
/// `c(α) = ((α+π)/2π) ∫ G - ∫_{-π}^{α} G` with `G = (∂z/|∂z|²)·∂BR`.
pub fn tangential_speed(z: &Contour, br: &VectorField) -> ScalarField {
    let (g, _) = speed_integrands(z, br);
    let anti = z.grid().antiderivative(&g);
    // ∫_{-π}^{α} G = B (α+π) + G̃(α) - G̃(-π); the linear terms cancel on the grid.
    let start = anti[0];
    ScalarField(anti.iter().map(|a| start - a).collect())
}

/// Evaluates the defining formula of `c` at an arbitrary `α`, linear part included.
///
/// On the grid this matches [`tangential_speed`]; at `α = ±π` it exposes the
/// periodicity of the construction.
pub fn tangential_speed_at(z: &Contour, br: &VectorField, alpha: f64) -> f64 {
    let (g, _) = speed_integrands(z, br);
    let grid = z.grid();
    let b = grid.mean(&g);
    let anti = grid.antiderivative(&g);
    let total = 2.0 * PI * b;
    let running = b * (alpha + PI) + grid.interpolate(&anti, alpha) - grid.interpolate(&anti, -PI);
    (alpha + PI) / (2.0 * PI) * total - running
}

/// `B = (1/2π)∫(∂z/|∂z|²)·∂BR` and `A' = (1/π)∫∂z·∂BR`.
pub fn b_and_a_prime(z: &Contour, br: &VectorField) -> (f64, f64) {
    let (g, stretch) = speed_integrands(z, br);
    let grid = z.grid();
    (grid.mean(&g), 2.0 * grid.mean(&stretch))
}

/// `φ = ϖ/(2|∂_α z|) - c|∂_α z|`.
pub fn phi_from_state(z: &Contour, omega: &[f64], c: &[f64]) -> ScalarField {
    let speed = z.tangent().norms();
    ScalarField(
        (0..z.len())
            .map(|j| omega[j] / (2.0 * speed[j]) - c[j] * speed[j])
            .collect(),
    )
}

/// Everything the right-hand side needs, computed once per evaluation.
struct Frame<'a> {
    z: &'a Contour,
    omega: &'a [f64],
    kernels: &'a BRKernelEval,
    tangent: &'a VectorField,
    br: &'a VectorField,
    z_t: &'a VectorField,
    c: &'a [f64],
    phi: &'a [f64],
    a_prime: f64,
}

fn assemble_rhs(f: &Frame, params: &Params, transport: bool) -> Vec<f64> {
    let grid = f.z.grid();
    let n = f.z.len();
    let d = |v: &[f64]| grid.derivative(v, 1);
    let k_dot = f.kernels.dt_kernel_part(f.omega, f.z_t).dot(f.tangent);
    let sq = f.tangent.dot(f.tangent);

    let mut rhs = if transport {
        let phi_sq: Vec<f64> = f.phi.iter().map(|p| p * p).collect();
        let dphi_sq = d(&phi_sq);
        (0..n)
            .map(|j| {
                -2.0 * k_dot[j] - dphi_sq[j] + f.c[j] * f.a_prime - 2.0 * params.g * f.tangent.y[j]
            })
            .collect::<Vec<f64>>()
    } else {
        let a = params.a_rho;
        let q: Vec<f64> = (0..n).map(|j| f.omega[j] * f.omega[j] / (4.0 * sq[j])).collect();
        let dq = d(&q);
        let c_omega: Vec<f64> = (0..n).map(|j| f.c[j] * f.omega[j]).collect();
        let dc_omega = d(&c_omega);
        let dbr = VectorField::new(d(&f.br.x), d(&f.br.y));
        let stretch = f.tangent.dot(&dbr);
        (0..n)
            .map(|j| {
                a * (-2.0 * k_dot[j] - dq[j] + 2.0 * f.c[j] * stretch[j]
                    - 2.0 * params.g * f.tangent.y[j])
                    + dc_omega[j]
            })
            .collect()
    };

    if params.epsilon > 0.0 {
        let d2phi = grid.derivative(f.phi, 2);
        for j in 0..n {
            rhs[j] += params.epsilon * 2.0 * sq[j].sqrt() * d2phi[j];
        }
    }
    rhs
}

/// Right-hand side `R` of `(I + A_ρ T) ϖ_t = R`, including the `ε` term when set.
pub fn omega_rhs(
    z: &Contour,
    omega: &[f64],
    z_t: &VectorField,
    c: &[f64],
    phi: &[f64],
    params: &Params,
) -> Result<ScalarField> {
    for len in [omega.len(), z_t.len(), c.len(), phi.len()] {
        if len != z.len() {
            return Err(Error::GridMismatch(z.len(), len));
        }
    }
    let kernels = BRKernelEval::new(z)?;
    let tangent = z.tangent();
    let br = kernels.birkhoff_rott(omega);
    let (_, a_prime) = b_and_a_prime(z, &br);
    let frame = Frame {
        z,
        omega,
        kernels: &kernels,
        tangent: &tangent,
        br: &br,
        z_t,
        c,
        phi,
        a_prime,
    };
    Ok(ScalarField(assemble_rhs(&frame, params, params.a_rho == 1.0)))
}

/// `(z_t, ϖ_t)` together with the intermediate fields.
pub fn state_derivative(state: &SimState, params: &Params) -> Result<StateDerivative> {
    let z = &state.z;
    if z.len() != state.omega.len() {
        return Err(Error::GridMismatch(z.len(), state.omega.len()));
    }
    let kernels = BRKernelEval::new(z)?;
    let tangent = z.tangent();
    let br = kernels.birkhoff_rott(&state.omega);
    let c = tangential_speed(z, &br);
    let (b, a_prime) = b_and_a_prime(z, &br);
    let z_t = br.add_scaled(&c, &tangent);
    let phi = phi_from_state(z, &state.omega, &c);

    let frame = Frame {
        z,
        omega: &state.omega,
        kernels: &kernels,
        tangent: &tangent,
        br: &br,
        z_t: &z_t,
        c: &c,
        phi: &phi,
        a_prime,
    };
    let rhs = assemble_rhs(&frame, params, params.a_rho == 1.0);
    let sol = SecondKindOperator::new(&kernels, &tangent, params.a_rho).solve(
        &rhs,
        params.solver_tol,
        params.solver_max_iter,
    )?;

    Ok(StateDerivative {
        z_t,
        omega_t: sol.x,
        aux: Aux {
            br,
            c,
            b,
            a_prime,
            phi,
            solver_residual: sol.residual,
            solver_iters: sol.iterations,
        },
    })
}
