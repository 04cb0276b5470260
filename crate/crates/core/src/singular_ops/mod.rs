//! Principal-value Birkhoff–Rott quadrature, its time derivative, the operator
//! `T(u) = 2 BR(z,u)·∂_α z`, and the second-kind solve `(I + A_ρ T) x = b`.
//!
//! All PV integrals use the alternating-point trapezoidal rule: the target node `j`
//! only sees source nodes `k` with `j - k` odd, each with weight `2h`. The singular
//! diagonal is skipped outright, and the rule is spectrally accurate for periodic
//! integrands with an odd singularity.
//!
//! Kernels are evaluated in complex form. Writing `Δ = z(α) - z(β)` as a complex
//! number, the conjugate velocity `u - iv` is `Σ κ(Δ) ϖ(β)` with
//!
//! * closed contour: `κ(Δ) = 1 / (2πi Δ)`,
//! * horizontally periodic: `κ(Δ) = cot(Δ/2) / (4πi)` (image sum over all periods),
//!
//! and the `z_t` part of `∂_t BR` uses the complex derivative `κ'(Δ) Δ_t`.

mod krylov;
pub mod oracles;

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

pub use krylov::{gmres, KrylovSolution};

use crate::error::{Error, Result};
use crate::geometry::{Contour, GeometryKind, ScalarField, VectorField};

/// Krylov subspace size between restarts.
const GMRES_RESTART: usize = 40;

/// Precomputed quadrature kernels for one contour.
///
/// Row `j`, slot `m` holds the weighted kernel for source `k = j - (2m+1) mod N`.
#[derive(Clone, Debug)]
pub struct BRKernelEval {
    n: usize,
    kind: GeometryKind,
    kernel: Vec<Complex64>,
    dkernel: Vec<Complex64>,
}

impl BRKernelEval {
    pub fn new(z: &Contour) -> Result<Self> {
        let n = z.len();
        let half = n / 2;
        let weight = 2.0 * z.grid().spacing();
        let kind = z.kind();

        let rows: Vec<Result<(Vec<Complex64>, Vec<Complex64>)>> = (0..n)
            .into_par_iter()
            .map(|j| {
                let mut kr = Vec::with_capacity(half);
                let mut dk = Vec::with_capacity(half);
                for m in 0..half {
                    let off = 2 * m + 1;
                    let d = z.chord(j, off);
                    if d[0] == 0.0 && d[1] == 0.0 {
                        return Err(Error::CurveDegenerate {
                            i: j,
                            j: (j + n - off) % n,
                        });
                    }
                    let delta = Complex64::new(d[0], d[1]);
                    let (k, kp) = kernel_pair(kind, delta);
                    kr.push(weight * k);
                    dk.push(weight * kp);
                }
                Ok((kr, dk))
            })
            .collect();

        let mut kernel = Vec::with_capacity(n * half);
        let mut dkernel = Vec::with_capacity(n * half);
        for r in rows {
            let (k, d) = r?;
            kernel.extend(k);
            dkernel.extend(d);
        }
        Ok(BRKernelEval {
            n,
            kind,
            kernel,
            dkernel,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn kind(&self) -> GeometryKind {
        self.kind
    }

    #[inline]
    fn source(&self, j: usize, m: usize) -> usize {
        (j + self.n - (2 * m + 1)) % self.n
    }

    /// `BR(z, u)` at every node.
    pub fn birkhoff_rott(&self, u: &[f64]) -> VectorField {
        assert_eq!(u.len(), self.n);
        let half = self.n / 2;
        let conj_vel: Vec<Complex64> = (0..self.n)
            .into_par_iter()
            .map(|j| {
                let row = &self.kernel[j * half..(j + 1) * half];
                let mut acc = Complex64::new(0.0, 0.0);
                for (m, k) in row.iter().enumerate() {
                    acc += k * u[self.source(j, m)];
                }
                acc
            })
            .collect();
        from_conjugate(conj_vel)
    }

    /// The `z_t` part of `∂_t BR(z, u)`:
    /// `(1/2π) PV∫ [Δz_t^⊥/|Δz|² - 2Δz^⊥ (Δz·Δz_t)/|Δz|⁴] u dβ` (image-summed when periodic).
    pub fn dt_kernel_part(&self, u: &[f64], z_t: &VectorField) -> VectorField {
        assert_eq!(u.len(), self.n);
        assert_eq!(z_t.len(), self.n);
        let half = self.n / 2;
        let conj_vel: Vec<Complex64> = (0..self.n)
            .into_par_iter()
            .map(|j| {
                let row = &self.dkernel[j * half..(j + 1) * half];
                let mut acc = Complex64::new(0.0, 0.0);
                for (m, k) in row.iter().enumerate() {
                    let s = self.source(j, m);
                    let dzt = Complex64::new(z_t.x[j] - z_t.x[s], z_t.y[j] - z_t.y[s]);
                    acc += k * dzt * u[s];
                }
                acc
            })
            .collect();
        from_conjugate(conj_vel)
    }

    /// Full `∂_t BR = BR(z, u_t) + (z_t part)`.
    pub fn dt_birkhoff_rott(&self, u: &[f64], z_t: &VectorField, u_t: &[f64]) -> VectorField {
        let a = self.birkhoff_rott(u_t);
        let b = self.dt_kernel_part(u, z_t);
        a.axpy(1.0, &b)
    }

    /// `T(u) = 2 BR(z,u)·∂_α z` given the contour tangent.
    pub fn apply_t(&self, u: &[f64], tangent: &VectorField) -> ScalarField {
        let br = self.birkhoff_rott(u);
        let mut t = br.dot(tangent);
        t.iter_mut().for_each(|v| *v *= 2.0);
        t
    }
}

/// `(κ(Δ), κ'(Δ))` for the conjugate-velocity kernel of the given geometry.
#[inline]
fn kernel_pair(kind: GeometryKind, delta: Complex64) -> (Complex64, Complex64) {
    let i = Complex64::i();
    match kind {
        GeometryKind::ClosedContour => {
            let inv = 1.0 / delta;
            let k = inv / (2.0 * PI * i);
            (k, -k * inv)
        }
        GeometryKind::HorizontallyPeriodic => {
            let cot = 1.0 / (delta * 0.5).tan();
            let k = cot / (4.0 * PI * i);
            // d/dΔ cot(Δ/2) = -(1 + cot²)/2
            let kp = -(1.0 + cot * cot) / (8.0 * PI * i);
            (k, kp)
        }
    }
}

fn from_conjugate(w: Vec<Complex64>) -> VectorField {
    let (x, y) = w.into_iter().map(|c| (c.re, -c.im)).unzip();
    VectorField::new(x, y)
}

fn check_grid(z: &Contour, len: usize) -> Result<()> {
    if z.len() == len {
        Ok(())
    } else {
        Err(Error::GridMismatch(z.len(), len))
    }
}

/// `BR(z,u)(α_j) = (1/2π) PV∫ (z(α_j)-z(β))^⊥ / |z(α_j)-z(β)|² u(β) dβ`.
pub fn birkhoff_rott(z: &Contour, u: &[f64]) -> Result<VectorField> {
    check_grid(z, u.len())?;
    Ok(BRKernelEval::new(z)?.birkhoff_rott(u))
}

/// `∂_t BR(z, u)` for the motion `(z_t, u_t)`.
pub fn dt_birkhoff_rott(z: &Contour, u: &[f64], z_t: &VectorField, u_t: &[f64]) -> Result<VectorField> {
    check_grid(z, u.len())?;
    check_grid(z, u_t.len())?;
    check_grid(z, z_t.len())?;
    Ok(BRKernelEval::new(z)?.dt_birkhoff_rott(u, z_t, u_t))
}

/// `T(u) = 2 BR(z,u)·∂_α z`.
pub fn apply_t(z: &Contour, u: &[f64]) -> Result<ScalarField> {
    check_grid(z, u.len())?;
    Ok(BRKernelEval::new(z)?.apply_t(u, &z.tangent()))
}

/// `(I + A_ρ T)` for a fixed contour, ready for repeated solves.
#[derive(Clone, Debug)]
/// `I + A_ρ T` on a fixed curve.
///
/// On a closed contour the odd-offset quadrature gives `T` exact eigenvalues `±1`:
/// left eigenvector `(-1)^j` for `-1` (the even/odd node decoupling) and the constant
/// for `+1` (`∫T u = ∫u`). At `A_ρ = ±1` the operator is therefore singular. We solve in
/// the complement of that left null vector: its component is removed from `b` and the
/// rank-one term `u uᵀ x` is added to the operator, which forces `uᵀ x = 0`.
pub struct SecondKindOperator<'a> {
    kernels: &'a BRKernelEval,
    tangent: &'a VectorField,
    a_rho: f64,
    deflate: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SecondKindSolution {
    pub x: ScalarField,
    /// Achieved `‖x + A_ρ T x - b‖∞ / ‖b‖∞`.
    pub residual: f64,
    pub iterations: usize,
}

impl<'a> SecondKindOperator<'a> {
    pub fn new(kernels: &'a BRKernelEval, tangent: &'a VectorField, a_rho: f64) -> Self {
        let n = kernels.len();
        let unit = 1.0 / (n as f64).sqrt();
        let deflate = match kernels.kind() {
            GeometryKind::ClosedContour if a_rho == 1.0 => Some(
                (0..n)
                    .map(|j| if j % 2 == 0 { unit } else { -unit })
                    .collect(),
            ),
            GeometryKind::ClosedContour if a_rho == -1.0 => Some(vec![unit; n]),
            _ => None,
        };
        SecondKindOperator {
            kernels,
            tangent,
            a_rho,
            deflate,
        }
    }

    /// The plain operator `x + A_ρ T x`, without deflation.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        if self.a_rho == 0.0 {
            return x.to_vec();
        }
        let t = self.kernels.apply_t(x, self.tangent);
        x.iter().zip(t.iter()).map(|(xi, ti)| xi + self.a_rho * ti).collect()
    }

    fn apply_deflated(&self, x: &[f64]) -> Vec<f64> {
        let mut y = self.apply(x);
        if let Some(u) = &self.deflate {
            let c: f64 = u.iter().zip(x).map(|(a, b)| a * b).sum();
            y.iter_mut().zip(u).for_each(|(yi, ui)| *yi += c * ui);
        }
        y
    }

    pub fn solve(&self, b: &[f64], tol: f64, max_iter: usize) -> Result<SecondKindSolution> {
        if !(tol > 0.0) {
            return Err(Error::InvalidParam(format!("solver tolerance must be positive, got {tol}")));
        }
        if self.a_rho == 0.0 {
            return Ok(SecondKindSolution {
                x: ScalarField(b.to_vec()),
                residual: 0.0,
                iterations: 0,
            });
        }
        let mut rhs = b.to_vec();
        if let Some(u) = &self.deflate {
            let c: f64 = u.iter().zip(b).map(|(a, b)| a * b).sum();
            rhs.iter_mut().zip(u).for_each(|(r, ui)| *r -= c * ui);
        }
        let sol = gmres(|v| self.apply_deflated(v), &rhs, tol, GMRES_RESTART, max_iter)?;
        Ok(SecondKindSolution {
            x: ScalarField(sol.x),
            residual: sol.residual,
            iterations: sol.iterations,
        })
    }
}

/// Solves `(I + A_ρ T) x = b` matrix-free to `‖residual‖∞ <= tol ‖b‖∞`.
pub fn solve_second_kind(
    z: &Contour,
    a_rho: f64,
    b: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<SecondKindSolution> {
    check_grid(z, b.len())?;
    let kernels = BRKernelEval::new(z)?;
    let tangent = z.tangent();
    SecondKindOperator::new(&kernels, &tangent, a_rho).solve(b, tol, max_iter)
}
