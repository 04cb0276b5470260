//! Rayleigh–Taylor function, energies and conservation monitors.
//!
//! `σ` is the normal pressure gradient on the interface; the evolution is only
//! well posed while `m(t) = min σ > 0`.


use crate::dynamics::{Params, SimState, StateDerivative};
use crate::error::{Error, Result};
use crate::geometry::{arc_chord, tangent_uniformity, Contour, GeometryKind, ScalarField, VectorField};
use crate::singular_ops::BRKernelEval;

/// One row of the diagnostics time series.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DiagRecord {
    pub t: f64,
    /// Mean of `|∂_α z|²`.
    pub a: f64,
    pub b: f64,
    pub min_sigma: f64,
    pub arc_chord: f64,
    pub energy: f64,
    pub e_rt: f64,
    pub mean_omega: f64,
    pub max_speed: f64,
    pub uniformity: f64,
    pub solver_residual: f64,
    pub solver_iters: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyReport {
    pub energy: f64,
    /// `E^p + 1/m`, or `+∞` when `m <= 0`.
    pub e_rt: f64,
    /// The `σ`-weighted curvature term, reported even when it is negative.
    pub sigma_term: f64,
    /// `‖F(z)‖∞`, computed along the way.
    pub arc_chord: f64,
    pub valid: bool,
}

/// Energy order and the exponent in `E_RT`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyOrder {
    pub k: usize,
    pub p: f64,
}

impl Default for EnergyOrder {
    fn default() -> Self {
        EnergyOrder { k: 4, p: 2.0 }
    }
}

fn d1(z: &Contour, f: &[f64]) -> Vec<f64> {
    z.grid().derivative(f, 1)
}

/// `σ` from the solved derivative and `∂_t BR`.
///
/// `A_ρ = 1` uses
/// `σ/ρ² = (∂_tBR + (φ/|∂z|)∂BR)·∂^⊥z + ½(ϖ/|∂z|²)(∂z_t + (φ/|∂z|)∂²z)·∂^⊥z + g∂z₁`;
/// other Atwood numbers use
/// `σ/(ρ²+ρ¹) = A_ρ(∂_tBR + ϖ²/(4|∂z|⁴)∂²z)·∂^⊥z + (ϖ/|∂z|² - A_ρc)∂BR·∂^⊥z + gA_ρ∂z₁`
/// with `ρ¹ = ρ²(1-A_ρ)/(1+A_ρ)`.
pub fn sigma_field(
    state: &SimState,
    deriv: &StateDerivative,
    dt_br: &VectorField,
    params: &Params,
) -> Result<ScalarField> {
    let general = params.a_rho != 1.0;
    sigma_with(state, deriv, dt_br, params, general)
}

pub(crate) fn sigma_with(
    state: &SimState,
    deriv: &StateDerivative,
    dt_br: &VectorField,
    params: &Params,
    general: bool,
) -> Result<ScalarField> {
    let z = &state.z;
    let n = z.len();
    if dt_br.len() != n || deriv.z_t.len() != n {
        return Err(Error::GridMismatch(n, dt_br.len().min(deriv.z_t.len())));
    }
    let t = z.tangent();
    let t2 = z.derivative(2);
    let br = &deriv.aux.br;
    let dbr = VectorField::new(d1(z, &br.x), d1(z, &br.y));
    let sq = t.dot(&t);
    let omega = &state.omega;
    let g = params.g;

    if !general {
        let phi = &deriv.aux.phi;
        let dzt = VectorField::new(d1(z, &deriv.z_t.x), d1(z, &deriv.z_t.y));
        let out = (0..n)
            .map(|j| {
                let nrm = [-t.y[j], t.x[j]];
                let dot_n = |v: [f64; 2]| v[0] * nrm[0] + v[1] * nrm[1];
                let speed = sq[j].sqrt();
                let q = phi[j] / speed;
                let first = dot_n([dt_br.x[j] + q * dbr.x[j], dt_br.y[j] + q * dbr.y[j]]);
                let second = 0.5 * omega[j] / sq[j]
                    * dot_n([dzt.x[j] + q * t2.x[j], dzt.y[j] + q * t2.y[j]]);
                params.rho2 * (first + second + g * t.x[j])
            })
            .collect();
        return Ok(ScalarField(out));
    }

    let a = params.a_rho;
    if a <= -1.0 {
        return Err(Error::InvalidParam("sigma is undefined for a_rho = -1 (rho1 unbounded)".into()));
    }
    let scale = 2.0 * params.rho2 / (1.0 + a);
    let c = &deriv.aux.c;
    let out = (0..n)
        .map(|j| {
            let nrm = [-t.y[j], t.x[j]];
            let dot_n = |v: [f64; 2]| v[0] * nrm[0] + v[1] * nrm[1];
            let w = omega[j] * omega[j] / (4.0 * sq[j] * sq[j]);
            let first = a * dot_n([dt_br.x[j] + w * t2.x[j], dt_br.y[j] + w * t2.y[j]]);
            let second = (omega[j] / sq[j] - a * c[j]) * dot_n(dbr.at(j));
            scale * (first + second + g * a * t.x[j])
        })
        .collect();
    Ok(ScalarField(out))
}

/// `∂_t BR(z, ϖ)` along the solved motion.
pub fn dt_birkhoff_rott_of(state: &SimState, deriv: &StateDerivative) -> Result<VectorField> {
    let kernels = BRKernelEval::new(&state.z)?;
    Ok(kernels.dt_birkhoff_rott(&state.omega, &deriv.z_t, &deriv.omega_t))
}

/// `E² = ‖p‖²_{H^{k-1}} + ∫σ/(ρ²|∂z|²)|∂^k z|² + ‖F‖²∞ + ‖ϖ‖²_{H^{k-2}} + ‖φ‖²_{H^{k-1/2}}`,
/// with `p` the periodic part of the curve, and `E_RT = E^p + 1/m`.
///
/// For periodic curves the mean of `p₁` is dropped: it only records where the
/// parametrization starts, and keeping it would make `E` depend on a grid shift.
pub fn energy(
    state: &SimState,
    deriv: &StateDerivative,
    sigma: &[f64],
    order: EnergyOrder,
    params: &Params,
) -> Result<EnergyReport> {
    let z = &state.z;
    let n = z.len();
    let k = order.k;
    if k > n / 4 {
        return Err(Error::ResolutionExceeded { k, n });
    }
    if sigma.len() != n {
        return Err(Error::GridMismatch(n, sigma.len()));
    }
    let grid = z.grid();
    let s = k as f64;
    let (px, py) = z.samples();
    let px: Vec<f64> = match z.kind() {
        GeometryKind::ClosedContour => px.to_vec(),
        GeometryKind::HorizontallyPeriodic => {
            let m = grid.mean(px);
            px.iter().map(|v| v - m).collect()
        }
    };
    let px = &px[..];
    let curve = grid.sobolev_norm(px, s - 1.0).powi(2) + grid.sobolev_norm(py, s - 1.0).powi(2);

    let sq = z.tangent_sq();
    let dk = z.derivative(k as u32);
    let weighted: Vec<f64> = (0..n)
        .map(|j| sigma[j] / (params.rho2 * sq[j]) * (dk.x[j] * dk.x[j] + dk.y[j] * dk.y[j]))
        .collect();
    let sigma_term = grid.integrate(&weighted);

    let f = arc_chord(z)?;
    let sheet = grid.sobolev_norm(&state.omega, s - 2.0).powi(2);
    let pot = grid.sobolev_norm(&deriv.aux.phi, s - 0.5).powi(2);

    let e2 = curve + sigma_term + f * f + sheet + pot;
    let energy = e2.max(0.0).sqrt();
    let m = sigma.iter().copied().fold(f64::INFINITY, f64::min);
    let valid = m > 0.0;
    let e_rt = if valid { energy.powf(order.p) + 1.0 / m } else { f64::INFINITY };
    Ok(EnergyReport {
        energy,
        e_rt,
        sigma_term,
        arc_chord: f,
        valid,
    })
}

/// Trapezoidal mean of `ϖ` and the tangent uniformity of the curve.
pub fn conservation(state: &SimState) -> (f64, f64) {
    (state.z.grid().mean(&state.omega), tangent_uniformity(&state.z))
}

/// Full diagnostic sample at one state, plus the `σ` field it was built from.
pub fn diagnose(
    state: &SimState,
    deriv: &StateDerivative,
    order: EnergyOrder,
    params: &Params,
) -> Result<(DiagRecord, ScalarField)> {
    let dt_br = dt_birkhoff_rott_of(state, deriv)?;
    let sigma = sigma_field(state, deriv, &dt_br, params)?;
    let en = energy(state, deriv, &sigma, order, params)?;
    let (mean_omega, uniformity) = conservation(state);
    let grid = state.z.grid();
    let rec = DiagRecord {
        t: state.t,
        a: grid.mean(&state.z.tangent_sq()),
        b: deriv.aux.b,
        min_sigma: sigma.iter().copied().fold(f64::INFINITY, f64::min),
        arc_chord: en.arc_chord,
        energy: en.energy,
        e_rt: en.e_rt,
        mean_omega,
        max_speed: deriv.z_t.max_norm(),
        uniformity,
        solver_residual: deriv.aux.solver_residual,
        solver_iters: deriv.aux.solver_iters,
    };
    Ok((rec, sigma))
}
