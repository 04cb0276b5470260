//! Standing-wave frequency of a small cosine perturbation of the flat interface.

use std::f64::consts::PI;

use super::rk4_step;
use crate::dynamics::{Params, SimState};
use crate::error::{Error, Result};
use crate::scenarios_io::{make_scenario, ScenarioKind, ScenarioSpec};

#[derive(Clone, Debug, PartialEq)]
pub struct DispersionReport {
    pub k: u32,
    pub omega: f64,
    /// `√(g k)`.
    pub expected: f64,
    pub rel_error: f64,
    pub crossings: usize,
}

/// Amplitude of `cos kα` in the height of the curve.
pub fn cosine_amplitude(state: &SimState, k: u32) -> f64 {
    let grid = state.z.grid();
    let (_, y) = state.z.samples();
    let prod: Vec<f64> = grid
        .nodes()
        .iter()
        .zip(y)
        .map(|(a, yj)| yj * (k as f64 * a).cos())
        .collect();
    2.0 * grid.mean(&prod)
}

/// Evolves `flat_cosine(1e-5, k)` with RK4 and reads the frequency off the zero
/// crossings of the `cos kα` amplitude, interpolated linearly between steps.
pub fn measure_dispersion(k: u32, g: f64, n: usize, t_end: f64, dt: f64) -> Result<DispersionReport> {
    if !(g > 0.0) {
        return Err(Error::InvalidParam(format!("dispersion needs g > 0, got {g}")));
    }
    if !(dt > 0.0) || !(t_end > 0.0) {
        return Err(Error::InvalidParam("dt and t_end must be positive".into()));
    }
    let spec = ScenarioSpec {
        kind: ScenarioKind::FlatCosine,
        amplitude: 1e-5,
        mode: k,
        ..ScenarioSpec::default()
    };
    let params = Params {
        g,
        ..Params::default()
    };
    params.validate()?;
    let mut state = make_scenario(&spec, n, params.uniformity_tol)?;

    let mut crossings = Vec::new();
    let mut prev = (state.t, cosine_amplitude(&state, k));
    while state.t < t_end - 1e-12 {
        let step = dt.min(t_end - state.t);
        state = rk4_step(&state, step, &params)?;
        let cur = (state.t, cosine_amplitude(&state, k));
        if prev.1 != 0.0 && prev.1.signum() != cur.1.signum() {
            let s = prev.1 / (prev.1 - cur.1);
            crossings.push(prev.0 + s * (cur.0 - prev.0));
        }
        prev = cur;
    }
    if crossings.len() < 2 {
        return Err(Error::InvalidParam(format!(
            "only {} zero crossings before t_end = {t_end}; run longer",
            crossings.len()
        )));
    }
    let span = crossings[crossings.len() - 1] - crossings[0];
    let omega = PI * (crossings.len() - 1) as f64 / span;
    let expected = (g * k as f64).sqrt();
    Ok(DispersionReport {
        k,
        omega,
        expected,
        rel_error: (omega - expected).abs() / expected,
        crossings: crossings.len(),
    })
}
