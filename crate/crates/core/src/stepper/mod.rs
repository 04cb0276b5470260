//! Classical RK4 in time, Krasny filtering, step-size control and breakdown guards.

mod dispersion;

pub use dispersion::{cosine_amplitude, measure_dispersion, DispersionReport};

use crate::diagnostics::{diagnose, DiagRecord, EnergyOrder};
use crate::dynamics::{state_derivative, Params, SimState, StateDerivative};
use crate::error::{Error, Result};
use crate::geometry::ScalarField;
use crate::scenarios_io::Snapshot;

/// Time-stepping and guard settings.
#[derive(Clone, Debug, PartialEq)]
pub struct StepConfig {
    pub dt: f64,
    pub t_end: f64,
    pub cfl_safety: f64,
    pub adaptive: bool,
    pub abort_arc_chord: f64,
    /// The run halts once `min σ <= abort_min_sigma`; `-inf` disables the guard.
    pub abort_min_sigma: f64,
    pub output_stride: usize,
    /// Snapshot every this many steps; 0 disables snapshots.
    pub snapshot_stride: usize,
    pub energy: EnergyOrder,
}

impl Default for StepConfig {
    fn default() -> Self {
        StepConfig {
            dt: 1e-2,
            t_end: 1.0,
            cfl_safety: 0.5,
            adaptive: false,
            abort_arc_chord: 1e3,
            abort_min_sigma: 0.0,
            output_stride: 1,
            snapshot_stride: 10,
            energy: EnergyOrder::default(),
        }
    }
}

impl StepConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParam(m));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return bad(format!("t_end must be >= 0, got {}", self.t_end));
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return bad(format!("cfl_safety must lie in (0, 1], got {}", self.cfl_safety));
        }
        if !(self.abort_arc_chord > 0.0) {
            return bad(format!("abort_arc_chord must be positive, got {}", self.abort_arc_chord));
        }
        if self.abort_min_sigma.is_nan() {
            return bad("abort_min_sigma must not be NaN".into());
        }
        if self.output_stride == 0 {
            return bad("output_stride must be at least 1".into());
        }
        if self.energy.k < 4 {
            return bad(format!("energy_k must be >= 4, got {}", self.energy.k));
        }
        if !(self.energy.p > 0.0) {
            return bad(format!("energy_p must be positive, got {}", self.energy.p));
        }
        Ok(())
    }
}

/// Largest stable step: `cfl · min(h/max|z_t|, 1/√(|g| N/2), h²/(2ε max|∂z|))`.
///
/// Terms whose scale is absent (zero speed, no gravity, no ε) are skipped.
pub fn allowed_dt(state: &SimState, deriv: &StateDerivative, params: &Params, cfg: &StepConfig) -> f64 {
    let n = state.len() as f64;
    let h = state.z.grid().spacing();
    let mut dt = f64::INFINITY;
    let speed = deriv.z_t.max_norm();
    if speed > 0.0 {
        dt = dt.min(h / speed);
    }
    if params.g != 0.0 {
        dt = dt.min(1.0 / (params.g.abs() * n / 2.0).sqrt());
    }
    if params.epsilon > 0.0 {
        let stretch = state.z.tangent().max_norm();
        dt = dt.min(h * h / (2.0 * params.epsilon * stretch));
    }
    cfg.cfl_safety * dt
}

fn advance(state: &SimState, dt: f64, k: &StateDerivative) -> Result<SimState> {
    let (x, y) = state.z.samples();
    let nx = x.iter().zip(&k.z_t.x).map(|(a, b)| a + dt * b).collect();
    let ny = y.iter().zip(&k.z_t.y).map(|(a, b)| a + dt * b).collect();
    let omega = state.omega.iter().zip(k.omega_t.iter()).map(|(a, b)| a + dt * b).collect();
    Ok(SimState {
        t: state.t + dt,
        z: state.z.with_samples(nx, ny)?,
        omega: ScalarField(omega),
    })
}

/// One RK4 step, given the derivative at the current state.
pub fn rk4_step_from(state: &SimState, k1: &StateDerivative, dt: f64, params: &Params) -> Result<SimState> {
    let k2 = state_derivative(&advance(state, 0.5 * dt, k1)?, params)?;
    let k3 = state_derivative(&advance(state, 0.5 * dt, &k2)?, params)?;
    let k4 = state_derivative(&advance(state, dt, &k3)?, params)?;

    let combine = |a: &[f64], b: &[f64], c: &[f64], d: &[f64], base: &[f64]| -> Vec<f64> {
        (0..base.len())
            .map(|j| base[j] + dt / 6.0 * (a[j] + 2.0 * b[j] + 2.0 * c[j] + d[j]))
            .collect()
    };
    let (x, y) = state.z.samples();
    let mut nx = combine(&k1.z_t.x, &k2.z_t.x, &k3.z_t.x, &k4.z_t.x, x);
    let mut ny = combine(&k1.z_t.y, &k2.z_t.y, &k3.z_t.y, &k4.z_t.y, y);
    let mut omega = combine(&k1.omega_t, &k2.omega_t, &k3.omega_t, &k4.omega_t, &state.omega);

    let grid = state.z.grid();
    if params.filter_threshold > 0.0 {
        nx = grid.krasny_filter(&nx, params.filter_threshold);
        ny = grid.krasny_filter(&ny, params.filter_threshold);
        omega = grid.krasny_filter(&omega, params.filter_threshold);
    }
    reproject_mean(&mut omega, grid.mean(&state.omega));

    Ok(SimState {
        t: state.t + dt,
        z: state.z.with_samples(nx, ny)?,
        omega: ScalarField(omega),
    })
}

/// Classical four-stage step of `(z, ϖ)`, followed by filtering and restoring the mean of `ϖ`.
pub fn rk4_step(state: &SimState, dt: f64, params: &Params) -> Result<SimState> {
    let k1 = state_derivative(state, params)?;
    rk4_step_from(state, &k1, dt, params)
}

/// Like [`rk4_step`], but refuses a `dt` above the adaptive limit.
pub fn rk4_step_checked(state: &SimState, dt: f64, params: &Params, cfg: &StepConfig) -> Result<SimState> {
    let k1 = state_derivative(state, params)?;
    if cfg.adaptive {
        let allowed = allowed_dt(state, &k1, params, cfg);
        if dt > allowed {
            return Err(Error::StepRejected { dt, allowed });
        }
    }
    rk4_step_from(state, &k1, dt, params)
}

/// Shifts `f` so its grid mean is `target`, repeating while rounding moves it.
///
/// A zero target is met exactly: the last sample is set to minus the running sum of
/// the others, so the left-to-right sum used by [`Grid::mean`](crate::geometry::Grid::mean)
/// is exactly zero.
pub(crate) fn reproject_mean(f: &mut [f64], target: f64) {
    let n = f.len() as f64;
    for _ in 0..4 {
        let m = f.iter().sum::<f64>() / n;
        if m == target {
            break;
        }
        let d = m - target;
        f.iter_mut().for_each(|v| *v -= d);
    }
    if target == 0.0 {
        if let Some((last, rest)) = f.split_last_mut() {
            *last = -rest.iter().sum::<f64>();
        }
    }
}

/// How a run ended.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RunOutcome {
    Completed,
    ArcChordBlowup { t: f64 },
    RayleighTaylorLost { t: f64 },
    SolverFailure { t: f64 },
    NumericalBlowup { t: f64 },
}

impl RunOutcome {
    pub fn is_completed(&self) -> bool {
        matches!(self, RunOutcome::Completed)
    }

    pub fn name(&self) -> &'static str {
        match self {
            RunOutcome::Completed => "completed",
            RunOutcome::ArcChordBlowup { .. } => "arc_chord_blowup",
            RunOutcome::RayleighTaylorLost { .. } => "rayleigh_taylor_lost",
            RunOutcome::SolverFailure { .. } => "solver_failure",
            RunOutcome::NumericalBlowup { .. } => "numerical_blowup",
        }
    }

    /// Time of the halt, if the run did not complete.
    pub fn time(&self) -> Option<f64> {
        match *self {
            RunOutcome::Completed => None,
            RunOutcome::ArcChordBlowup { t }
            | RunOutcome::RayleighTaylorLost { t }
            | RunOutcome::SolverFailure { t }
            | RunOutcome::NumericalBlowup { t } => Some(t),
        }
    }
}

/// Receives the run's output stream.
pub trait RunSink {
    fn on_diag(&mut self, record: &DiagRecord) -> Result<()>;

    fn on_snapshot(&mut self, index: usize, snap: &Snapshot) -> Result<()>;

    /// Called for every accepted state with its derivative; default does nothing.
    fn on_step(&mut self, _state: &SimState, _deriv: &StateDerivative) -> Result<()> {
        Ok(())
    }
}

/// Keeps everything in memory.
#[derive(Clone, Debug, Default)]
pub struct MemorySink {
    pub records: Vec<DiagRecord>,
    pub snapshots: Vec<(usize, Snapshot)>,
}

impl RunSink for MemorySink {
    fn on_diag(&mut self, record: &DiagRecord) -> Result<()> {
        self.records.push(record.clone());
        Ok(())
    }

    fn on_snapshot(&mut self, index: usize, snap: &Snapshot) -> Result<()> {
        self.snapshots.push((index, snap.clone()));
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub outcome: RunOutcome,
    pub steps: usize,
    pub final_state: SimState,
    pub last_record: Option<DiagRecord>,
}

enum Eval {
    Ok(StateDerivative),
    Halt(RunOutcome),
}

fn evaluate(state: &SimState, params: &Params) -> Result<Eval> {
    match state_derivative(state, params) {
        Ok(d) => Ok(Eval::Ok(d)),
        Err(Error::NoConvergence { .. }) => Ok(Eval::Halt(RunOutcome::SolverFailure { t: state.t })),
        Err(Error::CurveDegenerate { .. }) => Ok(Eval::Halt(RunOutcome::ArcChordBlowup { t: state.t })),
        Err(e) => Err(e),
    }
}

/// Advances `initial` to `t_end` or to the first guard that fires.
///
/// Guards run on the initial state and after every accepted step, in the order
/// non-finite state, solver failure, arc-chord, Rayleigh–Taylor.
pub fn run(initial: &SimState, params: &Params, cfg: &StepConfig, sink: &mut dyn RunSink) -> Result<RunReport> {
    params.validate()?;
    cfg.validate()?;
    let n = initial.len();
    if cfg.energy.k > n / 4 {
        return Err(Error::ResolutionExceeded { k: cfg.energy.k, n });
    }
    let uniformity = crate::geometry::tangent_uniformity(&initial.z);
    if !(uniformity <= params.uniformity_tol) {
        return Err(Error::InvalidParam(format!(
            "initial curve is not uniformly parametrized: uniformity {uniformity:e} > {:e}",
            params.uniformity_tol
        )));
    }

    let mut state = initial.clone();
    let mut steps = 0usize;
    let mut last_record = None;
    let eps_t = 1e-12 * cfg.t_end.abs().max(1.0);

    let finish = |outcome, state: SimState, steps, last_record| RunReport {
        outcome,
        steps,
        final_state: state,
        last_record,
    };

    loop {
        if !state.is_finite() {
            return Ok(finish(RunOutcome::NumericalBlowup { t: state.t }, state, steps, last_record));
        }
        let deriv = match evaluate(&state, params)? {
            Eval::Ok(d) => d,
            Eval::Halt(o) => return Ok(finish(o, state, steps, last_record)),
        };
        if !(deriv.z_t.is_finite() && deriv.omega_t.is_finite()) {
            return Ok(finish(RunOutcome::NumericalBlowup { t: state.t }, state, steps, last_record));
        }
        let (record, sigma) = match diagnose(&state, &deriv, cfg.energy, params) {
            Ok(r) => r,
            Err(Error::CurveDegenerate { .. }) => {
                return Ok(finish(RunOutcome::ArcChordBlowup { t: state.t }, state, steps, last_record))
            }
            Err(e) => return Err(e),
        };
        sink.on_step(&state, &deriv)?;

        let done = state.t >= cfg.t_end - eps_t;
        let halt = if !sigma.is_finite() {
            Some(RunOutcome::NumericalBlowup { t: state.t })
        } else if !(record.arc_chord <= cfg.abort_arc_chord) {
            Some(RunOutcome::ArcChordBlowup { t: state.t })
        } else if record.min_sigma <= cfg.abort_min_sigma {
            Some(RunOutcome::RayleighTaylorLost { t: state.t })
        } else {
            None
        };

        if steps.is_multiple_of(cfg.output_stride) || done || halt.is_some() {
            sink.on_diag(&record)?;
        }
        if cfg.snapshot_stride > 0 && (steps.is_multiple_of(cfg.snapshot_stride) || done || halt.is_some()) {
            sink.on_snapshot(steps, &Snapshot::from_state(&state, &deriv, &sigma))?;
        }
        last_record = Some(record);
        if let Some(o) = halt {
            return Ok(finish(o, state, steps, last_record));
        }
        if done {
            return Ok(finish(RunOutcome::Completed, state, steps, last_record));
        }

        let mut dt = cfg.dt;
        if cfg.adaptive {
            dt = dt.min(allowed_dt(&state, &deriv, params, cfg));
        }
        dt = dt.min(cfg.t_end - state.t);
        state = match rk4_step_from(&state, &deriv, dt, params) {
            Ok(s) => s,
            Err(Error::NoConvergence { .. }) => {
                return Ok(finish(RunOutcome::SolverFailure { t: state.t + dt }, state, steps, last_record))
            }
            Err(Error::CurveDegenerate { .. }) => {
                return Ok(finish(RunOutcome::ArcChordBlowup { t: state.t + dt }, state, steps, last_record))
            }
            Err(e) => return Err(e),
        };
        steps += 1;
    }
}
