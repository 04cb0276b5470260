//! Initial data, configuration files and CSV output.

mod config;
mod csv;

pub use config::RunConfig;
pub use csv::{
    parse_diag, parse_snapshot, snapshot_file_name, write_diag, write_diag_header, write_snapshot, CsvSink,
    DIAG_HEADER, SNAPSHOT_HEADER,
};

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{SimState, StateDerivative};
use crate::error::{Error, Result};
use crate::geometry::{arc_chord, eval_series, tangent_uniformity, Contour, GeometryKind, Grid, ScalarField};

/// Per-node output at one instant.
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub alpha: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub omega: Vec<f64>,
    pub phi: Vec<f64>,
    pub sigma: Vec<f64>,
    pub c: Vec<f64>,
}

impl Snapshot {
    pub fn from_state(state: &SimState, deriv: &StateDerivative, sigma: &[f64]) -> Self {
        let pts = state.z.points();
        Snapshot {
            t: state.t,
            alpha: state.z.grid().nodes(),
            x: pts.x,
            y: pts.y,
            omega: state.omega.0.clone(),
            phi: deriv.aux.phi.0.clone(),
            sigma: sigma.to_vec(),
            c: deriv.aux.c.0.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScenarioKind {
    FlatRest,
    FlatCosine,
    CirclePatch,
    PerturbedCircle,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 4] = [
        ScenarioKind::FlatRest,
        ScenarioKind::FlatCosine,
        ScenarioKind::CirclePatch,
        ScenarioKind::PerturbedCircle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::FlatRest => "flat_rest",
            ScenarioKind::FlatCosine => "flat_cosine",
            ScenarioKind::CirclePatch => "circle_patch",
            ScenarioKind::PerturbedCircle => "perturbed_circle",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ScenarioKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownScenario(s.to_string()))
    }
}

/// Scenario and its parameters. Fields a scenario does not use are ignored.
///
/// * `flat_rest`: flat line, `ϖ` from the seed only.
/// * `flat_cosine`: `y = amplitude·cos(mode·x)`.
/// * `circle_patch`: circle of `radius` carrying the constant sheet `omega0`.
/// * `perturbed_circle`: `r(θ) = radius·(1 + amplitude·cos(mode·θ))`.
///
/// Every scenario adds `omega_amplitude·cos(omega_mode·α)` to `ϖ`, plus seeded
/// random modes `1..=N/8` of size up to `noise` when `noise > 0`. Apart from the
/// circle patch, which carries circulation, `ϖ` is then made exactly mean-free.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioSpec {
    pub kind: ScenarioKind,
    pub amplitude: f64,
    pub mode: u32,
    pub radius: f64,
    pub omega0: f64,
    pub omega_amplitude: f64,
    pub omega_mode: u32,
    pub noise: f64,
    pub seed: u64,
}

impl Default for ScenarioSpec {
    fn default() -> Self {
        ScenarioSpec {
            kind: ScenarioKind::FlatRest,
            amplitude: 0.1,
            mode: 1,
            radius: 1.0,
            omega0: 1.0,
            omega_amplitude: 0.0,
            omega_mode: 1,
            noise: 0.0,
            seed: 0,
        }
    }
}

impl ScenarioSpec {
    pub fn named(kind: ScenarioKind) -> Self {
        let mut s = ScenarioSpec {
            kind,
            ..ScenarioSpec::default()
        };
        if kind == ScenarioKind::PerturbedCircle {
            s.mode = 3;
        }
        s
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParam(m));
        for (name, v) in [
            ("amplitude", self.amplitude),
            ("radius", self.radius),
            ("omega0", self.omega0),
            ("omega_amplitude", self.omega_amplitude),
            ("noise", self.noise),
        ] {
            if !v.is_finite() {
                return bad(format!("{name} must be finite"));
            }
        }
        match self.kind {
            ScenarioKind::CirclePatch | ScenarioKind::PerturbedCircle if !(self.radius > 0.0) => {
                return bad(format!("radius must be positive, got {}", self.radius));
            }
            ScenarioKind::PerturbedCircle if self.amplitude.abs() >= 1.0 => {
                return bad(format!("perturbed_circle needs |amplitude| < 1, got {}", self.amplitude));
            }
            _ => {}
        }
        if self.noise < 0.0 {
            return bad(format!("noise must be >= 0, got {}", self.noise));
        }
        Ok(())
    }
}

/// Builds the initial state on `N` nodes, uniformly parametrized by arclength.
pub fn make_scenario(spec: &ScenarioSpec, n: usize, uniformity_tol: f64) -> Result<SimState> {
    spec.validate()?;
    let grid = Grid::new(n)?;
    let nodes = grid.nodes();
    let raw = match spec.kind {
        ScenarioKind::FlatRest => Contour::flat(grid.clone()),
        ScenarioKind::FlatCosine => {
            let k = spec.mode as f64;
            let y = nodes.iter().map(|a| spec.amplitude * (k * a).cos()).collect();
            Contour::from_samples(grid.clone(), GeometryKind::HorizontallyPeriodic, vec![0.0; n], y)?
        }
        ScenarioKind::CirclePatch | ScenarioKind::PerturbedCircle => {
            let (a, m) = if spec.kind == ScenarioKind::CirclePatch {
                (0.0, 0.0)
            } else {
                (spec.amplitude, spec.mode as f64)
            };
            let r = |t: f64| spec.radius * (1.0 + a * (m * t).cos());
            let x = nodes.iter().map(|&t| r(t) * t.cos()).collect();
            let y = nodes.iter().map(|&t| r(t) * t.sin()).collect();
            Contour::from_samples(grid.clone(), GeometryKind::ClosedContour, x, y)?
        }
    };
    let z = reparametrize_arclength(&raw)?;
    if tangent_uniformity(&z) > uniformity_tol {
        return Err(Error::InvalidParam(format!(
            "N = {n} cannot resolve a uniform parametrization of {} (uniformity {:e})",
            spec.kind,
            tangent_uniformity(&z)
        )));
    }
    match arc_chord(&z) {
        Ok(f) if f.is_finite() => {}
        _ => return Err(Error::SelfIntersecting),
    }
    if z.kind() == GeometryKind::ClosedContour && polygon_self_intersects(&z) {
        return Err(Error::SelfIntersecting);
    }

    let mut omega: Vec<f64> = match spec.kind {
        ScenarioKind::CirclePatch => vec![spec.omega0; n],
        _ => vec![0.0; n],
    };
    if spec.omega_amplitude != 0.0 {
        let k = spec.omega_mode as f64;
        for (w, a) in omega.iter_mut().zip(&nodes) {
            *w += spec.omega_amplitude * (k * a).cos();
        }
    }
    if spec.noise > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        for k in 1..=(n / 8) {
            let (ca, sa): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let k = k as f64;
            for (w, a) in omega.iter_mut().zip(&nodes) {
                *w += spec.noise * (ca * (k * a).cos() + sa * (k * a).sin());
            }
        }
    }
    if spec.kind != ScenarioKind::CirclePatch {
        crate::stepper::reproject_mean(&mut omega, 0.0);
    }
    SimState::new(0.0, z, ScalarField(omega))
}

/// Whether any two non-adjacent edges of the closed polygon through the nodes cross.
fn polygon_self_intersects(z: &Contour) -> bool {
    let n = z.len();
    let p = |j: usize| z.point(j % n);
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    for i in 0..n {
        let (a, b) = (p(i), p(i + 1));
        for j in (i + 2)..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (c, d) = (p(j), p(j + 1));
            let d1 = cross(a, b, c);
            let d2 = cross(a, b, d);
            let d3 = cross(c, d, a);
            let d4 = cross(c, d, b);
            if d1 * d2 < 0.0 && d3 * d4 < 0.0 {
                return true;
            }
        }
    }
    false
}

/// Oversampling factor for the arclength quadrature.
const ARC_OVERSAMPLE: usize = 8;

/// Resamples `z` so that `|∂_α z|` is constant, keeping the node at `α = -π` fixed.
///
/// The arclength `s(α)` is integrated spectrally on an `8N` grid, inverted by Newton's
/// method from a monotone piecewise-linear guess, and the curve is evaluated at the new
/// parameter values by trigonometric interpolation of the original samples.
pub fn reparametrize_arclength(z: &Contour) -> Result<Contour> {
    let grid = z.grid();
    let n = z.len();
    let fine = Grid::new(n * ARC_OVERSAMPLE)?;
    let (x, y) = z.samples();
    let fx = grid.upsample(x, &fine);
    let fy = grid.upsample(y, &fine);
    let fz = Contour::from_samples(fine.clone(), z.kind(), fx, fy)?;
    let speed = fz.tangent().norms();
    if speed.iter().any(|s| !(*s > 0.0)) {
        return Err(Error::CurveDegenerate { i: 0, j: 0 });
    }

    let mean = fine.mean(&speed);
    let length = 2.0 * PI * mean;
    let speed_hat = fine.forward(&speed);
    let anti = fine.antiderivative(&speed);
    let anti_hat = fine.forward(&anti);
    let anti0 = eval_series(&fine, &anti_hat, -PI);
    let s_of = |b: f64| mean * (b + PI) + eval_series(&fine, &anti_hat, b) - anti0;
    let ds_of = |b: f64| eval_series(&fine, &speed_hat, b);

    // cumulative arclength at the fine nodes for the initial guess
    let fine_nodes = fine.nodes();
    let mut cum: Vec<f64> = fine_nodes
        .iter()
        .zip(&anti)
        .map(|(b, a)| mean * (b + PI) + a - anti[0])
        .collect();
    cum.push(length);

    let h_fine = fine.spacing();
    let mut betas = Vec::with_capacity(n);
    for j in 0..n {
        let target = length * j as f64 / n as f64;
        let i = match cum.binary_search_by(|v| v.partial_cmp(&target).unwrap()) {
            Ok(i) => i.min(cum.len() - 2),
            Err(i) => i.saturating_sub(1).min(cum.len() - 2),
        };
        let frac = if cum[i + 1] > cum[i] { (target - cum[i]) / (cum[i + 1] - cum[i]) } else { 0.0 };
        let mut b = -PI + h_fine * (i as f64 + frac);
        for _ in 0..50 {
            let step = (s_of(b) - target) / ds_of(b);
            b -= step;
            if step.abs() < 1e-15 * (1.0 + b.abs()) {
                break;
            }
        }
        betas.push(b);
    }

    let nodes = grid.nodes();
    let mut nx = Vec::with_capacity(n);
    let mut ny = Vec::with_capacity(n);
    for (j, &b) in betas.iter().enumerate() {
        let p = z.eval(b);
        match z.kind() {
            GeometryKind::ClosedContour => nx.push(p[0]),
            GeometryKind::HorizontallyPeriodic => nx.push(p[0] - nodes[j]),
        }
        ny.push(p[1]);
    }
    z.with_samples(nx, ny)
}
