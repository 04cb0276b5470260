//! Flat `key = value` run configuration.
//!
//! One key per line, `#` starts a comment, blank lines are ignored. Unknown or
//! repeated keys are errors. Missing keys take their defaults.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::{ScenarioKind, ScenarioSpec};
use crate::dynamics::Params;
use crate::error::{Error, Result};
use crate::stepper::StepConfig;

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub scenario: ScenarioSpec,
    pub n: usize,
    pub params: Params,
    pub step: StepConfig,
    /// Where `run` writes its CSV files; the CLI `--out` flag overrides it.
    pub output_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            scenario: ScenarioSpec::default(),
            n: 128,
            params: Params::default(),
            step: StepConfig::default(),
            output_dir: None,
        }
    }
}

const KEYS: &[&str] = &[
    "scenario",
    "amplitude",
    "mode",
    "radius",
    "omega0",
    "omega_amplitude",
    "omega_mode",
    "noise",
    "seed",
    "n",
    "a_rho",
    "g",
    "rho2",
    "epsilon",
    "allow_kelvin_helmholtz",
    "solver_tol",
    "solver_max_iter",
    "filter_threshold",
    "uniformity_tol",
    "dt",
    "t_end",
    "cfl_safety",
    "adaptive",
    "abort_arc_chord",
    "abort_min_sigma",
    "output_stride",
    "snapshot_stride",
    "energy_k",
    "energy_p",
    "output_dir",
];

fn parse_num<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Config {
        line,
        msg: format!("`{key}`: cannot parse `{v}`"),
    })
}

fn parse_bool(line: usize, key: &str, v: &str) -> Result<bool> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(Error::Config {
            line,
            msg: format!("`{key}`: expected true or false, got `{v}`"),
        }),
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let mut seen: Vec<&str> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body.split_once('=').ok_or_else(|| Error::Config {
                line,
                msg: format!("expected `key = value`, got `{body}`"),
            })?;
            let (key, v) = (key.trim(), value.trim());
            let known = KEYS.iter().find(|k| **k == key).ok_or_else(|| Error::Config {
                line,
                msg: format!("unknown key `{key}`"),
            })?;
            if seen.contains(known) {
                return Err(Error::Config {
                    line,
                    msg: format!("duplicate key `{key}`"),
                });
            }
            seen.push(known);

            let s = &mut cfg.scenario;
            let p = &mut cfg.params;
            let st = &mut cfg.step;
            match key {
                "scenario" => {
                    s.kind = v.parse::<ScenarioKind>().map_err(|e| Error::Config {
                        line,
                        msg: e.to_string(),
                    })?
                }
                "amplitude" => s.amplitude = parse_num(line, key, v)?,
                "mode" => s.mode = parse_num(line, key, v)?,
                "radius" => s.radius = parse_num(line, key, v)?,
                "omega0" => s.omega0 = parse_num(line, key, v)?,
                "omega_amplitude" => s.omega_amplitude = parse_num(line, key, v)?,
                "omega_mode" => s.omega_mode = parse_num(line, key, v)?,
                "noise" => s.noise = parse_num(line, key, v)?,
                "seed" => s.seed = parse_num(line, key, v)?,
                "n" => cfg.n = parse_num(line, key, v)?,
                "a_rho" => p.a_rho = parse_num(line, key, v)?,
                "g" => p.g = parse_num(line, key, v)?,
                "rho2" => p.rho2 = parse_num(line, key, v)?,
                "epsilon" => p.epsilon = parse_num(line, key, v)?,
                "allow_kelvin_helmholtz" => p.allow_kelvin_helmholtz = parse_bool(line, key, v)?,
                "solver_tol" => p.solver_tol = parse_num(line, key, v)?,
                "solver_max_iter" => p.solver_max_iter = parse_num(line, key, v)?,
                "filter_threshold" => p.filter_threshold = parse_num(line, key, v)?,
                "uniformity_tol" => p.uniformity_tol = parse_num(line, key, v)?,
                "dt" => st.dt = parse_num(line, key, v)?,
                "t_end" => st.t_end = parse_num(line, key, v)?,
                "cfl_safety" => st.cfl_safety = parse_num(line, key, v)?,
                "adaptive" => st.adaptive = parse_bool(line, key, v)?,
                "abort_arc_chord" => st.abort_arc_chord = parse_num(line, key, v)?,
                "abort_min_sigma" => st.abort_min_sigma = parse_num(line, key, v)?,
                "output_stride" => st.output_stride = parse_num(line, key, v)?,
                "snapshot_stride" => st.snapshot_stride = parse_num(line, key, v)?,
                "energy_k" => st.energy.k = parse_num(line, key, v)?,
                "energy_p" => st.energy.p = parse_num(line, key, v)?,
                "output_dir" => {
                    cfg.output_dir = if v.is_empty() { None } else { Some(PathBuf::from(v)) }
                }
                _ => unreachable!("key list and match arms disagree"),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        RunConfig::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        crate::geometry::Grid::new(self.n)?;
        self.scenario.validate()?;
        self.params.validate()?;
        self.step.validate()?;
        if self.step.energy.k > self.n / 4 {
            return Err(Error::ResolutionExceeded {
                k: self.step.energy.k,
                n: self.n,
            });
        }
        Ok(())
    }

    /// Every key, one per line; reals use the shortest exact representation.
    pub fn serialize(&self) -> String {
        let s = &self.scenario;
        let p = &self.params;
        let st = &self.step;
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        put("scenario", s.kind.name().to_string());
        put("amplitude", format!("{:?}", s.amplitude));
        put("mode", s.mode.to_string());
        put("radius", format!("{:?}", s.radius));
        put("omega0", format!("{:?}", s.omega0));
        put("omega_amplitude", format!("{:?}", s.omega_amplitude));
        put("omega_mode", s.omega_mode.to_string());
        put("noise", format!("{:?}", s.noise));
        put("seed", s.seed.to_string());
        put("n", self.n.to_string());
        put("a_rho", format!("{:?}", p.a_rho));
        put("g", format!("{:?}", p.g));
        put("rho2", format!("{:?}", p.rho2));
        put("epsilon", format!("{:?}", p.epsilon));
        put("allow_kelvin_helmholtz", p.allow_kelvin_helmholtz.to_string());
        put("solver_tol", format!("{:?}", p.solver_tol));
        put("solver_max_iter", p.solver_max_iter.to_string());
        put("filter_threshold", format!("{:?}", p.filter_threshold));
        put("uniformity_tol", format!("{:?}", p.uniformity_tol));
        put("dt", format!("{:?}", st.dt));
        put("t_end", format!("{:?}", st.t_end));
        put("cfl_safety", format!("{:?}", st.cfl_safety));
        put("adaptive", st.adaptive.to_string());
        put("abort_arc_chord", format!("{:?}", st.abort_arc_chord));
        put("abort_min_sigma", format!("{:?}", st.abort_min_sigma));
        put("output_stride", st.output_stride.to_string());
        put("snapshot_stride", st.snapshot_stride.to_string());
        put("energy_k", st.energy.k.to_string());
        put("energy_p", format!("{:?}", st.energy.p));
        if let Some(d) = &self.output_dir {
            put("output_dir", d.display().to_string());
        }
        out
    }
}
