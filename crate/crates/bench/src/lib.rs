//! Benchmark inputs shared by the criterion targets.

use interface_dyn::scenarios_io::make_scenario;
use interface_dyn::{ScenarioKind, ScenarioSpec, SimState};

/// The default `perturbed_circle` and a `flat_cosine` with a small sheet, at `n` nodes.
pub fn inputs(n: usize) -> [(&'static str, SimState); 2] {
    let closed = make_scenario(&ScenarioSpec::named(ScenarioKind::PerturbedCircle), n, 1e-6).unwrap();
    let spec = ScenarioSpec {
        omega_amplitude: 0.05,
        omega_mode: 2,
        ..ScenarioSpec::named(ScenarioKind::FlatCosine)
    };
    let periodic = make_scenario(&spec, n, 1e-6).unwrap();
    [("closed", closed), ("periodic", periodic)]
}
