//! Boundary-integral simulation of a 2-D interface between an inviscid, incompressible,
//! irrotational fluid and a lighter one (vacuum for water waves), with the interface
//! carried as a parametrized curve `z(α,t)` and a vortex-sheet strength `ϖ(α,t)`.
//!
//! Module map:
//!
//! * [`geometry`]: periodic grid, spectral operators, curves, arc-chord functional.
//! * [`singular_ops`]: Birkhoff–Rott quadrature, `∂_t BR`, the operator `T`, and the
//!   second-kind solve.
//! * [`dynamics`]: tangential speed, curve velocity and the `ϖ_t` equation.
//! * [`diagnostics`]: Rayleigh–Taylor function `σ`, energies, conservation monitors.
//! * [`stepper`]: RK4 with spectral filtering and breakdown guards.
//! * [`scenarios_io`]: initial data, configuration files, CSV output.

// `!(x > 0.0)` is deliberate throughout: NaN must fail every validity check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod geometry;
pub mod singular_ops;
pub mod dynamics;
pub mod diagnostics;
pub mod stepper;
pub mod scenarios_io;

pub use error::{Error, Result};
pub use diagnostics::DiagRecord;
pub use dynamics::{Params, SimState, StateDerivative};
pub use scenarios_io::{RunConfig, ScenarioKind, ScenarioSpec, Snapshot};
pub use stepper::{RunOutcome, StepConfig};
pub use geometry::{Contour, GeometryKind, Grid, ScalarField, VectorField};
