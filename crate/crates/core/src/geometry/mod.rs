//! Periodic grid, spectral calculus and curve representation.
//!
//! Perpendicular convention: `(a, b)^⊥ = (-b, a)`. With it a positive point vortex
//! turns counterclockwise, and a flat sheet `z = (α, 0)` induces
//! `BR = (0, ½ H(ϖ))` with `H` the multiplier `-i sign(k)`.

mod contour;
mod fields;
mod grid;

pub use contour::{arc_chord, tangent_uniformity, Contour, GeometryKind};
pub use fields::{perp, ScalarField, VectorField};
pub(crate) use fields::max_abs;
pub use grid::Grid;
pub(crate) use grid::eval_series;
