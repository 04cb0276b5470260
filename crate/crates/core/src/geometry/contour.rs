use std::f64::consts::PI;

use rayon::prelude::*;

use super::fields::{ScalarField, VectorField};
use super::grid::Grid;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeometryKind {
    /// `z(α + 2π) = z(α)`.
    ClosedContour,
    /// `z(α + 2π) = z(α) + (2π, 0)`; samples hold the periodic part `z(α) - (α, 0)`.
    HorizontallyPeriodic,
}

/// Interface curve sampled on a [`Grid`].
#[derive(Clone, Debug, PartialEq)]
pub struct Contour {
    grid: Grid,
    kind: GeometryKind,
    x: Vec<f64>,
    y: Vec<f64>,
}

impl Contour {
    /// Builds a contour from stored samples (the periodic part for
    /// [`GeometryKind::HorizontallyPeriodic`]).
    pub fn from_samples(grid: Grid, kind: GeometryKind, x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        grid.check_len(x.len())?;
        grid.check_len(y.len())?;
        if !x.iter().chain(&y).all(|v| v.is_finite()) {
            return Err(Error::InvalidParam("contour samples must be finite".into()));
        }
        Ok(Contour { grid, kind, x, y })
    }

    /// Builds a contour from full curve points `z(α_j)`.
    pub fn from_points(grid: Grid, kind: GeometryKind, mut x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if kind == GeometryKind::HorizontallyPeriodic {
            for (j, xj) in x.iter_mut().enumerate() {
                *xj -= grid.node(j);
            }
        }
        Contour::from_samples(grid, kind, x, y)
    }

    pub fn flat(grid: Grid) -> Self {
        let n = grid.len();
        Contour {
            grid,
            kind: GeometryKind::HorizontallyPeriodic,
            x: vec![0.0; n],
            y: vec![0.0; n],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn kind(&self) -> GeometryKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Stored samples: the periodic part for horizontally periodic curves, `z` otherwise.
    pub fn samples(&self) -> (&[f64], &[f64]) {
        (&self.x, &self.y)
    }

    pub fn periodic_part(&self) -> VectorField {
        VectorField::new(self.x.clone(), self.y.clone())
    }

    pub fn into_samples(self) -> (Vec<f64>, Vec<f64>) {
        (self.x, self.y)
    }

    /// Full curve point `z(α_j)`.
    #[inline]
    pub fn point(&self, j: usize) -> [f64; 2] {
        match self.kind {
            GeometryKind::ClosedContour => [self.x[j], self.y[j]],
            GeometryKind::HorizontallyPeriodic => [self.x[j] + self.grid.node(j), self.y[j]],
        }
    }

    pub fn points(&self) -> VectorField {
        let (x, y) = (0..self.len()).map(|j| self.point(j)).map(|p| (p[0], p[1])).unzip();
        VectorField::new(x, y)
    }

    /// `z(α_j) - z(α_j - β)` where `β` is the representative of `m h` in `(-π, π]`.
    #[inline]
    pub fn chord(&self, j: usize, m: usize) -> [f64; 2] {
        let n = self.len();
        let k = (j + n - m) % n;
        match self.kind {
            GeometryKind::ClosedContour => [self.x[j] - self.x[k], self.y[j] - self.y[k]],
            GeometryKind::HorizontallyPeriodic => {
                let beta = offset_angle(n, m);
                [beta + self.x[j] - self.x[k], self.y[j] - self.y[k]]
            }
        }
    }

    /// `∂_α^order z` for `order >= 1`; the `(α, 0)` part contributes only at first order.
    pub fn derivative(&self, order: u32) -> VectorField {
        assert!(order >= 1, "use points() for order 0");
        let mut dx = self.grid.derivative(&self.x, order);
        let dy = self.grid.derivative(&self.y, order);
        if order == 1 && self.kind == GeometryKind::HorizontallyPeriodic {
            dx.iter_mut().for_each(|v| *v += 1.0);
        }
        VectorField::new(dx, dy)
    }

    pub fn tangent(&self) -> VectorField {
        self.derivative(1)
    }

    /// `|∂_α z|²` at every node.
    pub fn tangent_sq(&self) -> ScalarField {
        let t = self.tangent();
        t.dot(&t)
    }

    /// Trigonometric interpolation of the curve at an arbitrary parameter value.
    pub fn eval(&self, alpha: f64) -> [f64; 2] {
        let px = self.grid.interpolate(&self.x, alpha);
        let py = self.grid.interpolate(&self.y, alpha);
        match self.kind {
            GeometryKind::ClosedContour => [px, py],
            GeometryKind::HorizontallyPeriodic => [px + alpha, py],
        }
    }

    /// Replaces the stored samples, keeping grid and kind.
    pub fn with_samples(&self, x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        Contour::from_samples(self.grid.clone(), self.kind, x, y)
    }

    /// Circularly re-indexes the samples by `shift` nodes.
    ///
    /// For periodic curves this shifts the parametrization by `shift·h` and adjusts the
    /// stored periodic part so the point set is unchanged.
    pub fn rotate_index(&self, shift: usize) -> Contour {
        let n = self.len();
        let mut x: Vec<f64> = (0..n).map(|j| self.x[(j + shift) % n]).collect();
        let y = (0..n).map(|j| self.y[(j + shift) % n]).collect();
        if self.kind == GeometryKind::HorizontallyPeriodic {
            // z(α_j + s h) - (α_j, 0) = p(α_j + s h) + (s h, 0)
            let s = self.grid.spacing() * shift as f64;
            x.iter_mut().for_each(|v| *v += s);
        }
        Contour {
            grid: self.grid.clone(),
            kind: self.kind,
            x,
            y,
        }
    }
}

/// Representative of `m h` in `(-π, π]`.
#[inline]
pub(crate) fn offset_angle(n: usize, m: usize) -> f64 {
    let h = 2.0 * PI / n as f64;
    if m <= n / 2 {
        m as f64 * h
    } else {
        (m as f64 - n as f64) * h
    }
}

/// Arc-chord functional `‖F(z)‖∞`: the largest `|β| / |z(α) - z(α-β)|` over grid offsets,
/// combined with `1/|∂_α z|` on the diagonal.
///
/// Chords are only checked at grid offsets, so a curve that pinches between nodes is not
/// detected; resolving such curves is the caller's job.
pub fn arc_chord(z: &Contour) -> Result<f64> {
    let n = z.len();
    let tangent = z.tangent();
    let diag = (0..n)
        .map(|j| 1.0 / tangent.x[j].hypot(tangent.y[j]))
        .fold(0.0, f64::max);

    let rows: Vec<Result<f64>> = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut row_max = 0.0_f64;
            for m in 1..n {
                let d = z.chord(j, m);
                let dist = d[0].hypot(d[1]);
                if dist == 0.0 {
                    return Err(Error::CurveDegenerate {
                        i: j,
                        j: (j + n - m) % n,
                    });
                }
                row_max = row_max.max(offset_angle(n, m).abs() / dist);
            }
            Ok(row_max)
        })
        .collect();

    let mut best = diag;
    for r in rows {
        best = best.max(r?);
    }
    if !best.is_finite() {
        return Err(Error::CurveDegenerate { i: 0, j: 0 });
    }
    Ok(best)
}

/// Relative max deviation of `|∂_α z|²` from its grid mean.
pub fn tangent_uniformity(z: &Contour) -> f64 {
    let a = z.tangent_sq();
    let mean = z.grid().mean(&a);
    a.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max) / mean
}
