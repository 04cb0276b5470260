use std::ops::{Deref, DerefMut};

/// Real samples on the α-grid.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct ScalarField(pub Vec<f64>);

impl ScalarField {
    pub fn zeros(n: usize) -> Self {
        ScalarField(vec![0.0; n])
    }

    pub fn constant(n: usize, value: f64) -> Self {
        ScalarField(vec![value; n])
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.0)
    }
}

impl Deref for ScalarField {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for ScalarField {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl From<Vec<f64>> for ScalarField {
    fn from(v: Vec<f64>) -> Self {
        ScalarField(v)
    }
}

/// Planar vectors on the α-grid, stored by component.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct VectorField {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl VectorField {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        assert_eq!(x.len(), y.len(), "component lengths differ");
        VectorField { x, y }
    }

    pub fn zeros(n: usize) -> Self {
        VectorField::new(vec![0.0; n], vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    #[inline]
    pub fn at(&self, j: usize) -> [f64; 2] {
        [self.x[j], self.y[j]]
    }

    pub fn is_finite(&self) -> bool {
        self.x.iter().chain(&self.y).all(|v| v.is_finite())
    }

    /// Pointwise dot product.
    pub fn dot(&self, other: &VectorField) -> ScalarField {
        ScalarField(
            (0..self.len())
                .map(|j| self.x[j] * other.x[j] + self.y[j] * other.y[j])
                .collect(),
        )
    }

    /// Pointwise `a · b^⊥` with `(b1, b2)^⊥ = (-b2, b1)`.
    pub fn dot_perp(&self, other: &VectorField) -> ScalarField {
        ScalarField(
            (0..self.len())
                .map(|j| -self.x[j] * other.y[j] + self.y[j] * other.x[j])
                .collect(),
        )
    }

    pub fn norms(&self) -> ScalarField {
        ScalarField(
            (0..self.len())
                .map(|j| self.x[j].hypot(self.y[j]))
                .collect(),
        )
    }

    pub fn max_norm(&self) -> f64 {
        self.norms().max_abs()
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: f64, other: &VectorField) -> VectorField {
        VectorField::new(
            self.x.iter().zip(&other.x).map(|(a, b)| a + s * b).collect(),
            self.y.iter().zip(&other.y).map(|(a, b)| a + s * b).collect(),
        )
    }

    /// `self + c ⊙ other` with a scalar field `c`.
    pub fn add_scaled(&self, c: &[f64], other: &VectorField) -> VectorField {
        VectorField::new(
            (0..self.len()).map(|j| self.x[j] + c[j] * other.x[j]).collect(),
            (0..self.len()).map(|j| self.y[j] + c[j] * other.y[j]).collect(),
        )
    }
}

pub(crate) fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Perpendicular `(a, b)^⊥ = (-b, a)`.
#[inline]
pub fn perp(v: [f64; 2]) -> [f64; 2] {
    [-v[1], v[0]]
}
