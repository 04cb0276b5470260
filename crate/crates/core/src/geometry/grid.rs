use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Uniform periodic grid `α_j = -π + 2πj/N` together with its FFT plans.
///
/// All spectral operators are Fourier multipliers applied through [`Grid::apply_multiplier`].
/// Coefficients are normalized by `1/N`, so a sample vector `f` satisfies
/// `f_j = Σ_k f̂_k exp(i k (α_j + π))`.
#[derive(Clone)]
pub struct Grid {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid").field("n", &self.n).finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
    }
}

impl Grid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(n));
        }
        let mut planner = FftPlanner::new();
        Ok(Grid {
            n,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Node spacing `h = 2π/N`.
    #[inline]
    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.n as f64
    }

    #[inline]
    pub fn node(&self, j: usize) -> f64 {
        -PI + self.spacing() * j as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.node(j)).collect()
    }

    /// Signed wavenumber of FFT bin `i`; the Nyquist bin maps to `+N/2`.
    #[inline]
    pub fn wavenumber(&self, i: usize) -> i64 {
        if i <= self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    #[inline]
    pub fn nyquist(&self) -> i64 {
        (self.n / 2) as i64
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len == self.n {
            Ok(())
        } else {
            Err(Error::GridMismatch(self.n, len))
        }
    }

    /// Normalized Fourier coefficients, indexed by FFT bin.
    pub fn forward(&self, f: &[f64]) -> Vec<Complex64> {
        assert_eq!(f.len(), self.n, "sample count does not match grid");
        let mut buf: Vec<Complex64> = f.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fwd.process(&mut buf);
        let scale = 1.0 / self.n as f64;
        buf.iter_mut().for_each(|c| *c *= scale);
        buf
    }

    /// Real part of the synthesis `Σ_k c_k exp(i k (α_j + π))`.
    pub fn inverse(&self, mut coeffs: Vec<Complex64>) -> Vec<f64> {
        assert_eq!(coeffs.len(), self.n, "coefficient count does not match grid");
        self.inv.process(&mut coeffs);
        coeffs.into_iter().map(|c| c.re).collect()
    }

    /// Applies the multiplier `m(k)` mode by mode.
    ///
    /// The Nyquist mode is kept only when `m(N/2)` is real, which keeps the output
    /// real for odd multipliers such as `ik` or `-i sign(k)`.
    pub fn apply_multiplier(&self, f: &[f64], m: impl Fn(i64) -> Complex64) -> Vec<f64> {
        let mut c = self.forward(f);
        for (i, ci) in c.iter_mut().enumerate() {
            let k = self.wavenumber(i);
            let mk = m(k);
            if k == self.nyquist() && mk.im != 0.0 {
                *ci = Complex64::new(0.0, 0.0);
            } else {
                *ci *= mk;
            }
        }
        self.inverse(c)
    }

    /// `∂_α^order f` via the multiplier `(ik)^order`.
    pub fn derivative(&self, f: &[f64], order: u32) -> Vec<f64> {
        if order == 0 {
            return f.to_vec();
        }
        self.apply_multiplier(f, |k| Complex64::new(0.0, k as f64).powu(order))
    }

    /// Periodic Hilbert transform, multiplier `-i sign(k)`.
    pub fn hilbert(&self, f: &[f64]) -> Vec<f64> {
        self.apply_multiplier(f, |k| Complex64::new(0.0, -(k.signum() as f64)))
    }

    /// `Λ^s` with multiplier `|k|^s`; `s = 0` is the identity.
    pub fn lambda_power(&self, f: &[f64], s: f64) -> Vec<f64> {
        if s == 0.0 {
            return f.to_vec();
        }
        self.apply_multiplier(f, |k| Complex64::new((k.unsigned_abs() as f64).powf(s), 0.0))
    }

    /// `(Σ_k (1+k²)^s |f̂_k|²)^{1/2}`, scaled so that `s = 0` gives the L²(-π,π) norm.
    pub fn sobolev_norm(&self, f: &[f64], s: f64) -> f64 {
        let c = self.forward(f);
        let sum: f64 = c
            .iter()
            .enumerate()
            .map(|(i, ci)| {
                let k = self.wavenumber(i) as f64;
                (1.0 + k * k).powf(s) * ci.norm_sqr()
            })
            .sum();
        (2.0 * PI * sum).sqrt()
    }

    /// Periodic antiderivative of the mean-free part of `f`, normalized to zero mean.
    pub fn antiderivative(&self, f: &[f64]) -> Vec<f64> {
        self.apply_multiplier(f, |k| {
            if k == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, -1.0 / k as f64)
            }
        })
    }

    /// Trapezoidal mean `(1/N) Σ f_j`, which is `(1/2π)∫f` for periodic integrands.
    pub fn mean(&self, f: &[f64]) -> f64 {
        f.iter().sum::<f64>() / f.len() as f64
    }

    /// Trapezoidal integral over one period.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        2.0 * PI * self.mean(f)
    }

    /// Evaluates the trigonometric interpolant of `f` at an arbitrary `alpha`.
    pub fn interpolate(&self, f: &[f64], alpha: f64) -> f64 {
        let c = self.forward(f);
        eval_series(self, &c, alpha)
    }

    /// Band-limited interpolation of `f` onto the finer grid `fine`.
    pub fn upsample(&self, f: &[f64], fine: &Grid) -> Vec<f64> {
        assert!(fine.n >= self.n, "target grid must not be coarser");
        let c = self.forward(f);
        let mut out = vec![Complex64::new(0.0, 0.0); fine.n];
        for (i, ci) in c.iter().enumerate() {
            let k = self.wavenumber(i);
            if k == self.nyquist() && fine.n > self.n {
                // split the Nyquist mode evenly between ±N/2
                out[self.n / 2] += 0.5 * ci;
                out[fine.n - self.n / 2] += 0.5 * ci;
            } else {
                let idx = if k >= 0 { k as usize } else { (fine.n as i64 + k) as usize };
                out[idx] += ci;
            }
        }
        fine.inverse(out)
    }

    /// Zeroes every mode whose magnitude is below `threshold * max_k |f̂_k|`.
    pub fn krasny_filter(&self, f: &[f64], threshold: f64) -> Vec<f64> {
        let mut c = self.forward(f);
        let max = c.iter().map(|ci| ci.norm()).fold(0.0, f64::max);
        let floor = threshold * max;
        for ci in c.iter_mut() {
            if ci.norm() < floor {
                *ci = Complex64::new(0.0, 0.0);
            }
        }
        self.inverse(c)
    }
}

/// Evaluates `Σ_k c_k exp(i k (α + π))` with the Nyquist bin split symmetrically.
pub(crate) fn eval_series(grid: &Grid, c: &[Complex64], alpha: f64) -> f64 {
    let theta = alpha + PI;
    let nyq = grid.nyquist();
    let mut acc = c[0].re;
    for (i, ci) in c.iter().enumerate().skip(1) {
        let k = grid.wavenumber(i);
        if k == nyq {
            acc += ci.re * (k as f64 * theta).cos();
        } else if k > 0 {
            // conjugate pair k, -k
            let e = Complex64::from_polar(1.0, k as f64 * theta);
            acc += 2.0 * (ci * e).re;
        }
    }
    acc
}
