//! Periodic grids, real fields and the spectral calculus on them.

mod fft;
mod grid;
pub mod snapshot;
mod spectral;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use grid::{Grid, GridSpec, DEFAULT_POINT_BUDGET};
pub use spectral::Spectrum;

/// Default cap on Sobolev exponents.
pub const MAX_SOBOLEV_ORDER: f64 = 12.0;

/// Real scalar sampled on a [`Grid`].
#[derive(Debug, Clone)]
pub struct Field {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.same_grid(other) && self.values == other.values
    }
}

impl Field {
    pub fn zeros(grid: &Arc<Grid>) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: &Arc<Grid>, value: f64) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![value; grid.len()],
        }
    }

    /// Samples `f(x)` at every grid point; `x` holds the point's coordinates.
    pub fn from_fn(grid: &Arc<Grid>, mut f: impl FnMut(&[f64]) -> f64) -> Self {
        let mut x = [0.0; 3];
        let dims = grid.dims();
        let values = (0..grid.len())
            .map(|idx| {
                grid.point(idx, &mut x);
                f(&x[..dims])
            })
            .collect();
        Self {
            grid: grid.clone(),
            values,
        }
    }

    pub fn from_values(grid: &Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Precondition(format!(
                "{} samples for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        let f = Self {
            grid: grid.clone(),
            values,
        };
        f.ensure_finite("field construction")?;
        Ok(f)
    }

    pub(crate) fn from_raw(grid: &Arc<Grid>, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self {
            grid: grid.clone(),
            values,
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn same_grid(&self, other: &Field) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid
    }

    pub fn check_same_grid(&self, other: &Field) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn ensure_finite(&self, context: &'static str) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite(context))
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field::from_raw(&self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_map(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Field {
        debug_assert!(self.same_grid(other));
        Field::from_raw(
            &self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    pub fn scaled(&self, s: f64) -> Field {
        self.map(|v| s * v)
    }

    pub fn add(&self, other: &Field) -> Field {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Field) -> Field {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Field) -> Field {
        self.zip_map(other, |a, b| a * b)
    }

    /// `self += s * other`
    pub fn axpy(&mut self, s: f64, other: &Field) {
        debug_assert!(self.same_grid(other));
        for (a, &b) in self.values.iter_mut().zip(&other.values) {
            *a += s * b;
        }
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Box-measure integral `sum f * dV`.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_volume()
    }

    pub fn spectrum(&self) -> Spectrum {
        Spectrum::of(self)
    }

    /// Spectral derivative of the given order along `axis`.
    pub fn spatial_derivative(&self, axis: usize, order: u32) -> Result<Field> {
        self.grid.check_axis(axis)?;
        if order > 4 {
            return Err(Error::DerivativeOrder(order));
        }
        self.ensure_finite("spatial_derivative input")?;
        Ok(self.spectrum().derivative(axis, order).to_field())
    }

    pub fn laplacian(&self) -> Result<Field> {
        self.ensure_finite("laplacian input")?;
        Ok(self.spectrum().laplacian().to_field())
    }

    pub fn gradient(&self) -> Result<Vec<Field>> {
        self.ensure_finite("gradient input")?;
        let s = self.spectrum();
        Ok((0..self.grid.dims())
            .map(|a| s.derivative(a, 1).to_field())
            .collect())
    }

    /// Discrete `H^s` norm with multiplier `(1+|k|^2)^{s/2}` and box measure.
    pub fn sobolev_norm(&self, s: f64) -> Result<f64> {
        check_sobolev(s)?;
        self.ensure_finite("sobolev_norm input")?;
        Ok(self.spectrum().sobolev_sq(s).sqrt())
    }

    pub fn linf_norm(&self) -> Result<f64> {
        self.ensure_finite("linf_norm input")?;
        Ok(self.values.iter().fold(0.0, |m, v| f64::max(m, v.abs())))
    }

    pub fn l2_inner(&self, other: &Field) -> Result<f64> {
        self.check_same_grid(other)?;
        self.ensure_finite("l2_inner input")?;
        other.ensure_finite("l2_inner input")?;
        Ok(self.dot(other))
    }

    /// Quadrature `L^2` norm.
    pub fn l2_norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub(crate) fn dot(&self, other: &Field) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum::<f64>()
            * self.grid.cell_volume()
    }

    pub(crate) fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    /// 2/3-rule truncation: zero every mode with some `|j_i| > N_i/3`.
    pub fn dealias(&self) -> Result<Field> {
        self.ensure_finite("dealias input")?;
        Ok(self.spectrum().dealiased().to_field())
    }

    /// Subtracts the mean of every grid line running along `axis`.
    pub fn mean_zero_project(&self, axis: usize) -> Result<Field> {
        self.grid.check_axis(axis)?;
        self.ensure_finite("mean_zero_project input")?;
        let mut out = self.values.clone();
        for line in self.lines(axis) {
            let mean = line.iter().map(|&i| self.values[i]).sum::<f64>() / line.len() as f64;
            for &i in &line {
                out[i] -= mean;
            }
        }
        Ok(Field::from_raw(&self.grid, out))
    }

    /// Largest absolute line mean along `axis`.
    pub fn max_line_mean(&self, axis: usize) -> Result<f64> {
        self.grid.check_axis(axis)?;
        Ok(self
            .lines(axis)
            .map(|line| {
                (line.iter().map(|&i| self.values[i]).sum::<f64>() / line.len() as f64).abs()
            })
            .fold(0.0, f64::max))
    }

    fn lines(&self, axis: usize) -> impl Iterator<Item = Vec<usize>> + '_ {
        let n = self.grid.points()[axis];
        let stride = self.grid.strides()[axis];
        let total = self.grid.len();
        (0..total)
            .filter(move |idx| (idx / stride) % n == 0)
            .map(move |start| (0..n).map(|j| start + j * stride).collect())
    }

    /// Poincare inequality on a line-mean-free field: returns
    /// `‖f‖`, `‖∂_axis f‖` and the constant `L_axis/(2π)`.
    pub fn poincare_check(&self, axis: usize) -> Result<PoincareCheck> {
        self.grid.check_axis(axis)?;
        self.ensure_finite("poincare_check input")?;
        let scale = self.linf_norm()?.max(1.0);
        let mean = self.max_line_mean(axis)?;
        if mean > POINCARE_MEAN_TOL * scale {
            return Err(Error::Precondition(format!(
                "field not mean-zero along axis {axis} (line mean {mean:e})"
            )));
        }
        let lhs = self.l2_norm();
        let rhs = self.spectrum().derivative(axis, 1).to_field().l2_norm();
        let constant = self.grid.lengths()[axis] / (2.0 * std::f64::consts::PI);
        if lhs > constant * rhs * (1.0 + 1e-10) + 1e-14 * scale {
            return Err(Error::InequalityViolated(format!(
                "Poincare: {lhs} > {constant} * {rhs}"
            )));
        }
        Ok(PoincareCheck { lhs, rhs, constant })
    }
}

const POINCARE_MEAN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoincareCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub constant: f64,
}

pub fn check_sobolev(s: f64) -> Result<()> {
    if s.is_finite() && (0.0..=MAX_SOBOLEV_ORDER).contains(&s) {
        Ok(())
    } else {
        Err(Error::SobolevOrder {
            s,
            max: MAX_SOBOLEV_ORDER,
        })
    }
}
