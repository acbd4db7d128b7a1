use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest total point count a grid may allocate unless a larger budget is
/// requested explicitly.
pub const DEFAULT_POINT_BUDGET: usize = 1 << 24;

/// Plain description of a periodic box, as it appears in configs and
/// snapshot headers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub lengths: Vec<f64>,
    pub points: Vec<usize>,
    #[serde(default = "default_centered")]
    pub origin_centered: bool,
}

fn default_centered() -> bool {
    true
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid> {
        Grid::new(&self.lengths, &self.points, self.origin_centered)
    }
}

/// Periodic box in 1, 2 or 3 dimensions with precomputed wavenumber tables.
///
/// Samples are stored row-major: the last axis varies fastest.
pub struct Grid {
    lengths: Vec<f64>,
    points: Vec<usize>,
    origin_centered: bool,
    total: usize,
    strides: Vec<usize>,
    /// Signed Fourier index per axis, `j` for `j < N/2`, `j - N` above.
    signed: Vec<Vec<i64>>,
    /// `k = 2*pi*j/L` per flat index and axis (Nyquist carries `-pi*N/L`).
    kvec: Vec<[f64; 3]>,
    k2: Vec<f64>,
    /// Bit `a` set when the flat index sits on the Nyquist plane of axis `a`.
    nyquist: Vec<u8>,
    /// Flat index of the mode `-k`.
    mirror: Vec<usize>,
    /// True where every `|j_a| <= N_a/3`.
    keep: Vec<bool>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("lengths", &self.lengths)
            .field("points", &self.points)
            .field("origin_centered", &self.origin_centered)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.lengths == other.lengths
            && self.points == other.points
            && self.origin_centered == other.origin_centered
    }
}

impl Grid {
    pub fn new(lengths: &[f64], points: &[usize], origin_centered: bool) -> Result<Self> {
        Self::with_budget(lengths, points, origin_centered, DEFAULT_POINT_BUDGET)
    }

    pub fn with_budget(
        lengths: &[f64],
        points: &[usize],
        origin_centered: bool,
        budget: usize,
    ) -> Result<Self> {
        let dims = points.len();
        if !(1..=3).contains(&dims) {
            return Err(Error::InvalidGrid(format!("dimension {dims} not in 1..=3")));
        }
        if lengths.len() != dims {
            return Err(Error::InvalidGrid(format!(
                "{} lengths given for {dims} axes",
                lengths.len()
            )));
        }
        for (a, (&l, &n)) in lengths.iter().zip(points).enumerate() {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::InvalidGrid(format!(
                    "axis {a}: length {l} must be > 0"
                )));
            }
            if n < 8 || !n.is_power_of_two() {
                return Err(Error::InvalidGrid(format!(
                    "axis {a}: {n} points; need a power of two >= 8"
                )));
            }
        }
        let total = points
            .iter()
            .try_fold(1usize, |acc, &n| acc.checked_mul(n))
            .ok_or_else(|| Error::InvalidGrid("point count overflows".into()))?;
        if total > budget {
            return Err(Error::InvalidGrid(format!(
                "{total} points exceed the budget of {budget}"
            )));
        }

        let mut strides = vec![1usize; dims];
        for a in (0..dims.saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * points[a + 1];
        }
        let signed: Vec<Vec<i64>> = points
            .iter()
            .map(|&n| {
                let n = n as i64;
                (0..n).map(|j| if j < n / 2 { j } else { j - n }).collect()
            })
            .collect();

        let mut kvec = vec![[0.0; 3]; total];
        let mut k2 = vec![0.0; total];
        let mut nyquist = vec![0u8; total];
        let mut mirror = vec![0usize; total];
        let mut keep = vec![true; total];
        for idx in 0..total {
            let mut rem = idx;
            let mut mirror_idx = 0;
            for a in 0..dims {
                let j = rem / strides[a];
                rem %= strides[a];
                let n = points[a];
                let s = signed[a][j];
                let k = 2.0 * PI * s as f64 / lengths[a];
                kvec[idx][a] = k;
                k2[idx] += k * k;
                if j == n / 2 {
                    nyquist[idx] |= 1 << a;
                }
                if 3 * s.unsigned_abs() as usize > n {
                    keep[idx] = false;
                }
                mirror_idx += ((n - j) % n) * strides[a];
            }
            mirror[idx] = mirror_idx;
        }

        Ok(Self {
            lengths: lengths.to_vec(),
            points: points.to_vec(),
            origin_centered,
            total,
            strides,
            signed,
            kvec,
            k2,
            nyquist,
            mirror,
            keep,
        })
    }

    /// Convenience constructor for the cube `[L; n]` with `N` points per axis.
    pub fn cube(dims: usize, length: f64, points: usize, origin_centered: bool) -> Result<Self> {
        Self::new(&vec![length; dims], &vec![points; dims], origin_centered)
    }

    pub fn spec(&self) -> GridSpec {
        GridSpec {
            lengths: self.lengths.clone(),
            points: self.points.clone(),
            origin_centered: self.origin_centered,
        }
    }

    pub fn dims(&self) -> usize {
        self.points.len()
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn origin_centered(&self) -> bool {
        self.origin_centered
    }

    pub fn len(&self) -> usize {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.lengths[axis] / self.points[axis] as f64
    }

    pub fn min_spacing(&self) -> f64 {
        (0..self.dims())
            .map(|a| self.spacing(a))
            .fold(f64::INFINITY, f64::min)
    }

    /// Box measure `prod L_i`.
    pub fn volume(&self) -> f64 {
        self.lengths.iter().product()
    }

    /// Quadrature weight of a single sample.
    pub fn cell_volume(&self) -> f64 {
        self.volume() / self.total as f64
    }

    /// Coordinate of sample `j` along `axis`; `[-L/2, L/2)` on centered grids.
    pub fn coordinate(&self, axis: usize, j: usize) -> f64 {
        let x = j as f64 * self.spacing(axis);
        if self.origin_centered {
            x - 0.5 * self.lengths[axis]
        } else {
            x
        }
    }

    /// Fills `out` with the coordinates of the flat sample `idx`.
    pub fn point(&self, idx: usize, out: &mut [f64; 3]) {
        let mut rem = idx;
        for a in 0..self.dims() {
            let j = rem / self.strides[a];
            rem %= self.strides[a];
            out[a] = self.coordinate(a, j);
        }
    }

    /// Per-axis wavenumbers `2*pi*j/L` in storage order.
    pub fn wavenumbers(&self, axis: usize) -> Vec<f64> {
        self.signed[axis]
            .iter()
            .map(|&s| 2.0 * PI * s as f64 / self.lengths[axis])
            .collect()
    }

    pub fn signed_index(&self, axis: usize) -> &[i64] {
        &self.signed[axis]
    }

    pub(crate) fn kvec(&self) -> &[[f64; 3]] {
        &self.kvec
    }

    pub(crate) fn k2(&self) -> &[f64] {
        &self.k2
    }

    pub(crate) fn nyquist(&self) -> &[u8] {
        &self.nyquist
    }

    pub(crate) fn mirror(&self) -> &[usize] {
        &self.mirror
    }

    pub(crate) fn keep(&self) -> &[bool] {
        &self.keep
    }

    /// Largest `|k|_inf` component over the grid, `pi/dx`.
    pub fn max_wavenumber(&self) -> f64 {
        (0..self.dims())
            .map(|a| PI / self.spacing(a))
            .fold(0.0, f64::max)
    }

    pub fn check_axis(&self, axis: usize) -> Result<()> {
        if axis < self.dims() {
            Ok(())
        } else {
            Err(Error::AxisOutOfRange {
                axis,
                dims: self.dims(),
            })
        }
    }
}
