use std::sync::Arc;

use num_complex::Complex64;
use rustfft::FftDirection;

use super::fft::transform;
use super::{Field, Grid};

/// Discrete Fourier coefficients of a real field, `F_k = sum_j f_j e^{-i k x_j}`.
///
/// Every spectrum produced here is Hermitian (`F_{-k} = conj F_k`), so the
/// inverse transform is real. Two real fields share one complex transform
/// via [`Spectrum::pair`] and [`Spectrum::to_fields_pair`].
#[derive(Debug, Clone)]
pub struct Spectrum {
    grid: Arc<Grid>,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn of(f: &Field) -> Self {
        let grid = f.grid().clone();
        let mut coeffs: Vec<Complex64> =
            f.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
        transform(&mut coeffs, grid.points(), FftDirection::Forward);
        Self { grid, coeffs }
    }

    /// Spectra of two real fields from a single complex transform.
    pub fn pair(a: &Field, b: &Field) -> (Self, Self) {
        debug_assert!(a.same_grid(b));
        let grid = a.grid().clone();
        let mut z: Vec<Complex64> = a
            .values()
            .iter()
            .zip(b.values())
            .map(|(&x, &y)| Complex64::new(x, y))
            .collect();
        transform(&mut z, grid.points(), FftDirection::Forward);
        let mirror = grid.mirror();
        let mut fa = Vec::with_capacity(z.len());
        let mut fb = Vec::with_capacity(z.len());
        for (idx, &zk) in z.iter().enumerate() {
            let zm = z[mirror[idx]].conj();
            fa.push((zk + zm) * 0.5);
            let d = (zk - zm) * 0.5;
            // (zk - zm) / (2i)
            fb.push(Complex64::new(d.im, -d.re));
        }
        (
            Self {
                grid: grid.clone(),
                coeffs: fa,
            },
            Self { grid, coeffs: fb },
        )
    }

    pub fn zeros(grid: &Arc<Grid>) -> Self {
        Self {
            grid: grid.clone(),
            coeffs: vec![Complex64::default(); grid.len()],
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn to_field(&self) -> Field {
        let mut z = self.coeffs.clone();
        transform(&mut z, self.grid.points(), FftDirection::Inverse);
        let scale = 1.0 / self.grid.len() as f64;
        Field::from_raw(&self.grid, z.iter().map(|c| c.re * scale).collect())
    }

    /// Inverse transforms of two Hermitian spectra through one complex pass.
    pub fn to_fields_pair(a: &Spectrum, b: &Spectrum) -> (Field, Field) {
        let mut z: Vec<Complex64> = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(&x, &y)| x + Complex64::new(-y.im, y.re))
            .collect();
        transform(&mut z, a.grid.points(), FftDirection::Inverse);
        let scale = 1.0 / a.grid.len() as f64;
        let re = z.iter().map(|c| c.re * scale).collect();
        let im = z.iter().map(|c| c.im * scale).collect();
        (Field::from_raw(&a.grid, re), Field::from_raw(&a.grid, im))
    }

    /// Inverse transforms of a batch of Hermitian spectra, pairing them up.
    pub fn to_fields(spectra: &[Spectrum]) -> Vec<Field> {
        let mut out = Vec::with_capacity(spectra.len());
        let mut chunks = spectra.chunks_exact(2);
        for pair in &mut chunks {
            let (a, b) = Self::to_fields_pair(&pair[0], &pair[1]);
            out.push(a);
            out.push(b);
        }
        if let [last] = chunks.remainder() {
            out.push(last.to_field());
        }
        out
    }

    /// Multiplies each coefficient by `(i k_axis)^order`; the Nyquist plane is
    /// dropped for odd orders so the result stays Hermitian.
    pub fn derivative(&self, axis: usize, order: u32) -> Spectrum {
        if order == 0 {
            return self.clone();
        }
        let kvec = self.grid.kvec();
        let nyq = self.grid.nyquist();
        let odd = order % 2 == 1;
        let sign = if (order / 2) % 2 == 0 { 1.0 } else { -1.0 };
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(idx, &c)| {
                if odd && nyq[idx] & (1 << axis) != 0 {
                    return Complex64::default();
                }
                let k = kvec[idx][axis];
                let mag = sign * k.powi(order as i32);
                if odd {
                    // i^{2p+1} = sign * i
                    Complex64::new(-c.im * mag, c.re * mag)
                } else {
                    c * mag
                }
            })
            .collect();
        Spectrum {
            grid: self.grid.clone(),
            coeffs,
        }
    }

    /// Mixed spatial derivative `prod_a ∂_a^{orders[a]}`.
    pub fn mixed_derivative(&self, orders: &[u32]) -> Spectrum {
        let mut s = self.clone();
        for (axis, &o) in orders.iter().enumerate() {
            if o > 0 {
                s = s.derivative(axis, o);
            }
        }
        s
    }

    pub fn laplacian(&self) -> Spectrum {
        let k2 = self.grid.k2();
        self.map_indexed(|idx, c| c * -k2[idx])
    }

    pub fn dealiased(&self) -> Spectrum {
        let keep = self.grid.keep();
        self.map_indexed(|idx, c| if keep[idx] { c } else { Complex64::default() })
    }

    pub fn scaled(&self, s: f64) -> Spectrum {
        self.map_indexed(|_, c| c * s)
    }

    pub(crate) fn map_indexed(&self, f: impl Fn(usize, Complex64) -> Complex64) -> Spectrum {
        Spectrum {
            grid: self.grid.clone(),
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| f(i, c))
                .collect(),
        }
    }

    /// `sum_k w(|k|^2) |F_k|^2` scaled to the box measure, i.e. the squared
    /// `L^2` norm of the field filtered by the multiplier `sqrt(w)`.
    pub fn weighted_sq(&self, w: impl Fn(f64) -> f64) -> f64 {
        let k2 = self.grid.k2();
        let n = self.grid.len() as f64;
        let sum: f64 = self
            .coeffs
            .iter()
            .zip(k2)
            .map(|(c, &q)| w(q) * c.norm_sqr())
            .sum();
        sum * self.grid.volume() / (n * n)
    }

    /// Squared discrete `H^s` norm.
    pub fn sobolev_sq(&self, s: f64) -> f64 {
        if s == 0.0 {
            self.weighted_sq(|_| 1.0)
        } else {
            self.weighted_sq(|q| (1.0 + q).powf(s))
        }
    }

    /// Squared `H^s` norm of the gradient: `sum |k|^2 (1+|k|^2)^s |F|^2`.
    pub fn gradient_sobolev_sq(&self, s: f64) -> f64 {
        self.weighted_sq(|q| q * (1.0 + q).powf(s))
    }

    /// Fraction of `sum |F_k|^2` carried by modes removed by the 2/3 rule.
    pub fn top_third_fraction(&self) -> f64 {
        let keep = self.grid.keep();
        let (mut top, mut all) = (0.0, 0.0);
        for (c, &k) in self.coeffs.iter().zip(keep) {
            let e = c.norm_sqr();
            all += e;
            if !k {
                top += e;
            }
        }
        if all > 0.0 {
            top / all
        } else {
            0.0
        }
    }
}
