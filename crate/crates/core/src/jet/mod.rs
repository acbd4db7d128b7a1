//! Time-derivative towers rebuilt from `(u, u_t)` and the vector-field
//! algebra acting on them.

mod gamma;

pub(crate) use gamma::GammaEval;

use std::sync::Arc;

use crate::dynamics::{self, ModelKind, PhysicalParams, SimState};
use crate::error::{Error, Result};
use crate::field::{Field, Grid, Spectrum};

pub use gamma::{
    apply_gamma, apply_gamma_to, expand_gamma, gamma_alphabet, gamma_words, GammaIndex, GammaOp,
    Term, MAX_WORD_LEN,
};

pub const DEFAULT_MAX_JET_ORDER: usize = 6;

/// Layers `u^(0) .. u^(K)` approximating `∂_t^k u` at time `t`.
#[derive(Debug, Clone)]
pub struct Jet {
    t: f64,
    layers: Vec<Field>,
    spectra: Vec<Spectrum>,
}

impl Jet {
    pub fn grid(&self) -> &Arc<Grid> {
        self.layers[0].grid()
    }

    pub fn order(&self) -> usize {
        self.layers.len() - 1
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn layer(&self, k: usize) -> Result<&Field> {
        self.layers.get(k).ok_or(Error::InsufficientJetOrder {
            need: k,
            have: self.order(),
        })
    }

    pub fn layers(&self) -> &[Field] {
        &self.layers
    }

    pub(crate) fn spectrum(&self, k: usize) -> Result<&Spectrum> {
        self.spectra.get(k).ok_or(Error::InsufficientJetOrder {
            need: k,
            have: self.order(),
        })
    }

    /// Builds a jet from explicitly given layers (no cascade).
    pub fn from_layers(t: f64, layers: Vec<Field>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InsufficientJetOrder { need: 0, have: 0 });
        }
        for l in &layers {
            layers[0].check_same_grid(l)?;
            l.ensure_finite("jet layer")?;
        }
        let spectra = layers.iter().map(Field::spectrum).collect();
        Ok(Self { t, layers, spectra })
    }
}

/// Spatial-temporal multi-index `(A_0; A_1, .., A_n)`, `A_0` the time order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    pub time: u32,
    pub space: [u32; 3],
}

impl MultiIndex {
    pub const ZERO: MultiIndex = MultiIndex {
        time: 0,
        space: [0; 3],
    };

    pub fn new(time: u32, space: &[u32]) -> Self {
        let mut s = [0; 3];
        s[..space.len()].copy_from_slice(space);
        Self { time, space: s }
    }

    pub fn time(time: u32) -> Self {
        Self::new(time, &[])
    }

    pub fn spatial_order(&self) -> u32 {
        self.space.iter().sum()
    }

    pub fn order(&self) -> u32 {
        self.time + self.spatial_order()
    }

    /// Adds one derivative: `var` 0 is time, `var` `i+1` is `x_i`.
    pub fn bump(mut self, var: usize) -> Self {
        if var == 0 {
            self.time += 1;
        } else {
            self.space[var - 1] += 1;
        }
        self
    }

    /// All indices with spatial part over `dims` axes of total spatial order `s`.
    pub fn spatial_of_order(dims: usize, s: u32) -> Vec<[u32; 3]> {
        let mut out = Vec::new();
        match dims {
            1 => out.push([s, 0, 0]),
            2 => (0..=s).for_each(|a| out.push([a, s - a, 0])),
            _ => {
                for a in 0..=s {
                    for b in 0..=s - a {
                        out.push([a, b, s - a - b]);
                    }
                }
            }
        }
        out
    }
}

/// `∂_t^k u` for `k ≤ order` at the state's time, from the differentiated
/// equation; the `k = 2` layer is the integrator's acceleration.
pub fn build_jet(
    state: &SimState,
    p: &PhysicalParams,
    kind: ModelKind,
    order: usize,
) -> Result<Jet> {
    build_jet_capped(state, p, kind, order, DEFAULT_MAX_JET_ORDER)
}

pub fn build_jet_capped(
    state: &SimState,
    p: &PhysicalParams,
    kind: ModelKind,
    order: usize,
    max_order: usize,
) -> Result<Jet> {
    if order > max_order {
        return Err(Error::JetOrderTooLarge {
            requested: order,
            max: max_order,
        });
    }
    if order == 0 {
        return Jet::from_layers(state.t, vec![state.u.clone()]);
    }
    let mut layers = vec![state.u.clone(), state.v.clone()];
    if order >= 2 {
        layers.push(state.acceleration(p, kind)?);
    }
    let co = kind.coefficients(p);
    let grid = state.grid().clone();
    let dims = grid.dims();
    let mut spectra: Vec<Spectrum> = Vec::with_capacity(order + 1);
    {
        let (a, b) = Spectrum::pair(&layers[0], &layers[1]);
        spectra.push(a);
        spectra.push(b);
        if order >= 2 {
            spectra.push(layers[2].spectrum());
        }
    }
    let factor = (co.a != 0.0).then(|| state.v.map(|x| 1.0 - co.a * x));
    // physical gradients of each layer, filled lazily for the local term
    let mut grads: Vec<Vec<Field>> = Vec::new();
    let gradient_of = |s: &Spectrum| -> Vec<Field> {
        let parts: Vec<Spectrum> = (0..dims).map(|ax| s.derivative(ax, 1)).collect();
        Spectrum::to_fields(&parts)
    };

    for i in 1..order.saturating_sub(1) {
        // layer i + 2 from layers 0 ..= i + 1
        let k2 = grid.k2();
        let (si, si1) = (&spectra[i], &spectra[i + 1]);
        let mut num = si.map_indexed(|j, z| -(z * co.c2 + si1.coeffs()[j] * co.visc) * k2[j]);
        if co.b != 0.0 {
            while grads.len() < i + 2 {
                grads.push(gradient_of(&spectra[grads.len()]));
            }
            let mut prod = vec![0.0; grid.len()];
            for k in 0..=i {
                let w = binomial(i, k) as f64;
                for (ga, gb) in grads[i - k].iter().zip(&grads[k + 1]) {
                    for (j, (x, y)) in ga.values().iter().zip(gb.values()).enumerate() {
                        prod[j] += w * x * y;
                    }
                }
            }
            let sp = Field::from_values(&grid, prod)?.spectrum().dealiased();
            for (z, s) in num.coeffs_mut().iter_mut().zip(sp.coeffs()) {
                *z += s * co.b;
            }
        }
        let mut rhs = num.to_field();
        if co.a != 0.0 {
            let mut prod = vec![0.0; grid.len()];
            for k in 0..i {
                let w = binomial(i, k) as f64;
                let (x, y) = (&layers[i - k + 1], &layers[k + 2]);
                for (j, (a, b)) in x.values().iter().zip(y.values()).enumerate() {
                    prod[j] += w * a * b;
                }
            }
            rhs.axpy(co.a, &Field::from_values(&grid, prod)?);
        }
        let next = match &factor {
            Some(f) => rhs.zip_map(f, |n, d| n / d),
            None => rhs,
        };
        next.ensure_finite("jet layer")?;
        spectra.push(next.spectrum());
        layers.push(next);
    }
    Ok(Jet {
        t: state.t,
        layers,
        spectra,
    })
}

pub(crate) fn binomial(n: usize, k: usize) -> u64 {
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, j| acc * (n - j) as u64 / (j + 1) as u64)
}

/// `D^A u`: spatial spectral derivatives of layer `A_0`.
pub fn apply_multi_derivative(jet: &Jet, a: &MultiIndex) -> Result<Field> {
    if a.spatial_order() == 0 {
        return jet.layer(a.time as usize).cloned();
    }
    Ok(multi_derivative_spectrum(jet, a)?.to_field())
}

pub(crate) fn multi_derivative_spectrum(jet: &Jet, a: &MultiIndex) -> Result<Spectrum> {
    let dims = jet.grid().dims();
    if a.space[dims..].iter().any(|&o| o > 0) {
        return Err(Error::AxisOutOfRange { axis: dims, dims });
    }
    let s = jet.spectrum(a.time as usize)?;
    Ok(s.mixed_derivative(&a.space[..dims]))
}

/// Checks the hyperbolicity guard before building a jet for analysis.
pub fn guard(state: &SimState, p: &PhysicalParams, kind: ModelKind) -> Result<f64> {
    let (_, min) = dynamics::hyperbolicity_factor_for(&state.v, p, kind);
    if !(min > p.hyp_floor) && !kind.is_linear() {
        return Err(Error::HyperbolicityBreakdown {
            min_factor: min,
            floor: p.hyp_floor,
        });
    }
    Ok(min)
}
