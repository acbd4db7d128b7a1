use crate::error::{Error, Result};
use crate::jet::{gamma_words, GammaEval, Jet, MultiIndex};

/// Weighted energies over all generalized-derivative words of length `≤ m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KlainermanEnergies {
    /// `Σ_A ‖Γ^A ∂_t u‖² + ‖Γ^A ∇u‖²`
    pub e_1m: f64,
    /// `sup_x sup_A (Γ^A ∂_t u)² + |Γ^A ∇u|²`
    pub e_inf_m: f64,
}

/// `[n/2 + 1]`.
pub fn n_star(dims: usize) -> usize {
    dims / 2 + 1
}

/// Both energies at the jet's time. Needs jet order `m + 1`; weighted words
/// need an origin-centered grid.
pub fn klainerman_energies(jet: &Jet, m: usize) -> Result<KlainermanEnergies> {
    let words = gamma_words(jet.grid().dims(), m)?;
    if jet.order() < m + 1 {
        return Err(Error::InsufficientJetOrder {
            need: m + 1,
            have: jet.order(),
        });
    }
    if m > 0 && !jet.grid().origin_centered() {
        return Err(Error::NotCentered);
    }
    let grid = jet.grid().clone();
    let dims = grid.dims();
    let bases: Vec<MultiIndex> = std::iter::once(MultiIndex::time(1))
        .chain((0..dims).map(|i| MultiIndex::ZERO.bump(i + 1)))
        .collect();
    let mut eval = GammaEval::new(jet);
    let mut e1 = 0.0;
    let mut sup = 0.0f64;
    let mut density = vec![0.0; grid.len()];
    for w in &words {
        density.iter_mut().for_each(|d| *d = 0.0);
        for b in &bases {
            let f = eval.apply(w, b)?;
            for (d, &x) in density.iter_mut().zip(f.values()) {
                *d += x * x;
            }
        }
        e1 += density.iter().sum::<f64>();
        sup = density.iter().fold(sup, |m, &d| m.max(d));
    }
    Ok(KlainermanEnergies {
        e_1m: e1 * grid.cell_volume(),
        e_inf_m: sup,
    })
}

/// `√E_∞,m / ((1+t)^{(1-n)/2} √E_{1,m+n*})`; `0/0` counts as 0.
pub fn klainerman_ratio(jet: &Jet, m: usize, n_star: usize) -> Result<f64> {
    let inf = klainerman_energies(jet, m)?.e_inf_m;
    let one = klainerman_energies(jet, m + n_star)?.e_1m;
    ratio_of(inf, one, jet.t(), jet.grid().dims())
}

pub(crate) fn ratio_of(e_inf: f64, e_1: f64, t: f64, dims: usize) -> Result<f64> {
    if e_1 == 0.0 {
        if e_inf == 0.0 {
            return Ok(0.0);
        }
        return Err(Error::IllPosedRatio { numerator: e_inf });
    }
    let w = (1.0 + t).powf((1.0 - dims as f64) / 2.0);
    Ok(e_inf.sqrt() / (w * e_1.sqrt()))
}
