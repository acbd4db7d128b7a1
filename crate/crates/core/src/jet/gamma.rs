use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{Error, Result};
use crate::field::{Field, Spectrum};

use super::{multi_derivative_spectrum, Jet, MultiIndex};

pub const MAX_WORD_LEN: usize = 2;

/// One generalized derivative. Axis indices are zero-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GammaOp {
    /// `t ∂_t + Σ x_i ∂_i`
    Scaling,
    /// `x_i ∂_t + t ∂_i`
    Boost(usize),
    /// `x_i ∂_k - x_k ∂_i`, `i < k`
    Rotation(usize, usize),
    /// `∂_t`
    Time,
    /// `∂_i`
    Space(usize),
}

impl GammaOp {
    fn check(self, dims: usize) -> Result<()> {
        let ok = match self {
            GammaOp::Scaling | GammaOp::Time => true,
            GammaOp::Boost(i) | GammaOp::Space(i) => i < dims,
            GammaOp::Rotation(i, k) => i < k && k < dims,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter {
                field: "gamma word",
                reason: format!("{self} not defined in dimension {dims}"),
            })
        }
    }

    fn has_weights(self) -> bool {
        !matches!(self, GammaOp::Time | GammaOp::Space(_))
    }

    /// First-order pieces `(coeff, t power, x powers, derivative variable)`,
    /// variable 0 being time.
    fn pieces(self, dims: usize) -> Vec<(i64, u32, [u32; 3], usize)> {
        let e = |i: usize| {
            let mut x = [0; 3];
            x[i] = 1;
            x
        };
        match self {
            GammaOp::Scaling => {
                let mut v = vec![(1, 1, [0; 3], 0)];
                v.extend((0..dims).map(|i| (1, 0, e(i), i + 1)));
                v
            }
            GammaOp::Boost(i) => vec![(1, 0, e(i), 0), (1, 1, [0; 3], i + 1)],
            GammaOp::Rotation(i, k) => vec![(1, 0, e(i), k + 1), (-1, 0, e(k), i + 1)],
            GammaOp::Time => vec![(1, 0, [0; 3], 0)],
            GammaOp::Space(i) => vec![(1, 0, [0; 3], i + 1)],
        }
    }
}

impl fmt::Display for GammaOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GammaOp::Scaling => write!(f, "L0"),
            GammaOp::Boost(i) => write!(f, "L{}", i + 1),
            GammaOp::Rotation(i, k) => write!(f, "O{}{}", i + 1, k + 1),
            GammaOp::Time => write!(f, "dt"),
            GammaOp::Space(i) => write!(f, "d{}", i + 1),
        }
    }
}

/// A word `Γ_1 Γ_2 ..` of at most [`MAX_WORD_LEN`] generalized derivatives,
/// acting right to left.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GammaIndex(Vec<GammaOp>);

impl GammaIndex {
    pub fn new(ops: Vec<GammaOp>) -> Result<Self> {
        if ops.len() > MAX_WORD_LEN {
            return Err(Error::WordTooLong(ops.len()));
        }
        Ok(Self(ops))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn ops(&self) -> &[GammaOp] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn needs_weights(&self) -> bool {
        self.0.iter().any(|o| o.has_weights())
    }
}

impl fmt::Display for GammaIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "id");
        }
        for (i, op) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{op}")?;
        }
        Ok(())
    }
}

/// `coeff * t^t_pow * Π x_i^{x_pow_i} * D^deriv`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Term {
    pub coeff: i64,
    pub t_pow: u32,
    pub x_pow: [u32; 3],
    pub deriv: MultiIndex,
}

/// All generalized derivatives in dimension `dims`, in canonical order.
pub fn gamma_alphabet(dims: usize) -> Vec<GammaOp> {
    let mut v = vec![GammaOp::Scaling];
    v.extend((0..dims).map(GammaOp::Boost));
    for i in 0..dims {
        for k in i + 1..dims {
            v.push(GammaOp::Rotation(i, k));
        }
    }
    v.push(GammaOp::Time);
    v.extend((0..dims).map(GammaOp::Space));
    v
}

/// Words `Γ^A` with `|A| ≤ m`: ordered products `Γ_i Γ_j` with `i ≤ j` in
/// alphabet order.
pub fn gamma_words(dims: usize, m: usize) -> Result<Vec<GammaIndex>> {
    if m > MAX_WORD_LEN {
        return Err(Error::WordTooLong(m));
    }
    let alpha = gamma_alphabet(dims);
    let mut out = vec![GammaIndex::empty()];
    if m >= 1 {
        out.extend(alpha.iter().map(|&o| GammaIndex(vec![o])));
    }
    if m >= 2 {
        for i in 0..alpha.len() {
            for j in i..alpha.len() {
                out.push(GammaIndex(vec![alpha[i], alpha[j]]));
            }
        }
    }
    Ok(out)
}

type Key = (u32, [u32; 3], MultiIndex);

fn expand_uncached(word: &GammaIndex, dims: usize) -> Vec<Term> {
    let mut terms: BTreeMap<Key, i64> = BTreeMap::new();
    terms.insert((0, [0; 3], MultiIndex::ZERO), 1);
    for op in word.0.iter().rev() {
        let mut next: BTreeMap<Key, i64> = BTreeMap::new();
        for (&(tp, xp, d), &c) in &terms {
            for (pc, ptp, pxp, var) in op.pieces(dims) {
                let base_t = tp + ptp;
                let base_x = [xp[0] + pxp[0], xp[1] + pxp[1], xp[2] + pxp[2]];
                // weight * ∂_var of the existing monomial
                let (dpow, dc) = if var == 0 {
                    (tp, tp as i64)
                } else {
                    (xp[var - 1], xp[var - 1] as i64)
                };
                if dpow > 0 {
                    let mut nt = base_t;
                    let mut nx = base_x;
                    if var == 0 {
                        nt -= 1;
                    } else {
                        nx[var - 1] -= 1;
                    }
                    *next.entry((nt, nx, d)).or_insert(0) += c * pc * dc;
                }
                *next.entry((base_t, base_x, d.bump(var))).or_insert(0) += c * pc;
            }
        }
        next.retain(|_, c| *c != 0);
        terms = next;
    }
    terms
        .into_iter()
        .map(|((t_pow, x_pow, deriv), coeff)| Term {
            coeff,
            t_pow,
            x_pow,
            deriv,
        })
        .collect()
}

fn cache() -> &'static RwLock<HashMap<(GammaIndex, usize), Arc<Vec<Term>>>> {
    static CACHE: OnceLock<RwLock<HashMap<(GammaIndex, usize), Arc<Vec<Term>>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Product-rule expansion of `word` into weighted mixed derivatives.
pub fn expand_gamma(word: &GammaIndex, dims: usize) -> Result<Arc<Vec<Term>>> {
    if word.len() > MAX_WORD_LEN {
        return Err(Error::WordTooLong(word.len()));
    }
    for op in word.ops() {
        op.check(dims)?;
    }
    let key = (word.clone(), dims);
    if let Some(t) = cache().read().expect("gamma cache poisoned").get(&key) {
        return Ok(t.clone());
    }
    let terms = Arc::new(expand_uncached(word, dims));
    cache()
        .write()
        .expect("gamma cache poisoned")
        .insert(key, terms.clone());
    Ok(terms)
}

/// `Γ^word u` at the jet's time.
pub fn apply_gamma(jet: &Jet, word: &GammaIndex) -> Result<Field> {
    apply_gamma_to(jet, word, &MultiIndex::ZERO)
}

/// `Γ^word D^base u` at the jet's time.
pub fn apply_gamma_to(jet: &Jet, word: &GammaIndex, base: &MultiIndex) -> Result<Field> {
    GammaEval::new(jet).apply(word, base)
}

/// Applies many words to one jet, sharing the mixed-derivative fields.
pub(crate) struct GammaEval<'a> {
    jet: &'a Jet,
    derivs: HashMap<MultiIndex, Field>,
    weights: HashMap<[u32; 3], Vec<f64>>,
}

impl<'a> GammaEval<'a> {
    pub fn new(jet: &'a Jet) -> Self {
        Self {
            jet,
            derivs: HashMap::new(),
            weights: HashMap::new(),
        }
    }

    fn weight(&mut self, pow: [u32; 3]) -> &[f64] {
        let grid = self.jet.grid().clone();
        self.weights.entry(pow).or_insert_with(|| {
            let mut x = [0.0; 3];
            (0..grid.len())
                .map(|idx| {
                    grid.point(idx, &mut x);
                    (0..grid.dims()).map(|i| x[i].powi(pow[i] as i32)).product()
                })
                .collect()
        })
    }

    pub fn apply(&mut self, word: &GammaIndex, base: &MultiIndex) -> Result<Field> {
        let grid = self.jet.grid().clone();
        if word.needs_weights() && !grid.origin_centered() {
            return Err(Error::NotCentered);
        }
        let terms = expand_gamma(word, grid.dims())?;
        let t = self.jet.t();
        let mut acc = vec![0.0; grid.len()];
        for term in terms.iter() {
            let tw = term.coeff as f64 * t.powi(term.t_pow as i32);
            if tw == 0.0 {
                continue;
            }
            let mut d = term.deriv;
            d.time += base.time;
            for i in 0..3 {
                d.space[i] += base.space[i];
            }
            if !self.derivs.contains_key(&d) {
                let s: Spectrum = multi_derivative_spectrum(self.jet, &d)?;
                self.derivs.insert(d, s.to_field());
            }
            if term.x_pow == [0; 3] {
                let f = &self.derivs[&d];
                for (a, &val) in acc.iter_mut().zip(f.values()) {
                    *a += tw * val;
                }
            } else {
                self.weight(term.x_pow);
                let w = &self.weights[&term.x_pow];
                let f = &self.derivs[&d];
                for ((a, &val), &wx) in acc.iter_mut().zip(f.values()).zip(w) {
                    *a += tw * wx * val;
                }
            }
        }
        Field::from_values(&grid, acc)
    }
}
