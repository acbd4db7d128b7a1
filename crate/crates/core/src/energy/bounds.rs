use serde::{Deserialize, Serialize};

use crate::dynamics::{ModelKind, PhysicalParams, SimState};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::jet::build_jet;

use super::inverse_factor_sup;

/// Unnamed constants of the a priori estimates. All default to 1 except
/// `b`, which defaults to `(3 + 2c²)/min(1/2, c²)`, and `c1_stab`, which
/// defaults to `3 + 2c²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnvelopeParams {
    pub b: Option<f64>,
    pub c_m: f64,
    pub c_m0: f64,
    pub d_m: f64,
    pub c_inf: f64,
    pub c1_stab: Option<f64>,
    pub c2_stab: f64,
    pub c_n_klainerman: f64,
    pub c0_maxreg: f64,
    pub c_embed: f64,
}

impl Default for EnvelopeParams {
    fn default() -> Self {
        Self {
            b: None,
            c_m: 1.0,
            c_m0: 1.0,
            d_m: 1.0,
            c_inf: 1.0,
            c1_stab: None,
            c2_stab: 1.0,
            c_n_klainerman: 1.0,
            c0_maxreg: 1.0,
            c_embed: 1.0,
        }
    }
}

impl EnvelopeParams {
    pub fn validate(&self) -> Result<()> {
        let named = [
            ("envelope.b", self.b.unwrap_or(1.0)),
            ("envelope.c_m", self.c_m),
            ("envelope.c_m0", self.c_m0),
            ("envelope.d_m", self.d_m),
            ("envelope.c_inf", self.c_inf),
            ("envelope.c1_stab", self.c1_stab.unwrap_or(1.0)),
            ("envelope.c2_stab", self.c2_stab),
            ("envelope.c_n_klainerman", self.c_n_klainerman),
            ("envelope.c0_maxreg", self.c0_maxreg),
            ("envelope.c_embed", self.c_embed),
        ];
        for (field, v) in named {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter {
                    field,
                    reason: format!("must be positive and finite, got {v}"),
                });
            }
        }
        Ok(())
    }

    pub fn b(&self, p: &PhysicalParams) -> f64 {
        let c2 = p.c * p.c;
        self.b.unwrap_or((3.0 + 2.0 * c2) / c2.min(0.5))
    }

    pub fn c1_stab(&self, p: &PhysicalParams) -> f64 {
        self.c1_stab.unwrap_or(3.0 + 2.0 * p.c * p.c)
    }
}

/// Closed-form thresholds for one parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub b: f64,
    /// `[n/2 + 2]`
    pub m0: u32,
    /// Smallest even `m ≥ [n/2 + 3]`.
    pub m_viscous: u32,
    /// Bound on `‖u_t‖_∞` keeping the hyperbolicity factor in `[1/2, 3/2]`.
    pub ut_bound: f64,
    /// Inviscid smallness bound on `sqrt(E_{m0}(0))`.
    pub inviscid_sqrt_energy: f64,
    /// Viscous smallness bound on `sqrt(E_{m/2}(0))`.
    pub viscous_sqrt_energy: f64,
    /// Bound on the multi-index energy `E(0)` guaranteeing decay.
    pub viscous_e0: f64,
    /// Fixed-point radius `r_*`.
    pub r_star: f64,
    /// `w(r_*)`, the contraction margin at the radius.
    pub w_r_star: f64,
}

impl Thresholds {
    /// `w(r) = r - 2 (C_0/ν) C_emb (α + β) r²`.
    pub fn w(r: f64, p: &PhysicalParams, env: &EnvelopeParams) -> f64 {
        if p.nu == 0.0 {
            return f64::NEG_INFINITY;
        }
        r - 2.0 * (env.c0_maxreg / p.nu) * env.c_embed * (p.alpha + p.beta) * r * r
    }
}

pub fn thresholds(p: &PhysicalParams, env: &EnvelopeParams, dims: usize) -> Thresholds {
    let b = env.b(p);
    let c2 = p.c * p.c;
    let ab = p.max_alpha_beta();
    let m0 = (dims / 2 + 2) as u32;
    let mut m_viscous = (dims / 2 + 3) as u32;
    if m_viscous % 2 == 1 {
        m_viscous += 1;
    }
    let r_star = p.nu / (4.0 * env.c0_maxreg * (p.alpha + p.beta) * env.c_embed);
    Thresholds {
        b,
        m0,
        m_viscous,
        ut_bound: p.ut_bound(),
        inviscid_sqrt_energy: 1.0 / (4.0 * b.sqrt() * env.c_inf * p.alpha * p.eps),
        viscous_sqrt_energy: 2f64.sqrt() * p.nu / ((1.5 + c2).sqrt() * env.c_m * ab),
        viscous_e0: 2.0 * (p.nu / (env.c_m * ab)).powi(2),
        r_star,
        w_r_star: if p.nu > 0.0 {
            Thresholds::w(r_star, p, env)
        } else {
            0.0
        },
    }
}

/// `z0 / (1 - ½ sqrt(z0) C max(α,β) ε t)²`.
pub fn gronwall_envelope(z0: f64, c: f64, p: &PhysicalParams, t: f64) -> Result<f64> {
    let d = 1.0 - 0.5 * z0.sqrt() * c * p.max_alpha_beta() * p.eps * t;
    if d <= 0.0 {
        return Err(Error::EnvelopePole { t });
    }
    Ok(z0 / (d * d))
}

/// `1 / (C_{m0} max(α,β) ε sqrt(B) E0)`; infinite for zero data.
pub fn lifespan_t0(e0: f64, p: &PhysicalParams, env: &EnvelopeParams) -> f64 {
    1.0 / (env.c_m0 * p.max_alpha_beta() * p.eps * env.b(p).sqrt() * e0)
}

/// Integer polynomials in `c²` (index = power) for `a_0 ..= a_k`.
pub fn cascade_polynomials(k: usize) -> Vec<Vec<u64>> {
    let mut a: Vec<Vec<u64>> = vec![vec![1]];
    if k >= 1 {
        a.push(vec![2, 2]);
    }
    let add = |acc: &mut Vec<u64>, p: &[u64], scale: u64, shift: usize| {
        if acc.len() < p.len() + shift {
            acc.resize(p.len() + shift, 0);
        }
        for (i, &c) in p.iter().enumerate() {
            acc[i + shift] += scale * c;
        }
    };
    for j in 1..k {
        // a_{j+1} = a_j + 2c² a_{j-1} + 2 Σ_{i ≤ j} a_i + 1
        let mut next = vec![1u64];
        add(&mut next, &a[j], 1, 0);
        add(&mut next, &a[j - 1], 2, 1);
        for i in 0..=j {
            let ai = a[i].clone();
            add(&mut next, &ai, 2, 0);
        }
        a.push(next);
    }
    a
}

pub fn cascade_coefficients(k: usize, c: f64) -> Vec<f64> {
    let c2 = c * c;
    cascade_polynomials(k)
        .iter()
        .map(|poly| {
            poly.iter()
                .rev()
                .fold(0.0, |acc, &coef| acc * c2 + coef as f64)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialDataRow {
    pub k: usize,
    /// `‖∂_t^{k+1} u(0)‖_{H^{m-2k}}`
    pub lhs: f64,
    /// `a_k (‖∇u_0‖_{H^m} + ‖u_1‖_{H^m})`
    pub rhs: f64,
}

impl InitialDataRow {
    pub fn margin(&self) -> f64 {
        self.rhs - self.lhs
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialDataCheck {
    pub m: u32,
    /// `‖1/(1 - αε u_1)‖_∞`
    pub inverse_factor_sup: f64,
    pub rows: Vec<InitialDataRow>,
}

/// Evaluates both sides of the initial time-derivative bounds for
/// `k = 0 ..= m/2` and fails if any is violated.
pub fn initial_data_bound_check(
    u0: &Field,
    u1: &Field,
    p: &PhysicalParams,
    kind: ModelKind,
    m: u32,
) -> Result<InitialDataCheck> {
    let (alpha, _) = kind.effective_alpha_beta(p);
    let sup = inverse_factor_sup(u1, alpha * p.eps);
    if sup > 2.0 {
        return Err(Error::Precondition(format!(
            "‖1/(1 - αε u_1)‖_∞ = {sup} exceeds 2"
        )));
    }
    let kmax = (m / 2) as usize;
    let state = SimState::new(u0.clone(), u1.clone())?;
    let jet = build_jet(&state, p, kind, kmax + 1)?;
    let base = jet.spectrum(0)?.gradient_sobolev_sq(m as f64).sqrt()
        + jet.spectrum(1)?.sobolev_sq(m as f64).sqrt();
    let a = cascade_coefficients(kmax, p.c);
    let mut rows = Vec::with_capacity(kmax + 1);
    for k in 0..=kmax {
        let lhs = jet
            .spectrum(k + 1)?
            .sobolev_sq((m as usize - 2 * k) as f64)
            .sqrt();
        let row = InitialDataRow {
            k,
            lhs,
            rhs: a[k] * base,
        };
        if row.lhs > row.rhs {
            return Err(Error::InequalityViolated(format!(
                "initial time-derivative bound k = {k}: {} > {}",
                row.lhs, row.rhs
            )));
        }
        rows.push(row);
    }
    Ok(InitialDataCheck {
        m,
        inverse_factor_sup: sup,
        rows,
    })
}
