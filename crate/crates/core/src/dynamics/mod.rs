//! Model right-hand sides, the hyperbolicity guard and time integration.

mod integrate;
mod linear;
mod rhs;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;

pub use integrate::{
    admissible_dt, choose_scheme, step, step_with, Scheme, StepOptions, DEFAULT_CFL,
    DEFAULT_STIFFNESS,
};
pub use linear::{solve_linear_forced, LinearForcedOutcome, LinearSample, LINEAR_SLACK};
pub use rhs::{acceleration, hyperbolicity_factor, hyperbolicity_factor_for};

pub(crate) use rhs::Evaluation;

/// Physical coefficients shared by every model. Missing fields take the
/// [`Default`] values `c = 1, nu = 0, eps = 0.1, alpha = 1, beta = 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhysicalParams {
    /// Sound speed.
    pub c: f64,
    /// Viscosity.
    pub nu: f64,
    /// Perturbation scale.
    pub eps: f64,
    /// Cumulative (u_t u_tt) nonlinearity coefficient.
    pub alpha: f64,
    /// Local (∇u·∇u_t) nonlinearity coefficient.
    pub beta: f64,
    /// Smallest admissible hyperbolicity factor `1 - alpha*eps*u_t`.
    pub hyp_floor: f64,
}

pub const DEFAULT_HYP_FLOOR: f64 = 0.1;

impl Default for PhysicalParams {
    fn default() -> Self {
        Self {
            c: 1.0,
            nu: 0.0,
            eps: 0.1,
            alpha: 1.0,
            beta: 2.0,
            hyp_floor: DEFAULT_HYP_FLOOR,
        }
    }
}

impl PhysicalParams {
    pub fn new(c: f64, nu: f64, eps: f64, alpha: f64, beta: f64) -> Result<Self> {
        let p = Self {
            c,
            nu,
            eps,
            alpha,
            beta,
            hyp_floor: DEFAULT_HYP_FLOOR,
        };
        p.validate()?;
        Ok(p)
    }

    /// Gas-dynamics coefficients `alpha = (gamma-1)/c^2`, `beta = 2`.
    pub fn gas(gamma: f64, c: f64, nu: f64, eps: f64) -> Result<Self> {
        Self::new(c, nu, eps, (gamma - 1.0) / (c * c), 2.0)
    }

    /// Gas coefficients with the large sound speed `c^2 = 1/eps`.
    pub fn physical(gamma: f64, nu: f64, eps: f64) -> Result<Self> {
        Self::gas(gamma, (1.0 / eps).sqrt(), nu, eps)
    }

    /// Westervelt coefficient `(gamma+1)/c^2` stored in `alpha`; `beta` is
    /// kept at 2 but unused by [`ModelKind::Westervelt`].
    pub fn westervelt(gamma: f64, c: f64, nu: f64, eps: f64) -> Result<Self> {
        Self::new(c, nu, eps, (gamma + 1.0) / (c * c), 2.0)
    }

    pub fn with_hyp_floor(mut self, floor: f64) -> Result<Self> {
        self.hyp_floor = floor;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: &'static str, reason: &str| {
            Err(Error::InvalidParameter {
                field,
                reason: reason.to_string(),
            })
        };
        let all = [
            self.c,
            self.nu,
            self.eps,
            self.alpha,
            self.beta,
            self.hyp_floor,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return bad("params", "all coefficients must be finite");
        }
        if self.c <= 0.0 {
            return bad("c", "must be > 0");
        }
        if self.nu < 0.0 {
            return bad("nu", "must be >= 0");
        }
        if !(self.eps > 0.0 && self.eps <= 1.0) {
            return bad("eps", "must lie in (0, 1]");
        }
        if self.alpha <= 0.0 {
            return bad("alpha", "must be > 0");
        }
        if self.beta <= 0.0 {
            return bad("beta", "must be > 0");
        }
        if !(self.hyp_floor > 0.0 && self.hyp_floor < 1.0) {
            return bad("hyp_floor", "must lie in (0, 1)");
        }
        Ok(())
    }

    pub fn max_alpha_beta(&self) -> f64 {
        self.alpha.max(self.beta)
    }

    /// Sup-norm bound on `u_t` keeping `1 - alpha*eps*u_t` in `[1/2, 3/2]`.
    pub fn ut_bound(&self) -> f64 {
        1.0 / (2.0 * self.alpha * self.eps)
    }
}

/// Which reduction of the Kuznetsov equation to evolve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    /// `u_tt - c^2 Δu = 0`
    Wave,
    /// `u_tt - c^2 Δu - nu*eps Δu_t = 0`
    DampedWave,
    /// `u_tt - c^2 Δu - nu*eps Δu_t = alpha*eps u_t u_tt`
    Westervelt,
    /// `u_tt - c^2 Δu - nu*eps Δu_t = alpha*eps u_t u_tt + beta*eps ∇u·∇u_t`
    Kuznetsov,
}

impl ModelKind {
    pub fn coefficients(self, p: &PhysicalParams) -> Coefficients {
        let c2 = p.c * p.c;
        let visc = p.nu * p.eps;
        match self {
            ModelKind::Wave => Coefficients {
                c2,
                visc: 0.0,
                a: 0.0,
                b: 0.0,
            },
            ModelKind::DampedWave => Coefficients {
                c2,
                visc,
                a: 0.0,
                b: 0.0,
            },
            ModelKind::Westervelt => Coefficients {
                c2,
                visc,
                a: p.alpha * p.eps,
                b: 0.0,
            },
            ModelKind::Kuznetsov => Coefficients {
                c2,
                visc,
                a: p.alpha * p.eps,
                b: p.beta * p.eps,
            },
        }
    }

    pub fn is_linear(self) -> bool {
        matches!(self, ModelKind::Wave | ModelKind::DampedWave)
    }

    /// The same kind with `p` reinterpreted: effective `(alpha, beta)`.
    pub fn effective_alpha_beta(self, p: &PhysicalParams) -> (f64, f64) {
        let c = self.coefficients(p);
        (c.a / p.eps, c.b / p.eps)
    }
}

/// Products of the physical parameters as they enter the equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    /// `c^2`
    pub c2: f64,
    /// `nu*eps`
    pub visc: f64,
    /// `alpha*eps`
    pub a: f64,
    /// `beta*eps`
    pub b: f64,
}

/// `(u, u_t)` at time `t` plus the two running time integrals.
#[derive(Debug, Clone)]
pub struct SimState {
    pub u: Field,
    pub v: Field,
    pub t: f64,
    /// `beta*eps * ∫_0^t ∫ u_tt |∇u|^2` (trapezoid over accepted steps).
    pub fnu_accum: f64,
    /// `∫_0^t (‖u_tt‖_∞ + ‖Δu‖_∞)` (trapezoid over accepted steps).
    pub div_accum: f64,
    pub(crate) cache: Option<Arc<EndpointCache>>,
}

/// Acceleration and quadrature integrands at the state's own time, reused
/// as the left endpoint of the next step.
#[derive(Debug)]
pub(crate) struct EndpointCache {
    pub kind: ModelKind,
    pub params: PhysicalParams,
    pub eval: Evaluation,
}

impl PartialEq for SimState {
    fn eq(&self, other: &Self) -> bool {
        self.u == other.u
            && self.v == other.v
            && self.t == other.t
            && self.fnu_accum == other.fnu_accum
            && self.div_accum == other.div_accum
    }
}

impl SimState {
    pub fn new(u: Field, v: Field) -> Result<Self> {
        u.check_same_grid(&v)?;
        u.ensure_finite("initial u")?;
        v.ensure_finite("initial u_t")?;
        Ok(Self {
            u,
            v,
            t: 0.0,
            fnu_accum: 0.0,
            div_accum: 0.0,
            cache: None,
        })
    }

    /// Restores a state from checkpointed values.
    pub fn restore(u: Field, v: Field, t: f64, fnu_accum: f64, div_accum: f64) -> Result<Self> {
        let mut s = Self::new(u, v)?;
        s.t = t;
        s.fnu_accum = fnu_accum;
        s.div_accum = div_accum;
        Ok(s)
    }

    pub fn grid(&self) -> &Arc<crate::field::Grid> {
        self.u.grid()
    }

    pub(crate) fn cached_eval(&self, kind: ModelKind, p: &PhysicalParams) -> Option<&Evaluation> {
        self.cache
            .as_ref()
            .filter(|c| c.kind == kind && c.params == *p)
            .map(|c| &c.eval)
    }

    /// Acceleration `u_tt` of this state, reusing the step cache when present.
    pub fn acceleration(&self, p: &PhysicalParams, kind: ModelKind) -> Result<Field> {
        match self.cached_eval(kind, p) {
            Some(e) => Ok(e.accel.clone()),
            None => acceleration(self, p, kind),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_validation() {
        assert!(PhysicalParams::new(1.0, 0.0, 0.1, 1.0, 2.0).is_ok());
        for (c, nu, eps, a, b) in [
            (0.0, 0.0, 0.1, 1.0, 2.0),
            (1.0, -1.0, 0.1, 1.0, 2.0),
            (1.0, 0.0, 0.0, 1.0, 2.0),
            (1.0, 0.0, 1.5, 1.0, 2.0),
            (1.0, 0.0, 0.1, 0.0, 2.0),
            (1.0, 0.0, 0.1, 1.0, -2.0),
            (f64::NAN, 0.0, 0.1, 1.0, 2.0),
        ] {
            assert!(PhysicalParams::new(c, nu, eps, a, b).is_err());
        }
        let p = PhysicalParams::default();
        assert!(p.with_hyp_floor(1.0).is_err());
    }

    #[test]
    fn presets() {
        let p = PhysicalParams::gas(1.4, 2.0, 0.5, 0.1).unwrap();
        assert!((p.alpha - 0.1).abs() < 1e-15);
        assert_eq!(p.beta, 2.0);
        let q = PhysicalParams::physical(1.4, 0.5, 0.04).unwrap();
        assert!((q.c * q.c - 25.0).abs() < 1e-12);
        let w = PhysicalParams::westervelt(1.4, 2.0, 0.0, 0.1).unwrap();
        assert!((w.alpha - 0.6).abs() < 1e-15);
    }

    #[test]
    fn reductions_drop_terms() {
        let p = PhysicalParams::new(2.0, 0.5, 0.1, 1.0, 2.0).unwrap();
        let w = ModelKind::Wave.coefficients(&p);
        assert_eq!((w.c2, w.visc, w.a, w.b), (4.0, 0.0, 0.0, 0.0));
        let d = ModelKind::DampedWave.coefficients(&p);
        assert_eq!((d.visc, d.a, d.b), (0.05, 0.0, 0.0));
        let wv = ModelKind::Westervelt.coefficients(&p);
        assert_eq!((wv.a, wv.b), (0.1, 0.0));
        let k = ModelKind::Kuznetsov.coefficients(&p);
        assert_eq!((k.a, k.b), (0.1, 0.2));
    }
}
