use serde::{Deserialize, Serialize};

use crate::dynamics::SimState;
use crate::error::{Error, Result};
use crate::field::Field;

use super::{check_guards, RunSetup};

/// Largest admissible growth constant of the fitted envelope.
pub const C2_LIMIT: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilitySample {
    pub t: f64,
    /// `‖(u-w)_t‖² + ‖∇(u-w)‖²`
    pub d: f64,
    /// `∫ max(‖u_tt‖_∞, ‖Δu‖_∞)` along the reference run.
    pub a_int: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityOutcome {
    pub samples: Vec<StabilitySample>,
    pub c1: f64,
    /// Smallest `C2 ≥ 0` with `d(t) ≤ C1 exp(C2 ε A(t)) d(0)` at every sample;
    /// infinite if none exists.
    pub c2: f64,
    pub passed: bool,
}

fn distance(a: &SimState, b: &SimState) -> Result<f64> {
    let dv = a.v.sub(&b.v);
    let du = a.u.sub(&b.u).spectrum();
    Ok(dv.l2_norm().powi(2) + du.weighted_sq(|q| q))
}

fn sup_rate(s: &SimState, setup: &RunSetup) -> Result<f64> {
    let a = s.acceleration(&setup.p, setup.kind)?.linf_norm()?;
    let l = s.u.laplacian()?.linf_norm()?;
    Ok(a.max(l))
}

/// Runs the reference data `(u0, u1)` and the perturbed data `(w0, w1)` in
/// lockstep and fits the growth constant of their energy distance with
/// `C1 = 3 + 2c²` held fixed.
pub fn stability_experiment(
    u: (&Field, &Field),
    w: (&Field, &Field),
    setup: &RunSetup,
) -> Result<StabilityOutcome> {
    check_guards(u.0, u.1, setup)?;
    check_guards(w.0, w.1, setup)?;
    u.0.check_same_grid(w.0)?;
    let mut a = SimState::new(u.0.clone(), u.1.clone())?;
    let mut b = SimState::new(w.0.clone(), w.1.clone())?;
    let plan = setup.plan(a.grid())?;
    let c1 = 3.0 + 2.0 * setup.p.c * setup.p.c;
    let d0 = distance(&a, &b)?;
    let mut a_int = 0.0;
    let mut rate = sup_rate(&a, setup)?;
    let mut samples = vec![StabilitySample {
        t: 0.0,
        d: d0,
        a_int,
    }];
    for n in 1..=plan.steps {
        a = setup.advance(&a, &plan)?;
        b = setup.advance(&b, &plan)?;
        let r = sup_rate(&a, setup)?;
        a_int += 0.5 * plan.dt * (rate + r);
        rate = r;
        if n % setup.report_every == 0 || n == plan.steps {
            samples.push(StabilitySample {
                t: a.t,
                d: distance(&a, &b)?,
                a_int,
            });
        }
    }
    let eps = setup.p.eps;
    if d0 == 0.0 {
        // identical data must stay identical; anything else breaks uniqueness
        if let Some(s) = samples.iter().find(|s| s.d > 0.0) {
            return Err(Error::UniquenessViolation { t: s.t, d: s.d });
        }
        return Ok(StabilityOutcome {
            samples,
            c1,
            c2: 0.0,
            passed: true,
        });
    }
    let mut c2 = 0.0f64;
    for s in &samples {
        let excess = (s.d / (c1 * d0)).ln();
        if excess > 0.0 {
            let need = if s.a_int > 0.0 {
                excess / (eps * s.a_int)
            } else {
                f64::INFINITY
            };
            c2 = c2.max(need);
        }
    }
    Ok(StabilityOutcome {
        samples,
        c1,
        c2,
        passed: c2 <= C2_LIMIT,
    })
}
