use serde::{Deserialize, Serialize};

use crate::dynamics::SimState;
use crate::energy::{decay_energy, energy_half_m, thresholds, EnvelopeParams};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::jet::build_jet;

use super::{check_guards, RunSetup};

/// Allowed rise of the multi-index energy between samples, relative to its
/// initial value.
pub const DECAY_SLACK: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecaySample {
    pub t: f64,
    /// Multi-index energy over the decay index set.
    pub e_decay: f64,
    pub e_half_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayOutcome {
    pub m: u32,
    pub samples: Vec<DecaySample>,
    /// `√E_{m/2}(0)` and the smallness bound it was checked against.
    pub sqrt_e_half0: f64,
    pub threshold: f64,
    /// Largest rise of `e_decay` between consecutive samples.
    pub max_rise: f64,
    /// `None` for inviscid runs, where no monotonicity is claimed.
    pub monotone: Option<bool>,
    /// `E_{m/2}(t) ≤ (3 + 2c²) E_{m/2}(0)` at every sample.
    pub bounded: bool,
    pub passed: bool,
}

fn sample(s: &SimState, setup: &RunSetup, m: u32) -> Result<DecaySample> {
    let jet = build_jet(s, &setup.p, setup.kind, (m / 2 + 1) as usize)?;
    Ok(DecaySample {
        t: s.t,
        e_decay: decay_energy(&jet, &setup.p, setup.kind, m)?,
        e_half_m: energy_half_m(&jet, m)?,
    })
}

/// Checks the viscous smallness condition on the data, then tracks the
/// multi-index energy and `E_{m/2}` every `report_every` steps.
pub fn viscous_decay_experiment(
    u0: &Field,
    u1: &Field,
    setup: &RunSetup,
    env: &EnvelopeParams,
    m: u32,
) -> Result<DecayOutcome> {
    check_guards(u0, u1, setup)?;
    env.validate()?;
    let mut state = SimState::new(u0.clone(), u1.clone())?;
    let plan = setup.plan(state.grid())?;
    let viscous = setup.p.nu > 0.0;
    let first = sample(&state, setup, m)?;
    let threshold = thresholds(&setup.p, env, state.grid().dims()).viscous_sqrt_energy;
    let sqrt_e_half0 = first.e_half_m.sqrt();
    if viscous && sqrt_e_half0 > threshold {
        return Err(Error::ThresholdNotMet(format!(
            "sqrt E_{{m/2}}(0) = {sqrt_e_half0:e} exceeds the viscous bound {threshold:e}"
        )));
    }
    let mut samples = vec![first];
    for n in 1..=plan.steps {
        state = setup.advance(&state, &plan)?;
        if n % setup.report_every == 0 || n == plan.steps {
            samples.push(sample(&state, setup, m)?);
        }
    }
    let e0 = samples[0].e_decay;
    let max_rise = samples
        .windows(2)
        .map(|w| w[1].e_decay - w[0].e_decay)
        .fold(f64::NEG_INFINITY, f64::max)
        .max(0.0);
    let monotone = viscous.then(|| max_rise <= DECAY_SLACK * e0 + 1e-300);
    let cap = (3.0 + 2.0 * setup.p.c * setup.p.c) * samples[0].e_half_m;
    let bounded = samples.iter().all(|s| s.e_half_m <= cap);
    Ok(DecayOutcome {
        m,
        samples,
        sqrt_e_half0,
        threshold,
        max_rise,
        monotone,
        bounded,
        passed: bounded && monotone.unwrap_or(true),
    })
}
