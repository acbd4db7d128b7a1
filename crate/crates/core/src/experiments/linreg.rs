use serde::{Deserialize, Serialize};

use crate::dynamics::{solve_linear_forced, PhysicalParams};
use crate::error::{Error, Result};
use crate::field::Field;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinregRow {
    pub horizon: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// The `1/(2νε) ∫‖f‖²` part of `rhs`.
    pub forcing_term: f64,
    /// `(rhs - lhs) / rhs`, 0 when both vanish.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinregOutcome {
    pub rows: Vec<LinregRow>,
    pub slack: f64,
    pub passed: bool,
}

/// Integrates the forced linear problem to the largest horizon and reports
/// both sides of the energy estimate at each requested horizon.
pub fn linear_regularity_experiment(
    u0: &Field,
    u1: &Field,
    forcing: &dyn Fn(f64) -> Field,
    p: &PhysicalParams,
    horizons: &[f64],
    dt: f64,
    slack: f64,
) -> Result<LinregOutcome> {
    let top = horizons.iter().cloned().fold(f64::NAN, f64::max);
    if horizons.is_empty() || !(top >= 0.0) {
        return Err(Error::InvalidParameter {
            field: "horizons",
            reason: "need at least one nonnegative horizon".into(),
        });
    }
    // collect every sample; the slack is applied below
    let out = solve_linear_forced(u0, u1, forcing, top, dt, p, f64::INFINITY)?;
    let rhs0 = out.samples[0].rhs;
    let rows: Vec<LinregRow> = horizons
        .iter()
        .map(|&h| {
            let s = out
                .samples
                .iter()
                .min_by(|a, b| (a.t - h).abs().total_cmp(&(b.t - h).abs()))
                .copied()
                .expect("initial sample present");
            LinregRow {
                horizon: s.t,
                lhs: s.lhs,
                rhs: s.rhs,
                forcing_term: s.rhs - rhs0,
                margin: if s.rhs > 0.0 {
                    (s.rhs - s.lhs) / s.rhs
                } else {
                    0.0
                },
            }
        })
        .collect();
    let passed = out.samples.iter().all(|s| s.lhs <= s.rhs * (1.0 + slack));
    Ok(LinregOutcome {
        rows,
        slack,
        passed,
    })
}
