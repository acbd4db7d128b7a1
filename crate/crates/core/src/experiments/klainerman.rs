use serde::{Deserialize, Serialize};

use crate::dynamics::SimState;
use crate::energy::{klainerman_energies, n_star, ratio_of, support_radius};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::jet::build_jet;

use super::{check_guards, RunSetup};

/// Admissible `max ratio / ratio(t = 1)` over a run.
pub const RATIO_BOUND: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KlainermanSample {
    pub t: f64,
    pub ratio: f64,
    pub e_inf: f64,
    pub e_1: f64,
    pub support_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KlainermanOutcome {
    pub samples: Vec<KlainermanSample>,
    /// Ratio at the sample nearest `t = 1` (0 if the run is shorter).
    pub ratio_at_one: f64,
    pub ratio_max: f64,
    /// `ratio_max / ratio_at_one`, 0 for a vanishing series.
    pub growth: f64,
    pub passed: bool,
}

/// Tracks the weighted sup/L² ratio at word length `m` (against `m + n*`)
/// along an inviscid run on a centered grid, aborting when the support
/// radius leaves the admissible ball.
pub fn klainerman_experiment(
    u0: &Field,
    u1: &Field,
    setup: &RunSetup,
    m: usize,
) -> Result<KlainermanOutcome> {
    check_guards(u0, u1, setup)?;
    let grid = u0.grid().clone();
    if !grid.origin_centered() {
        return Err(Error::NotCentered);
    }
    let dims = grid.dims();
    let top = m + n_star(dims);
    let limit = setup.monitors.support_fraction
        * grid.lengths().iter().cloned().fold(f64::INFINITY, f64::min);
    let mut state = SimState::new(u0.clone(), u1.clone())?;
    let plan = setup.plan(&grid)?;
    // force a sample at t = 1
    let one = (1.0 / plan.dt).round() as usize;

    let measure = |s: &SimState| -> Result<KlainermanSample> {
        let radius = support_radius(s, &setup.p, setup.report.support_tol).unwrap_or(0.0);
        if radius > limit {
            return Err(Error::SupportMonitor { radius, limit });
        }
        let jet = build_jet(s, &setup.p, setup.kind, top + 1)?;
        let e_inf = klainerman_energies(&jet, m)?.e_inf_m;
        let e_1 = klainerman_energies(&jet, top)?.e_1m;
        Ok(KlainermanSample {
            t: s.t,
            ratio: ratio_of(e_inf, e_1, s.t, dims)?,
            e_inf,
            e_1,
            support_radius: radius,
        })
    };

    let mut samples = vec![measure(&state)?];
    for n in 1..=plan.steps {
        state = setup.advance(&state, &plan)?;
        if n % setup.report_every == 0 || n == one || n == plan.steps {
            samples.push(measure(&state)?);
        }
    }
    let ratio_at_one = samples
        .iter()
        .min_by(|a, b| (a.t - 1.0).abs().total_cmp(&(b.t - 1.0).abs()))
        .filter(|s| (s.t - 1.0).abs() < 0.5 * plan.dt.max(1e-12) + 1e-9)
        .map(|s| s.ratio)
        .unwrap_or(0.0);
    let ratio_max = samples.iter().map(|s| s.ratio).fold(0.0, f64::max);
    let growth = if ratio_max == 0.0 {
        0.0
    } else if ratio_at_one > 0.0 {
        ratio_max / ratio_at_one
    } else {
        f64::INFINITY
    };
    Ok(KlainermanOutcome {
        samples,
        ratio_at_one,
        ratio_max,
        growth,
        passed: growth <= RATIO_BOUND,
    })
}
