//! Orchestrated runs: breakdown detection, lifespan sweeps, stability of
//! perturbed pairs, viscous decay, weighted decay ratios and the forced
//! linear estimate.

mod decay;
mod klainerman;
mod linreg;
mod results;
mod stability;
mod sweep;

use serde::{Deserialize, Serialize};

use crate::dynamics::{
    admissible_dt, choose_scheme, hyperbolicity_factor_for, step_with, ModelKind, PhysicalParams,
    Scheme, SimState, StepOptions,
};
use crate::energy::{compute_report, EnergyReport, ReportSpec};
use crate::error::{Error, Result};
use crate::field::{Field, Grid, Spectrum};

pub use decay::{viscous_decay_experiment, DecayOutcome, DecaySample, DECAY_SLACK};
pub use klainerman::{klainerman_experiment, KlainermanOutcome, KlainermanSample, RATIO_BOUND};
pub use linreg::{linear_regularity_experiment, LinregOutcome, LinregRow};
pub use results::{load_checkpoint, save_checkpoint, CheckpointMeta, ResultsDir};
pub use stability::{stability_experiment, StabilityOutcome, StabilitySample, C2_LIMIT};
pub use sweep::{fit_loglog, lifespan_sweep, LoglogFit, SweepResult, SweepRow};

/// Which monitor ended a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BreakdownCause {
    HyperbolicityBreakdown,
    SpectralUnderResolution,
    DivergenceThreshold,
    HorizonReached,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlowupVerdict {
    /// Present exactly when a breakdown monitor tripped.
    pub t_star: Option<f64>,
    pub cause: BreakdownCause,
    pub div_accum_final: f64,
}

/// Stopping monitors and run guards.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Monitors {
    /// Trip when this share of the spectral energy sits in the top third of modes.
    pub spectral_fraction: f64,
    /// Optional cap on the accumulated divergence integral.
    pub div_threshold: Option<f64>,
    /// Optional sup-norm guard on `u0`.
    pub sup_u0: Option<f64>,
    /// Optional sup-norm guard on `|∇u0|`.
    pub sup_grad_u0: Option<f64>,
    /// Weighted diagnostics are valid while the support radius stays below
    /// this fraction of the shortest box side.
    pub support_fraction: f64,
}

impl Default for Monitors {
    fn default() -> Self {
        Self {
            spectral_fraction: 0.01,
            div_threshold: None,
            sup_u0: None,
            sup_grad_u0: None,
            support_fraction: 0.4,
        }
    }
}

/// Everything a single run needs besides its data.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSetup {
    pub p: PhysicalParams,
    pub kind: ModelKind,
    /// `None` picks explicit RK4 unless stiff.
    pub scheme: Option<Scheme>,
    /// Requested step; shrunk to the CFL limit and to divide the horizon.
    pub dt: f64,
    pub opts: StepOptions,
    pub horizon: f64,
    /// Report every this many steps (the initial state is always reported).
    pub report_every: usize,
    pub report: ReportSpec,
    pub monitors: Monitors,
}

impl RunSetup {
    pub fn new(p: PhysicalParams, kind: ModelKind, horizon: f64) -> Self {
        Self {
            p,
            kind,
            scheme: None,
            dt: f64::INFINITY,
            opts: StepOptions::default(),
            horizon,
            report_every: 10,
            report: ReportSpec::default(),
            monitors: Monitors::default(),
        }
    }

    /// Step size, step count and scheme for this grid.
    pub fn plan(&self, grid: &Grid) -> Result<Plan> {
        self.p.validate()?;
        self.report.validate()?;
        if !(self.horizon >= 0.0 && self.horizon.is_finite()) {
            return Err(Error::InvalidParameter {
                field: "horizon",
                reason: format!("must be finite and nonnegative, got {}", self.horizon),
            });
        }
        if !(self.dt > 0.0) {
            return Err(Error::InvalidParameter {
                field: "dt",
                reason: format!("must be positive, got {}", self.dt),
            });
        }
        if self.report_every == 0 {
            return Err(Error::InvalidParameter {
                field: "report_every",
                reason: "must be at least 1".into(),
            });
        }
        let max_dt = admissible_dt(self.dt, grid, &self.p, &self.opts);
        let steps = (self.horizon / max_dt * (1.0 - 1e-12)).ceil() as usize;
        let dt = if steps == 0 {
            max_dt
        } else {
            self.horizon / steps as f64
        };
        let scheme = self
            .scheme
            .unwrap_or_else(|| choose_scheme(grid, &self.p, self.kind, dt, &self.opts));
        Ok(Plan { dt, steps, scheme })
    }

    pub(crate) fn advance(&self, state: &SimState, plan: &Plan) -> Result<SimState> {
        step_with(state, plan.dt, &self.p, self.kind, plan.scheme, &self.opts)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plan {
    pub dt: f64,
    pub steps: usize,
    pub scheme: Scheme,
}

/// Result of [`run_until_breakdown`].
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub reports: Vec<EnergyReport>,
    pub verdict: BlowupVerdict,
    pub state: SimState,
    /// Accepted steps, counted from the start of the run.
    pub steps: usize,
    /// `(t, div_accum)` after every accepted step, starting at `t = 0`.
    pub div_series: Vec<(f64, f64)>,
    pub plan: Plan,
}

/// Checks the run guards on initial data: `‖u1‖_∞ < 1/(2αε)` for the
/// nonlinear models and the optional sup-norm bounds.
pub fn check_guards(u0: &Field, u1: &Field, setup: &RunSetup) -> Result<()> {
    u0.check_same_grid(u1)?;
    let (alpha, _) = setup.kind.effective_alpha_beta(&setup.p);
    let sup_v = u1.linf_norm()?;
    if alpha > 0.0 {
        let bound = 1.0 / (2.0 * alpha * setup.p.eps);
        if !(sup_v < bound) {
            return Err(Error::GuardViolation(format!(
                "sup |u1| = {sup_v} is not below 1/(2 alpha eps) = {bound}"
            )));
        }
    }
    if let Some(m1) = setup.monitors.sup_u0 {
        let s = u0.linf_norm()?;
        if s > m1 {
            return Err(Error::GuardViolation(format!(
                "sup |u0| = {s} exceeds {m1}"
            )));
        }
    }
    if let Some(m2) = setup.monitors.sup_grad_u0 {
        let g = u0.gradient()?;
        let s = (0..u0.grid().len())
            .map(|j| g.iter().map(|f| f.values()[j].powi(2)).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        if s > m2 {
            return Err(Error::GuardViolation(format!(
                "sup |grad u0| = {s} exceeds {m2}"
            )));
        }
    }
    Ok(())
}

/// Share of `Σ |v̂|² + c²|k|²|û|²` carried by the modes the 2/3 rule removes.
pub fn spectral_tail_fraction(state: &SimState, c: f64) -> f64 {
    let (su, sv) = Spectrum::pair(&state.u, &state.v);
    let grid = state.grid();
    let (k2, keep) = (grid.k2(), grid.keep());
    let c2 = c * c;
    let (mut top, mut all) = (0.0, 0.0);
    for j in 0..grid.len() {
        let e = sv.coeffs()[j].norm_sqr() + c2 * k2[j] * su.coeffs()[j].norm_sqr();
        all += e;
        if !keep[j] {
            top += e;
        }
    }
    if all > 0.0 {
        top / all
    } else {
        0.0
    }
}

fn tripped(state: &SimState, setup: &RunSetup) -> Option<BreakdownCause> {
    let (_, min) = hyperbolicity_factor_for(&state.v, &setup.p, setup.kind);
    if !setup.kind.is_linear() && !(min > setup.p.hyp_floor) {
        return Some(BreakdownCause::HyperbolicityBreakdown);
    }
    if spectral_tail_fraction(state, setup.p.c) > setup.monitors.spectral_fraction {
        return Some(BreakdownCause::SpectralUnderResolution);
    }
    if let Some(th) = setup.monitors.div_threshold {
        if state.div_accum > th {
            return Some(BreakdownCause::DivergenceThreshold);
        }
    }
    None
}

/// Steps from `(u0, u1)` until a breakdown monitor trips or the horizon is
/// reached, reporting every `report_every` steps.
pub fn run_until_breakdown(u0: &Field, u1: &Field, setup: &RunSetup) -> Result<RunOutcome> {
    check_guards(u0, u1, setup)?;
    let state = SimState::new(u0.clone(), u1.clone())?;
    run_from(state, 0, setup, &mut |_| Ok(()))
}

/// Continues a run from `state`, taken after `start_step` accepted steps of
/// the same setup. `sink` sees each report as it is produced.
pub fn run_from(
    state: SimState,
    start_step: usize,
    setup: &RunSetup,
    sink: &mut dyn FnMut(&EnergyReport) -> Result<()>,
) -> Result<RunOutcome> {
    let plan = setup.plan(state.grid())?;
    let mut state = state;
    let mut reports = Vec::new();
    let mut div_series = vec![(state.t, state.div_accum)];
    let mut emit = |s: &SimState, reports: &mut Vec<EnergyReport>| -> Result<()> {
        let r = compute_report(s, &setup.p, setup.kind, &setup.report)?;
        sink(&r)?;
        reports.push(r);
        Ok(())
    };

    let mut verdict = None;
    if let Some(cause) = tripped(&state, setup) {
        verdict = Some((cause, state.t));
    } else if start_step % setup.report_every == 0 {
        emit(&state, &mut reports)?;
    }
    let mut n = start_step;
    while verdict.is_none() && n < plan.steps {
        let next = match setup.advance(&state, &plan) {
            Ok(s) => s,
            Err(Error::HyperbolicityBreakdown { .. }) => {
                verdict = Some((BreakdownCause::HyperbolicityBreakdown, state.t));
                break;
            }
            Err(e) => return Err(e),
        };
        state = next;
        n += 1;
        div_series.push((state.t, state.div_accum));
        if let Some(cause) = tripped(&state, setup) {
            verdict = Some((cause, state.t));
            // evidence row at breakdown, when still evaluable
            if let Ok(r) = compute_report(&state, &setup.p, setup.kind, &setup.report) {
                sink(&r)?;
                reports.push(r);
            }
            break;
        }
        if n % setup.report_every == 0 {
            emit(&state, &mut reports)?;
        }
    }
    let verdict = match verdict {
        Some((cause, t)) => BlowupVerdict {
            t_star: Some(t),
            cause,
            div_accum_final: state.div_accum,
        },
        None => BlowupVerdict {
            t_star: None,
            cause: BreakdownCause::HorizonReached,
            div_accum_final: state.div_accum,
        },
    };
    Ok(RunOutcome {
        reports,
        verdict,
        state,
        steps: n,
        div_series,
        plan,
    })
}
