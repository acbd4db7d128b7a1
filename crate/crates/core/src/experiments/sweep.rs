use serde::{Deserialize, Serialize};

use rayon::prelude::*;

use crate::dynamics::PhysicalParams;
use crate::error::{Error, Result};
use crate::field::Field;

use super::{run_until_breakdown, BreakdownCause, RunSetup};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub eps: f64,
    pub t_star: Option<f64>,
    pub cause: BreakdownCause,
    /// `ε t*` in 1-D, `ε² t*` in 2-D, `ε ln t*` in 3-D.
    pub scaled: Option<f64>,
    pub div_accum_final: f64,
}

/// Least-squares line through `(ln ε, ln t*)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoglogFit {
    pub slope: f64,
    pub intercept: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub dims: usize,
    /// Sorted by increasing ε.
    pub rows: Vec<SweepRow>,
    /// `None` with fewer than two usable rows.
    pub fit: Option<LoglogFit>,
    /// ε values whose runs reached the horizon and were left out of the fit.
    pub excluded: Vec<f64>,
    /// `max ε / min ε`.
    pub span: f64,
}

pub fn fit_loglog(points: &[(f64, f64)]) -> Option<LoglogFit> {
    if points.len() < 2 {
        return None;
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Some(LoglogFit {
        slope,
        intercept: my - slope * mx,
        points: points.len(),
    })
}

fn scaled(dims: usize, eps: f64, t: f64) -> f64 {
    match dims {
        1 => eps * t,
        2 => eps * eps * t,
        _ => eps * t.ln(),
    }
}

/// Runs [`run_until_breakdown`] for each ε with the data held fixed, on a
/// pool of `workers` threads, and fits `ln t*` against `ln ε`.
pub fn lifespan_sweep(
    u0: &Field,
    u1: &Field,
    eps_list: &[f64],
    base: &RunSetup,
    workers: usize,
) -> Result<SweepResult> {
    if eps_list.is_empty() {
        return Err(Error::InvalidParameter {
            field: "eps_list",
            reason: "needs at least one value".into(),
        });
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter {
            field: "workers",
            reason: e.to_string(),
        })?;
    let rows: Vec<Result<SweepRow>> = pool.install(|| {
        eps_list
            .par_iter()
            .map(|&eps| {
                let p = PhysicalParams { eps, ..base.p };
                p.validate()?;
                let setup = RunSetup { p, ..base.clone() };
                let out = run_until_breakdown(u0, u1, &setup)?;
                let v = out.verdict;
                Ok(SweepRow {
                    eps,
                    t_star: v.t_star,
                    cause: v.cause,
                    scaled: v.t_star.map(|t| scaled(u0.grid().dims(), eps, t)),
                    div_accum_final: v.div_accum_final,
                })
            })
            .collect()
    });
    let mut rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| a.eps.total_cmp(&b.eps));
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.t_star.map(|t| (r.eps, t)))
        .collect();
    let excluded = rows
        .iter()
        .filter(|r| r.t_star.is_none())
        .map(|r| r.eps)
        .collect();
    let (lo, hi) = rows.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), r| {
        (lo.min(r.eps), hi.max(r.eps))
    });
    Ok(SweepResult {
        dims: u0.grid().dims(),
        fit: fit_loglog(&pts),
        rows,
        excluded,
        span: hi / lo,
    })
}
