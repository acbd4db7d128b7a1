use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, Grid, Spectrum};

use super::rhs::{evaluate, linear_part};
use super::{Coefficients, EndpointCache, ModelKind, PhysicalParams, SimState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Classical fourth-order Runge-Kutta on `(u, u_t)`.
    #[serde(rename = "rk4", alias = "explicit_rk4")]
    ExplicitRK4,
    /// Fourth-order Runge-Kutta in the integrating-factor (Lawson) form: the
    /// linear damped wave operator is propagated exactly per Fourier mode.
    Imex,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOptions {
    /// Courant number bounding `c*dt/min(dx)`.
    pub cfl: f64,
    /// Largest `nu*eps*dt/min(dx)^2` allowed for explicit stepping.
    pub stiffness_threshold: f64,
}

pub const DEFAULT_CFL: f64 = 0.4;
pub const DEFAULT_STIFFNESS: f64 = 0.2;

impl Default for StepOptions {
    fn default() -> Self {
        Self {
            cfl: DEFAULT_CFL,
            stiffness_threshold: DEFAULT_STIFFNESS,
        }
    }
}

impl StepOptions {
    pub fn dt_limit(&self, grid: &Grid, p: &PhysicalParams) -> f64 {
        self.cfl * grid.min_spacing() / p.c
    }

    pub fn stiffness(&self, grid: &Grid, p: &PhysicalParams, kind: ModelKind, dt: f64) -> f64 {
        let h = grid.min_spacing();
        kind.coefficients(p).visc * dt / (h * h)
    }
}

/// Largest admissible step not exceeding `requested`.
pub fn admissible_dt(requested: f64, grid: &Grid, p: &PhysicalParams, opts: &StepOptions) -> f64 {
    requested.min(opts.dt_limit(grid, p))
}

/// Explicit RK4 unless the viscous term makes it stiff at this `dt`.
pub fn choose_scheme(
    grid: &Grid,
    p: &PhysicalParams,
    kind: ModelKind,
    dt: f64,
    opts: &StepOptions,
) -> Scheme {
    if opts.stiffness(grid, p, kind, dt) > opts.stiffness_threshold {
        Scheme::Imex
    } else {
        Scheme::ExplicitRK4
    }
}

pub fn step(
    state: &SimState,
    dt: f64,
    p: &PhysicalParams,
    kind: ModelKind,
    scheme: Scheme,
) -> Result<SimState> {
    step_with(state, dt, p, kind, scheme, &StepOptions::default())
}

pub fn step_with(
    state: &SimState,
    dt: f64,
    p: &PhysicalParams,
    kind: ModelKind,
    scheme: Scheme,
    opts: &StepOptions,
) -> Result<SimState> {
    if dt == 0.0 {
        return Ok(state.clone());
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter {
            field: "dt",
            reason: format!("must be positive and finite, got {dt}"),
        });
    }
    p.validate()?;
    let grid = state.grid();
    if scheme == Scheme::ExplicitRK4 {
        let limit = opts.dt_limit(grid, p);
        if dt > limit * (1.0 + 1e-12) {
            return Err(Error::CflViolation { dt, limit });
        }
        let ratio = opts.stiffness(grid, p, kind, dt);
        if ratio > opts.stiffness_threshold {
            return Err(Error::Stiff {
                ratio,
                threshold: opts.stiffness_threshold,
            });
        }
    }

    let start = match state.cached_eval(kind, p) {
        Some(e) => e.clone(),
        _ => evaluate(&state.u, &state.v, p, kind, true)?,
    };

    let (u, v) = match scheme {
        Scheme::ExplicitRK4 => rk4(state, &start.accel, dt, p, kind)?,
        Scheme::Imex => lawson(state, &start.accel, dt, p, kind)?,
    };
    if !u.is_finite() || !v.is_finite() {
        return Err(Error::StepRejected { t: state.t });
    }
    let end = evaluate(&u, &v, p, kind, true)?;
    let fnu_accum = state.fnu_accum + 0.5 * dt * (start.fnu_rate + end.fnu_rate);
    let div_accum = state.div_accum + 0.5 * dt * (start.div_rate + end.div_rate);
    if !fnu_accum.is_finite() || !div_accum.is_finite() {
        return Err(Error::StepRejected { t: state.t });
    }
    Ok(SimState {
        u,
        v,
        t: state.t + dt,
        fnu_accum,
        div_accum,
        cache: Some(Arc::new(EndpointCache {
            kind,
            params: *p,
            eval: end,
        })),
    })
}

fn rk4(
    s: &SimState,
    a1: &Field,
    dt: f64,
    p: &PhysicalParams,
    kind: ModelKind,
) -> Result<(Field, Field)> {
    let accel = |u: &Field, v: &Field| evaluate(u, v, p, kind, false).map(|e| e.accel);
    let h2 = 0.5 * dt;
    let v1 = &s.v;

    let mut u2 = s.u.clone();
    u2.axpy(h2, v1);
    let mut v2 = s.v.clone();
    v2.axpy(h2, a1);
    let a2 = accel(&u2, &v2)?;

    let mut u3 = s.u.clone();
    u3.axpy(h2, &v2);
    let mut v3 = s.v.clone();
    v3.axpy(h2, &a2);
    let a3 = accel(&u3, &v3)?;

    let mut u4 = s.u.clone();
    u4.axpy(dt, &v3);
    let mut v4 = s.v.clone();
    v4.axpy(dt, &a3);
    let a4 = accel(&u4, &v4)?;

    let w = dt / 6.0;
    let mut u = s.u.clone();
    u.axpy(w, v1);
    u.axpy(2.0 * w, &v2);
    u.axpy(2.0 * w, &v3);
    u.axpy(w, &v4);
    let mut v = s.v.clone();
    v.axpy(w, a1);
    v.axpy(2.0 * w, &a2);
    v.axpy(2.0 * w, &a3);
    v.axpy(w, &a4);
    Ok((u, v))
}

/// Exact per-mode propagator of `y' = M y`, `M = [[0, 1], [-c^2 k^2, -nu*eps k^2]]`.
#[derive(Debug, Clone)]
pub(crate) struct Propagator {
    /// Row-major 2x2 entries per Fourier mode.
    entries: Vec<[f64; 4]>,
}

impl Propagator {
    pub fn new(grid: &Grid, co: &Coefficients, h: f64) -> Self {
        let entries = grid
            .k2()
            .iter()
            .map(|&q| mode_propagator(co.c2 * q, co.visc * q, h))
            .collect();
        Self { entries }
    }

    /// `E (a, b)` for spectra `a` (displacement) and `b` (velocity).
    pub fn apply(&self, a: &Spectrum, b: &Spectrum) -> (Spectrum, Spectrum) {
        let mut na = Spectrum::zeros(a.grid());
        let mut nb = Spectrum::zeros(a.grid());
        for (i, e) in self.entries.iter().enumerate() {
            let (x, y) = (a.coeffs()[i], b.coeffs()[i]);
            na.coeffs_mut()[i] = x * e[0] + y * e[1];
            nb.coeffs_mut()[i] = x * e[2] + y * e[3];
        }
        (na, nb)
    }

    /// `E (0, b)`.
    pub fn apply_velocity(&self, b: &Spectrum) -> (Spectrum, Spectrum) {
        let mut na = Spectrum::zeros(b.grid());
        let mut nb = Spectrum::zeros(b.grid());
        for (i, e) in self.entries.iter().enumerate() {
            let y = b.coeffs()[i];
            na.coeffs_mut()[i] = y * e[1];
            nb.coeffs_mut()[i] = y * e[3];
        }
        (na, nb)
    }
}

/// `exp(h M)` for `M = [[0, 1], [-w2, -g]]`, written as
/// `e^{-sh} [C I + S (M + s I)]` with `s = g/2`, `d^2 = s^2 - w2`.
pub(crate) fn mode_propagator(w2: f64, g: f64, h: f64) -> [f64; 4] {
    let s = 0.5 * g;
    let d2 = s * s - w2;
    // ec = e^{-sh} C, es = e^{-sh} S
    let (ec, es) = if d2 > 0.0 {
        let d = d2.sqrt();
        if d * h < 1e-4 {
            let decay = (-s * h).exp();
            let x2 = d2 * h * h;
            (decay * (1.0 + x2 / 2.0), decay * h * (1.0 + x2 / 6.0))
        } else {
            // d - s = -w2/(d + s) avoids cancellation when s >> sqrt(w2)
            let slow = (-w2 / (d + s) * h).exp();
            let fast = (-(d + s) * h).exp();
            (0.5 * (slow + fast), 0.5 * (slow - fast) / d)
        }
    } else {
        let q = (-d2).sqrt();
        let decay = (-s * h).exp();
        if q * h < 1e-4 {
            let x2 = q * q * h * h;
            (decay * (1.0 - x2 / 2.0), decay * h * (1.0 - x2 / 6.0))
        } else {
            (decay * (q * h).cos(), decay * (q * h).sin() / q)
        }
    };
    [ec + s * es, es, -w2 * es, ec - s * es]
}

/// Nonlinear remainder `u_tt - (c^2 Δu + nu*eps Δv)` in Fourier space.
fn remainder(
    su: &Spectrum,
    sv: &Spectrum,
    accel: Option<&Field>,
    p: &PhysicalParams,
    kind: ModelKind,
    co: &Coefficients,
) -> Result<Spectrum> {
    let a = match accel {
        Some(a) => a.clone(),
        None => {
            let (u, v) = Spectrum::to_fields_pair(su, sv);
            evaluate(&u, &v, p, kind, false)?.accel
        }
    };
    let lin = linear_part(su, sv, co);
    let sa = Spectrum::of(&a);
    Ok(sa.map_indexed(|i, z| z - lin.coeffs()[i]))
}

fn add_scaled(a: &Spectrum, s: f64, b: &Spectrum) -> Spectrum {
    a.map_indexed(|i, z| z + b.coeffs()[i] * s)
}

fn lawson(
    s: &SimState,
    a1: &Field,
    dt: f64,
    p: &PhysicalParams,
    kind: ModelKind,
) -> Result<(Field, Field)> {
    let grid = s.grid();
    let co = kind.coefficients(p);
    let half = Propagator::new(grid, &co, 0.5 * dt);
    let full = Propagator::new(grid, &co, dt);
    let (u0, v0) = Spectrum::pair(&s.u, &s.v);

    if kind.is_linear() {
        let (u, v) = full.apply(&u0, &v0);
        return Ok(Spectrum::to_fields_pair(&u, &v));
    }

    let h2 = 0.5 * dt;
    let k1 = remainder(&u0, &v0, Some(a1), p, kind, &co)?;
    let (hu, hv) = half.apply(&u0, &v0);

    // y2 = E(h/2)(y + h/2 (0, k1))
    let (u2, v2) = half.apply(&u0, &add_scaled(&v0, h2, &k1));
    let k2 = remainder(&u2, &v2, None, p, kind, &co)?;

    // y3 = E(h/2) y + h/2 (0, k2)
    let v3 = add_scaled(&hv, h2, &k2);
    let k3 = remainder(&hu, &v3, None, p, kind, &co)?;

    // y4 = E(h) y + h E(h/2)(0, k3)
    let (fu, fv) = full.apply(&u0, &v0);
    let (e3u, e3v) = half.apply_velocity(&k3);
    let u4 = add_scaled(&fu, dt, &e3u);
    let v4 = add_scaled(&fv, dt, &e3v);
    let k4 = remainder(&u4, &v4, None, p, kind, &co)?;

    // y' = E(h) y + h/6 [E(h)(0,k1) + 2 E(h/2)(0, k2 + k3) + (0, k4)]
    let (e1u, e1v) = full.apply_velocity(&k1);
    let k23 = add_scaled(&k2, 1.0, &k3);
    let (e23u, e23v) = half.apply_velocity(&k23);
    let w = dt / 6.0;
    let mut un = fu;
    let mut vn = fv;
    {
        let (uc, vc) = (un.coeffs_mut(), vn.coeffs_mut());
        for i in 0..uc.len() {
            uc[i] += (e1u.coeffs()[i] + e23u.coeffs()[i] * 2.0) * w;
            vc[i] += (e1v.coeffs()[i] + e23v.coeffs()[i] * 2.0 + k4.coeffs()[i]) * w;
        }
    }
    Ok(Spectrum::to_fields_pair(&un, &vn))
}
