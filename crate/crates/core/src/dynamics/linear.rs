use crate::error::{Error, Result};
use crate::field::{Field, Spectrum};

use super::integrate::Propagator;
use super::{ModelKind, PhysicalParams};

/// Both sides of the forced linear energy inequality at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearSample {
    pub t: f64,
    /// `½(‖∇u_t‖² + c²‖Δu‖²) + (nu*eps/2) ∫‖Δu_t‖²`
    pub lhs: f64,
    /// `½‖∇u_1‖² + ½c²‖Δu_0‖² + 1/(2 nu*eps) ∫‖f‖²`
    pub rhs: f64,
}

#[derive(Debug, Clone)]
pub struct LinearForcedOutcome {
    pub samples: Vec<LinearSample>,
    pub u: Field,
    pub v: Field,
}

impl LinearForcedOutcome {
    pub fn last(&self) -> LinearSample {
        *self.samples.last().expect("at least the initial sample")
    }
}

pub const LINEAR_SLACK: f64 = 0.01;

/// Integrates `u_tt - c²Δu - nu*eps Δu_t = f(t)` up to `horizon` with the
/// linear operator propagated exactly and the source by RK4 quadrature.
/// Fails with [`Error::InequalityViolated`] if `lhs > rhs (1 + tol)` at any
/// sample.
pub fn solve_linear_forced(
    u0: &Field,
    u1: &Field,
    forcing: &dyn Fn(f64) -> Field,
    horizon: f64,
    dt: f64,
    p: &PhysicalParams,
    tol: f64,
) -> Result<LinearForcedOutcome> {
    p.validate()?;
    if p.nu == 0.0 {
        return Err(Error::InvalidParameter {
            field: "nu",
            reason: "the forced linear problem needs nu > 0".into(),
        });
    }
    if !(dt > 0.0 && horizon >= 0.0) {
        return Err(Error::InvalidParameter {
            field: "dt",
            reason: "need dt > 0 and horizon >= 0".into(),
        });
    }
    u0.check_same_grid(u1)?;
    u0.ensure_finite("u0")?;
    u1.ensure_finite("u1")?;
    let grid = u0.grid().clone();
    let co = ModelKind::DampedWave.coefficients(p);
    let visc = co.visc;

    let steps = (horizon / dt).ceil().max(0.0) as usize;
    let h = if steps > 0 {
        horizon / steps as f64
    } else {
        0.0
    };
    let full = Propagator::new(&grid, &co, h);
    let half = Propagator::new(&grid, &co, 0.5 * h);

    let (mut su, mut sv) = Spectrum::pair(u0, u1);
    let energy = |su: &Spectrum, sv: &Spectrum| {
        0.5 * (sv.weighted_sq(|q| q) + co.c2 * su.weighted_sq(|q| q * q))
    };
    let lap_v_sq = |sv: &Spectrum| sv.weighted_sq(|q| q * q);
    let rhs0 = energy(&su, &sv);

    let check = |s: LinearSample| -> Result<LinearSample> {
        if s.lhs > s.rhs * (1.0 + tol) + 1e-300 {
            return Err(Error::InequalityViolated(format!(
                "forced linear estimate at t = {}: lhs {} > rhs {}",
                s.t, s.lhs, s.rhs
            )));
        }
        Ok(s)
    };

    let mut dissip = 0.0;
    let mut source = 0.0;
    let mut f_prev = forcing(0.0);
    f_prev.check_same_grid(u0)?;
    let mut f_prev_sq = f_prev.norm_sq();
    let mut lv_prev = lap_v_sq(&sv);
    let mut samples = vec![check(LinearSample {
        t: 0.0,
        lhs: rhs0,
        rhs: rhs0,
    })?];

    for n in 0..steps {
        let t = n as f64 * h;
        let fm = forcing(t + 0.5 * h);
        let f1 = forcing(t + h);
        fm.check_same_grid(u0)?;
        f1.check_same_grid(u0)?;
        // Lawson RK4 with a state-independent source: the stage values are
        // E(h) f(t), E(h/2) f(t+h/2) (twice) and f(t+h).
        let s0 = Spectrum::of(&f_prev);
        let (sm, s1) = (Spectrum::of(&fm), Spectrum::of(&f1));
        let (mut nu_, mut nv) = full.apply(&su, &sv);
        let (a_u, a_v) = full.apply_velocity(&s0);
        let (b_u, b_v) = half.apply_velocity(&sm);
        let w = h / 6.0;
        for i in 0..grid.len() {
            nu_.coeffs_mut()[i] += (a_u.coeffs()[i] + b_u.coeffs()[i] * 4.0) * w;
            nv.coeffs_mut()[i] += (a_v.coeffs()[i] + b_v.coeffs()[i] * 4.0 + s1.coeffs()[i]) * w;
        }
        su = nu_;
        sv = nv;

        let lv = lap_v_sq(&sv);
        let f1_sq = f1.norm_sq();
        dissip += 0.5 * h * (lv_prev + lv);
        source += 0.5 * h * (f_prev_sq + f1_sq);
        lv_prev = lv;
        f_prev_sq = f1_sq;
        f_prev = f1;

        let sample = LinearSample {
            t: t + h,
            lhs: energy(&su, &sv) + 0.5 * visc * dissip,
            rhs: rhs0 + source / (2.0 * visc),
        };
        samples.push(check(sample)?);
    }
    let (u, v) = Spectrum::to_fields_pair(&su, &sv);
    if !u.is_finite() || !v.is_finite() {
        return Err(Error::StepRejected { t: horizon });
    }
    Ok(LinearForcedOutcome { samples, u, v })
}
