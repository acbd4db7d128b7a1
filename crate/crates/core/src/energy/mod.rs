//! Energy functionals, densities, envelopes and thresholds.

mod bounds;
mod klainerman;
mod report;

use crate::dynamics::{ModelKind, PhysicalParams, SimState};
use crate::error::{Error, Result};
use crate::field::{Field, Spectrum};
use crate::jet::{multi_derivative_spectrum, Jet, MultiIndex};

pub use bounds::{
    cascade_coefficients, cascade_polynomials, gronwall_envelope, initial_data_bound_check,
    lifespan_t0, thresholds, EnvelopeParams, InitialDataCheck, InitialDataRow, Thresholds,
};
pub(crate) use klainerman::ratio_of;
pub use klainerman::{klainerman_energies, klainerman_ratio, n_star, KlainermanEnergies};
pub use report::{
    compute_report, read_csv, read_jsonl, support_radius, EnergyReport, ReportSpec, ReportWriter,
    CSV_VERSION,
};

/// `‖v‖² + c²‖∇u‖²`.
pub fn energy_wave(state: &SimState, p: &PhysicalParams) -> f64 {
    let (su, sv) = Spectrum::pair(&state.u, &state.v);
    sv.sobolev_sq(0.0) + p.c * p.c * su.weighted_sq(|q| q)
}

/// Cubic-corrected coefficient of the conserved energies: two thirds of the
/// model's `alpha`, the factor produced by `∫ u_t² u_tt = (1/3) d/dt ∫ u_t³`.
pub fn energy_alpha(p: &PhysicalParams, kind: ModelKind) -> f64 {
    let (a, _) = kind.effective_alpha_beta(p);
    2.0 / 3.0 * a
}

/// `∫ (1 - α' ε v) v² + c² |∇u|²` with `α' = energy_alpha(p, kind)`.
pub fn energy_nonl(state: &SimState, p: &PhysicalParams, kind: ModelKind) -> f64 {
    energy_nonl_with(state, p, energy_alpha(p, kind))
}

/// [`energy_nonl`] with an explicit weight coefficient.
pub fn energy_nonl_with(state: &SimState, p: &PhysicalParams, alpha: f64) -> f64 {
    let ae = alpha * p.eps;
    let kinetic: f64 = state
        .v
        .values()
        .iter()
        .map(|&v| (1.0 - ae * v) * v * v)
        .sum::<f64>()
        * state.grid().cell_volume();
    kinetic + p.c * p.c * state.u.spectrum().weighted_sq(|q| q)
}

/// `∫ (1 - α' ε v) v² + (c² - β ε v)|∇u|²` plus the accumulated
/// `β ε ∫∫ u_tt |∇u|²`, with the model's effective `β`.
pub fn f_nu(state: &SimState, p: &PhysicalParams, kind: ModelKind) -> Result<f64> {
    let (_, beta) = kind.effective_alpha_beta(p);
    let ae = energy_alpha(p, kind) * p.eps;
    let be = beta * p.eps;
    let c2 = p.c * p.c;
    let grad = state.u.gradient()?;
    let mut sum = 0.0;
    for (j, &v) in state.v.values().iter().enumerate() {
        let g2: f64 = grad.iter().map(|g| g.values()[j] * g.values()[j]).sum();
        sum += (1.0 - ae * v) * v * v + (c2 - be * v) * g2;
    }
    Ok(sum * state.grid().cell_volume() + state.fnu_accum)
}

fn need(jet: &Jet, order: usize) -> Result<()> {
    if jet.order() < order {
        return Err(Error::InsufficientJetOrder {
            need: order,
            have: jet.order(),
        });
    }
    Ok(())
}

/// `‖∇u‖²_{H^m} + Σ_{i=1}^{m+1} ‖∂_t^i u‖²_{H^{m+1-i}}`.
pub fn energy_m(jet: &Jet, m: u32) -> Result<f64> {
    let m = m as usize;
    need(jet, m + 1)?;
    let mut e = jet.spectrum(0)?.gradient_sobolev_sq(m as f64);
    for i in 1..=m + 1 {
        e += jet.spectrum(i)?.sobolev_sq((m + 1 - i) as f64);
    }
    Ok(e)
}

fn check_even(m: u32) -> Result<()> {
    if m % 2 != 0 {
        return Err(Error::InvalidParameter {
            field: "m",
            reason: format!("viscous energies need an even order, got {m}"),
        });
    }
    Ok(())
}

/// `‖∇u‖²_{H^m} + Σ_{i=1}^{m/2+1} ‖∂_t^i u‖²_{H^{m-2(i-1)}}`.
pub fn energy_half_m(jet: &Jet, m: u32) -> Result<f64> {
    check_even(m)?;
    let top = (m / 2 + 1) as usize;
    need(jet, top)?;
    let mut e = jet.spectrum(0)?.gradient_sobolev_sq(m as f64);
    for i in 1..=top {
        e += jet
            .spectrum(i)?
            .sobolev_sq((m as usize - 2 * (i - 1)) as f64);
    }
    Ok(e)
}

/// `Σ_{i=1}^{m/2+1} ‖∇∂_t^i u‖²_{H^{m-2(i-1)}}`.
pub fn s_half_m(jet: &Jet, m: u32) -> Result<f64> {
    check_even(m)?;
    let top = (m / 2 + 1) as usize;
    need(jet, top)?;
    let mut e = 0.0;
    for i in 1..=top {
        e += jet
            .spectrum(i)?
            .gradient_sobolev_sq((m as usize - 2 * (i - 1)) as f64);
    }
    Ok(e)
}

/// Multi-indices `A` with `A_0 ≤ m/2` and spatial order `≤ m - 2 A_0`.
pub fn decay_index_set(dims: usize, m: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    for a0 in 0..=m / 2 {
        for s in 0..=m - 2 * a0 {
            for sp in MultiIndex::spatial_of_order(dims, s) {
                out.push(MultiIndex {
                    time: a0,
                    space: sp,
                });
            }
        }
    }
    out
}

/// `Σ_{A ∈ V} ∫ (1 - α ε u_t)(D^A u_t)² + c² |∇ D^A u|²` over
/// [`decay_index_set`], with the model's effective `α`.
pub fn decay_energy(jet: &Jet, p: &PhysicalParams, kind: ModelKind, m: u32) -> Result<f64> {
    check_even(m)?;
    need(jet, (m / 2 + 1) as usize)?;
    let (alpha, _) = kind.effective_alpha_beta(p);
    let ae = alpha * p.eps;
    let weight = jet.layer(1)?.map(|v| 1.0 - ae * v);
    let c2 = p.c * p.c;
    let mut total = 0.0;
    for a in decay_index_set(jet.grid().dims(), m) {
        let dv = multi_derivative_spectrum(jet, &a.bump(0))?.to_field();
        let kinetic: f64 = dv
            .values()
            .iter()
            .zip(weight.values())
            .map(|(x, w)| w * x * x)
            .sum::<f64>()
            * jet.grid().cell_volume();
        let potential = multi_derivative_spectrum(jet, &a)?.weighted_sq(|q| q);
        total += kinetic + c2 * potential;
    }
    Ok(total)
}

/// Integrated energy densities of `w = D^A u`:
/// `I = w_t² + c²|∇w|² - αε u_t w_t²`,
/// `J = 2 (L_u w) w_t - (αε u_tt + βε Δu) w_t²` and the dissipation
/// `2 νε ‖∇w_t‖²`, which satisfy `d/dt ∫I + dissipation = ∫J`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Densities {
    pub i_int: f64,
    pub j_int: f64,
    pub dissipation: f64,
}

/// `L_u w = w_tt - c²Δw - νεΔw_t - αε u_t w_tt - βε ∇u·∇w_t`, using the
/// model's effective coefficients. Needs jet order `A_0 + 2`.
pub fn energy_identity_densities(
    jet: &Jet,
    a: &MultiIndex,
    p: &PhysicalParams,
    kind: ModelKind,
) -> Result<Densities> {
    need(jet, (a.time + 2) as usize)?;
    let co = kind.coefficients(p);
    let grid = jet.grid().clone();
    let dims = grid.dims();
    let w0 = multi_derivative_spectrum(jet, a)?;
    let w1 = multi_derivative_spectrum(jet, &a.bump(0))?;
    let w2 = multi_derivative_spectrum(jet, &a.bump(0).bump(0))?;
    let u0 = jet.spectrum(0)?;

    let mut fields_spec: Vec<Spectrum> = vec![
        w1.clone(),
        w2.clone(),
        w0.laplacian(),
        w1.laplacian(),
        u0.laplacian(),
    ];
    for ax in 0..dims {
        fields_spec.push(w0.derivative(ax, 1));
        fields_spec.push(w1.derivative(ax, 1));
        fields_spec.push(u0.derivative(ax, 1));
    }
    let f = Spectrum::to_fields(&fields_spec);
    let (wt, wtt, lap_w, lap_wt, lap_u) = (&f[0], &f[1], &f[2], &f[3], &f[4]);
    let grads = &f[5..];
    let ut = jet.layer(1)?;
    let utt = jet.layer(2)?;

    let mut i_sum = 0.0;
    let mut j_sum = 0.0;
    let mut d_sum = 0.0;
    for j in 0..grid.len() {
        let (mut gw2, mut gwt2, mut gu_gwt) = (0.0, 0.0, 0.0);
        for ax in 0..dims {
            let gw = grads[3 * ax].values()[j];
            let gwt = grads[3 * ax + 1].values()[j];
            let gu = grads[3 * ax + 2].values()[j];
            gw2 += gw * gw;
            gwt2 += gwt * gwt;
            gu_gwt += gu * gwt;
        }
        let (x_t, x_tt) = (wt.values()[j], wtt.values()[j]);
        let (v, a_) = (ut.values()[j], utt.values()[j]);
        i_sum += x_t * x_t + co.c2 * gw2 - co.a * v * x_t * x_t;
        let lu = x_tt
            - co.c2 * lap_w.values()[j]
            - co.visc * lap_wt.values()[j]
            - co.a * v * x_tt
            - co.b * gu_gwt;
        j_sum += 2.0 * lu * x_t - (co.a * a_ + co.b * lap_u.values()[j]) * x_t * x_t;
        d_sum += gwt2;
    }
    let dv = grid.cell_volume();
    Ok(Densities {
        i_int: i_sum * dv,
        j_int: j_sum * dv,
        dissipation: 2.0 * co.visc * d_sum * dv,
    })
}

/// `‖1/(1 - αε v)‖_∞`, infinite once the factor reaches zero.
pub(crate) fn inverse_factor_sup(v: &Field, alpha_eps: f64) -> f64 {
    v.values()
        .iter()
        .map(|&x| 1.0 / (1.0 - alpha_eps * x))
        .fold(0.0f64, |m, y| {
            if y.is_finite() && y > 0.0 {
                m.max(y)
            } else {
                f64::INFINITY
            }
        })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;
    use std::sync::Arc;

    use super::*;
    use crate::field::Grid;
    use crate::jet::build_jet;

    fn grid1() -> Arc<Grid> {
        Arc::new(Grid::new(&[2.0 * PI], &[32], false).unwrap())
    }

    #[test]
    fn wave_energy_examples() {
        let g = grid1();
        let p = PhysicalParams::default();
        let z = SimState::new(Field::zeros(&g), Field::zeros(&g)).unwrap();
        assert_eq!(energy_wave(&z, &p), 0.0);
        let v = Field::from_fn(&g, |x| (3.0 * x[0]).sin());
        let s = SimState::new(Field::zeros(&g), v.clone()).unwrap();
        assert!((energy_wave(&s, &p) - v.l2_norm().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn nonlinear_energy_reductions() {
        let g = grid1();
        let p = PhysicalParams::new(1.3, 0.0, 0.2, 1.0, 2.0).unwrap();
        let u = Field::from_fn(&g, |x| x[0].sin());
        let s = SimState::new(u.clone(), Field::zeros(&g)).unwrap();
        let grad = u.spatial_derivative(0, 1).unwrap().l2_norm().powi(2);
        assert!((energy_nonl(&s, &p, ModelKind::Kuznetsov) - 1.69 * grad).abs() < 1e-12);
        let s = SimState::new(u, Field::from_fn(&g, |x| x[0].cos())).unwrap();
        assert_eq!(energy_nonl(&s, &p, ModelKind::Wave), energy_wave(&s, &p));
    }

    #[test]
    fn energy_m_term_by_term() {
        // wave mode u = sin(2x), v = cos(3x): u^(2) = -4 sin 2x, u^(3) = -9 cos 3x
        let g = grid1();
        let p = PhysicalParams::default();
        let s = SimState::new(
            Field::from_fn(&g, |x| (2.0 * x[0]).sin()),
            Field::from_fn(&g, |x| (3.0 * x[0]).cos()),
        )
        .unwrap();
        let jet = build_jet(&s, &p, ModelKind::Wave, 3).unwrap();
        let l2 = PI; // ‖sin kx‖² on [0, 2π)
        let e1 = 4.0 * 5.0 * l2 + 10.0 * l2 + 16.0 * l2;
        assert!((energy_m(&jet, 1).unwrap() - e1).abs() < 1e-9);
        let e0 = 4.0 * l2 + l2;
        assert!((energy_m(&jet, 0).unwrap() - e0).abs() < 1e-10);
        assert!(energy_m(&jet, 0).unwrap() <= energy_m(&jet, 1).unwrap());
        assert!(energy_m(&jet, 3).is_err());
        // m = 2: ‖∇u‖²_{H²} + ‖u_t‖²_{H²} + ‖u_tt‖²_{L²}
        let eh = 4.0 * 25.0 * l2 + 100.0 * l2 + 16.0 * l2;
        assert!((energy_half_m(&jet, 2).unwrap() - eh).abs() < 1e-8);
        let sh = 9.0 * 100.0 * l2 + 16.0 * 4.0 * l2;
        assert!((s_half_m(&jet, 2).unwrap() - sh).abs() < 1e-8);
        assert!(energy_half_m(&jet, 1).is_err());
    }

    #[test]
    fn s_half_m_of_flat_jet() {
        let g = grid1();
        let jet =
            Jet::from_layers(0.0, (0..4).map(|k| Field::constant(&g, k as f64)).collect()).unwrap();
        assert_eq!(s_half_m(&jet, 2).unwrap(), 0.0);
    }

    #[test]
    fn index_set_counts() {
        // dims 3, m = 4: 35 + 10 + 1
        assert_eq!(decay_index_set(3, 4).len(), 46);
        assert_eq!(decay_index_set(1, 4).len(), 5 + 3 + 1);
    }

    #[test]
    fn exact_solution_reduces_j() {
        // A = 0 on an exact Kuznetsov state: L_u u = 0, so
        // J = -(αε u_tt + βε Δu) u_t²
        let g = Arc::new(Grid::new(&[2.0 * PI], &[64], false).unwrap());
        let p = PhysicalParams::new(1.0, 0.0, 0.2, 1.0, 2.0).unwrap();
        let s = SimState::new(
            Field::from_fn(&g, |x| 0.3 * x[0].sin()),
            Field::from_fn(&g, |x| 0.4 * x[0].cos()),
        )
        .unwrap();
        let kind = ModelKind::Kuznetsov;
        let jet = build_jet(&s, &p, kind, 2).unwrap();
        let d = energy_identity_densities(&jet, &MultiIndex::ZERO, &p, kind).unwrap();
        let utt = jet.layer(2).unwrap();
        let lap = s.u.laplacian().unwrap();
        let want: f64 = (0..g.len())
            .map(|j| {
                let v = s.v.values()[j];
                -(0.2 * utt.values()[j] + 0.4 * lap.values()[j]) * v * v
            })
            .sum::<f64>()
            * g.cell_volume();
        assert!((d.j_int - want).abs() < 1e-10, "{} {}", d.j_int, want);
        let z = SimState::new(Field::zeros(&g), Field::zeros(&g)).unwrap();
        let jz = build_jet(&z, &p, kind, 2).unwrap();
        let dz = energy_identity_densities(&jz, &MultiIndex::ZERO, &p, kind).unwrap();
        assert_eq!((dz.i_int, dz.j_int), (0.0, 0.0));
    }
}
