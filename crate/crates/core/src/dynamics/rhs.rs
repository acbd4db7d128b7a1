use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{Field, Spectrum};

use super::{Coefficients, ModelKind, PhysicalParams, SimState};

/// `1 - alpha*eps*v` and its minimum, using `p.alpha` as given.
pub fn hyperbolicity_factor(v: &Field, p: &PhysicalParams) -> (Field, f64) {
    factor_with(v, p.alpha * p.eps)
}

/// Hyperbolicity factor with the coefficient the model actually uses
/// (identically 1 for the linear reductions).
pub fn hyperbolicity_factor_for(v: &Field, p: &PhysicalParams, kind: ModelKind) -> (Field, f64) {
    factor_with(v, kind.coefficients(p).a)
}

fn factor_with(v: &Field, a: f64) -> (Field, f64) {
    let f = v.map(|x| 1.0 - a * x);
    let m = f.min();
    (f, m)
}

/// `u_tt` solved from the model equation at `state`.
pub fn acceleration(state: &SimState, p: &PhysicalParams, kind: ModelKind) -> Result<Field> {
    Ok(evaluate(&state.u, &state.v, p, kind, false)?.accel)
}

/// Acceleration plus the quadrature integrands tracked along a run.
#[derive(Debug, Clone)]
pub(crate) struct Evaluation {
    pub accel: Field,
    /// `‖u_tt‖_∞ + ‖Δu‖_∞`
    pub div_rate: f64,
    /// `beta*eps ∫ u_tt |∇u|^2`
    pub fnu_rate: f64,
}

pub(crate) fn evaluate(
    u: &Field,
    v: &Field,
    p: &PhysicalParams,
    kind: ModelKind,
    diagnostics: bool,
) -> Result<Evaluation> {
    u.check_same_grid(v)?;
    let co = kind.coefficients(p);
    let factor = if co.a != 0.0 {
        let (f, min) = factor_with(v, co.a);
        if !(min > p.hyp_floor) {
            return Err(Error::HyperbolicityBreakdown {
                min_factor: min,
                floor: p.hyp_floor,
            });
        }
        Some(f)
    } else {
        None
    };

    let grid = u.grid().clone();
    let (su, sv) = Spectrum::pair(u, v);
    let k2 = grid.k2();
    let mut num = Spectrum::zeros(&grid);
    for (i, z) in num.coeffs_mut().iter_mut().enumerate() {
        *z = -(su.coeffs()[i] * co.c2 + sv.coeffs()[i] * co.visc) * k2[i];
    }

    let mut grad_sq: Option<Field> = None;
    if co.b != 0.0 {
        let (gu, gv) = gradients(&su, &sv, grid.dims());
        let mut prod = vec![0.0; grid.len()];
        let mut gsq = vec![0.0; grid.len()];
        for (a, b) in gu.iter().zip(&gv) {
            for (j, (x, y)) in a.values().iter().zip(b.values()).enumerate() {
                prod[j] += x * y;
                gsq[j] += x * x;
            }
        }
        let sp = Spectrum::of(&Field::from_raw(&grid, prod));
        let keep = grid.keep();
        for (i, z) in num.coeffs_mut().iter_mut().enumerate() {
            if keep[i] {
                *z += sp.coeffs()[i] * co.b;
            }
        }
        grad_sq = Some(Field::from_raw(&grid, gsq));
    }

    let (numer, lap_u) = if diagnostics {
        let lap = su.laplacian();
        let (n, l) = Spectrum::to_fields_pair(&num, &lap);
        (n, Some(l))
    } else {
        (num.to_field(), None)
    };

    let accel = match &factor {
        Some(f) => numer.zip_map(f, |n, d| n / d),
        None => numer,
    };
    if !accel.is_finite() {
        return Err(Error::NonFinite("acceleration"));
    }

    let (div_rate, fnu_rate) = match lap_u {
        Some(lap) => {
            let amax = accel.values().iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let lmax = lap.values().iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let fnu = match &grad_sq {
                Some(g) => co.b * accel.dot(g),
                None => 0.0,
            };
            (amax + lmax, fnu)
        }
        None => (0.0, 0.0),
    };
    Ok(Evaluation {
        accel,
        div_rate,
        fnu_rate,
    })
}

/// Physical-space gradients of the two fields, paired through shared transforms.
fn gradients(su: &Spectrum, sv: &Spectrum, dims: usize) -> (Vec<Field>, Vec<Field>) {
    let mut gu = Vec::with_capacity(dims);
    let mut gv = Vec::with_capacity(dims);
    for axis in 0..dims {
        let (a, b) = Spectrum::to_fields_pair(&su.derivative(axis, 1), &sv.derivative(axis, 1));
        gu.push(a);
        gv.push(b);
    }
    (gu, gv)
}

/// Fourier symbol of the linear part `c^2 Δu + nu*eps Δv`.
pub(crate) fn linear_part(su: &Spectrum, sv: &Spectrum, co: &Coefficients) -> Spectrum {
    let k2 = su.grid().k2();
    let mut out = Spectrum::zeros(su.grid());
    for (i, z) in out.coeffs_mut().iter_mut().enumerate() {
        let s: Complex64 = su.coeffs()[i] * co.c2 + sv.coeffs()[i] * co.visc;
        *z = -s * k2[i];
    }
    out
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;
    use std::sync::Arc;

    use super::*;
    use crate::field::Grid;

    fn grid1(n: usize) -> Arc<Grid> {
        Arc::new(Grid::new(&[2.0 * PI], &[n], false).unwrap())
    }

    #[test]
    fn factor_examples() {
        let g = grid1(16);
        let p = PhysicalParams::new(1.0, 0.0, 0.2, 1.5, 2.0).unwrap();
        let (_, m) = hyperbolicity_factor(&Field::zeros(&g), &p);
        assert_eq!(m, 1.0);
        let half = Field::constant(&g, p.ut_bound());
        let (_, m) = hyperbolicity_factor(&half, &p);
        assert!((m - 0.5).abs() < 1e-15);
        let v = Field::from_fn(&g, |x| 0.3 * (x[0] * 3.0).sin() + 0.1 * x[0].cos());
        let (_, m) = hyperbolicity_factor(&v, &p);
        assert!((m - (1.0 - 0.3 * v.max())).abs() < 1e-15);
    }

    #[test]
    fn wave_is_c2_laplacian() {
        let g = grid1(32);
        let p = PhysicalParams::new(1.7, 0.5, 0.3, 1.0, 2.0).unwrap();
        let u = Field::from_fn(&g, |x| (2.0 * x[0]).sin());
        let v = Field::from_fn(&g, |x| (5.0 * x[0]).cos());
        let s = SimState::new(u.clone(), v).unwrap();
        let a = acceleration(&s, &p, ModelKind::Wave).unwrap();
        for (ai, ui) in a.values().iter().zip(u.values()) {
            assert!((ai + 1.7 * 1.7 * 4.0 * ui).abs() < 1e-11);
        }
    }

    #[test]
    fn kuznetsov_zero_displacement_oracle() {
        let g = grid1(64);
        let p = PhysicalParams::new(1.0, 0.7, 0.2, 1.3, 2.0).unwrap();
        let v = Field::from_fn(&g, |x| 1.1 * (3.0 * x[0]).sin());
        let s = SimState::new(Field::zeros(&g), v.clone()).unwrap();
        let a = acceleration(&s, &p, ModelKind::Kuznetsov).unwrap();
        let ve = p.nu * p.eps;
        let ae = p.alpha * p.eps;
        for (ai, vi) in a.values().iter().zip(v.values()) {
            let expect = ve * (-9.0 * vi) / (1.0 - ae * vi);
            assert!((ai - expect).abs() < 1e-12, "{ai} {expect}");
        }
    }

    #[test]
    fn breakdown_when_factor_vanishes() {
        let g = grid1(16);
        let p = PhysicalParams::new(1.0, 0.0, 0.5, 1.0, 2.0).unwrap();
        let v = Field::constant(&g, 1.0 / (p.alpha * p.eps));
        let s = SimState::new(Field::zeros(&g), v).unwrap();
        assert!(matches!(
            acceleration(&s, &p, ModelKind::Kuznetsov),
            Err(Error::HyperbolicityBreakdown { .. })
        ));
        assert!(matches!(
            acceleration(&s, &p, ModelKind::Westervelt),
            Err(Error::HyperbolicityBreakdown { .. })
        ));
        assert!(acceleration(&s, &p, ModelKind::DampedWave).is_ok());
    }

    #[test]
    fn linear_in_state_without_nonlinearity() {
        let g = Arc::new(Grid::new(&[2.0 * PI, 4.0], &[16, 8], true).unwrap());
        let p = PhysicalParams::new(1.3, 0.4, 0.5, 1.0, 2.0).unwrap();
        let f1 = Field::from_fn(&g, |x| (x[0]).sin() * (PI * x[1] / 2.0).cos());
        let f2 = Field::from_fn(&g, |x| (2.0 * x[0]).cos() + 0.3);
        let s1 = SimState::new(f1.clone(), f2.clone()).unwrap();
        let s2 = SimState::new(f2.clone(), f1.clone()).unwrap();
        let combo = SimState::new(
            f1.scaled(2.0).add(&f2.scaled(-3.0)),
            f2.scaled(2.0).add(&f1.scaled(-3.0)),
        )
        .unwrap();
        let k = ModelKind::DampedWave;
        let a1 = acceleration(&s1, &p, k).unwrap();
        let a2 = acceleration(&s2, &p, k).unwrap();
        let ac = acceleration(&combo, &p, k).unwrap();
        let expect = a1.scaled(2.0).add(&a2.scaled(-3.0));
        for (x, y) in ac.values().iter().zip(expect.values()) {
            assert!((x - y).abs() < 1e-11);
        }
    }

    #[test]
    fn local_nonlinearity_oracle() {
        // u = sin x, v = sin 2x, no viscosity: a = (c^2 Δu + b u_x v_x) / (1 - a v)
        let g = grid1(64);
        let p = PhysicalParams::new(1.0, 0.0, 0.1, 1.0, 2.0).unwrap();
        let u = Field::from_fn(&g, |x| x[0].sin());
        let v = Field::from_fn(&g, |x| 0.5 * (2.0 * x[0]).sin());
        let s = SimState::new(u, v).unwrap();
        let a = acceleration(&s, &p, ModelKind::Kuznetsov).unwrap();
        for (j, ai) in a.values().iter().enumerate() {
            let x = g.coordinate(0, j);
            let num = -x.sin() + 0.2 * x.cos() * (2.0 * x).cos();
            let expect = num / (1.0 - 0.1 * 0.5 * (2.0 * x).sin());
            assert!((ai - expect).abs() < 1e-12);
        }
    }
}
