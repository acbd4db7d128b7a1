use std::f64::consts::PI;
use std::sync::Arc;

use kuzlab::dynamics::{step, ModelKind, PhysicalParams, Scheme, SimState};
use kuzlab::field::{Field, Grid};
use kuzlab::jet::{
    apply_gamma, build_jet, expand_gamma, gamma_words, GammaIndex, GammaOp, MultiIndex, Term,
};

fn max_abs_diff(a: &Field, b: &Field) -> f64 {
    a.values()
        .iter()
        .zip(b.values())
        .fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn kuznetsov_state(g: &Arc<Grid>) -> SimState {
    let u = Field::from_fn(g, |x| 0.4 * (x[0]).sin() + 0.1 * (2.0 * x[0] + 0.3).cos());
    let v = Field::from_fn(g, |x| 0.5 * (x[0]).cos() - 0.2 * (3.0 * x[0]).sin());
    SimState::new(u, v).unwrap()
}

#[test]
fn second_layer_is_acceleration() {
    let g = Arc::new(Grid::new(&[2.0 * PI], &[64], false).unwrap());
    let s = kuznetsov_state(&g);
    let p = PhysicalParams::new(1.2, 0.6, 0.3, 1.1, 2.0).unwrap();
    for kind in [
        ModelKind::Wave,
        ModelKind::DampedWave,
        ModelKind::Westervelt,
        ModelKind::Kuznetsov,
    ] {
        let jet = build_jet(&s, &p, kind, 4).unwrap();
        let a = s.acceleration(&p, kind).unwrap();
        assert!(max_abs_diff(jet.layer(2).unwrap(), &a) <= 1e-12, "{kind:?}");
    }
}

#[test]
fn zero_displacement_cascade_oracle() {
    let g = Arc::new(Grid::new(&[2.0 * PI], &[64], false).unwrap());
    let p = PhysicalParams::new(1.0, 0.8, 0.25, 1.2, 2.0).unwrap();
    let v = Field::from_fn(&g, |x| 0.9 * (2.0 * x[0]).sin());
    let s = SimState::new(Field::zeros(&g), v.clone()).unwrap();
    let jet = build_jet(&s, &p, ModelKind::Kuznetsov, 2).unwrap();
    let (visc, a) = (p.nu * p.eps, p.alpha * p.eps);
    for (x, vi) in jet.layer(2).unwrap().values().iter().zip(v.values()) {
        let want = visc * (-4.0 * vi) / (1.0 - a * vi);
        assert!((x - want).abs() < 1e-12);
    }
}

#[test]
fn higher_layers_match_finite_differences() {
    // central differences of the time series of lower layers, second order in h
    let g = Arc::new(Grid::new(&[2.0 * PI], &[64], false).unwrap());
    let p = PhysicalParams::new(1.0, 0.3, 0.2, 1.0, 2.0).unwrap();
    let s = kuznetsov_state(&g);
    let kind = ModelKind::Kuznetsov;
    let jet = build_jet(&s, &p, kind, 4).unwrap();
    let errs: Vec<f64> = [0.02, 0.01]
        .iter()
        .map(|&h| {
            let fwd = advance(&s, h, &p, kind);
            let bwd = advance_back(&s, h, &p, kind);
            let jf = build_jet(&fwd, &p, kind, 3).unwrap();
            let jb = build_jet(&bwd, &p, kind, 3).unwrap();
            let fd3 = jf
                .layer(2)
                .unwrap()
                .sub(jb.layer(2).unwrap())
                .scaled(0.5 / h);
            let fd4 = jf
                .layer(3)
                .unwrap()
                .sub(jb.layer(3).unwrap())
                .scaled(0.5 / h);
            let fd2 = fwd.v.sub(&bwd.v).scaled(0.5 / h);
            max_abs_diff(&fd2, jet.layer(2).unwrap())
                + max_abs_diff(&fd3, jet.layer(3).unwrap())
                + max_abs_diff(&fd4, jet.layer(4).unwrap())
        })
        .collect();
    let order = (errs[0] / errs[1]).log2();
    assert!(order > 1.8, "{errs:?}");
}

fn advance(s: &SimState, h: f64, p: &PhysicalParams, kind: ModelKind) -> SimState {
    let n = 20;
    let mut st = s.clone();
    for _ in 0..n {
        st = step(&st, h / n as f64, p, kind, Scheme::ExplicitRK4).unwrap();
    }
    st
}

// Backward neighbour: the same RK4 update with a negative step, which the
// library integrator rejects by design.
fn advance_back(s: &SimState, h: f64, p: &PhysicalParams, kind: ModelKind) -> SimState {
    let n = 20;
    let mut st = s.clone();
    for _ in 0..n {
        st = rk4_signed(&st, -h / n as f64, p, kind);
    }
    st
}

fn rk4_signed(s: &SimState, dt: f64, p: &PhysicalParams, kind: ModelKind) -> SimState {
    let acc = |u: &Field, v: &Field| {
        SimState::new(u.clone(), v.clone())
            .unwrap()
            .acceleration(p, kind)
            .unwrap()
    };
    let a1 = acc(&s.u, &s.v);
    let (u2, v2) = (
        s.u.add(&s.v.scaled(dt / 2.0)),
        s.v.add(&a1.scaled(dt / 2.0)),
    );
    let a2 = acc(&u2, &v2);
    let (u3, v3) = (s.u.add(&v2.scaled(dt / 2.0)), s.v.add(&a2.scaled(dt / 2.0)));
    let a3 = acc(&u3, &v3);
    let (u4, v4) = (s.u.add(&v3.scaled(dt)), s.v.add(&a3.scaled(dt)));
    let a4 = acc(&u4, &v4);
    let u = s.u.add(
        &s.v.add(&v2.scaled(2.0))
            .add(&v3.scaled(2.0))
            .add(&v4)
            .scaled(dt / 6.0),
    );
    let v = s.v.add(
        &a1.add(&a2.scaled(2.0))
            .add(&a3.scaled(2.0))
            .add(&a4)
            .scaled(dt / 6.0),
    );
    SimState::new(u, v).unwrap()
}

#[test]
fn rotation_annihilates_radial_fields() {
    let g = Arc::new(Grid::new(&[12.0, 12.0], &[64, 64], true).unwrap());
    let u = Field::from_fn(&g, |x| (-(x[0] * x[0] + x[1] * x[1])).exp());
    let v = Field::from_fn(&g, |x| (-(x[0] * x[0] + x[1] * x[1]) / 2.0).exp());
    let s = SimState::new(u, v).unwrap();
    let jet = build_jet(&s, &PhysicalParams::default(), ModelKind::Wave, 2).unwrap();
    let w = GammaIndex::new(vec![GammaOp::Rotation(0, 1)]).unwrap();
    let r = apply_gamma(&jet, &w).unwrap();
    assert!(r.linf_norm().unwrap() < 1e-8);
}

#[test]
fn boost_at_time_zero_is_weighted_velocity() {
    let g = Arc::new(Grid::new(&[10.0, 10.0], &[32, 32], true).unwrap());
    let u = Field::from_fn(&g, |x| (-(x[0] * x[0] + 2.0 * x[1] * x[1])).exp());
    let v = Field::from_fn(&g, |x| x[0] * (-(x[0] * x[0] + x[1] * x[1])).exp());
    let s = SimState::new(u, v.clone()).unwrap();
    let jet = build_jet(&s, &PhysicalParams::default(), ModelKind::Wave, 2).unwrap();
    for i in 0..2 {
        let w = GammaIndex::new(vec![GammaOp::Boost(i)]).unwrap();
        let got = apply_gamma(&jet, &w).unwrap();
        let mut x = [0.0; 3];
        for (idx, val) in got.values().iter().enumerate() {
            g.point(idx, &mut x);
            assert!((val - x[i] * v.values()[idx]).abs() < 1e-14);
        }
    }
}

#[test]
fn scaling_on_travelling_wave() {
    let g = Arc::new(Grid::new(&[2.0 * PI], &[64], true).unwrap());
    let t = 0.7f64;
    let u = Field::from_fn(&g, |x| (x[0] - t).sin());
    let v = Field::from_fn(&g, |x| -(x[0] - t).cos());
    let mut s = SimState::new(u, v).unwrap();
    s.t = t;
    let jet = build_jet(&s, &PhysicalParams::default(), ModelKind::Wave, 2).unwrap();
    let got = apply_gamma(&jet, &GammaIndex::new(vec![GammaOp::Scaling]).unwrap()).unwrap();
    for (j, val) in got.values().iter().enumerate() {
        let x = g.coordinate(0, j);
        assert!((val - (x - t) * (x - t).cos()).abs() < 1e-11);
    }
}

#[test]
fn weighted_words_need_centered_grid() {
    let g = Arc::new(Grid::new(&[2.0 * PI], &[16], false).unwrap());
    let s = SimState::new(Field::zeros(&g), Field::zeros(&g)).unwrap();
    let jet = build_jet(&s, &PhysicalParams::default(), ModelKind::Wave, 2).unwrap();
    assert!(apply_gamma(&jet, &GammaIndex::new(vec![GammaOp::Scaling]).unwrap()).is_err());
    assert!(apply_gamma(&jet, &GammaIndex::new(vec![GammaOp::Space(0)]).unwrap()).is_ok());
}

// Sum of exponentials with exactly known derivatives.
struct Expo {
    modes: Vec<(f64, f64, [f64; 3])>,
}

impl Expo {
    fn eval(&self, t: f64, x: &[f64; 3]) -> f64 {
        self.modes
            .iter()
            .map(|(c, a, b)| c * (a * t + b[0] * x[0] + b[1] * x[1] + b[2] * x[2]).exp())
            .sum()
    }

    fn deriv(&self, d: &MultiIndex, t: f64, x: &[f64; 3]) -> f64 {
        self.modes
            .iter()
            .map(|(c, a, b)| {
                let mut w = c * a.powi(d.time as i32);
                for i in 0..3 {
                    w *= b[i].powi(d.space[i] as i32);
                }
                w * (a * t + b[0] * x[0] + b[1] * x[1] + b[2] * x[2]).exp()
            })
            .sum()
    }
}

fn fd(f: &dyn Fn(f64, [f64; 3]) -> f64, var: usize, t: f64, x: [f64; 3]) -> f64 {
    let h = 1e-3;
    let at = |s: f64| {
        let (mut tt, mut xx) = (t, x);
        if var == 0 {
            tt += s;
        } else {
            xx[var - 1] += s;
        }
        f(tt, xx)
    };
    (-at(2.0 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2.0 * h)) / (12.0 * h)
}

fn apply_op(
    op: GammaOp,
    dims: usize,
    f: &dyn Fn(f64, [f64; 3]) -> f64,
    t: f64,
    x: [f64; 3],
) -> f64 {
    match op {
        GammaOp::Time => fd(f, 0, t, x),
        GammaOp::Space(i) => fd(f, i + 1, t, x),
        GammaOp::Scaling => {
            t * fd(f, 0, t, x) + (0..dims).map(|i| x[i] * fd(f, i + 1, t, x)).sum::<f64>()
        }
        GammaOp::Boost(i) => x[i] * fd(f, 0, t, x) + t * fd(f, i + 1, t, x),
        GammaOp::Rotation(i, k) => x[i] * fd(f, k + 1, t, x) - x[k] * fd(f, i + 1, t, x),
    }
}

fn eval_terms(terms: &[Term], f: &Expo, t: f64, x: &[f64; 3]) -> f64 {
    terms
        .iter()
        .map(|tm| {
            let mut w = tm.coeff as f64 * t.powi(tm.t_pow as i32);
            for i in 0..3 {
                w *= x[i].powi(tm.x_pow[i] as i32);
            }
            w * f.deriv(&tm.deriv, t, x)
        })
        .sum()
}

#[test]
fn expansion_matches_nested_application() {
    let f = Expo {
        modes: vec![
            (0.7, 0.3, [0.5, -0.2, 0.1]),
            (-0.4, -0.6, [0.2, 0.4, -0.3]),
            (0.2, 0.1, [-0.3, 0.1, 0.6]),
        ],
    };
    let points = [
        (0.4, [0.3, -0.5, 0.2]),
        (1.3, [-0.8, 0.6, 0.9]),
        (0.0, [0.1, 0.2, -0.4]),
    ];
    for dims in 1..=3 {
        for word in gamma_words(dims, 2).unwrap() {
            let terms = expand_gamma(&word, dims).unwrap();
            for &(t, x) in &points {
                let mut xs = x;
                for v in xs.iter_mut().skip(dims) {
                    *v = 0.0;
                }
                let expect = match word.ops() {
                    [] => f.eval(t, &xs),
                    [a] => apply_op(*a, dims, &|tt, xx| f.eval(tt, &xx), t, xs),
                    [a, b] => {
                        let inner = |tt: f64, xx: [f64; 3]| {
                            apply_op(*b, dims, &|t2, x2| f.eval(t2, &x2), tt, xx)
                        };
                        apply_op(*a, dims, &inner, t, xs)
                    }
                    _ => unreachable!(),
                };
                let got = eval_terms(&terms, &f, t, &xs);
                assert!(
                    (got - expect).abs() < 1e-8,
                    "{word} dims {dims}: {got} vs {expect}"
                );
            }
        }
    }
}

#[test]
fn scaling_squared_has_mixed_weights() {
    let terms = expand_gamma(
        &GammaIndex::new(vec![GammaOp::Scaling, GammaOp::Scaling]).unwrap(),
        1,
    )
    .unwrap();
    let has = |tp: u32, xp: u32| terms.iter().any(|t| t.t_pow == tp && t.x_pow[0] == xp);
    assert!(has(2, 0) && has(1, 1) && has(0, 2));
}
