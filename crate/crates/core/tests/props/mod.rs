//! Property suites shared by the `properties` and `acceptance` targets. Each
//! runner draws from a deterministic RNG so reruns see the same cases.
#![allow(dead_code)]

use std::f64::consts::PI;
use std::sync::Arc;

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

use kuzlab::config::{parse_config, RunConfig};
use kuzlab::dynamics::{step, ModelKind, PhysicalParams, Scheme, SimState};
use kuzlab::energy::{
    cascade_polynomials, compute_report, energy_nonl, energy_wave, read_csv, read_jsonl,
    EnergyReport, ReportSpec, ReportWriter,
};
use kuzlab::experiments::run_from;
use kuzlab::field::{Field, Grid, GridSpec};
use kuzlab::jet::{
    apply_gamma, build_jet, expand_gamma, gamma_words, GammaIndex, GammaOp, MultiIndex, Term,
};

pub type Outcome = Result<(), String>;

pub fn runner(cases: u32) -> TestRunner {
    let cfg = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(cfg, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn finish(r: Result<(), proptest::test_runner::TestError<impl std::fmt::Debug>>) -> Outcome {
    r.map_err(|e| e.to_string())
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()) + 1e-300
}

/// Random box: 1 to 3 axes, small even point counts, lengths in [1, 10].
fn grid_strategy() -> impl Strategy<Value = Arc<Grid>> {
    (1usize..=3)
        .prop_flat_map(|d| {
            (
                proptest::collection::vec(1.0f64..10.0, d),
                proptest::collection::vec(prop_oneof![Just(8usize), Just(16), Just(32)], d),
                any::<bool>(),
            )
        })
        .prop_map(|(l, n, c)| Arc::new(Grid::new(&l, &n, c).unwrap()))
}

fn field_strategy() -> impl Strategy<Value = Field> {
    grid_strategy().prop_flat_map(|g| {
        proptest::collection::vec(-1.0f64..1.0, g.len())
            .prop_map(move |v| Field::from_values(&g, v).unwrap())
    })
}

/// A trigonometric polynomial `Σ a cos(k·x) + b sin(k·x)` with integer modes
/// inside the dealias cutoff, and its exact partial derivatives.
#[derive(Debug, Clone)]
struct Trig {
    modes: Vec<([i64; 3], f64, f64)>,
}

impl Trig {
    fn wavevector(&self, g: &Grid, m: &[i64; 3]) -> [f64; 3] {
        let mut k = [0.0; 3];
        for i in 0..g.dims() {
            k[i] = 2.0 * PI * m[i] as f64 / g.lengths()[i];
        }
        k
    }

    fn eval(&self, g: &Grid, x: &[f64], axis: usize, order: u32) -> f64 {
        self.modes
            .iter()
            .map(|(m, a, b)| {
                let k = self.wavevector(g, m);
                let ph: f64 = (0..g.dims()).map(|i| k[i] * x[i]).sum();
                // d^order/dx^order of a cos + b sin
                let s = k[axis].powi(order as i32);
                let (c, sn) = (ph.cos(), ph.sin());
                let val = match order % 4 {
                    0 => a * c + b * sn,
                    1 => -a * sn + b * c,
                    2 => -a * c - b * sn,
                    _ => a * sn - b * c,
                };
                s * val
            })
            .sum()
    }
}

fn trig_strategy() -> impl Strategy<Value = (Arc<Grid>, Trig)> {
    grid_strategy().prop_flat_map(|g| {
        let dims = g.dims();
        let caps: Vec<i64> = g.points().iter().map(|&n| (n / 3) as i64).collect();
        let mode = proptest::collection::vec(-6i64..=6, dims).prop_map(move |v| {
            let mut m = [0i64; 3];
            for i in 0..v.len() {
                m[i] = v[i].clamp(-caps[i], caps[i]);
            }
            m
        });
        proptest::collection::vec((mode, -1.0f64..1.0, -1.0f64..1.0), 1..4)
            .prop_map(move |modes| (g.clone(), Trig { modes }))
    })
}

pub fn parseval(cases: u32) -> Outcome {
    finish(runner(cases).run(&field_strategy(), |f| {
        let spectral = f.sobolev_norm(0.0).unwrap();
        prop_assert!(
            close(spectral, f.l2_norm(), 1e-10),
            "{spectral} vs {}",
            f.l2_norm()
        );
        Ok(())
    }))
}

pub fn derivative_exactness(cases: u32) -> Outcome {
    finish(runner(cases).run(
        &(trig_strategy(), 0usize..3, 1u32..4),
        |((g, tr), axis, order)| {
            let axis = axis % g.dims();
            let f = Field::from_fn(&g, |x| tr.eval(&g, x, axis, 0));
            let d = f.spatial_derivative(axis, order).unwrap();
            let exact = Field::from_fn(&g, |x| tr.eval(&g, x, axis, order));
            let scale = exact
                .linf_norm()
                .unwrap()
                .max(f.linf_norm().unwrap())
                .max(1e-300);
            let err = d.sub(&exact).linf_norm().unwrap();
            prop_assert!(err <= 1e-9 * scale, "err {err} scale {scale}");
            Ok(())
        },
    ))
}

pub fn sobolev_monotone(cases: u32) -> Outcome {
    finish(runner(cases).run(
        &(field_strategy(), 0.0f64..6.0, 0.0f64..6.0),
        |(f, a, b)| {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(
                f.sobolev_norm(lo).unwrap() <= f.sobolev_norm(hi).unwrap() * (1.0 + 1e-14)
            );
            Ok(())
        },
    ))
}

pub fn poincare(cases: u32) -> Outcome {
    finish(
        runner(cases).run(&(field_strategy(), 0usize..3), |(f, axis)| {
            let axis = axis % f.grid().dims();
            let m = f.mean_zero_project(axis).unwrap();
            let chk = m.poincare_check(axis).unwrap();
            prop_assert!(chk.lhs <= chk.constant * chk.rhs * (1.0 + 1e-10) + 1e-14);
            // the lowest mode along the axis saturates the bound
            let g = f.grid().clone();
            let k = 2.0 * PI / g.lengths()[axis];
            let low = Field::from_fn(&g, |x| (k * x[axis] + 0.3).sin());
            let c = low.poincare_check(axis).unwrap();
            prop_assert!(close(c.lhs, c.constant * c.rhs, 1e-12));
            Ok(())
        }),
    )
}

pub fn dealias_idempotent(cases: u32) -> Outcome {
    finish(runner(cases).run(&field_strategy(), |f| {
        let once = f.dealias().unwrap();
        let twice = once.dealias().unwrap();
        let scale = once.linf_norm().unwrap().max(1e-300);
        prop_assert!(twice.sub(&once).linf_norm().unwrap() <= 1e-14 * scale.max(1.0));
        prop_assert!(once.l2_norm() <= f.l2_norm() * (1.0 + 1e-14));
        Ok(())
    }))
}

fn smooth_state(g: &Arc<Grid>, a: [f64; 4]) -> SimState {
    let k = 2.0 * PI / g.lengths()[0];
    let u = Field::from_fn(g, |x| {
        a[0] * (k * x[0]).sin() + a[1] * (2.0 * k * x[0] + 0.4).cos()
    });
    let v = Field::from_fn(g, |x| {
        a[2] * (k * x[0]).cos() + a[3] * (3.0 * k * x[0]).sin()
    });
    SimState::new(u, v).unwrap()
}

pub fn acceleration_linear(cases: u32) -> Outcome {
    let g = Arc::new(Grid::new(&[2.0 * PI], &[32], false).unwrap());
    let amp = proptest::array::uniform4(-1.0f64..1.0);
    finish(runner(cases).run(
        &(amp.clone(), amp, -3.0f64..3.0, 0.0f64..2.0),
        |(a, b, s, nu)| {
            let p = PhysicalParams::new(1.3, nu, 0.2, 1.0, 2.0).unwrap();
            let p = PhysicalParams {
                alpha: 0.0,
                beta: 0.0,
                ..p
            };
            let x = smooth_state(&g, a);
            let y = smooth_state(&g, b);
            let comb = SimState::new(x.u.add(&y.u.scaled(s)), x.v.add(&y.v.scaled(s))).unwrap();
            for kind in [ModelKind::Wave, ModelKind::DampedWave, ModelKind::Kuznetsov] {
                let lhs = comb.acceleration(&p, kind).unwrap();
                let rhs = x
                    .acceleration(&p, kind)
                    .unwrap()
                    .add(&y.acceleration(&p, kind).unwrap().scaled(s));
                let scale = rhs.linf_norm().unwrap().max(1.0);
                prop_assert!(lhs.sub(&rhs).linf_norm().unwrap() <= 1e-12 * scale);
            }
            Ok(())
        },
    ))
}

pub fn step_never_leaks_nonfinite(cases: u32) -> Outcome {
    let g = Arc::new(Grid::new(&[2.0 * PI], &[32], false).unwrap());
    let amp = proptest::array::uniform4(-4.0f64..4.0);
    finish(
        runner(cases).run(&(amp, 0.01f64..1.0, 0.0f64..0.5), |(a, eps, dt)| {
            let p = PhysicalParams::new(1.0, 0.0, eps, 1.0, 2.0).unwrap();
            let s = smooth_state(&g, a);
            for scheme in [Scheme::ExplicitRK4, Scheme::Imex] {
                if let Ok(n) = step(&s, dt, &p, ModelKind::Kuznetsov, scheme) {
                    prop_assert!(n.u.is_finite() && n.v.is_finite());
                    prop_assert!(n.fnu_accum.is_finite() && n.div_accum.is_finite());
                }
            }
            Ok(())
        }),
    )
}

pub fn wave_cascade(cases: u32) -> Outcome {
    finish(runner(cases).run(
        &(field_strategy(), field_strategy(), 0.3f64..2.0),
        |(u, v, c)| {
            let v = Field::from_values(
                u.grid(),
                v.values()
                    .iter()
                    .cycle()
                    .take(u.grid().len())
                    .cloned()
                    .collect(),
            )
            .unwrap();
            let s = SimState::new(u.clone(), v.clone()).unwrap();
            let p = PhysicalParams::new(c, 0.0, 0.1, 1.0, 2.0).unwrap();
            let jet = build_jet(&s, &p, ModelKind::Wave, 5).unwrap();
            let op = |f: &Field| f.laplacian().unwrap().scaled(c * c);
            let (mut even, mut odd) = (u.clone(), v.clone());
            for k in 0..=2 {
                for (layer, want) in [(2 * k, &even), (2 * k + 1, &odd)] {
                    let got = jet.layer(layer).unwrap();
                    let scale = want.linf_norm().unwrap().max(1e-12);
                    prop_assert!(
                        got.sub(want).linf_norm().unwrap() <= 1e-10 * scale,
                        "layer {layer}"
                    );
                }
                even = op(&even);
                odd = op(&odd);
            }
            Ok(())
        },
    ))
}

pub fn cascade_matches_acceleration(cases: u32) -> Outcome {
    let g = Arc::new(Grid::new(&[2.0 * PI], &[32], false).unwrap());
    let amp = proptest::array::uniform4(-0.5f64..0.5);
    finish(
        runner(cases).run(&(amp, 0.0f64..1.0, 0.01f64..0.3), |(a, nu, eps)| {
            let p = PhysicalParams::new(1.0, nu, eps, 1.0, 2.0).unwrap();
            let s = smooth_state(&g, a);
            for kind in [ModelKind::Westervelt, ModelKind::Kuznetsov] {
                let jet = build_jet(&s, &p, kind, 3).unwrap();
                let acc = s.acceleration(&p, kind).unwrap();
                prop_assert_eq!(jet.layer(2).unwrap(), &acc);
            }
            Ok(())
        }),
    )
}

/// Sum of exponentials with exactly known derivatives.
#[derive(Debug, Clone)]
struct Expo {
    modes: Vec<(f64, f64, [f64; 3])>,
}

impl Expo {
    fn eval(&self, t: f64, x: &[f64; 3]) -> f64 {
        self.deriv(&MultiIndex::time(0), t, x)
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

pub fn gamma_expansion(cases: u32) -> Outcome {
    let mode = (
        -1.0f64..1.0,
        -0.7f64..0.7,
        proptest::array::uniform3(-0.7f64..0.7),
    );
    let strat = (
        proptest::collection::vec(mode, 1..4),
        1usize..=3,
        0.0f64..1.5,
        proptest::array::uniform3(-1.0f64..1.0),
    );
    finish(runner(cases).run(&strat, |(modes, dims, t, x)| {
        let f = Expo { modes };
        let mut xs = x;
        for v in xs.iter_mut().skip(dims) {
            *v = 0.0;
        }
        for word in gamma_words(dims, 2).unwrap() {
            let [a, b] = word.ops() else { continue };
            let terms = expand_gamma(&word, dims).unwrap();
            let inner =
                |tt: f64, xx: [f64; 3]| apply_op(*b, dims, &|t2, x2| f.eval(t2, &x2), tt, xx);
            let nested = apply_op(*a, dims, &inner, t, xs);
            let got = eval_terms(&terms, &f, t, &xs);
            prop_assert!(
                (got - nested).abs() < 1e-8,
                "{word} dims {dims}: {got} vs {nested}"
            );
        }
        Ok(())
    }))
}

pub fn rotation_kills_radial(cases: u32) -> Outcome {
    let g = Arc::new(Grid::new(&[16.0, 16.0, 16.0], &[32, 32, 32], true).unwrap());
    finish(
        runner(cases).run(&(1.5f64..2.0, -1.0f64..1.0, 0.0f64..2.0), |(w, a, t)| {
            let radial = |x: &[f64]| (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / (w * w)).exp();
            let u = Field::from_fn(&g, |x| a * radial(x));
            let v = Field::from_fn(&g, |x| radial(x));
            let mut s = SimState::new(u, v).unwrap();
            s.t = t;
            let jet = build_jet(&s, &PhysicalParams::default(), ModelKind::Wave, 3).unwrap();
            for (i, k) in [(0, 1), (0, 2), (1, 2)] {
                let r = apply_gamma(
                    &jet,
                    &GammaIndex::new(vec![GammaOp::Rotation(i, k)]).unwrap(),
                )
                .unwrap();
                // residual is the spectral error of the sampled Gaussian
                prop_assert!(r.linf_norm().unwrap() < 1e-7, "{}", r.linf_norm().unwrap());
            }
            for op in [GammaOp::Scaling, GammaOp::Boost(0), GammaOp::Rotation(0, 1)] {
                let r = apply_gamma(&jet, &GammaIndex::new(vec![op]).unwrap()).unwrap();
                prop_assert!(r.is_finite());
            }
            Ok(())
        }),
    )
}

pub fn sandwich(cases: u32) -> Outcome {
    let g = Arc::new(Grid::new(&[2.0 * PI], &[32], false).unwrap());
    finish(runner(cases).run(
        &(proptest::array::uniform4(-1.0f64..1.0), 0.01f64..0.5),
        |(a, eps)| {
            let p = PhysicalParams::new(1.0, 0.0, eps, 1.0, 2.0).unwrap();
            let s = smooth_state(&g, a);
            // scale the velocity into the admissible ball ‖v‖∞ ≤ 1/(2αε)
            let vmax = s.v.linf_norm().unwrap().max(1e-12);
            let s = SimState::new(s.u.clone(), s.v.scaled((0.5 / eps / vmax).min(1.0))).unwrap();
            let e = energy_wave(&s, &p);
            let n = energy_nonl(&s, &p, ModelKind::Kuznetsov);
            prop_assert!(0.5 * e <= n * (1.0 + 1e-12) && n <= 1.5 * e * (1.0 + 1e-12));
            Ok(())
        },
    ))
}

pub fn coefficient_polynomials_shape(_cases: u32) -> Outcome {
    let polys = cascade_polynomials(8);
    for w in polys.windows(2) {
        if w[1].len() < w[0].len() {
            return Err("degree drops".into());
        }
    }
    for (k, p) in polys.iter().enumerate() {
        if p.iter().any(|&c| c == 0) {
            return Err(format!("a_{k} has a zero coefficient: {p:?}"));
        }
    }
    finish(runner(64).run(&(0.0f64..10.0), |c| {
        let a = kuzlab::energy::cascade_coefficients(8, c);
        prop_assert!(a.windows(2).all(|w| w[1] > w[0]));
        Ok(())
    }))
}

fn config_strategy() -> impl Strategy<Value = RunConfig> {
    let model = prop_oneof![
        Just(ModelKind::Wave),
        Just(ModelKind::DampedWave),
        Just(ModelKind::Westervelt),
        Just(ModelKind::Kuznetsov)
    ];
    (
        model,
        (
            0.5f64..2.0,
            0.0f64..1.0,
            0.01f64..0.5,
            0.1f64..3.0,
            0.0f64..3.0,
        ),
        (
            1usize..=2,
            prop_oneof![Just(16usize), Just(32)],
            any::<bool>(),
        ),
        (0.01f64..1.0, 0.5f64..3.0, any::<bool>()),
        (
            proptest::option::of(0.001f64..0.1),
            0.0f64..20.0,
            1usize..20,
        ),
        (
            any::<u64>(),
            proptest::option::of(Just(2u32)),
            proptest::collection::vec(0u32..3, 0..3),
        ),
    )
        .prop_map(
            |(
                model,
                (c, nu, eps, alpha, beta),
                (dims, n, centered),
                (amp, width, rel),
                (dt, horizon, every),
                (seed, half, orders),
            )| {
                let grid = GridSpec {
                    lengths: vec![2.0 * PI; dims],
                    points: vec![n; dims],
                    origin_centered: centered,
                };
                let mut cfg = RunConfig::new(model, grid);
                cfg.params = PhysicalParams::new(c, nu, eps, alpha, beta).unwrap();
                cfg.initial.amplitude = amp;
                cfg.initial.width = width;
                cfg.initial.relative_to_threshold = rel;
                cfg.integrator.dt = dt;
                cfg.integrator.horizon = horizon;
                cfg.integrator.report_every = every;
                cfg.seed = seed;
                let mut orders = orders;
                orders.sort();
                orders.dedup();
                cfg.energies.m_orders = orders;
                cfg.energies.half_m = half;
                cfg
            },
        )
}

pub fn config_round_trip(cases: u32) -> Outcome {
    finish(runner(cases).run(&config_strategy(), |cfg| {
        let text = cfg.to_toml().unwrap();
        let back = parse_config(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(back, cfg);
        Ok(())
    }))
}

fn report_stream(cfg: &RunConfig) -> Vec<EnergyReport> {
    let grid = cfg.build_grid().unwrap();
    let (u0, u1) = cfg.initial_data(&grid).unwrap();
    let mut out = Vec::new();
    let setup = cfg.setup();
    run_from(SimState::new(u0, u1).unwrap(), 0, &setup, &mut |r| {
        out.push(r.clone());
        Ok(())
    })
    .unwrap();
    out
}

pub fn determinism(cases: u32) -> Outcome {
    let strat = (any::<u64>(), 0.0f64..0.05, 0.1f64..0.5);
    finish(runner(cases).run(&strat, |(seed, noise, amp)| {
        let mut cfg = parse_config(
            "model = \"kuznetsov\"\n[grid]\nlengths = [6.283185307179586]\npoints = [32]\n",
        )
        .unwrap();
        cfg.seed = seed;
        cfg.initial.preset = kuzlab::config::PresetKind::SineMode;
        cfg.initial.amplitude = amp;
        cfg.initial.noise = noise;
        cfg.integrator.horizon = 0.5;
        cfg.integrator.report_every = 3;
        cfg.energies.m_orders = vec![0, 1];
        let a = report_stream(&cfg);
        let b = report_stream(&cfg);
        prop_assert!(!a.is_empty());
        for (x, y) in a.iter().zip(&b) {
            // bitwise, NaN-safe
            prop_assert_eq!(
                serde_json::to_string(x).unwrap(),
                serde_json::to_string(y).unwrap()
            );
        }
        prop_assert_eq!(a.len(), b.len());
        Ok(())
    }))
}

pub fn csv_column_complete(cases: u32) -> Outcome {
    let strat = (
        proptest::collection::vec(0u32..3, 0..3),
        proptest::option::of(Just(2u32)),
        proptest::bool::ANY,
        proptest::collection::vec(-1e3f64..1e3, 1..6),
    );
    finish(runner(cases).run(&strat, |(orders, half, centered, ts)| {
        let mut orders = orders;
        orders.sort();
        orders.dedup();
        let spec = ReportSpec {
            m_orders: orders,
            half_m: half,
            ..ReportSpec::default()
        };
        let g = Arc::new(Grid::new(&[2.0 * PI], &[32], centered).unwrap());
        let dir = tempfile::tempdir().unwrap();
        let mut w = ReportWriter::create(dir.path(), &spec).unwrap();
        let mut written = Vec::new();
        for (i, t) in ts.iter().enumerate() {
            let u = Field::from_fn(&g, |x| (x[0] + t).sin() * 0.1 * (i + 1) as f64);
            let v = Field::from_fn(&g, |x| (x[0] - t).cos() * 0.1);
            let mut s = SimState::new(u, v).unwrap();
            s.t = *t;
            let r = compute_report(&s, &PhysicalParams::default(), ModelKind::Kuznetsov, &spec)
                .unwrap();
            w.write(&r).unwrap();
            written.push(r);
        }
        w.finish().unwrap();
        let csv = read_csv(&dir.path().join("reports.csv")).unwrap();
        let jsonl = read_jsonl(&dir.path().join("reports.jsonl")).unwrap();
        prop_assert_eq!(&csv, &written);
        prop_assert_eq!(&jsonl, &written);
        Ok(())
    }))
}

/// Every suite with its default case count.
pub fn all() -> Vec<(&'static str, fn(u32) -> Outcome, u32)> {
    vec![
        ("parseval", parseval as fn(u32) -> Outcome, 64),
        ("derivative exactness", derivative_exactness, 64),
        ("sobolev monotonicity", sobolev_monotone, 64),
        ("poincare saturation", poincare, 64),
        ("dealias idempotence", dealias_idempotent, 64),
        ("acceleration linearity", acceleration_linear, 32),
        ("finite steps", step_never_leaks_nonfinite, 32),
        ("wave cascade", wave_cascade, 32),
        ("cascade vs acceleration", cascade_matches_acceleration, 32),
        ("gamma expansion", gamma_expansion, 24),
        ("rotation of radial fields", rotation_kills_radial, 8),
        ("energy sandwich", sandwich, 64),
        (
            "coefficient polynomials shape",
            coefficient_polynomials_shape,
            1,
        ),
        ("config round trip", config_round_trip, 64),
        ("determinism", determinism, 8),
        ("csv column completeness", csv_column_complete, 16),
    ]
}
