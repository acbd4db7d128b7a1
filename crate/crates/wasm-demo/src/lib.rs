//! Browser bindings for three small 1-D operations; every call returns a
//! JSON string for the page in `www/`.

use std::f64::consts::PI;

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use kuzlab::config::{PresetKind, RunConfig};
use kuzlab::dynamics::{ModelKind, PhysicalParams, SimState};
use kuzlab::energy::{thresholds, EnvelopeParams};
use kuzlab::experiments::{fit_loglog, run_from, run_until_breakdown};
use kuzlab::field::GridSpec;

/// Largest grid the page may request; keeps a call well under a second.
pub const MAX_POINTS: usize = 512;

fn model(name: &str) -> Result<ModelKind, String> {
    serde_json::from_value(Value::String(name.to_string()))
        .map_err(|_| format!("unknown model '{name}'"))
}

fn config(
    kind: ModelKind,
    points: usize,
    eps: f64,
    nu: f64,
    amplitude: f64,
) -> Result<RunConfig, String> {
    if !(8..=MAX_POINTS).contains(&points) {
        return Err(format!("points must lie in 8..={MAX_POINTS}"));
    }
    let grid = GridSpec {
        lengths: vec![2.0 * PI],
        points: vec![points],
        origin_centered: false,
    };
    let mut cfg = RunConfig::new(kind, grid);
    cfg.params = PhysicalParams::new(1.0, nu, eps, 1.0, 2.0).map_err(|e| e.to_string())?;
    cfg.initial.preset = PresetKind::SineMode;
    cfg.initial.amplitude = amplitude;
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

/// Evolves the travelling sine mode `amplitude·sin x` and returns the energy
/// series plus the final profile.
#[wasm_bindgen]
pub fn simulate(
    model_name: &str,
    points: usize,
    eps: f64,
    nu: f64,
    amplitude: f64,
    horizon: f64,
) -> Result<String, String> {
    let mut cfg = config(model(model_name)?, points, eps, nu, amplitude)?;
    cfg.integrator.horizon = horizon;
    cfg.integrator.report_every = 5;
    cfg.validate().map_err(|e| e.to_string())?;
    let grid = cfg.build_grid().map_err(|e| e.to_string())?;
    let (u0, u1) = cfg.initial_data(&grid).map_err(|e| e.to_string())?;
    let state = SimState::new(u0, u1).map_err(|e| e.to_string())?;
    let mut series = Vec::new();
    let out = run_from(state, 0, &cfg.setup(), &mut |r| {
        series.push(json!({
            "t": r.t, "e_wave": r.e_wave, "e_nonl": r.e_nonl,
            "f_nu": r.f_nu, "min_hyp": r.min_hyp,
        }));
        Ok(())
    })
    .map_err(|e| e.to_string())?;
    Ok(json!({
        "series": series,
        "verdict": out.verdict,
        "profile": out.state.u.values(),
    })
    .to_string())
}

/// Closed-form threshold record for one parameter set.
#[wasm_bindgen]
pub fn threshold_record(
    c: f64,
    nu: f64,
    eps: f64,
    alpha: f64,
    beta: f64,
    dims: usize,
) -> Result<String, String> {
    if !(1..=3).contains(&dims) {
        return Err("dims must be 1, 2 or 3".into());
    }
    let p = PhysicalParams::new(c, nu, eps, alpha, beta).map_err(|e| e.to_string())?;
    let th = thresholds(&p, &EnvelopeParams::default(), dims);
    Ok(serde_json::to_string(&th).map_err(|e| e.to_string())?)
}

/// Breakdown times of the sine mode for each ε (sequential: no threads in
/// the browser) and the log-log slope of `t*` against ε.
#[wasm_bindgen]
pub fn lifespan_scan(
    amplitude: f64,
    points: usize,
    eps_list: Vec<f64>,
    horizon: f64,
) -> Result<String, String> {
    let mut rows = Vec::new();
    let mut pts = Vec::new();
    for &eps in &eps_list {
        let mut cfg = config(ModelKind::Kuznetsov, points, eps, 0.0, amplitude)?;
        cfg.integrator.horizon = horizon;
        let grid = cfg.build_grid().map_err(|e| e.to_string())?;
        let (u0, u1) = cfg.initial_data(&grid).map_err(|e| e.to_string())?;
        let out = run_until_breakdown(&u0, &u1, &cfg.setup()).map_err(|e| e.to_string())?;
        if let Some(t) = out.verdict.t_star {
            pts.push((eps, t));
        }
        rows.push(json!({"eps": eps, "t_star": out.verdict.t_star, "cause": out.verdict.cause}));
    }
    Ok(json!({"rows": rows, "fit": fit_loglog(&pts)}).to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simulate_linear_wave_keeps_energy() {
        let v: Value =
            serde_json::from_str(&simulate("wave", 64, 0.1, 0.0, 0.1, 1.0).unwrap()).unwrap();
        let s = v["series"].as_array().unwrap();
        let e0 = s[0]["e_wave"].as_f64().unwrap();
        let e1 = s.last().unwrap()["e_wave"].as_f64().unwrap();
        assert!((e1 - e0).abs() < 1e-8 * e0);
        assert_eq!(v["profile"].as_array().unwrap().len(), 64);
        assert_eq!(v["verdict"]["cause"], "horizon_reached");
    }

    #[test]
    fn bad_inputs_are_errors() {
        assert!(simulate("burgers", 64, 0.1, 0.0, 0.1, 1.0).is_err());
        assert!(simulate("wave", 4, 0.1, 0.0, 0.1, 1.0).is_err());
        assert!(threshold_record(1.0, 0.0, 0.1, -1.0, 2.0, 1).is_err());
        assert!(threshold_record(1.0, 0.0, 0.1, 1.0, 2.0, 4).is_err());
    }

    #[test]
    fn threshold_radius() {
        let v: Value =
            serde_json::from_str(&threshold_record(1.0, 0.6, 0.1, 1.0, 2.0, 2).unwrap()).unwrap();
        assert!((v["r_star"].as_f64().unwrap() - 0.6 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn scan_shortens_with_eps() {
        let v: Value =
            serde_json::from_str(&lifespan_scan(0.5, 64, vec![0.2, 0.4], 60.0).unwrap()).unwrap();
        let rows = v["rows"].as_array().unwrap();
        let t: Vec<f64> = rows.iter().map(|r| r["t_star"].as_f64().unwrap()).collect();
        assert!(t[1] < t[0]);
        assert!(v["fit"]["slope"].as_f64().unwrap() < 0.0);
    }
}
