use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dynamics::{hyperbolicity_factor_for, ModelKind, PhysicalParams, SimState};
use crate::error::{Error, Result};
use crate::jet::{build_jet, DEFAULT_MAX_JET_ORDER};

use super::{
    energy_half_m, energy_m, energy_nonl, energy_wave, f_nu, klainerman_energies, s_half_m,
};

/// First line of every report CSV.
pub const CSV_VERSION: &str = "# kuzlab-energy-report v1";

/// Which functionals a report evaluates besides the always-on ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportSpec {
    /// Orders of the `E_m` tower.
    pub m_orders: Vec<u32>,
    /// Even order of the viscous pair `E_{m/2}`, `S_{m/2}`.
    pub half_m: Option<u32>,
    /// Word length of the weighted energies (needs a centered grid).
    pub klainerman_m: Option<usize>,
    /// Relative density cutoff for the support radius.
    pub support_tol: f64,
}

impl Default for ReportSpec {
    fn default() -> Self {
        Self {
            m_orders: Vec::new(),
            half_m: None,
            klainerman_m: None,
            support_tol: 1e-6,
        }
    }
}

impl ReportSpec {
    pub fn jet_order(&self) -> usize {
        let mut k = 1;
        if let Some(&m) = self.m_orders.iter().max() {
            k = k.max(m as usize + 1);
        }
        if let Some(h) = self.half_m {
            k = k.max(h as usize / 2 + 1);
        }
        if let Some(m) = self.klainerman_m {
            k = k.max(m + 1);
        }
        k
    }

    pub fn validate(&self) -> Result<()> {
        if self.jet_order() > DEFAULT_MAX_JET_ORDER {
            return Err(Error::JetOrderTooLarge {
                requested: self.jet_order(),
                max: DEFAULT_MAX_JET_ORDER,
            });
        }
        if let Some(h) = self.half_m {
            if h % 2 != 0 {
                return Err(Error::InvalidParameter {
                    field: "half_m",
                    reason: format!("must be even, got {h}"),
                });
            }
        }
        if !(self.support_tol > 0.0 && self.support_tol < 1.0) {
            return Err(Error::InvalidParameter {
                field: "support_tol",
                reason: "must lie in (0, 1)".into(),
            });
        }
        Ok(())
    }

    fn header(&self) -> Vec<String> {
        let mut h: Vec<String> = ["t", "e_wave", "e_nonl", "f_nu"].map(String::from).into();
        h.extend(self.m_orders.iter().map(|m| format!("e_m{m}")));
        h.extend(
            [
                "e_half_m",
                "s_half_m",
                "e_1m",
                "e_inf_m",
                "min_hyp",
                "div_accum",
                "support_radius",
            ]
            .map(String::from),
        );
        h
    }
}

/// One timestamped row of every enabled functional. Disabled ones are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub t: f64,
    pub e_wave: f64,
    pub e_nonl: f64,
    pub f_nu: f64,
    pub e_m: BTreeMap<u32, f64>,
    pub e_half_m: Option<f64>,
    pub s_half_m: Option<f64>,
    pub e_1m: Option<f64>,
    pub e_inf_m: Option<f64>,
    pub min_hyp: f64,
    pub div_accum: f64,
    pub support_radius: Option<f64>,
}

impl EnergyReport {
    pub fn is_finite(&self) -> bool {
        let opt = [
            self.e_half_m,
            self.s_half_m,
            self.e_1m,
            self.e_inf_m,
            self.support_radius,
        ];
        [
            self.t,
            self.e_wave,
            self.e_nonl,
            self.f_nu,
            self.min_hyp,
            self.div_accum,
        ]
        .iter()
        .chain(self.e_m.values())
        .chain(opt.iter().flatten())
        .all(|x| x.is_finite())
    }
}

/// Evaluates all functionals enabled by `spec` on one state.
pub fn compute_report(
    state: &SimState,
    p: &PhysicalParams,
    kind: ModelKind,
    spec: &ReportSpec,
) -> Result<EnergyReport> {
    spec.validate()?;
    let (_, min_hyp) = hyperbolicity_factor_for(&state.v, p, kind);
    let mut r = EnergyReport {
        t: state.t,
        e_wave: energy_wave(state, p),
        e_nonl: energy_nonl(state, p, kind),
        f_nu: f_nu(state, p, kind)?,
        e_m: BTreeMap::new(),
        e_half_m: None,
        s_half_m: None,
        e_1m: None,
        e_inf_m: None,
        min_hyp,
        div_accum: state.div_accum,
        support_radius: support_radius(state, p, spec.support_tol),
    };
    let order = spec.jet_order();
    let needs_jet = order > 1 || !spec.m_orders.is_empty() || spec.klainerman_m.is_some();
    if needs_jet {
        let jet = build_jet(state, p, kind, order)?;
        for &m in &spec.m_orders {
            r.e_m.insert(m, energy_m(&jet, m)?);
        }
        if let Some(h) = spec.half_m {
            r.e_half_m = Some(energy_half_m(&jet, h)?);
            r.s_half_m = Some(s_half_m(&jet, h)?);
        }
        if let Some(m) = spec.klainerman_m {
            let k = klainerman_energies(&jet, m)?;
            r.e_1m = Some(k.e_1m);
            r.e_inf_m = Some(k.e_inf_m);
        }
    }
    if !r.is_finite() {
        return Err(Error::NonFinite("energy report"));
    }
    Ok(r)
}

/// Largest `|x|` where `v² + c²|∇u|²` exceeds `tol` times its maximum.
/// `None` on grids that are not origin-centered.
pub fn support_radius(state: &SimState, p: &PhysicalParams, tol: f64) -> Option<f64> {
    let grid = state.grid();
    if !grid.origin_centered() {
        return None;
    }
    let grad = state.u.gradient().ok()?;
    let c2 = p.c * p.c;
    let density: Vec<f64> = (0..grid.len())
        .map(|j| {
            let v = state.v.values()[j];
            v * v + c2 * grad.iter().map(|g| g.values()[j].powi(2)).sum::<f64>()
        })
        .collect();
    let max = density.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return Some(0.0);
    }
    let mut x = [0.0; 3];
    let mut r2 = 0.0f64;
    for (j, &d) in density.iter().enumerate() {
        if d > tol * max {
            grid.point(j, &mut x);
            r2 = r2.max(x.iter().map(|c| c * c).sum());
        }
    }
    Some(r2.sqrt())
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Single writer for one run's `reports.csv` and `reports.jsonl`.
pub struct ReportWriter {
    spec: ReportSpec,
    csv: csv::Writer<BufWriter<File>>,
    jsonl: BufWriter<File>,
    rows: usize,
}

impl ReportWriter {
    pub fn create(dir: &Path, spec: &ReportSpec) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        let mut f = BufWriter::new(File::create(dir.join("reports.csv"))?);
        writeln!(
            f,
            "{CSV_VERSION} half_m={} klainerman_m={}",
            spec.half_m
                .map(|m| m.to_string())
                .unwrap_or_else(|| "-".into()),
            spec.klainerman_m
                .map(|m| m.to_string())
                .unwrap_or_else(|| "-".into()),
        )?;
        let mut csv = csv::WriterBuilder::new().has_headers(false).from_writer(f);
        csv.write_record(spec.header())?;
        let jsonl = BufWriter::new(File::create(dir.join("reports.jsonl"))?);
        Ok(Self {
            spec: spec.clone(),
            csv,
            jsonl,
            rows: 0,
        })
    }

    /// Reopens the pair in `dir`, keeping the rows strictly before `before_t`.
    pub fn resume(dir: &Path, spec: &ReportSpec, before_t: f64) -> Result<Self> {
        let kept: Vec<EnergyReport> = read_jsonl(&dir.join("reports.jsonl"))?
            .into_iter()
            .filter(|r| r.t < before_t)
            .collect();
        // validates the csv against the same spec
        read_csv(&dir.join("reports.csv"))?;
        let mut w = Self::create(dir, spec)?;
        for r in &kept {
            w.write(r)?;
        }
        Ok(w)
    }

    pub fn write(&mut self, r: &EnergyReport) -> Result<()> {
        let mut row = vec![
            r.t.to_string(),
            r.e_wave.to_string(),
            r.e_nonl.to_string(),
            r.f_nu.to_string(),
        ];
        for m in &self.spec.m_orders {
            let v = r
                .e_m
                .get(m)
                .ok_or_else(|| Error::Report(format!("row at t = {} lacks e_m{m}", r.t)))?;
            row.push(v.to_string());
        }
        row.extend([
            fmt_opt(r.e_half_m),
            fmt_opt(r.s_half_m),
            fmt_opt(r.e_1m),
            fmt_opt(r.e_inf_m),
            r.min_hyp.to_string(),
            r.div_accum.to_string(),
            fmt_opt(r.support_radius),
        ]);
        self.csv.write_record(&row)?;
        serde_json::to_writer(&mut self.jsonl, r)?;
        self.jsonl.write_all(b"\n")?;
        self.rows += 1;
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn finish(mut self) -> Result<()> {
        self.csv.flush()?;
        self.jsonl.flush()?;
        Ok(())
    }
}

fn parse_f(s: &str, col: &str) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|_| Error::Report(format!("column {col}: cannot parse {s:?}")))
}

fn parse_opt(s: &str, col: &str) -> Result<Option<f64>> {
    if s.is_empty() {
        Ok(None)
    } else {
        parse_f(s, col).map(Some)
    }
}

/// Reads a CSV written by [`ReportWriter`], checking the version line and
/// that every row is column-complete.
pub fn read_csv(path: &Path) -> Result<Vec<EnergyReport>> {
    let mut first = String::new();
    BufReader::new(File::open(path)?).read_line(&mut first)?;
    if !first.starts_with(CSV_VERSION) {
        return Err(Error::Report(format!(
            "missing version line, found {:?}",
            first.trim()
        )));
    }
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .flexible(false)
        .from_path(path)?;
    let header: Vec<String> = rdr.headers()?.iter().map(String::from).collect();
    let fixed_head = ["t", "e_wave", "e_nonl", "f_nu"];
    let fixed_tail = [
        "e_half_m",
        "s_half_m",
        "e_1m",
        "e_inf_m",
        "min_hyp",
        "div_accum",
        "support_radius",
    ];
    if header.len() < fixed_head.len() + fixed_tail.len()
        || header[..4] != fixed_head
        || header[header.len() - 7..] != fixed_tail
    {
        return Err(Error::Report(format!("unexpected header {header:?}")));
    }
    let m_cols: Vec<u32> = header[4..header.len() - 7]
        .iter()
        .map(|h| {
            h.strip_prefix("e_m")
                .and_then(|m| m.parse().ok())
                .ok_or_else(|| Error::Report(format!("unexpected column {h}")))
        })
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        if rec.len() != header.len() {
            return Err(Error::Report(format!(
                "row has {} of {} columns",
                rec.len(),
                header.len()
            )));
        }
        let g = |i: usize| parse_f(&rec[i], &header[i]);
        let o = |i: usize| parse_opt(&rec[i], &header[i]);
        let tail = header.len() - 7;
        let mut e_m = BTreeMap::new();
        for (k, &m) in m_cols.iter().enumerate() {
            e_m.insert(m, g(4 + k)?);
        }
        out.push(EnergyReport {
            t: g(0)?,
            e_wave: g(1)?,
            e_nonl: g(2)?,
            f_nu: g(3)?,
            e_m,
            e_half_m: o(tail)?,
            s_half_m: o(tail + 1)?,
            e_1m: o(tail + 2)?,
            e_inf_m: o(tail + 3)?,
            min_hyp: g(tail + 4)?,
            div_accum: g(tail + 5)?,
            support_radius: o(tail + 6)?,
        });
    }
    Ok(out)
}

pub fn read_jsonl(path: &Path) -> Result<Vec<EnergyReport>> {
    let mut out = Vec::new();
    for line in BufReader::new(File::open(path)?).lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line)?);
    }
    Ok(out)
}
