use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::{ModelKind, PhysicalParams, SimState};
use crate::energy::{ReportSpec, ReportWriter};
use crate::error::Result;
use crate::field::snapshot;

/// `<out>/<experiment>/` holding `config.json`, `reports.csv`,
/// `reports.jsonl` and `verdict.json`.
#[derive(Debug, Clone)]
pub struct ResultsDir {
    root: PathBuf,
}

impl ResultsDir {
    pub fn create(out: &Path, experiment: &str) -> Result<Self> {
        let root = out.join(experiment);
        fs::create_dir_all(&root)?;
        Ok(Self { root })
    }

    pub fn path(&self) -> &Path {
        &self.root
    }

    fn write_json(&self, name: &str, value: &impl Serialize) -> Result<()> {
        let text = serde_json::to_string_pretty(value)?;
        fs::write(self.root.join(name), text + "\n")?;
        Ok(())
    }

    pub fn write_config(&self, config: &impl Serialize) -> Result<()> {
        self.write_json("config.json", config)
    }

    pub fn write_verdict(&self, verdict: &impl Serialize) -> Result<()> {
        self.write_json("verdict.json", verdict)
    }

    pub fn report_writer(&self, spec: &ReportSpec) -> Result<ReportWriter> {
        ReportWriter::create(&self.root, spec)
    }

    pub fn checkpoint_dir(&self) -> PathBuf {
        self.root.join("checkpoint")
    }
}

/// Everything besides the two fields needed to resume a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckpointMeta {
    pub t: f64,
    pub fnu_accum: f64,
    pub div_accum: f64,
    /// Accepted steps so far.
    pub step: usize,
    pub params: PhysicalParams,
    pub kind: ModelKind,
}

/// Writes `u.kzf`, `v.kzf` and `checkpoint.json` into `dir`.
pub fn save_checkpoint(
    dir: &Path,
    state: &SimState,
    step: usize,
    params: &PhysicalParams,
    kind: ModelKind,
) -> Result<()> {
    fs::create_dir_all(dir)?;
    snapshot::save(dir.join("u.kzf"), &state.u)?;
    snapshot::save(dir.join("v.kzf"), &state.v)?;
    let meta = CheckpointMeta {
        t: state.t,
        fnu_accum: state.fnu_accum,
        div_accum: state.div_accum,
        step,
        params: *params,
        kind,
    };
    fs::write(
        dir.join("checkpoint.json"),
        serde_json::to_string_pretty(&meta)?,
    )?;
    Ok(())
}

pub fn load_checkpoint(dir: &Path) -> Result<(SimState, CheckpointMeta)> {
    let meta: CheckpointMeta =
        serde_json::from_str(&fs::read_to_string(dir.join("checkpoint.json"))?)?;
    let u = snapshot::load(dir.join("u.kzf"))?;
    // share one grid so the pair passes same-grid checks
    let v = snapshot::read_snapshot_on(fs::File::open(dir.join("v.kzf"))?, u.grid())?;
    let state = SimState::restore(u, v, meta.t, meta.fnu_accum, meta.div_accum)?;
    Ok((state, meta))
}
