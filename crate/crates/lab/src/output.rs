//! Result files: energy CSV, summary JSON, timing, and plots.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use travwave_core::energy::Component;
use travwave_core::Trajectory;

use crate::error::{LabError, Result};
use crate::experiment::{Experiment, RunSummary};
use crate::plot;

/// First line of every energy CSV; bump when the columns change.
pub const ENERGY_CSV_VERSION: &str = "# travwave energy csv v1";

pub const ENERGY_COLUMNS: [&str; 11] = [
    "t", "Ebar1", "Ehat1", "Ebar2", "Ehat2", "Ebar3", "Ehat3", "Etilde3", "E_total", "SE_total", "max_abs_u",
];

#[derive(Debug, Clone, Serialize)]
struct EnergyRow {
    t: f64,
    #[serde(rename = "Ebar1")]
    ebar1: Option<f64>,
    #[serde(rename = "Ehat1")]
    ehat1: Option<f64>,
    #[serde(rename = "Ebar2")]
    ebar2: Option<f64>,
    #[serde(rename = "Ehat2")]
    ehat2: Option<f64>,
    #[serde(rename = "Ebar3")]
    ebar3: Option<f64>,
    #[serde(rename = "Ehat3")]
    ehat3: Option<f64>,
    #[serde(rename = "Etilde3")]
    etilde3: Option<f64>,
    #[serde(rename = "E_total")]
    e_total: Option<f64>,
    #[serde(rename = "SE_total")]
    se_total: Option<f64>,
    max_abs_u: f64,
}

fn create(path: &Path) -> Result<fs::File> {
    fs::File::create(path).map_err(|e| LabError::io(path, e))
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))
}

/// One row per output time. Energy cells are empty when the run recorded no
/// energies, as in a boosted frame.
pub fn write_energy_csv(tr: &Trajectory, path: &Path) -> Result<()> {
    let mut file = create(path)?;
    writeln!(file, "{ENERGY_CSV_VERSION}").map_err(|e| LabError::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    for (k, snap) in tr.snapshots.iter().enumerate() {
        let rep = tr.energies.get(k).filter(|r| r.t == snap.t);
        let c = |comp: Component| rep.map(|r| r.slice.get(comp));
        w.serialize(EnergyRow {
            t: snap.t,
            ebar1: c(Component::Ebar1),
            ehat1: c(Component::Ehat1),
            ebar2: c(Component::Ebar2),
            ehat2: c(Component::Ehat2),
            ebar3: c(Component::Ebar3),
            ehat3: c(Component::Ehat3),
            etilde3: c(Component::Etilde3),
            e_total: rep.map(|r| r.e_total()),
            se_total: rep.map(|r| r.se_total()),
            max_abs_u: snap.u.max_abs(),
        })?;
    }
    w.flush().map_err(|e| LabError::io(path, e))?;
    Ok(())
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut file = create(path)?;
    serde_json::to_writer_pretty(&mut file, value)?;
    writeln!(file).map_err(|e| LabError::io(path, e))
}

pub fn write_summary(summary: &RunSummary, dir: &Path) -> Result<()> {
    write_json(summary, &dir.join("summary.json"))
}

/// Wall time lives apart from the summary so that summaries stay
/// bit-identical across repeated runs.
pub fn write_timing(dir: &Path, wall_seconds: f64) -> Result<()> {
    write_json(&serde_json::json!({ "wall_seconds": wall_seconds }), &dir.join("timing.json"))
}

/// Writes `summary.json` and, per run, `<label>.csv` and three SVG plots.
pub fn write_experiment(exp: &Experiment, dir: &Path) -> Result<()> {
    ensure_dir(dir)?;
    write_summary(&exp.summary, dir)?;
    for run in &exp.runs {
        write_energy_csv(&run.trajectory, &dir.join(format!("{}.csv", run.label)))?;
        plot::emit_plots(&run.trajectory, dir, &run.label)?;
    }
    Ok(())
}
