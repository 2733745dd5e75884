//! Cross-product sweeps over data smallness and profile amplitude.

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::{LabError, Result};
use crate::experiment::{execute, RunSummary, Status, TerminationKind};
use crate::output;

/// One point of the sweep. Exactly one of `summary` and `error` is set.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub index: usize,
    pub epsilon: f64,
    pub amplitude: f64,
    pub summary: Option<RunSummary>,
    pub error: Option<String>,
}

impl SweepRow {
    pub fn status(&self) -> Option<Status> {
        self.summary.as_ref().map(|s| s.status)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// Errors count as numerical failures.
    pub fn status(&self) -> Status {
        self.rows.iter().fold(Status::Pass, |acc, r| {
            acc.worst(r.status().unwrap_or(Status::NumericalFailure))
        })
    }
}

/// The single-experiment configs of the cross product, epsilon outermost.
pub fn expand(cfg: &ExperimentConfig) -> Result<Vec<(f64, f64, ExperimentConfig)>> {
    cfg.validate()?;
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| LabError::Config("experiment needs a [sweep] table".into()))?;
    let eps = if sweep.epsilon.is_empty() { vec![cfg.data.epsilon] } else { sweep.epsilon.clone() };
    let amps = if sweep.amplitude.is_empty() { vec![cfg.profile.amplitude] } else { sweep.amplitude.clone() };
    let mut out = Vec::with_capacity(eps.len() * amps.len());
    for &e in &eps {
        for &a in &amps {
            let mut c = cfg.clone();
            c.experiment = sweep.run;
            c.sweep = None;
            c.data.epsilon = e;
            c.profile.amplitude = a;
            out.push((e, a, c));
        }
    }
    Ok(out)
}

/// Runs every point of the sweep on the rayon pool. Each run writes into
/// `out/run-NNN/`; the combined `sweep.csv` is written after all finish.
pub fn run_sweep(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<SweepResult> {
    let points = expand(cfg)?;
    if let Some(dir) = out {
        output::ensure_dir(dir)?;
    }
    let rows: Vec<SweepRow> = points
        .into_par_iter()
        .enumerate()
        .map(|(index, (epsilon, amplitude, c))| {
            let started = Instant::now();
            let outcome = execute(&c).and_then(|exp| {
                if let Some(dir) = out {
                    let run_dir = dir.join(format!("run-{index:03}"));
                    output::write_experiment(&exp, &run_dir)?;
                    output::write_timing(&run_dir, started.elapsed().as_secs_f64())?;
                }
                Ok(exp.summary)
            });
            let (summary, error) = match outcome {
                Ok(s) => (Some(s), None),
                Err(e) => (None, Some(e.to_string())),
            };
            SweepRow {
                index,
                epsilon,
                amplitude,
                summary,
                error,
            }
        })
        .collect();
    let result = SweepResult { rows };
    if let Some(dir) = out {
        write_sweep_csv(&result, &dir.join("sweep.csv"))?;
    }
    Ok(result)
}

#[derive(Serialize)]
struct CsvRow<'a> {
    run: usize,
    epsilon: f64,
    amplitude: f64,
    status: &'a str,
    termination: Option<TerminationKind>,
    t_final: Option<f64>,
    sup_e_total: Option<f64>,
    final_se_total: Option<f64>,
    measured_epsilon: Option<f64>,
    ratio: Option<f64>,
    lambda: Option<f64>,
    blowup_time: Option<f64>,
    note: &'a str,
}

pub fn write_sweep_csv(result: &SweepResult, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in &result.rows {
        let s = r.summary.as_ref();
        let status = match r.status() {
            Some(Status::Pass) => "pass",
            Some(Status::HypothesisViolated) => "hypothesis-violated",
            Some(Status::NumericalFailure) => "numerical-failure",
            None => "error",
        };
        let note = match s {
            Some(s) => s.gate.as_deref().unwrap_or(""),
            None => r.error.as_deref().unwrap_or(""),
        };
        w.serialize(CsvRow {
            run: r.index,
            epsilon: r.epsilon,
            amplitude: r.amplitude,
            status,
            termination: s.and_then(|s| s.termination),
            t_final: s.map(|s| s.t_final),
            sup_e_total: s.map(|s| s.sup_e_total),
            final_se_total: s.map(|s| s.final_se_total),
            measured_epsilon: s.map(|s| s.epsilon),
            ratio: s.and_then(|s| s.ratio),
            lambda: s.map(|s| s.lambda),
            blowup_time: s.and_then(|s| s.blowup_time),
            note,
        })?;
    }
    w.flush().map_err(|e| LabError::io(path, e))?;
    Ok(())
}
