//! Turns a validated config into core objects.

use std::path::Path;
use std::sync::Arc;

use travwave_core::data::{DataShape, InitialData};
use travwave_core::energy::initial_smallness;
use travwave_core::quadrature::lagrange_uniform;
use travwave_core::solver::EnergyConfig;
use travwave_core::{
    builtin_profile, builtin_system, CoefficientSet, GridSpec, SolverConfig, SystemKind, TravelingWaveProfile,
};

use crate::config::{DataConfig, ExperimentConfig};
use crate::error::{LabError, Result};

pub fn system(cfg: &ExperimentConfig) -> Result<Arc<dyn CoefficientSet>> {
    Ok(builtin_system(&cfg.system.name, cfg.system.params())?)
}

pub fn profile(cfg: &ExperimentConfig, dim: usize) -> Result<TravelingWaveProfile> {
    let p = builtin_profile(&cfg.profile.name, cfg.profile.amplitude, dim)?;
    Ok(match &cfg.profile.direction {
        Some(d) if d.len() != dim => {
            return Err(LabError::Config(format!(
                "profile.direction has {} entries for a system of dimension {dim}",
                d.len()
            )))
        }
        Some(d) => p.with_direction(d.clone()),
        None => p,
    })
}

/// Semilinear energies stop at second order, quasilinear ones at third.
pub fn energy_order(sys: &dyn CoefficientSet) -> usize {
    match sys.kind() {
        SystemKind::Semilinear => 2,
        SystemKind::Quasilinear => 3,
    }
}

pub fn solver_config(cfg: &ExperimentConfig, sys: &dyn CoefficientSet) -> SolverConfig {
    SolverConfig {
        output_every: cfg.output_every,
        energy: Some(EnergyConfig {
            delta: cfg.delta,
            max_order: energy_order(sys),
        }),
        ..SolverConfig::default()
    }
}

/// Initial data and its measured smallness on `grid`.
///
/// With `normalize`, the data is rescaled so that the measured smallness
/// equals `epsilon`; otherwise `epsilon` is the shape amplitude and file
/// data is used as read.
pub fn initial_data(
    data: &DataConfig,
    dim: usize,
    delta: f64,
    l_max: usize,
    grid: &GridSpec,
) -> Result<(InitialData, f64)> {
    let raw = match &data.file {
        Some(path) => read_data_file(path, dim)?,
        None => {
            let shape = DataShape::from_name(&data.shape, data.center, data.width)?;
            let amplitude = if data.normalize { 1.0 } else { data.epsilon };
            let direction = match &data.direction {
                Some(d) if d.len() != dim => {
                    return Err(LabError::Config(format!(
                        "data.direction has {} entries for a system of dimension {dim}",
                        d.len()
                    )))
                }
                Some(d) => d.clone(),
                None => vec![1.0; dim],
            };
            InitialData::from_shape_along(direction, shape, amplitude, data.motion.into())
        }
    };
    let measure = |d: &InitialData| -> Result<f64> {
        let (u0, u1) = d.sample(grid);
        Ok(initial_smallness(&u0, &u1, delta, l_max, grid)?)
    };
    let eps = measure(&raw)?;
    if !data.normalize {
        return Ok((raw, eps));
    }
    if data.epsilon == 0.0 {
        return Ok((InitialData::zero(dim), 0.0));
    }
    if eps == 0.0 {
        return Err(LabError::Config("cannot normalize data whose smallness is zero".into()));
    }
    let scaled = raw.scaled(data.epsilon / eps);
    let eps = measure(&scaled)?;
    Ok((scaled, eps))
}

/// Reads `x, u0_0 .. u0_{n-1}, u1_0 .. u1_{n-1}` on uniformly spaced `x`
/// and interpolates with six-point Lagrange stencils; zero outside the file's range.
pub fn read_data_file(path: &Path, dim: usize) -> Result<InitialData> {
    let fail = |why: String| LabError::DataFile {
        path: path.to_path_buf(),
        why,
    };
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path)?;
    let header = reader.headers()?.clone();
    let mut expected = vec!["x".to_string()];
    expected.extend((0..dim).map(|k| format!("u0_{k}")));
    expected.extend((0..dim).map(|k| format!("u1_{k}")));
    if header.iter().map(str::trim).ne(expected.iter().map(String::as_str)) {
        return Err(fail(format!("expected header `{}`", expected.join(","))));
    }
    let mut xs = Vec::new();
    let mut cols = vec![Vec::new(); 2 * dim];
    for rec in reader.records() {
        let rec = rec?;
        let mut vals = rec.iter().map(|s| s.trim().parse::<f64>());
        let x = vals.next().unwrap().map_err(|e| fail(e.to_string()))?;
        xs.push(x);
        for col in cols.iter_mut() {
            col.push(vals.next().unwrap().map_err(|e| fail(e.to_string()))?);
        }
    }
    if xs.len() < 6 {
        return Err(fail("at least six rows are required".into()));
    }
    let h = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
    if !(h > 0.0) || xs.iter().enumerate().any(|(i, x)| (x - xs[0] - i as f64 * h).abs() > 1e-9 * h.max(1.0)) {
        return Err(fail("x must be increasing and uniformly spaced".into()));
    }
    let (x0, x1) = (xs[0], xs[xs.len() - 1]);
    let cols: Arc<Vec<Vec<f64>>> = Arc::new(cols);
    let eval = move |cols: &[Vec<f64>], x: f64, out: &mut [f64]| {
        for (o, col) in out.iter_mut().zip(cols) {
            *o = if x < x0 || x > x1 { 0.0 } else { lagrange_uniform(x0, h, col, x, 6) };
        }
    };
    let (c0, c1, c2) = (cols.clone(), cols.clone(), cols);
    // Centered difference of the interpolant; its step is far below the file spacing.
    let dx = 1e-4 * h;
    Ok(InitialData::custom(
        dim,
        move |x, out| eval(&c0[..dim], x, out),
        move |x, out| {
            let mut lo = vec![0.0; dim];
            eval(&c1[..dim], x - dx, &mut lo);
            eval(&c1[..dim], x + dx, out);
            out.iter_mut().zip(&lo).for_each(|(o, l)| *o = (*o - l) / (2.0 * dx));
        },
        move |x, out| eval(&c2[dim..], x, out),
    ))
}
