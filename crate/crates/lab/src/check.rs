//! Pre-run report: null structure, hyperbolicity and profile decay.

use serde::Serialize;
use travwave_core::profile::{decay_report, default_decay_grid};
use travwave_core::system::{check_structure, hyperbolicity_margin, ConditionReport, StructureOptions};
use travwave_core::SystemKind;

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::experiment::{xi_grid, Status};
use crate::setup;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionSummary {
    pub satisfied: bool,
    pub fitted_order: Option<f64>,
    pub constant_estimate: f64,
}

impl From<&ConditionReport> for ConditionSummary {
    fn from(r: &ConditionReport) -> Self {
        ConditionSummary {
            satisfied: r.satisfied,
            fitted_order: r.fitted_order,
            constant_estimate: r.constant_estimate,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub system: String,
    pub quasilinear: bool,
    pub a1: ConditionSummary,
    pub a2: ConditionSummary,
    pub a3: ConditionSummary,
    pub f: ConditionSummary,
    pub f_order_rho: Option<f64>,
    pub f_order_theta: Option<f64>,
    pub lambda: f64,
    pub lambda_argmin_xi: f64,
    pub decay_m0: f64,
    pub decay_m0_at_boundary: bool,
    pub decay_m1: f64,
    pub decay_m1_at_boundary: bool,
    pub status: Status,
}

pub fn check(cfg: &ExperimentConfig) -> Result<CheckReport> {
    cfg.validate()?;
    let sys = setup::system(cfg)?;
    let prof = setup::profile(cfg, sys.dim())?;
    let opts = StructureOptions {
        seed: cfg.seed,
        ..StructureOptions::default()
    };
    let rep = check_structure(sys.as_ref(), &opts)?;
    let hyp = hyperbolicity_margin(sys.as_ref(), &prof, &xi_grid())?;
    let decay = decay_report(&prof, cfg.delta, &default_decay_grid())?;
    let quasilinear = sys.kind() == SystemKind::Quasilinear;
    let ok = rep.all_satisfied() && (!quasilinear || hyp.lambda > 0.0);
    Ok(CheckReport {
        system: cfg.system.name.clone(),
        quasilinear,
        a1: (&rep.a1).into(),
        a2: (&rep.a2).into(),
        a3: (&rep.a3).into(),
        f: (&rep.f).into(),
        f_order_rho: rep.f_order_rho,
        f_order_theta: rep.f_order_theta,
        lambda: hyp.lambda,
        lambda_argmin_xi: hyp.argmin_xi,
        decay_m0: decay.m0.value,
        decay_m0_at_boundary: decay.m0.at_boundary,
        decay_m1: decay.m1.value,
        decay_m1_at_boundary: decay.m1.at_boundary,
        status: if ok { Status::Pass } else { Status::HypothesisViolated },
    })
}
