//! Experiment orchestration: gates, runs, and the summary each one produces.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use travwave_core::data::InitialData;
use travwave_core::profile::{decay_report, default_decay_grid};
use travwave_core::quadrature::lagrange_uniform;
use travwave_core::solver::convergence_study;
use travwave_core::system::{boost_grid, check_structure, find_boost, hyperbolicity_margin, StructureOptions};
use travwave_core::{
    builtin_system, CoefficientSet, Error as CoreError, GridSpec, Solver, SystemKind, Termination, Trajectory,
    TravelingWaveProfile,
};

use crate::config::{ExactSolution, ExperimentConfig, ExperimentKind};
use crate::error::{LabError, Result};
use crate::setup;

/// Mirror of [`Termination`] with a stable serialized form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TerminationKind {
    ReachedTEnd,
    Blowup,
    BoundaryContamination,
    SingularA00,
}

impl From<Termination> for TerminationKind {
    fn from(t: Termination) -> Self {
        match t {
            Termination::ReachedTEnd => TerminationKind::ReachedTEnd,
            Termination::Blowup => TerminationKind::Blowup,
            Termination::BoundaryContamination => TerminationKind::BoundaryContamination,
            Termination::SingularA00 => TerminationKind::SingularA00,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    /// A gate failed and the solver was not invoked.
    HypothesisViolated,
    NumericalFailure,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::HypothesisViolated => 2,
            Status::NumericalFailure => 3,
        }
    }

    /// The more severe of two statuses.
    pub fn worst(self, other: Status) -> Status {
        if self.exit_code() >= other.exit_code() {
            self
        } else {
            other
        }
    }
}

/// Outcome of one experiment. Fields describing a run refer to the primary
/// run: the only one, the longest amplification run, the violating run, the
/// direct run, or the finest convergence grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub experiment: ExperimentKind,
    pub system: String,
    pub profile: String,
    pub amplitude: f64,
    pub delta: f64,
    pub status: Status,
    /// Why a gate failed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gate: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub termination: Option<TerminationKind>,
    pub t_final: f64,
    pub steps: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blowup_time: Option<f64>,
    pub sup_e_total: f64,
    pub final_se_total: f64,
    /// Initial smallness of the data as measured on the grid.
    pub epsilon: f64,
    /// `sup_t (E_total + SE_total) / epsilon^2`; absent for zero data and
    /// for runs that record no energies.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    pub lambda: f64,
    pub decay_m0: f64,
    pub decay_m1: f64,
    pub max_abs_u: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub details: Option<Details>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Details {
    Amplification {
        runs: Vec<AmplificationRun>,
        /// Relative spread of the plateau levels across end times.
        plateau_spread: f64,
    },
    Violation {
        reference_system: String,
        reference_termination: TerminationKind,
        reference_sup_e_total: f64,
        reference_t_final: f64,
        contrast_observed: bool,
    },
    Boost {
        c: f64,
        boosted_termination: TerminationKind,
        max_difference: f64,
        matched_points: usize,
        max_substeps: usize,
    },
    Convergence {
        nx: Vec<usize>,
        exact: bool,
        errors: Vec<f64>,
        orders: Vec<f64>,
        observed_order: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplificationRun {
    pub t_end: f64,
    pub termination: TerminationKind,
    /// First output time at which the pulse's energy centroid, in `xi`,
    /// is beyond the profile's support hint plus the exit margin.
    pub passage_time: Option<f64>,
    pub e_before: f64,
    /// Largest `E_total` up to the passage time.
    pub e_during: f64,
    pub e_after: Option<f64>,
    /// `(max - min) / E_total(passage)` over the window after passage;
    /// absent when the window does not fit in the run.
    pub plateau_flatness: Option<f64>,
    /// `E_total` at the end of the run.
    pub plateau_level: f64,
}

/// A trajectory and the file stem its artifacts are written under.
#[derive(Debug, Clone)]
pub struct LabeledRun {
    pub label: String,
    pub trajectory: Trajectory,
}

#[derive(Debug, Clone)]
pub struct Experiment {
    pub summary: RunSummary,
    pub runs: Vec<LabeledRun>,
}

/// Validates `cfg`, runs it, and writes artifacts into `out` when given.
pub fn run_experiment(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<RunSummary> {
    let exp = execute(cfg)?;
    if let Some(dir) = out {
        crate::output::write_experiment(&exp, dir)?;
    }
    Ok(exp.summary)
}

/// xi grid on which the hyperbolicity margin and boost conditions are checked.
pub fn xi_grid() -> Vec<f64> {
    (0..=10_000).map(|i| -50.0 + 0.01 * i as f64).collect()
}

struct Prepared {
    sys: Arc<dyn CoefficientSet>,
    prof: TravelingWaveProfile,
    grid: GridSpec,
    summary: RunSummary,
}

impl Prepared {
    fn new(cfg: &ExperimentConfig) -> Result<Self> {
        let sys = setup::system(cfg)?;
        let prof = setup::profile(cfg, sys.dim())?;
        let grid = cfg.grid.spec()?;
        let hyp = hyperbolicity_margin(sys.as_ref(), &prof, &xi_grid())?;
        let decay = decay_report(&prof, cfg.delta, &default_decay_grid())?;
        let summary = RunSummary {
            experiment: cfg.experiment,
            system: cfg.system.name.clone(),
            profile: cfg.profile.name.clone(),
            amplitude: cfg.profile.amplitude,
            delta: cfg.delta,
            status: Status::Pass,
            gate: None,
            termination: None,
            t_final: 0.0,
            steps: 0,
            blowup_time: None,
            sup_e_total: 0.0,
            final_se_total: 0.0,
            epsilon: 0.0,
            ratio: None,
            lambda: hyp.lambda,
            decay_m0: decay.m0.value,
            decay_m1: decay.m1.value,
            max_abs_u: 0.0,
            details: None,
        };
        Ok(Prepared {
            sys,
            prof,
            grid,
            summary,
        })
    }

    fn l_max(&self) -> usize {
        setup::energy_order(self.sys.as_ref()) - 1
    }

    fn data(&self, cfg: &ExperimentConfig, grid: &GridSpec) -> Result<(InitialData, f64)> {
        setup::initial_data(&cfg.data, self.sys.dim(), cfg.delta, self.l_max(), grid)
    }

    fn solver(&self, cfg: &ExperimentConfig, grid: GridSpec) -> Result<Solver> {
        Ok(Solver::new(
            self.sys.clone(),
            self.prof.clone(),
            grid,
            setup::solver_config(cfg, self.sys.as_ref()),
        )?)
    }

    /// Returns the gate failure, if any.
    fn gate(&self, cfg: &ExperimentConfig, structure: bool, hyperbolicity: bool) -> Result<Option<String>> {
        if structure {
            let opts = StructureOptions {
                seed: cfg.seed,
                ..StructureOptions::default()
            };
            let rep = check_structure(self.sys.as_ref(), &opts)?;
            let failed: Vec<&str> = [
                ("A1", rep.a1.satisfied),
                ("A2", rep.a2.satisfied),
                ("A3", rep.a3.satisfied),
                ("F", rep.f.satisfied),
            ]
            .iter()
            .filter(|(_, ok)| !ok)
            .map(|(name, _)| *name)
            .collect();
            if !failed.is_empty() {
                return Ok(Some(format!("null structure fails for {}", failed.join(", "))));
            }
        }
        if hyperbolicity && self.sys.kind() == SystemKind::Quasilinear && !(self.summary.lambda > 0.0) {
            return Ok(Some(format!("hyperbolicity margin {} is not positive", self.summary.lambda)));
        }
        Ok(None)
    }

    fn gated(mut self, why: String) -> Experiment {
        self.summary.status = Status::HypothesisViolated;
        self.summary.gate = Some(why);
        Experiment {
            summary: self.summary,
            runs: Vec::new(),
        }
    }
}

pub fn execute(cfg: &ExperimentConfig) -> Result<Experiment> {
    cfg.validate()?;
    match cfg.experiment {
        ExperimentKind::Stability => stability(cfg, false),
        ExperimentKind::ZeroPerturbation => stability(cfg, true),
        ExperimentKind::Amplification => amplification(cfg),
        ExperimentKind::Violation => violation(cfg),
        ExperimentKind::BoostEquivalence => boost_equivalence(cfg),
        ExperimentKind::Convergence => convergence(cfg),
        ExperimentKind::Sweep => Err(LabError::Config(
            "sweep configs run through run_sweep".into(),
        )),
    }
}

/// Copies the run's measurements into the summary fields.
fn fill_from_run(s: &mut RunSummary, tr: &Trajectory, epsilon: f64) {
    s.termination = Some(tr.termination.into());
    s.t_final = tr.t_final;
    s.steps = tr.steps;
    s.blowup_time = (tr.termination == Termination::Blowup).then_some(tr.t_final);
    s.sup_e_total = tr.energies.iter().map(|e| e.e_total()).fold(0.0, f64::max);
    s.final_se_total = tr.energies.last().map_or(0.0, |e| e.se_total());
    s.epsilon = epsilon;
    s.ratio = (epsilon > 0.0 && !tr.energies.is_empty()).then(|| {
        let sup = tr.energies.iter().map(|e| e.e_total() + e.se_total()).fold(0.0, f64::max);
        sup / (epsilon * epsilon)
    });
    s.max_abs_u = tr.max_abs_u();
    s.status = if tr.termination == Termination::ReachedTEnd {
        Status::Pass
    } else {
        Status::NumericalFailure
    };
}

fn stability(cfg: &ExperimentConfig, zero: bool) -> Result<Experiment> {
    let p = Prepared::new(cfg)?;
    // An exact wave needs no hyperbolicity margin: the perturbation stays zero.
    if let Some(why) = p.gate(cfg, true, !zero)? {
        return Ok(p.gated(why));
    }
    let (data, eps) = if zero {
        (InitialData::zero(p.sys.dim()), 0.0)
    } else {
        p.data(cfg, &p.grid)?
    };
    let tr = p.solver(cfg, p.grid)?.run(&data)?;
    let mut summary = p.summary;
    fill_from_run(&mut summary, &tr, eps);
    Ok(Experiment {
        summary,
        runs: vec![LabeledRun {
            label: "run".into(),
            trajectory: tr,
        }],
    })
}

/// Energy centroid of the snapshot in `xi`, from `|u_t|^2 + |u_x|^2`.
fn xi_centroid(grid: &GridSpec, t: f64, u: &travwave_core::Field, w: &travwave_core::Field) -> Option<f64> {
    let (nx, h) = (grid.nx, grid.spacing());
    let (mut mass, mut moment) = (0.0, 0.0);
    for i in 1..nx - 1 {
        let mut e = w.norm_at(i).powi(2);
        for k in 0..u.dim() {
            let ux = (u.node(i + 1)[k] - u.node(i - 1)[k]) / (2.0 * h);
            e += ux * ux;
        }
        mass += e;
        moment += e * grid.x(i);
    }
    (mass > 0.0).then(|| 0.5 * (t + moment / mass))
}

fn amplification_run(tr: &Trajectory, t_end: f64, exit_xi: f64, window: f64) -> AmplificationRun {
    let e = |k: usize| tr.energies[k].e_total();
    let passage = tr
        .snapshots
        .iter()
        .position(|s| xi_centroid(&tr.grid, s.t, &s.u, &s.w).is_some_and(|xi| xi > exit_xi));
    let n = tr.energies.len();
    let e_during = match passage {
        Some(k) => (0..=k.min(n - 1)).map(e).fold(0.0, f64::max),
        None => (0..n).map(e).fold(0.0, f64::max),
    };
    let passage_time = passage.map(|k| tr.snapshots[k].t);
    let plateau_flatness = passage.and_then(|k| {
        let t0 = tr.energies[k].t;
        if t0 + window > tr.t_final + 1e-9 {
            return None;
        }
        let vals: Vec<f64> = tr.energies[k..].iter().filter(|r| r.t <= t0 + window + 1e-9).map(|r| r.e_total()).collect();
        let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
        Some((max - min) / e(k))
    });
    AmplificationRun {
        t_end,
        termination: tr.termination.into(),
        passage_time,
        e_before: e(0),
        e_during,
        e_after: passage.map(e),
        plateau_flatness,
        plateau_level: e(n - 1),
    }
}

fn amplification(cfg: &ExperimentConfig) -> Result<Experiment> {
    let a = cfg.amplification.as_ref().expect("validated");
    let p = Prepared::new(cfg)?;
    if let Some(why) = p.gate(cfg, true, true)? {
        return Ok(p.gated(why));
    }
    let exit_xi = p.prof.support_hint().map_or(0.0, |(_, hi)| hi) + a.exit_margin;
    let mut runs = Vec::new();
    let mut details = Vec::new();
    let mut primary: Option<(usize, f64)> = None;
    for (k, &t_end) in a.t_ends.iter().enumerate() {
        let mut gcfg = cfg.grid.clone();
        gcfg.t_end = t_end;
        let grid = gcfg.spec()?;
        let (data, eps) = p.data(cfg, &grid)?;
        let tr = p.solver(cfg, grid)?.run(&data)?;
        details.push(amplification_run(&tr, t_end, exit_xi, a.window));
        if primary.is_none_or(|(_, t)| t_end > t) {
            primary = Some((k, eps));
        }
        runs.push(LabeledRun {
            label: format!("t_end-{t_end}"),
            trajectory: tr,
        });
    }
    let (k, eps) = primary.expect("at least one end time");
    let mut summary = p.summary;
    fill_from_run(&mut summary, &runs[k].trajectory, eps);
    if runs.iter().any(|r| r.trajectory.termination != Termination::ReachedTEnd) {
        summary.status = Status::NumericalFailure;
    }
    let levels = details.iter().map(|d| d.plateau_level);
    let max = levels.clone().fold(f64::NEG_INFINITY, f64::max);
    let min = levels.fold(f64::INFINITY, f64::min);
    summary.details = Some(Details::Amplification {
        runs: details,
        plateau_spread: if min > 0.0 { (max - min) / min } else { 0.0 },
    });
    Ok(Experiment { summary, runs })
}

fn violation(cfg: &ExperimentConfig) -> Result<Experiment> {
    let reference_name = cfg
        .violation
        .as_ref()
        .map_or_else(|| "semilinear-bilinear".to_string(), |v| v.reference.clone());
    let p = Prepared::new(cfg)?;
    // The system under test is expected to violate the null structure.
    if let Some(why) = p.gate(cfg, false, true)? {
        return Ok(p.gated(why));
    }
    let (data, eps) = p.data(cfg, &p.grid)?;
    let tr = p.solver(cfg, p.grid)?.run(&data)?;

    let rsys = builtin_system(&reference_name, cfg.system.params())?;
    if rsys.dim() != p.sys.dim() {
        return Err(LabError::Config(format!(
            "reference system `{reference_name}` has dimension {}, not {}",
            rsys.dim(),
            p.sys.dim()
        )));
    }
    let rprof = setup::profile(cfg, rsys.dim())?;
    let rtr = Solver::new(rsys.clone(), rprof, p.grid, setup::solver_config(cfg, rsys.as_ref()))?.run(&data)?;

    let mut summary = p.summary;
    fill_from_run(&mut summary, &tr, eps);
    let contrast = rtr.termination == Termination::ReachedTEnd && tr.termination == Termination::Blowup;
    summary.status = if contrast { Status::Pass } else { Status::NumericalFailure };
    summary.details = Some(Details::Violation {
        reference_system: reference_name,
        reference_termination: rtr.termination.into(),
        reference_sup_e_total: rtr.energies.iter().map(|e| e.e_total()).fold(0.0, f64::max),
        reference_t_final: rtr.t_final,
        contrast_observed: contrast,
    });
    Ok(Experiment {
        summary,
        runs: vec![
            LabeledRun {
                label: "violating".into(),
                trajectory: tr,
            },
            LabeledRun {
                label: "reference".into(),
                trajectory: rtr,
            },
        ],
    })
}

fn boost_equivalence(cfg: &ExperimentConfig) -> Result<Experiment> {
    let margin = cfg.boost.as_ref().map_or(0.2, |b| b.margin);
    let p = Prepared::new(cfg)?;
    if let Some(why) = p.gate(cfg, true, true)? {
        return Ok(p.gated(why));
    }
    let c = match find_boost(p.sys.as_ref(), &p.prof, &xi_grid(), margin) {
        Ok(c) => c,
        Err(CoreError::NoBoostFound { margin }) => {
            return Ok(p.gated(format!("no boost reaches margin {margin}")));
        }
        Err(e) => return Err(e.into()),
    };
    let (data, eps) = p.data(cfg, &p.grid)?;
    let direct = p.solver(cfg, p.grid)?.run(&data)?;
    let (bgrid, map) = boost_grid(&p.grid, c)?;
    let boosted = p.solver(cfg, bgrid)?.with_boost(c)?.run(&data)?;

    let both = direct.termination == Termination::ReachedTEnd && boosted.termination == Termination::ReachedTEnd;
    let mut max_difference = f64::NAN;
    let mut matched_points = 0;
    if both {
        let (du, bu) = (&direct.last().u, &boosted.last().u);
        let t = direct.last().t;
        max_difference = 0.0;
        for i in 0..p.grid.nx {
            let (_, y) = map.forward(t, p.grid.x(i));
            if y < bgrid.x_min || y > bgrid.x_max {
                continue;
            }
            matched_points += 1;
            for k in 0..du.dim() {
                let v = lagrange_uniform(bgrid.x_min, bgrid.spacing(), &bu.component(k), y, 6);
                max_difference = f64::max(max_difference, (du.node(i)[k] - v).abs());
            }
        }
    }
    let mut summary = p.summary;
    fill_from_run(&mut summary, &direct, eps);
    if !both {
        summary.status = Status::NumericalFailure;
    }
    summary.details = Some(Details::Boost {
        c,
        boosted_termination: boosted.termination.into(),
        max_difference,
        matched_points,
        max_substeps: boosted.max_substeps,
    });
    Ok(Experiment {
        summary,
        runs: vec![
            LabeledRun {
                label: "direct".into(),
                trajectory: direct,
            },
            LabeledRun {
                label: "boosted".into(),
                trajectory: boosted,
            },
        ],
    })
}

fn convergence(cfg: &ExperimentConfig) -> Result<Experiment> {
    let conv = cfg.convergence.as_ref().expect("validated");
    let p = Prepared::new(cfg)?;
    if let Some(why) = p.gate(cfg, true, true)? {
        return Ok(p.gated(why));
    }
    let grids = conv
        .nx
        .iter()
        .map(|&nx| cfg.grid.spec_with_nx(nx))
        .collect::<Result<Vec<_>>>()?;
    let exact_fn = match conv.exact {
        Some(ExactSolution::StandingWave) => {
            if cfg.system.name != "linear" || cfg.data.shape != "cosine" || cfg.data.motion != crate::config::MotionKind::Still {
                return Err(LabError::Config(
                    "the standing-wave solution needs the linear system and still cosine data".into(),
                ));
            }
            let (k, a) = (cfg.data.width, cfg.data.epsilon);
            Some(move |t: f64, x: f64| a * (k * x).cos() * (k * t).cos())
        }
        None => None,
    };
    // Energies are not needed to measure the order and would dominate the cost.
    let config = travwave_core::SolverConfig {
        output_every: cfg.output_every,
        ..Default::default()
    };
    let mut finest: Option<(Trajectory, f64)> = None;
    let study = convergence_study(
        &grids,
        |g| {
            let (data, eps) = p.data(cfg, g).map_err(|e| match e {
                LabError::Core(c) => c,
                _ => CoreError::InvalidArgument("initial data"),
            })?;
            let tr = Solver::new(p.sys.clone(), p.prof.clone(), *g, config)?.run(&data)?;
            finest = Some((tr.clone(), eps));
            Ok(tr)
        },
        exact_fn.as_ref().map(|f| f as &dyn Fn(f64, f64) -> f64),
    );
    let mut summary = p.summary;
    let runs = match &finest {
        Some((tr, eps)) => {
            fill_from_run(&mut summary, tr, *eps);
            vec![LabeledRun {
                label: format!("nx-{}", tr.grid.nx),
                trajectory: tr.clone(),
            }]
        }
        None => Vec::new(),
    };
    match study {
        Ok(rep) => {
            summary.details = Some(Details::Convergence {
                nx: conv.nx.clone(),
                exact: exact_fn.is_some(),
                errors: rep.errors,
                orders: rep.orders,
                observed_order: rep.observed_order,
            });
        }
        Err(CoreError::StudyInvalid) => summary.status = Status::NumericalFailure,
        Err(e) => return Err(e.into()),
    }
    Ok(Experiment { summary, runs })
}
