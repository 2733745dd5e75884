//! Method-of-lines evolution of the perturbation in the Cartesian form
//! `a00 u_tt = a11 u_xx + across u_tx + source`, optionally in a boosted frame.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
// Unused when std is linked, whose inherent float methods take precedence.
#[allow(unused_imports)]
use num_traits::Float;

use crate::data::InitialData;
use crate::energy::{slice_densities, EnergyReport, SpacetimeAccumulator};
use crate::error::{Error, Result};
use crate::grid::{edge_activity, Boundary, Field, GridSpec, Level, SimState};
use crate::linalg::{characteristic_speeds, cond1, lu_factor, lu_solve};
use crate::profile::TravelingWaveProfile;
use crate::quadrature::lagrange_uniform;
use crate::stencil;
use crate::system::{BoostMap, CartesianCoefficients, CoefficientSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    ReachedTEnd,
    Blowup,
    BoundaryContamination,
    SingularA00,
}

/// Weighted energies to track during a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyConfig {
    pub delta: f64,
    /// 2 for semilinear runs, 3 for quasilinear ones.
    pub max_order: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub blowup_threshold: f64,
    pub quiet_tol: f64,
    pub quiet_nodes: usize,
    pub max_condition: f64,
    /// Steps between characteristic-speed checks.
    pub cfl_check_every: usize,
    pub max_substeps: usize,
    /// Steps between recorded snapshots and energy reports.
    pub output_every: usize,
    pub energy: Option<EnergyConfig>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            blowup_threshold: 1e6,
            quiet_tol: 1e-10,
            quiet_nodes: 4,
            max_condition: 1e8,
            cfl_check_every: 50,
            max_substeps: 64,
            output_every: 10,
            energy: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub u: Field,
    pub w: Field,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub grid: GridSpec,
    /// Snapshots at the output stride, at the initial time, and at the end.
    pub snapshots: Vec<Snapshot>,
    /// Energy reports at the snapshot times; empty without an energy config.
    pub energies: Vec<EnergyReport>,
    pub termination: Termination,
    /// Time of the last accepted level.
    pub t_final: f64,
    pub steps: usize,
    /// Largest number of substeps the speed monitor requested.
    pub max_substeps: usize,
    /// Largest characteristic speed seen by the monitor.
    pub max_speed: f64,
    pub final_state: SimState,
}

impl Trajectory {
    pub fn last(&self) -> &Snapshot {
        self.snapshots.last().expect("a trajectory holds the initial snapshot")
    }

    pub fn max_abs_u(&self) -> f64 {
        self.snapshots.iter().map(|s| s.u.max_abs()).fold(0.0, f64::max)
    }
}

/// Failure of the per-node solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularNode {
    pub node: usize,
    pub condition: f64,
}

struct Workspace {
    ux: Field,
    uxx: Field,
    wx: Field,
    coeffs: CartesianCoefficients,
    f1: Vec<f64>,
    f2: Vec<f64>,
    uxi: Vec<f64>,
    ueta: Vec<f64>,
    rhs: Vec<f64>,
    lu: Vec<f64>,
    piv: Vec<usize>,
    scratch: Vec<f64>,
}

impl Workspace {
    fn new(nx: usize, n: usize) -> Self {
        Workspace {
            ux: Field::zeros(nx, n),
            uxx: Field::zeros(nx, n),
            wx: Field::zeros(nx, n),
            coeffs: CartesianCoefficients::zeros(n),
            f1: vec![0.0; n],
            f2: vec![0.0; n],
            uxi: vec![0.0; n],
            ueta: vec![0.0; n],
            rhs: vec![0.0; n],
            lu: vec![0.0; n * n],
            piv: vec![0; n],
            scratch: vec![0.0; 2 * n],
        }
    }
}

/// Evolves perturbations of one traveling wave of one system on one grid.
#[derive(Clone)]
pub struct Solver {
    sys: Arc<dyn CoefficientSet>,
    profile: TravelingWaveProfile,
    grid: GridSpec,
    frame: BoostMap,
    config: SolverConfig,
}

impl Solver {
    pub fn new(
        sys: Arc<dyn CoefficientSet>,
        profile: TravelingWaveProfile,
        grid: GridSpec,
        config: SolverConfig,
    ) -> Result<Self> {
        grid.validate()?;
        if sys.dim() != profile.dim() {
            return Err(Error::InvalidArgument("system and profile dimensions differ"));
        }
        if let Some(e) = config.energy {
            if !(e.delta > 0.0 && e.delta < 1.0) || !(1..=3).contains(&e.max_order) {
                return Err(Error::InvalidArgument("energy delta in (0, 1) and order in 1..=3 required"));
            }
        }
        Ok(Solver {
            sys,
            profile,
            grid,
            frame: BoostMap { c: 0.0 },
            config,
        })
    }

    /// Solves in the frame `tau = (1+c) t`, `y = x + c t`; the grid is then
    /// read as a `(tau, y)` grid. Energies are not tracked in a boosted frame.
    pub fn with_boost(mut self, c: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&c) {
            return Err(Error::InvalidArgument("boost speed must lie in [0, 1)"));
        }
        self.frame = BoostMap { c };
        if c != 0.0 {
            self.config.energy = None;
        }
        Ok(self)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn frame(&self) -> BoostMap {
        self.frame
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn system(&self) -> &dyn CoefficientSet {
        self.sys.as_ref()
    }

    pub fn profile(&self) -> &TravelingWaveProfile {
        &self.profile
    }

    /// `u_tt` at every node for the level `(t, u, w)`.
    pub fn rhs_utt(&self, t: f64, u: &Field, w: &Field) -> core::result::Result<Field, SingularNode> {
        let mut ws = Workspace::new(self.grid.nx, self.sys.dim());
        let mut out = Field::zeros(self.grid.nx, self.sys.dim());
        self.eval_rhs(t, u, w, &mut ws, &mut out)?;
        Ok(out)
    }

    fn eval_rhs(
        &self,
        t: f64,
        u: &Field,
        w: &Field,
        ws: &mut Workspace,
        out: &mut Field,
    ) -> core::result::Result<(), SingularNode> {
        let n = self.sys.dim();
        let h = self.grid.spacing();
        let bc = self.grid.boundary;
        let c = self.frame.c;
        stencil::derivative(u, 1, h, bc, &mut ws.ux);
        stencil::derivative(u, 2, h, bc, &mut ws.uxx);
        stencil::derivative(w, 1, h, bc, &mut ws.wx);
        for i in 0..self.grid.nx {
            let (tp, xp) = self.frame.inverse(t, self.grid.x(i));
            let xi = 0.5 * (tp + xp);
            self.profile.eval(1, xi, &mut ws.f1);
            self.profile.eval(2, xi, &mut ws.f2);
            let (ux, wi) = (ws.ux.node(i), w.node(i));
            for k in 0..n {
                let ut = self.frame.physical_velocity(wi[k], ux[k]);
                ws.uxi[k] = ut + ux[k];
                ws.ueta[k] = ut - ux[k];
            }
            ws.coeffs.fill(self.sys.as_ref(), &ws.f1, &ws.f2, &ws.uxi, &ws.ueta);
            ws.coeffs.boost(c);
            let (uxx, wx) = (ws.uxx.node(i), ws.wx.node(i));
            let cf = &ws.coeffs;
            for r in 0..n {
                let mut acc = cf.source[r];
                for j in 0..n {
                    acc += cf.a11[r * n + j] * uxx[j] + cf.across[r * n + j] * wx[j];
                }
                ws.rhs[r] = acc;
            }
            let dst = out.node_mut(i);
            // A zero right-hand side gives zero acceleration whatever a00 is.
            if ws.rhs.iter().all(|v| *v == 0.0) {
                dst.fill(0.0);
                continue;
            }
            ws.lu.copy_from_slice(&cf.a00);
            if lu_factor(&mut ws.lu, n, &mut ws.piv).is_err() {
                return Err(SingularNode {
                    node: i,
                    condition: f64::INFINITY,
                });
            }
            let condition = cond1(&cf.a00, &ws.lu, n, &ws.piv, &mut ws.scratch);
            if !(condition <= self.config.max_condition) {
                return Err(SingularNode { node: i, condition });
            }
            lu_solve(&ws.lu, n, &ws.piv, &mut ws.rhs, &mut ws.scratch);
            dst.copy_from_slice(&ws.rhs);
        }
        Ok(())
    }

    /// One classical RK4 step of `(u, w)`; `utt0` is the acceleration at the
    /// start. Returns the new level including its acceleration.
    fn rk4(
        &self,
        t: f64,
        dt: f64,
        u: &Field,
        w: &Field,
        utt0: &Field,
        ws: &mut Workspace,
    ) -> core::result::Result<Level, SingularNode> {
        let (nx, n) = (self.grid.nx, self.sys.dim());
        let mut a2 = Field::zeros(nx, n);
        let mut a3 = Field::zeros(nx, n);
        let mut a4 = Field::zeros(nx, n);
        let u2 = u.plus_scaled(0.5 * dt, w);
        let w2 = w.plus_scaled(0.5 * dt, utt0);
        self.eval_rhs(t + 0.5 * dt, &u2, &w2, ws, &mut a2)?;
        let u3 = u.plus_scaled(0.5 * dt, &w2);
        let w3 = w.plus_scaled(0.5 * dt, &a2);
        self.eval_rhs(t + 0.5 * dt, &u3, &w3, ws, &mut a3)?;
        let u4 = u.plus_scaled(dt, &w3);
        let w4 = w.plus_scaled(dt, &a3);
        self.eval_rhs(t + dt, &u4, &w4, ws, &mut a4)?;

        let mut un = u.clone();
        let mut wn = w.clone();
        let s = dt / 6.0;
        {
            let (un, wn) = (un.as_mut_slice(), wn.as_mut_slice());
            let (k1u, k2u, k3u, k4u) = (w.as_slice(), w2.as_slice(), w3.as_slice(), w4.as_slice());
            let (k1w, k2w, k3w, k4w) = (utt0.as_slice(), a2.as_slice(), a3.as_slice(), a4.as_slice());
            for j in 0..un.len() {
                un[j] += s * (k1u[j] + 2.0 * k2u[j] + 2.0 * k3u[j] + k4u[j]);
                wn[j] += s * (k1w[j] + 2.0 * k2w[j] + 2.0 * k3w[j] + k4w[j]);
            }
        }
        let mut utt = Field::zeros(nx, n);
        self.eval_rhs(t + dt, &un, &wn, ws, &mut utt)?;
        Ok(Level {
            t: t + dt,
            u: un,
            w: wn,
            utt,
        })
    }

    /// Samples the data, checks it is quiet near quiet boundaries, and seeds
    /// the history with two backward half steps.
    pub fn init_state(&self, data: &InitialData) -> Result<SimState> {
        let (nx, n) = (self.grid.nx, self.sys.dim());
        if data.dim() != n {
            return Err(Error::InvalidArgument("data and system dimensions differ"));
        }
        let mut u = Field::zeros(nx, n);
        let mut w = Field::zeros(nx, n);
        let mut u1 = vec![0.0; n];
        let mut u0x = vec![0.0; n];
        for i in 0..nx {
            let x = self.grid.x(i);
            data.u0(x, u.node_mut(i));
            data.u1(x, &mut u1);
            data.u0_x(x, &mut u0x);
            for (k, wk) in w.node_mut(i).iter_mut().enumerate() {
                *wk = self.frame.initial_velocity(u1[k], u0x[k]);
            }
        }
        if self.grid.boundary == Boundary::Quiet {
            let edge = self.config.quiet_nodes.min(nx);
            for i in (0..edge).chain(nx - edge..nx) {
                let value = u.norm_at(i).max(w.norm_at(i));
                if !(value <= self.config.quiet_tol) {
                    return Err(Error::SupportViolation {
                        x: self.grid.x(i),
                        value,
                    });
                }
            }
        }
        let mut ws = Workspace::new(nx, n);
        let singular = |_| Error::EvaluationFailure("a00 is singular on the initial data");
        let mut utt = Field::zeros(nx, n);
        self.eval_rhs(0.0, &u, &w, &mut ws, &mut utt).map_err(singular)?;
        let now = Level { t: 0.0, u, w, utt };
        let half = -0.5 * self.grid.dt;
        let mid = self.rk4(0.0, half, &now.u, &now.w, &now.utt, &mut ws).map_err(singular)?;
        let back = self.rk4(mid.t, half, &mid.u, &mid.w, &mid.utt, &mut ws).map_err(singular)?;
        SimState::from_levels(self.grid, vec![back, mid, now])
    }

    fn is_quiet(&self, level: &Level) -> bool {
        if self.grid.boundary == Boundary::Periodic {
            return true;
        }
        let width = self.config.quiet_nodes;
        [&level.u, &level.w, &level.utt]
            .iter()
            .all(|f| edge_activity(f, width) <= self.config.quiet_tol)
    }

    fn blown_up(&self, level: &Level) -> bool {
        let thr = self.config.blowup_threshold;
        !level.u.is_finite() || !level.w.is_finite() || level.u.max_abs() > thr || level.w.max_abs() > thr
    }

    /// Largest characteristic speed over nodes the perturbation can reach
    /// before the next check. `None` signals complex speeds or a failed solve.
    fn max_speed(&self, level: &Level, ws: &mut Workspace) -> Option<f64> {
        let (nx, n) = (self.grid.nx, self.sys.dim());
        let reach = self.config.cfl_check_every * 4 * stencil::radius(2);
        let mut active = vec![false; nx];
        let mut any = false;
        for i in 0..nx {
            if level.u.norm_at(i) > 0.0 || level.w.norm_at(i) > 0.0 {
                any = true;
                let lo = i.saturating_sub(reach);
                let hi = (i + reach).min(nx - 1);
                active[lo..=hi].iter_mut().for_each(|a| *a = true);
            }
        }
        if !any {
            return Some(0.0);
        }
        let h = self.grid.spacing();
        stencil::derivative(&level.u, 1, h, self.grid.boundary, &mut ws.ux);
        let mut s_max = 0.0_f64;
        for i in (0..nx).filter(|i| active[*i]) {
            let (tp, xp) = self.frame.inverse(level.t, self.grid.x(i));
            let xi = 0.5 * (tp + xp);
            self.profile.eval(1, xi, &mut ws.f1);
            self.profile.eval(2, xi, &mut ws.f2);
            for k in 0..n {
                let ut = self.frame.physical_velocity(level.w.node(i)[k], ws.ux.node(i)[k]);
                ws.uxi[k] = ut + ws.ux.node(i)[k];
                ws.ueta[k] = ut - ws.ux.node(i)[k];
            }
            ws.coeffs.fill(self.sys.as_ref(), &ws.f1, &ws.f2, &ws.uxi, &ws.ueta);
            ws.coeffs.boost(self.frame.c);
            let cf = &ws.coeffs;
            let speeds = characteristic_speeds(&cf.a00, &cf.a11, &cf.across, n).ok()?;
            if speeds.imag_defect > 1e-8 || !speeds.max_abs.is_finite() {
                return None;
            }
            s_max = s_max.max(speeds.max_abs);
        }
        Some(s_max)
    }

    /// Runs from the data to the grid's end time or an earlier termination.
    pub fn run(&self, data: &InitialData) -> Result<Trajectory> {
        let mut state = self.init_state(data)?;
        let (nx, n) = (self.grid.nx, self.sys.dim());
        let mut ws = Workspace::new(nx, n);
        let steps = self.grid.steps();
        let dt = self.grid.dt;
        let h = self.grid.spacing();
        let mut acc = SpacetimeAccumulator::new();
        let mut traj = Trajectory {
            grid: self.grid,
            snapshots: Vec::new(),
            energies: Vec::new(),
            termination: Termination::ReachedTEnd,
            t_final: 0.0,
            steps: 0,
            max_substeps: 1,
            max_speed: 0.0,
            final_state: state.clone(),
        };
        self.record(&state, &mut acc, &mut traj, true)?;
        let mut substeps = 1;
        for step in 0..steps {
            if step % self.config.cfl_check_every == 0 {
                match self.max_speed(state.current(), &mut ws) {
                    Some(s) => {
                        traj.max_speed = traj.max_speed.max(s);
                        let needed = (s * dt / (self.grid.cfl * h) * (1.0 - 1e-12)).ceil().max(1.0);
                        if needed > self.config.max_substeps as f64 {
                            traj.termination = Termination::SingularA00;
                            break;
                        }
                        substeps = needed as usize;
                        traj.max_substeps = traj.max_substeps.max(substeps);
                    }
                    None => {
                        traj.termination = Termination::SingularA00;
                        break;
                    }
                }
            }
            let t0 = state.t();
            let t1 = if step + 1 == steps { self.grid.t_end } else { t0 + dt };
            let sub = (t1 - t0) / substeps as f64;
            let mut level = state.current().clone();
            let mut failed = false;
            for _ in 0..substeps {
                match self.rk4(level.t, sub, &level.u, &level.w, &level.utt, &mut ws) {
                    Ok(next) => level = next,
                    Err(_) => {
                        failed = true;
                        break;
                    }
                }
            }
            if failed {
                traj.termination = Termination::SingularA00;
                break;
            }
            level.t = t1;
            if self.blown_up(&level) {
                traj.termination = Termination::Blowup;
                traj.t_final = t1;
                break;
            }
            if !self.is_quiet(&level) {
                traj.termination = Termination::BoundaryContamination;
                traj.t_final = t1;
                break;
            }
            state.push(level);
            traj.steps = step + 1;
            let output = (step + 1) % self.config.output_every.max(1) == 0 || step + 1 == steps;
            self.record(&state, &mut acc, &mut traj, output)?;
        }
        if traj.termination == Termination::ReachedTEnd || traj.t_final == 0.0 {
            traj.t_final = state.t();
        }
        if traj.snapshots.last().is_some_and(|s| s.t < state.t()) {
            self.record(&state, &mut acc, &mut traj, true)?;
        }
        traj.final_state = state;
        Ok(traj)
    }

    fn record(
        &self,
        state: &SimState,
        acc: &mut SpacetimeAccumulator,
        traj: &mut Trajectory,
        output: bool,
    ) -> Result<()> {
        let t = state.t();
        let mut report = None;
        let already = traj.energies.last().is_some_and(|r| r.t >= t);
        if let Some(cfg) = self.config.energy {
            if !already {
                let d = slice_densities(state, cfg.delta, cfg.max_order)?;
                acc.push(t, d.spacetime_rate);
                report = Some(EnergyReport {
                    t,
                    slice: d.slice,
                    spacetime: acc.total(),
                });
            }
        }
        if output && traj.snapshots.last().is_none_or(|s| s.t < t) {
            let level = state.current();
            traj.snapshots.push(Snapshot {
                t,
                u: level.u.clone(),
                w: level.w.clone(),
            });
            if let Some(r) = report {
                traj.energies.push(r);
            }
        }
        Ok(())
    }
}

/// Per-grid results of a convergence study.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    /// Errors against the exact solution, or differences between successive
    /// grids when no exact solution is given.
    pub errors: Vec<f64>,
    /// `log2` of successive error ratios.
    pub orders: Vec<f64>,
    /// Order on the finest pair.
    pub observed_order: f64,
}

/// Runs `make(grid)` on each grid (each refining the previous one by 2) and
/// measures the observed order of the final component-0 field.
///
/// With `exact`, errors are maximum nodal errors against `exact(t_end, x)`;
/// otherwise successive differences are taken on the coarser grid's nodes,
/// interpolating the finer solution with 6-point Lagrange interpolation.
pub fn convergence_study(
    grids: &[GridSpec],
    mut run: impl FnMut(&GridSpec) -> Result<Trajectory>,
    exact: Option<&dyn Fn(f64, f64) -> f64>,
) -> Result<ConvergenceReport> {
    if grids.len() < 3 {
        return Err(Error::InvalidArgument("not enough grids for a convergence study"));
    }
    let mut finals = Vec::with_capacity(grids.len());
    for g in grids {
        let traj = run(g)?;
        if traj.termination != Termination::ReachedTEnd {
            return Err(Error::StudyInvalid);
        }
        finals.push((g, traj.last().t, traj.last().u.component(0)));
    }
    let errors: Vec<f64> = match exact {
        Some(f) => finals
            .iter()
            .map(|(g, t, u)| {
                (0..g.nx)
                    .map(|i| (u[i] - f(*t, g.x(i))).abs())
                    .fold(0.0, f64::max)
            })
            .collect(),
        None => finals
            .windows(2)
            .map(|pair| {
                let (gc, _, uc) = &pair[0];
                let (gf, _, uf) = &pair[1];
                (0..gc.nx)
                    .map(|i| {
                        let x = gc.x(i);
                        let v = lagrange_uniform(gf.x_min, gf.spacing(), uf, x, 6);
                        (uc[i] - v).abs()
                    })
                    .fold(0.0, f64::max)
            })
            .collect(),
    };
    let orders: Vec<f64> = errors.windows(2).map(|e| (e[0] / e[1]).log2()).collect();
    let observed_order = *orders.last().ok_or(Error::StudyInvalid)?;
    Ok(ConvergenceReport {
        errors,
        orders,
        observed_order,
    })
}
