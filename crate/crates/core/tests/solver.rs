use std::f64::consts::PI;

use travwave_core::data::{DataShape, InitialData, Motion};
use travwave_core::energy::Component;
use travwave_core::quadrature::lagrange_uniform;
use travwave_core::solver::{convergence_study, EnergyConfig, Solver, SolverConfig, Termination};
use travwave_core::system::{boost_grid, SystemParams};
use travwave_core::{builtin_profile, builtin_system, Error, GridSpec};

fn solver(name: &str, params: SystemParams, amplitude: f64, grid: GridSpec, config: SolverConfig) -> Solver {
    let sys = builtin_system(name, params).unwrap();
    let prof = builtin_profile("sech", amplitude, sys.dim()).unwrap();
    Solver::new(sys, prof, grid, config).unwrap()
}

fn gaussian(center: f64, width: f64, amplitude: f64, motion: Motion) -> InitialData {
    InitialData::from_shape(1, DataShape::Gaussian { center, width }, amplitude, motion)
}

fn with_energy(order: usize) -> SolverConfig {
    SolverConfig {
        energy: Some(EnergyConfig {
            delta: 0.5,
            max_order: order,
        }),
        output_every: 5,
        ..SolverConfig::default()
    }
}

#[test]
fn linear_core_matches_dalembert() {
    let grid = GridSpec::new(-30.0, 30.0, 1201, 8.0, 0.4).unwrap();
    let s = solver("linear", SystemParams::default(), 1.0, grid, SolverConfig::default());
    let tr = s.run(&gaussian(0.0, 2.0, 1.0, Motion::Still)).unwrap();
    assert_eq!(tr.termination, Termination::ReachedTEnd);
    let last = tr.last();
    assert_eq!(last.t, 8.0);
    let g = |x: f64| (-(x / 2.0) * (x / 2.0)).exp();
    for i in 0..grid.nx {
        let x = grid.x(i);
        let exact = 0.5 * (g(x - 8.0) + g(x + 8.0));
        assert!((last.u.node(i)[0] - exact).abs() < 1e-6, "x {x}");
    }
}

#[test]
fn history_is_seeded_by_half_steps() {
    let grid = GridSpec::new(-30.0, 30.0, 301, 1.0, 0.4).unwrap();
    let s = solver("semilinear-bilinear", SystemParams::default(), 1.0, grid, SolverConfig::default());
    let state = s.init_state(&gaussian(0.0, 2.0, 0.1, Motion::Right)).unwrap();
    let times: Vec<f64> = state.levels().map(|l| l.t).collect();
    assert_eq!(times, vec![-grid.dt, -0.5 * grid.dt, 0.0]);
}

#[test]
fn zero_perturbation_of_a_quasilinear_wave_stays_zero() {
    // alpha = beta = 1 at amplitude 0.5 makes a00 vanish at the crest.
    let grid = GridSpec::new(-40.0, 40.0, 801, 10.0, 0.4).unwrap();
    let s = solver("quasilinear-scalar", SystemParams::default(), 0.5, grid, with_energy(3));
    let tr = s.run(&InitialData::zero(1)).unwrap();
    assert_eq!(tr.termination, Termination::ReachedTEnd);
    assert_eq!(tr.max_abs_u(), 0.0);
    assert!(tr.energies.iter().all(|e| e.e_total() == 0.0 && e.se_total() == 0.0));
}

#[test]
fn right_moving_linear_data_keeps_its_eta_energy() {
    // u = G(t - x) keeps <eta>-weighted u_eta fixed along each characteristic.
    let grid = GridSpec::new(-30.0, 30.0, 1201, 10.0, 0.4).unwrap();
    let s = solver("linear", SystemParams::default(), 1.0, grid, with_energy(2));
    let tr = s.run(&gaussian(-10.0, 2.0, 1.0, Motion::Right)).unwrap();
    assert_eq!(tr.termination, Termination::ReachedTEnd);
    let e0 = tr.energies[0].slice.get(Component::Ebar1);
    for e in &tr.energies {
        let drift = (e.slice.get(Component::Ebar1) - e0).abs() / e0;
        assert!(drift < 1e-6, "t {}: {drift:e}", e.t);
        assert!(e.slice.get(Component::Ehat1) < 1e-8 * e0);
    }
    // Spacetime energy only grows.
    assert!(tr.energies.windows(2).all(|w| w[1].se_total() >= w[0].se_total()));
}

#[test]
fn data_touching_the_boundary_is_rejected() {
    let grid = GridSpec::new(-10.0, 10.0, 201, 1.0, 0.4).unwrap();
    let s = solver("linear", SystemParams::default(), 1.0, grid, SolverConfig::default());
    assert!(matches!(
        s.run(&gaussian(0.0, 8.0, 1.0, Motion::Still)),
        Err(Error::SupportViolation { .. })
    ));
}

#[test]
fn pulses_reaching_the_edge_stop_the_run() {
    let grid = GridSpec::new(-20.0, 20.0, 401, 30.0, 0.4).unwrap();
    let s = solver("linear", SystemParams::default(), 1.0, grid, SolverConfig::default());
    let tr = s.run(&gaussian(0.0, 1.0, 1.0, Motion::Right)).unwrap();
    assert_eq!(tr.termination, Termination::BoundaryContamination);
    // The pulse needs about 20 - 6 time units to bring 1e-10 to the edge.
    assert!(tr.t_final > 10.0 && tr.t_final < 20.0, "{}", tr.t_final);
}

#[test]
fn violating_source_blows_up() {
    let grid = GridSpec::new(-40.0, 40.0, 801, 30.0, 0.4).unwrap();
    let s = solver("violating-F", SystemParams::default(), 0.5, grid, SolverConfig::default());
    let tr = s.run(&gaussian(0.0, 2.0, 0.5, Motion::Still)).unwrap();
    assert_eq!(tr.termination, Termination::Blowup);
    assert!(tr.t_final < 30.0);
}

#[test]
fn loss_of_hyperbolicity_is_reported() {
    // a00 = 1 - 2 sech(xi) * 0.6 changes sign inside the wave.
    let grid = GridSpec::new(-40.0, 40.0, 801, 10.0, 0.4).unwrap();
    let s = solver("quasilinear-scalar", SystemParams::default(), 0.6, grid, SolverConfig::default());
    let tr = s.run(&gaussian(0.0, 2.0, 1e-3, Motion::Still)).unwrap();
    assert_eq!(tr.termination, Termination::SingularA00);
}

#[test]
fn boosted_and_direct_runs_agree() {
    let params = SystemParams {
        alpha: 0.5,
        beta: -1.4,
        gamma: 1.0,
        kappa: 1.0,
    };
    let grid = GridSpec::new(-30.0, 30.0, 1201, 6.0, 0.4).unwrap();
    let c = 0.3;
    let (bgrid, map) = boost_grid(&grid, c).unwrap();
    let data = gaussian(-3.0, 2.0, 0.01, Motion::Still);
    let direct = solver("quasilinear-scalar", params, 0.5, grid, SolverConfig::default()).run(&data).unwrap();
    let boosted = solver("quasilinear-scalar", params, 0.5, bgrid, SolverConfig::default())
        .with_boost(c)
        .unwrap()
        .run(&data)
        .unwrap();
    assert_eq!(direct.termination, Termination::ReachedTEnd);
    assert_eq!(boosted.termination, Termination::ReachedTEnd);
    let ub = boosted.last().u.component(0);
    for i in 0..grid.nx {
        let (tau, y) = map.forward(6.0, grid.x(i));
        assert!((tau - boosted.last().t).abs() < 1e-12);
        let v = lagrange_uniform(bgrid.x_min, bgrid.spacing(), &ub, y, 6);
        assert!((direct.last().u.node(i)[0] - v).abs() < 1e-6, "x {}", grid.x(i));
    }
}

#[test]
fn runs_are_deterministic() {
    let grid = GridSpec::new(-30.0, 30.0, 301, 5.0, 0.4).unwrap();
    let s = solver("semilinear-vector", SystemParams::default(), 0.7, grid, with_energy(2));
    let data = InitialData::from_shape_along(
        vec![1.0, -0.5],
        DataShape::CompactBump {
            center: 0.0,
            half_width: 4.0,
        },
        0.05,
        Motion::Left,
    );
    assert_eq!(s.run(&data).unwrap(), s.run(&data).unwrap());
}

#[test]
fn standing_wave_converges_at_fourth_order() {
    let k = 3.0;
    let t_end = 2.0 * PI / k;
    let grids: Vec<GridSpec> = [64, 128, 256]
        .iter()
        .map(|&n| GridSpec::periodic(0.0, 2.0 * PI, n, t_end, 0.4).unwrap())
        .collect();
    let data = InitialData::from_shape(1, DataShape::Cosine { k }, 1.0, Motion::Still);
    let exact = |t: f64, x: f64| (k * x).cos() * (k * t).cos();
    let report = convergence_study(
        &grids,
        |g| solver("linear", SystemParams::default(), 1.0, *g, SolverConfig::default()).run(&data),
        Some(&exact),
    )
    .unwrap();
    assert!(report.observed_order >= 3.5, "{report:?}");
}

#[test]
fn failed_runs_invalidate_a_study() {
    let grids: Vec<GridSpec> = [201, 401, 801]
        .iter()
        .map(|&n| GridSpec::new(-10.0, 10.0, n, 30.0, 0.4).unwrap())
        .collect();
    let data = gaussian(0.0, 1.0, 1.0, Motion::Right);
    let result = convergence_study(
        &grids,
        |g| solver("linear", SystemParams::default(), 1.0, *g, SolverConfig::default()).run(&data),
        Some(&|_, _| 0.0),
    );
    assert!(matches!(result, Err(Error::StudyInvalid)));
}

#[test]
fn rhs_matches_a_manufactured_semilinear_state() {
    // Zero profile, F = rho theta: u_tt = u_xx + u_xi u_eta.
    let grid = GridSpec::periodic(0.0, 2.0 * PI, 400, 1.0, 0.4).unwrap();
    let sys = builtin_system("semilinear-bilinear", SystemParams::default()).unwrap();
    let prof = builtin_profile("zero", 1.0, 1).unwrap();
    let s = Solver::new(sys, prof, grid, SolverConfig::default()).unwrap();
    let u = travwave_core::Field::sample(&grid, 1, |x, o| o[0] = x.sin());
    let w = travwave_core::Field::sample(&grid, 1, |x, o| o[0] = 0.5 * (2.0 * x).cos());
    let utt = s.rhs_utt(0.3, &u, &w).unwrap();
    for i in 0..grid.nx {
        let x = grid.x(i);
        let (ux, wt) = (x.cos(), 0.5 * (2.0 * x).cos());
        let exact = -x.sin() + (wt + ux) * (wt - ux);
        assert!((utt.node(i)[0] - exact).abs() < 1e-8, "x {x}");
    }
}

#[test]
fn quasilinear_rhs_vanishes_at_the_zero_state() {
    let grid = GridSpec::new(-20.0, 20.0, 401, 1.0, 0.4).unwrap();
    for name in ["quasilinear-scalar", "quasilinear-vector"] {
        let sys = builtin_system(name, SystemParams::default()).unwrap();
        let n = sys.dim();
        let prof = builtin_profile("sech", 0.3, n).unwrap();
        let s = Solver::new(sys, prof, grid, SolverConfig::default()).unwrap();
        let zero = travwave_core::Field::zeros(grid.nx, n);
        assert_eq!(s.rhs_utt(2.0, &zero, &zero).unwrap().max_abs(), 0.0);
    }
}

#[test]
fn free_waves_stay_inside_the_light_cone() {
    let grid = GridSpec::new(-30.0, 30.0, 1201, 8.0, 0.4).unwrap();
    let s = solver("linear", SystemParams::default(), 1.0, grid, SolverConfig::default());
    let bump = DataShape::CompactBump {
        center: 0.0,
        half_width: 3.0,
    };
    let tr = s.run(&InitialData::from_shape(1, bump, 1.0, Motion::Still)).unwrap();
    let h = grid.spacing();
    for snap in &tr.snapshots {
        let reach = 3.0 + snap.t + h;
        for i in 0..grid.nx {
            if grid.x(i).abs() > reach {
                assert!(snap.u.node(i)[0].abs() < 1e-6, "t {} x {}", snap.t, grid.x(i));
            }
        }
    }
}

#[test]
fn linear_core_is_time_reversible() {
    let grid = GridSpec::new(-30.0, 30.0, 601, 4.0, 0.4).unwrap();
    let s = solver("linear", SystemParams::default(), 1.0, grid, SolverConfig::default());
    let data = gaussian(0.0, 2.0, 1.0, Motion::Still);
    let forward = s.run(&data).unwrap();
    let last = forward.last().clone();
    let (h, x0) = (grid.spacing(), grid.x_min);
    let (u, w) = (last.u.component(0), last.w.component(0));
    let (u2, w2) = (u.clone(), w);
    let back = InitialData::custom(
        1,
        move |x, o| o[0] = lagrange_uniform(x0, h, &u, x, 6),
        move |x, o| o[0] = lagrange_uniform(x0, h, &u2, x, 6),
        move |x, o| o[0] = -lagrange_uniform(x0, h, &w2, x, 6),
    );
    let returned = s.run(&back).unwrap();
    let (u0, _) = data.sample(&grid);
    let err = (0..grid.nx)
        .map(|i| (returned.last().u.node(i)[0] - u0.node(i)[0]).abs())
        .fold(0.0, f64::max);
    assert!(err < 1e-5, "{err:e}");
}
