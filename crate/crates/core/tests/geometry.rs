use std::f64::consts::{PI, SQRT_2};

use proptest::prelude::*;
use travwave_core::geometry::{
    apply_null_derivative, from_null, fubini_residual, integrate_region, to_null, MultiIndex, NullJet, RegionKind,
    RegionSpec, SpacetimeSamples,
};
use travwave_core::{Error, Field, GridSpec, Level, SimState};

/// Periodic state sampled from `u(t, x)` and its first two time derivatives at
/// `t = -2 dt, -dt, 0`.
fn periodic_state(nx: usize, dt: f64, u: impl Fn(usize, f64, f64) -> f64) -> SimState {
    let grid = GridSpec::periodic(0.0, 2.0 * PI, nx, 1.0, 0.4).unwrap();
    let levels = [-2.0 * dt, -dt, 0.0]
        .iter()
        .map(|&t| Level {
            t,
            u: Field::sample(&grid, 1, |x, o| o[0] = u(0, t, x)),
            w: Field::sample(&grid, 1, |x, o| o[0] = u(1, t, x)),
            utt: Field::sample(&grid, 1, |x, o| o[0] = u(2, t, x)),
        })
        .collect();
    SimState::from_levels(grid, levels).unwrap()
}

/// `Im((1+i)^a1 (1-i)^a2 e^{t+ix})`, the null derivative of `e^t sin x`.
fn exp_sin_oracle(a: MultiIndex, t: f64, x: f64) -> f64 {
    let (mut re, mut im) = (1.0, 0.0);
    for _ in 0..a.a1 {
        (re, im) = (re - im, re + im);
    }
    for _ in 0..a.a2 {
        (re, im) = (re + im, im - re);
    }
    t.exp() * (re * x.sin() + im * x.cos())
}

const ORDER_3: [MultiIndex; 4] = [
    MultiIndex::new(3, 0),
    MultiIndex::new(2, 1),
    MultiIndex::new(1, 2),
    MultiIndex::new(0, 3),
];

#[test]
fn null_derivatives_of_exp_sin() {
    let dt = 1e-3;
    let state = periodic_state(512, dt, |_, t, x| t.exp() * x.sin());
    let grid = *state.grid();
    let jet = NullJet::new(&state, 3).unwrap();
    let mut indices: Vec<MultiIndex> = (0..=2).flat_map(|k| (0..=k).map(move |b| MultiIndex::new(k - b, b))).collect();
    indices.extend(ORDER_3);
    for a in indices {
        let f = jet.null(a).unwrap();
        // u_ttt carries the O(dt^2) backward difference; the rest is spatial.
        let tol = if a.order() == 3 { 5e-6 } else { 1e-8 };
        for i in 0..grid.nx {
            let exact = exp_sin_oracle(a, 0.0, grid.x(i));
            assert!((f.node(i)[0] - exact).abs() < tol, "{a:?} at {i}: {} vs {exact}", f.node(i)[0]);
        }
    }
}

#[test]
fn functions_of_eta_have_no_xi_derivatives() {
    // u = sin(t - x) is a function of eta alone.
    let state = periodic_state(512, 1e-3, |k, t, x| match k {
        0 => (t - x).sin(),
        1 => (t - x).cos(),
        _ => -(t - x).sin(),
    });
    for a in [MultiIndex::XI, MultiIndex::new(2, 0), MultiIndex::new(1, 1)] {
        let f = apply_null_derivative(&state, a).unwrap();
        assert!(f.max_abs() < 1e-8, "{a:?}: {}", f.max_abs());
    }
    let eta = apply_null_derivative(&state, MultiIndex::ETA).unwrap();
    for i in 0..state.grid().nx {
        let x = state.grid().x(i);
        assert!((eta.node(i)[0] - 2.0 * (-x).cos()).abs() < 1e-8);
    }
}

#[test]
fn third_order_needs_three_levels() {
    let state = periodic_state(64, 1e-3, |_, t, x| t.exp() * x.sin());
    let levels: Vec<Level> = state.levels().skip(1).cloned().collect();
    let short = SimState::from_levels(*state.grid(), levels).unwrap();
    assert!(NullJet::new(&short, 2).is_ok());
    assert!(matches!(
        NullJet::new(&short, 3),
        Err(Error::InsufficientHistory { needed: 3, available: 2 })
    ));
}

#[test]
fn active_halo_is_rejected_on_quiet_grids() {
    let grid = GridSpec::new(-1.0, 1.0, 41, 1.0, 0.4).unwrap();
    let level = Level {
        t: 0.0,
        u: Field::sample(&grid, 1, |x, o| o[0] = x),
        w: Field::zeros(41, 1),
        utt: Field::zeros(41, 1),
    };
    let state = SimState::from_levels(grid, vec![level]).unwrap();
    assert!(matches!(NullJet::new(&state, 1), Err(Error::HaloExhausted { .. })));
    assert!(NullJet::new_unchecked(&state, 1).is_ok());
}

fn gaussian_samples(h: f64, t0: f64) -> SpacetimeSamples {
    let nx = (16.0 / h).round() as usize + 1;
    let times: Vec<f64> = (0..=(t0 / h).round() as usize).map(|j| j as f64 * h).collect();
    SpacetimeSamples::from_fn(-8.0, h, nx, &times, |t, x| (-(x * x) - (t - 1.0) * (t - 1.0)).exp())
}

#[test]
fn fubini_identity_on_a_gaussian() {
    let (t0, xi0) = (2.0, 0.5);
    let w = gaussian_samples(0.01, t0);
    let lhs = integrate_region(&w, RegionSpec::new(RegionKind::RegionSMinus, t0, xi0)).unwrap();
    let rel = fubini_residual(&w, t0, xi0).unwrap() / lhs;
    assert!(rel <= 1e-6, "relative residual {rel:e}");
}

#[test]
fn region_integrals_of_unit_weight() {
    let (h, t0, xi0) = (0.01, 2.0, 0.5);
    let nx = 1601;
    let times: Vec<f64> = (0..=200).map(|j| j as f64 * h).collect();
    let w = SpacetimeSamples::from_fn(-8.0, h, nx, &times, |_, _| 1.0);
    let at = |kind| integrate_region(&w, RegionSpec::new(kind, t0, xi0)).unwrap();
    let close = |a: f64, b: f64| (a - b).abs() < 1e-9 * (1.0 + b.abs());
    assert!(close(at(RegionKind::SegmentC), SQRT_2 * t0));
    assert!(close(at(RegionKind::SliceSigmaMinus), 2.0 * xi0 - t0 + 8.0));
    assert!(close(at(RegionKind::SliceSigma), 16.0));
    assert!(close(at(RegionKind::StripS), 16.0 * t0));
    // x from -8 to 1 - t, integrated over t in [0, 2].
    assert!(close(at(RegionKind::RegionSMinus), 9.0 * t0 - 0.5 * t0 * t0));
    assert!(matches!(
        integrate_region(&w, RegionSpec::new(RegionKind::SliceSigmaMinus, t0, 20.0)),
        Err(Error::RegionOutsideDomain(_))
    ));
}

proptest! {
    #[test]
    fn null_coordinates_round_trip(t in -50.0..50.0f64, x in -50.0..50.0f64) {
        let (t2, x2) = from_null(to_null(t, x));
        prop_assert!((t - t2).abs() <= 1e-12 * (1.0 + t.abs()) && (x - x2).abs() <= 1e-12 * (1.0 + x.abs()));
    }

    // Appending a derivative multiplies the expansion by (1 + X) or (1 - X),
    // so the order in which derivatives are taken does not matter.
    #[test]
    fn expansion_is_order_independent(a1 in 0usize..4, a2 in 0usize..4) {
        let a = MultiIndex::new(a1, a2);
        let e = a.cartesian_expansion();
        let xi = a.then_xi().cartesian_expansion();
        let eta = a.then_eta().cartesian_expansion();
        for m in 0..=a.order() + 1 {
            let prev = if m == 0 { 0.0 } else { e[m - 1] };
            let cur = e.get(m).copied().unwrap_or(0.0);
            prop_assert_eq!(xi[m], cur + prev);
            prop_assert_eq!(eta[m], cur - prev);
        }
        prop_assert_eq!(a.then_xi().then_eta(), a.then_eta().then_xi());
    }

    #[test]
    fn null_derivatives_are_linear(s in -3.0..3.0f64, k in 0usize..4) {
        let a = ORDER_3[k];
        let base = periodic_state(64, 1e-3, |_, t, x| t.exp() * x.sin());
        let scaled = periodic_state(64, 1e-3, |_, t, x| s * t.exp() * x.sin());
        let f = apply_null_derivative(&base, a).unwrap();
        let g = apply_null_derivative(&scaled, a).unwrap();
        for i in 0..64 {
            prop_assert!((s * f.node(i)[0] - g.node(i)[0]).abs() <= 1e-10);
        }
    }
}
