use proptest::prelude::*;
use travwave_core::linalg::min_sym_eigenvalue;
use travwave_core::profile::verify_exact_solution;
use travwave_core::system::{
    cartesian_coefficients, check_structure, evaluate, find_boost, hyperbolicity_margin, FnSystem, StructureOptions,
    SystemParams, SYSTEM_CATALOG,
};
use travwave_core::{builtin_profile, builtin_system, Error};

fn xi_grid() -> Vec<f64> {
    (0..=4000).map(|i| -20.0 + 0.01 * i as f64).collect()
}

fn vec_strategy(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-0.5..0.5f64, n)
}

fn is_symmetric(a: &[f64], n: usize) -> bool {
    (0..n).all(|i| (0..n).all(|j| a[i * n + j] == a[j * n + i]))
}

proptest! {
    #[test]
    fn builtin_coefficients_are_symmetric(
        idx in 0..SYSTEM_CATALOG.len(),
        rho in vec_strategy(2),
        theta in vec_strategy(2),
    ) {
        let sys = builtin_system(SYSTEM_CATALOG[idx], SystemParams::default()).unwrap();
        let n = sys.dim();
        let s = evaluate(sys.as_ref(), &rho[..n], &theta[..n]);
        prop_assert!(is_symmetric(&s.a1, n) && is_symmetric(&s.a2, n) && is_symmetric(&s.a3, n));
    }

    // The Cartesian residual equals the residual of the null form
    // v_xe = A1 v_xe + A2 v_ee + A3 v_xx + F written for v = f(xi) + u.
    #[test]
    fn cartesian_form_matches_null_form(
        xi in -6.0..6.0f64,
        uxi in vec_strategy(2),
        ueta in vec_strategy(2),
        utt in vec_strategy(2),
        utx in vec_strategy(2),
        uxx in vec_strategy(2),
    ) {
        let sys = builtin_system("quasilinear-vector", SystemParams { alpha: 0.3, beta: -0.2, gamma: 0.7, kappa: 1.1 }).unwrap();
        let prof = builtin_profile("sech", 0.4, 2).unwrap();
        let n = 2;
        let cc = cartesian_coefficients(sys.as_ref(), &prof, xi, &uxi, &ueta);
        let cart = cc.residual(&utt, &utx, &uxx);

        let mut f1 = vec![0.0; n];
        let mut f2 = vec![0.0; n];
        prof.eval(1, xi, &mut f1);
        prof.eval(2, xi, &mut f2);
        let rho: Vec<f64> = (0..n).map(|k| f1[k] + uxi[k]).collect();
        let s = evaluate(sys.as_ref(), &rho, &ueta);
        for i in 0..n {
            let (mut lhs, mut rhs) = (utt[i] - uxx[i], s.f[i]);
            for j in 0..n {
                let k = i * n + j;
                let vxe = utt[j] - uxx[j];
                let vee = utt[j] - 2.0 * utx[j] + uxx[j];
                let vxx = f2[j] + utt[j] + 2.0 * utx[j] + uxx[j];
                lhs -= s.a1[k] * vxe;
                rhs += s.a2[k] * vee + s.a3[k] * vxx;
            }
            let null = lhs - rhs;
            prop_assert!((null - cart[i]).abs() <= 1e-12 * (1.0 + null.abs()), "{} vs {}", null, cart[i]);
        }
    }

    // Boosted coefficients applied to the boosted derivatives reproduce the
    // original residual under the chain rule for tau = (1+c) t, y = x + c t.
    #[test]
    fn boost_preserves_residual(
        c in 0.0..0.95f64,
        xi in -6.0..6.0f64,
        uxi in vec_strategy(2),
        ueta in vec_strategy(2),
        btt in vec_strategy(2),
        bty in vec_strategy(2),
        byy in vec_strategy(2),
    ) {
        let sys = builtin_system("quasilinear-vector", SystemParams::default()).unwrap();
        let prof = builtin_profile("sech", 0.3, 2).unwrap();
        let mut cc = cartesian_coefficients(sys.as_ref(), &prof, xi, &uxi, &ueta);
        let s = 1.0 + c;
        let utt: Vec<f64> = (0..2).map(|k| s * s * btt[k] + 2.0 * c * s * bty[k] + c * c * byy[k]).collect();
        let utx: Vec<f64> = (0..2).map(|k| s * bty[k] + c * byy[k]).collect();
        let direct = cc.residual(&utt, &utx, &byy);
        cc.boost(c);
        let boosted = cc.residual(&btt, &bty, &byy);
        for k in 0..2 {
            prop_assert!((direct[k] - boosted[k]).abs() <= 1e-12 * (1.0 + direct[k].abs()));
        }
    }
}

#[test]
fn builtin_profiles_are_exact_solutions() {
    let grid = xi_grid();
    for name in SYSTEM_CATALOG {
        let sys = builtin_system(name, SystemParams::default()).unwrap();
        for shape in ["sech", "gaussian-bump", "compact-bump"] {
            let prof = builtin_profile(shape, 0.7, sys.dim()).unwrap();
            assert_eq!(verify_exact_solution(&prof, sys.as_ref(), &grid, 1e-12).unwrap(), 0.0, "{name} {shape}");
        }
    }
}

#[test]
fn unknown_system_is_reported() {
    assert!(matches!(
        builtin_system("no-such-system", SystemParams::default()),
        Err(Error::UnknownName { .. })
    ));
}

#[test]
fn builtin_structure_verdicts() {
    let opts = StructureOptions::default();
    for name in SYSTEM_CATALOG {
        let sys = builtin_system(name, SystemParams::default()).unwrap();
        let rep = check_structure(sys.as_ref(), &opts).unwrap();
        assert_eq!(rep.all_satisfied(), *name != "violating-F", "{name}: {rep:?}");
    }
    let sys = builtin_system("violating-F", SystemParams::default()).unwrap();
    let rep = check_structure(sys.as_ref(), &opts).unwrap();
    assert!(rep.a1.satisfied && rep.a2.satisfied && rep.a3.satisfied);
    assert!(!rep.f.satisfied);
    // theta^2 does not vanish as rho -> 0 with theta fixed.
    assert!(rep.f_order_rho.unwrap().abs() < 0.1);
    assert!((rep.f_order_theta.unwrap() - 2.0).abs() < 0.1);
}

#[test]
fn structure_flags_coefficients_with_the_wrong_dependence() {
    let opts = StructureOptions::default();
    // A2 must vanish with rho; this one depends on theta only.
    let wrong_a2 = FnSystem::quasilinear(1, |r, t, o| o[0] = r[0] * t[0]).with_a2(|_, t, o| o[0] = t[0]);
    let rep = check_structure(&wrong_a2, &opts).unwrap();
    assert!(!rep.a2.satisfied && rep.a1.satisfied && rep.a3.satisfied && rep.f.satisfied);
    // A1 must vanish at the origin.
    let constant_a1 = FnSystem::quasilinear(1, |r, t, o| o[0] = r[0] * t[0]).with_a1(|_, _, o| o[0] = 0.25);
    let rep = check_structure(&constant_a1, &opts).unwrap();
    assert!(!rep.a1.satisfied);
    assert!(rep.a1.fitted_order.unwrap().abs() < 1e-9);
    // Non-symmetric matrices are rejected outright.
    let skew = FnSystem::quasilinear(2, |_, _, o| o.fill(0.0)).with_a3(|_, t, o| {
        o.copy_from_slice(&[0.0, t[0], -t[0], 0.0]);
    });
    assert!(matches!(check_structure(&skew, &opts), Err(Error::NonSymmetric { .. })));
}

#[test]
fn semilinear_lambda_is_exactly_one() {
    for name in ["linear", "semilinear-bilinear", "semilinear-vector", "violating-F"] {
        let sys = builtin_system(name, SystemParams::default()).unwrap();
        let prof = builtin_profile("sech", 3.0, sys.dim()).unwrap();
        let rep = hyperbolicity_margin(sys.as_ref(), &prof, &xi_grid()).unwrap();
        assert_eq!(rep.lambda, 1.0);
    }
}

#[test]
fn scalar_lambda_matches_closed_form() {
    // f' = a sech(xi) peaks at xi = 0 (on the grid) with value a, so the
    // minima are 1 - (alpha + beta) a and 1 - alpha a for positive alpha, beta.
    for (alpha, beta, a) in [(1.0, 1.0, 0.5), (0.5, 0.25, 0.9), (2.0, 0.1, 0.3)] {
        let sys = builtin_system("quasilinear-scalar", SystemParams { alpha, beta, gamma: 1.0, kappa: 1.0 }).unwrap();
        let prof = builtin_profile("sech", a, 1).unwrap();
        let rep = hyperbolicity_margin(sys.as_ref(), &prof, &xi_grid()).unwrap();
        let expected = (1.0 - (alpha + beta) * a).min(1.0 - alpha * a);
        assert!((rep.lambda - expected).abs() <= 1e-12, "{} vs {expected}", rep.lambda);
        assert!(rep.argmin_xi.abs() < 1e-12);
    }
}

#[test]
fn found_boost_satisfies_both_conditions_and_is_minimal() {
    let grid = xi_grid();
    let margin = 0.2;
    let sys = builtin_system("quasilinear-scalar", SystemParams { alpha: 0.5, beta: -1.4, gamma: 1.0, kappa: 1.0 }).unwrap();
    let prof = builtin_profile("sech", 0.5, 1).unwrap();
    let c = find_boost(sys.as_ref(), &prof, &grid, margin).unwrap();
    assert!(c > 0.0);
    let margin_at = |c: f64| {
        grid.iter()
            .map(|&xi| {
                let mut cc = cartesian_coefficients(sys.as_ref(), &prof, xi, &[0.0], &[0.0]);
                cc.boost(c);
                // At the background the boosted a00 and a11 are the two conditions.
                min_sym_eigenvalue(&cc.a00, 1).unwrap().min(cc.a11[0])
            })
            .fold(f64::INFINITY, f64::min)
    };
    assert!(margin_at(c) > margin);
    assert!(margin_at(c - 0.01) <= margin);

    let semilinear = builtin_system("semilinear-bilinear", SystemParams::default()).unwrap();
    assert_eq!(find_boost(semilinear.as_ref(), &prof, &grid, margin).unwrap(), 0.0);

    // I - A1 - A2 = 1 - 3 sech(xi) is negative at the peak, and the boost only rescales it.
    let hopeless = builtin_system("quasilinear-scalar", SystemParams { alpha: 3.0, beta: 0.0, gamma: 1.0, kappa: 1.0 }).unwrap();
    let prof = builtin_profile("sech", 1.0, 1).unwrap();
    assert!(matches!(find_boost(hopeless.as_ref(), &prof, &grid, margin), Err(Error::NoBoostFound { .. })));
}
