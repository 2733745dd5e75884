use alloc::vec;
use alloc::vec::Vec;

use super::CoefficientSet;
use crate::error::{Error, Result};
use crate::linalg::{min_sym_eigenvalue, symmetry_defect};
use crate::profile::TravelingWaveProfile;

const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperbolicityReport {
    /// `min(min_i_a1_a2, min_i_a1)`.
    pub lambda: f64,
    pub argmin_xi: f64,
    /// Smallest eigenvalue of `I - A1(f', 0) - A2(f', 0)` over the grid.
    pub min_i_a1_a2: f64,
    pub argmin_i_a1_a2: f64,
    /// Smallest eigenvalue of `I - A1(f', 0)` over the grid.
    pub min_i_a1: f64,
    pub argmin_i_a1: f64,
}

pub(crate) fn check_symmetric(which: &'static str, a: &[f64], n: usize) -> Result<()> {
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::EvaluationFailure(which));
    }
    let defect = symmetry_defect(a, n);
    let scale = 1.0 + a.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if defect > SYMMETRY_TOL * scale {
        return Err(Error::NonSymmetric { which, defect });
    }
    Ok(())
}

/// Evaluates `A1(f'(xi), 0)` and `A2(f'(xi), 0)` into `a1`, `a2`.
pub(crate) fn background_coefficients(
    sys: &dyn CoefficientSet,
    profile: &TravelingWaveProfile,
    xi: f64,
    rho: &mut [f64],
    zero: &[f64],
    a1: &mut [f64],
    a2: &mut [f64],
) -> Result<()> {
    let n = sys.dim();
    profile.eval(1, xi, rho);
    sys.a1(rho, zero, a1);
    sys.a2(rho, zero, a2);
    check_symmetric("A1", a1, n)?;
    check_symmetric("A2", a2, n)
}

pub fn hyperbolicity_margin(
    sys: &dyn CoefficientSet,
    profile: &TravelingWaveProfile,
    xi_grid: &[f64],
) -> Result<HyperbolicityReport> {
    if xi_grid.is_empty() {
        return Err(Error::InvalidGrid("empty xi grid"));
    }
    let n = sys.dim();
    let mut rho = vec![0.0; n];
    let zero = vec![0.0; n];
    let mut a1 = vec![0.0; n * n];
    let mut a2 = vec![0.0; n * n];
    let mut m = vec![0.0; n * n];
    let mut report = HyperbolicityReport {
        lambda: f64::INFINITY,
        argmin_xi: xi_grid[0],
        min_i_a1_a2: f64::INFINITY,
        argmin_i_a1_a2: xi_grid[0],
        min_i_a1: f64::INFINITY,
        argmin_i_a1: xi_grid[0],
    };
    for &xi in xi_grid {
        background_coefficients(sys, profile, xi, &mut rho, &zero, &mut a1, &mut a2)?;
        identity_minus(&a1, n, &mut m);
        let e_a1 = min_sym_eigenvalue(&m, n)?;
        for (mij, a2ij) in m.iter_mut().zip(&a2) {
            *mij -= a2ij;
        }
        let e_a1_a2 = min_sym_eigenvalue(&m, n)?;
        if e_a1_a2 < report.min_i_a1_a2 {
            report.min_i_a1_a2 = e_a1_a2;
            report.argmin_i_a1_a2 = xi;
        }
        if e_a1 < report.min_i_a1 {
            report.min_i_a1 = e_a1;
            report.argmin_i_a1 = xi;
        }
    }
    if report.min_i_a1_a2 <= report.min_i_a1 {
        report.lambda = report.min_i_a1_a2;
        report.argmin_xi = report.argmin_i_a1_a2;
    } else {
        report.lambda = report.min_i_a1;
        report.argmin_xi = report.argmin_i_a1;
    }
    Ok(report)
}

fn identity_minus(a: &[f64], n: usize, out: &mut [f64]) {
    for i in 0..n {
        for j in 0..n {
            out[i * n + j] = if i == j { 1.0 } else { 0.0 } - a[i * n + j];
        }
    }
}

/// Coefficients of `a00 u_tt = a11 u_xx + across u_tx + source`.
///
/// Also serves as a reusable workspace: [`CartesianCoefficients::fill`]
/// does not allocate.
#[derive(Debug, Clone, PartialEq)]
pub struct CartesianCoefficients {
    pub n: usize,
    pub a00: Vec<f64>,
    pub a11: Vec<f64>,
    pub across: Vec<f64>,
    pub source: Vec<f64>,
    rho: Vec<f64>,
    t1: Vec<f64>,
    t2: Vec<f64>,
    t3: Vec<f64>,
}

impl CartesianCoefficients {
    pub fn zeros(n: usize) -> Self {
        CartesianCoefficients {
            n,
            a00: vec![0.0; n * n],
            a11: vec![0.0; n * n],
            across: vec![0.0; n * n],
            source: vec![0.0; n],
            rho: vec![0.0; n],
            t1: vec![0.0; n * n],
            t2: vec![0.0; n * n],
            t3: vec![0.0; n * n],
        }
    }

    /// Fills the coefficients at a point where the profile has derivatives
    /// `f1 = f'`, `f2 = f''` and the perturbation has `u_xi`, `u_eta`.
    pub fn fill(&mut self, sys: &dyn CoefficientSet, f1: &[f64], f2: &[f64], u_xi: &[f64], u_eta: &[f64]) {
        let n = self.n;
        for k in 0..n {
            self.rho[k] = f1[k] + u_xi[k];
        }
        sys.a1(&self.rho, u_eta, &mut self.t1);
        sys.a2(&self.rho, u_eta, &mut self.t2);
        sys.a3(&self.rho, u_eta, &mut self.t3);
        sys.source(&self.rho, u_eta, &mut self.source);
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                let idx = i * n + j;
                let id = if i == j { 1.0 } else { 0.0 };
                let (a1, a2, a3) = (self.t1[idx], self.t2[idx], self.t3[idx]);
                self.a00[idx] = id - a1 - a2 - a3;
                self.a11[idx] = id - a1 + a2 + a3;
                self.across[idx] = 2.0 * (a3 - a2);
                acc += a3 * f2[j];
            }
            self.source[i] += acc;
        }
    }

    /// Rewrites the coefficients for the frame `tau = (1+c) t`, `y = x + c t`.
    pub fn boost(&mut self, c: f64) {
        if c == 0.0 {
            return;
        }
        for idx in 0..self.n * self.n {
            let (a00, a11, ac) = (self.a00[idx], self.a11[idx], self.across[idx]);
            self.a00[idx] = (1.0 + c) * (1.0 + c) * a00;
            self.a11[idx] = a11 + c * ac - c * c * a00;
            self.across[idx] = (1.0 + c) * (ac - 2.0 * c * a00);
        }
    }

    /// `a00 u_tt - a11 u_xx - across u_tx - source`.
    pub fn residual(&self, u_tt: &[f64], u_tx: &[f64], u_xx: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|i| {
                let mut r = -self.source[i];
                for j in 0..n {
                    let idx = i * n + j;
                    r += self.a00[idx] * u_tt[j] - self.a11[idx] * u_xx[j] - self.across[idx] * u_tx[j];
                }
                r
            })
            .collect()
    }
}

/// Cartesian coefficients at `xi` for the perturbation state `(u_xi, u_eta)`.
pub fn cartesian_coefficients(
    sys: &dyn CoefficientSet,
    profile: &TravelingWaveProfile,
    xi: f64,
    u_xi: &[f64],
    u_eta: &[f64],
) -> CartesianCoefficients {
    let n = sys.dim();
    let mut f1 = vec![0.0; n];
    let mut f2 = vec![0.0; n];
    profile.eval(1, xi, &mut f1);
    profile.eval(2, xi, &mut f2);
    let mut c = CartesianCoefficients::zeros(n);
    c.fill(sys, &f1, &f2, u_xi, u_eta);
    c
}
