use alloc::vec;
use alloc::vec::Vec;
// Unused when std is linked, whose inherent float methods take precedence.
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::hyperbolic::check_symmetric;
use super::CoefficientSet;
use crate::error::{Error, Result};
use crate::linalg::frobenius;

#[derive(Debug, Clone, PartialEq)]
pub struct StructureOptions {
    /// Positive and strictly decreasing.
    pub radii: Vec<f64>,
    pub directions: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for StructureOptions {
    fn default() -> Self {
        StructureOptions {
            radii: (0..6).map(|k| 10f64.powi(-1 - k)).collect(),
            directions: 32,
            tol: 0.1,
            seed: 0,
        }
    }
}

impl StructureOptions {
    fn validate(&self) -> Result<()> {
        if self.radii.is_empty() || self.radii.iter().any(|r| !(*r > 0.0)) {
            return Err(Error::InvalidArgument("radii must be positive"));
        }
        if self.radii.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::InvalidArgument("radii must be strictly decreasing"));
        }
        if self.directions < 16 {
            return Err(Error::InvalidArgument("at least 16 directions are required"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub satisfied: bool,
    /// Smallest log-log slope over the sampled directions; `None` with a
    /// single radius, infinite when the coefficient vanished at every sample.
    pub fitted_order: Option<f64>,
    /// Sample point `(rho, theta)` at the largest radius along the direction
    /// with the smallest slope.
    pub worst_point: (Vec<f64>, Vec<f64>),
    /// Largest ratio of the coefficient norm to the scaling quantity.
    pub constant_estimate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StructureReport {
    pub a1: ConditionReport,
    pub a2: ConditionReport,
    pub a3: ConditionReport,
    /// Fitted order is the smaller of `f_order_rho` and `f_order_theta`.
    pub f: ConditionReport,
    pub f_order_rho: Option<f64>,
    pub f_order_theta: Option<f64>,
}

impl StructureReport {
    pub fn all_satisfied(&self) -> bool {
        self.a1.satisfied && self.a2.satisfied && self.a3.satisfied && self.f.satisfied
    }
}

#[derive(Clone, Copy)]
enum Which {
    A1,
    A2,
    A3,
    F,
}

#[derive(Clone, Copy)]
struct Scaling {
    rho: bool,
    theta: bool,
}

/// Least-squares slope of `ys` against `xs`.
fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

fn random_direction(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let norm = frobenius(&v);
        if norm > 0.1 && norm <= 1.0 {
            return v;
        }
    }
}

struct Sampler<'a> {
    sys: &'a dyn CoefficientSet,
    n: usize,
    out: Vec<f64>,
}

impl Sampler<'_> {
    fn norm(&mut self, which: Which, rho: &[f64], theta: &[f64]) -> Result<f64> {
        let n = self.n;
        match which {
            Which::A1 => {
                self.sys.a1(rho, theta, &mut self.out[..n * n]);
                check_symmetric("A1", &self.out[..n * n], n)?;
            }
            Which::A2 => {
                self.sys.a2(rho, theta, &mut self.out[..n * n]);
                check_symmetric("A2", &self.out[..n * n], n)?;
            }
            Which::A3 => {
                self.sys.a3(rho, theta, &mut self.out[..n * n]);
                check_symmetric("A3", &self.out[..n * n], n)?;
            }
            Which::F => {
                self.sys.source(rho, theta, &mut self.out[..n]);
                if self.out[..n].iter().any(|v| !v.is_finite()) {
                    return Err(Error::EvaluationFailure("F"));
                }
            }
        }
        let len = if matches!(which, Which::F) { n } else { n * n };
        Ok(frobenius(&self.out[..len]))
    }
}

/// Scaling quantity the coefficient is measured against at `(rho, theta)`.
fn measure(which: Which, rho: &[f64], theta: &[f64]) -> f64 {
    let l1 = |v: &[f64]| v.iter().map(|x| x.abs()).sum::<f64>();
    match which {
        Which::A1 => l1(rho) + l1(theta),
        Which::A2 => l1(rho),
        Which::A3 => l1(theta),
        Which::F => l1(rho) * l1(theta),
    }
}

struct Fit {
    order: Option<f64>,
    worst_point: (Vec<f64>, Vec<f64>),
    constant: f64,
}

fn fit(
    sampler: &mut Sampler<'_>,
    which: Which,
    scaling: Scaling,
    dirs: &[(Vec<f64>, Vec<f64>)],
    radii: &[f64],
) -> Result<Fit> {
    let log_r: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let mut worst = Fit {
        order: None,
        worst_point: dirs[0].clone(),
        constant: 0.0,
    };
    let mut worst_slope = f64::INFINITY;
    let mut log_v = vec![0.0; radii.len()];
    for (dr, dt) in dirs {
        let mut all_zero = true;
        let mut first_point = None;
        for (k, &r) in radii.iter().enumerate() {
            let sr = if scaling.rho { r } else { 1.0 };
            let st = if scaling.theta { r } else { 1.0 };
            let rho: Vec<f64> = dr.iter().map(|v| v * sr).collect();
            let theta: Vec<f64> = dt.iter().map(|v| v * st).collect();
            let value = sampler.norm(which, &rho, &theta)?;
            let m = measure(which, &rho, &theta);
            if m > 0.0 {
                worst.constant = worst.constant.max(value / m);
            }
            all_zero &= value == 0.0;
            log_v[k] = value.max(f64::MIN_POSITIVE).ln();
            first_point.get_or_insert((rho, theta));
        }
        let s = if all_zero {
            f64::INFINITY
        } else {
            slope(&log_r, &log_v)
        };
        if s < worst_slope {
            worst_slope = s;
            if let Some(p) = first_point {
                worst.worst_point = p;
            }
        }
    }
    if radii.len() >= 2 {
        worst.order = Some(worst_slope);
    }
    Ok(worst)
}

fn condition(fit: Fit, tol: f64) -> ConditionReport {
    ConditionReport {
        satisfied: fit.order.is_none_or(|o| o >= 1.0 - tol),
        fitted_order: fit.order,
        worst_point: fit.worst_point,
        constant_estimate: fit.constant,
    }
}

/// Samples the coefficients on shrinking points and fits their decay orders.
///
/// `A1` is scaled in both arguments, `A2` in `rho` only, `A3` in `theta` only,
/// and `F` once in each argument separately. A condition holds when the
/// fitted order is at least `1 - tol`.
pub fn check_structure(sys: &dyn CoefficientSet, opts: &StructureOptions) -> Result<StructureReport> {
    opts.validate()?;
    let n = sys.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let dirs: Vec<(Vec<f64>, Vec<f64>)> = (0..opts.directions)
        .map(|_| (random_direction(&mut rng, n), random_direction(&mut rng, n)))
        .collect();
    let mut sampler = Sampler {
        sys,
        n,
        out: vec![0.0; n * n],
    };
    let both = Scaling { rho: true, theta: true };
    let rho_only = Scaling { rho: true, theta: false };
    let theta_only = Scaling { rho: false, theta: true };
    let radii = &opts.radii;

    let a1 = fit(&mut sampler, Which::A1, both, &dirs, radii)?;
    let a2 = fit(&mut sampler, Which::A2, rho_only, &dirs, radii)?;
    let a3 = fit(&mut sampler, Which::A3, theta_only, &dirs, radii)?;
    let f_rho = fit(&mut sampler, Which::F, rho_only, &dirs, radii)?;
    let f_theta = fit(&mut sampler, Which::F, theta_only, &dirs, radii)?;

    let (f_order_rho, f_order_theta) = (f_rho.order, f_theta.order);
    let constant = f_rho.constant.max(f_theta.constant);
    let mut f = match (f_order_rho, f_order_theta) {
        (Some(a), Some(b)) if b < a => f_theta,
        _ => f_rho,
    };
    f.constant = constant;
    Ok(StructureReport {
        a1: condition(a1, opts.tol),
        a2: condition(a2, opts.tol),
        a3: condition(a3, opts.tol),
        f: condition(f, opts.tol),
        f_order_rho,
        f_order_theta,
    })
}
