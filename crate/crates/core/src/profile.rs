//! Traveling-wave profiles `f(xi)` with analytic derivatives through fourth
//! order, their weighted decay constants, and the exactness check against a
//! coefficient set.

use alloc::string::ToString;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
// Unused when std is linked, whose inherent float methods take precedence.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::system::CoefficientSet;

/// Japanese bracket `<x> = (1 + x^2)^(1/2)`.
#[inline]
pub fn bracket(x: f64) -> f64 {
    (1.0 + x * x).sqrt()
}

/// Scalar shape function: `(order, xi) -> d^order s / dxi^order`.
pub type ShapeFn = Arc<dyn Fn(usize, f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Shape {
    Zero,
    /// `s' = sech`, `s = gd` (Gudermannian).
    Sech,
    /// `s' = exp(-xi^2)`.
    Gaussian,
    /// `s' = (1 - (xi/w)^2)^5` on `|xi| < w`, zero outside.
    CompactBump { half_width: f64 },
    Custom(ShapeFn),
}

/// Traveling-wave profile `f(xi) = amplitude * s(xi) * direction`.
///
/// Builtins are normalized so that `|s'(0)| = 1`; with the default
/// direction of all ones, every component of `f'(0)` equals the amplitude.
#[derive(Clone)]
pub struct TravelingWaveProfile {
    name: &'static str,
    shape: Shape,
    amplitude: f64,
    direction: Vec<f64>,
    support_hint: Option<(f64, f64)>,
}

impl fmt::Debug for TravelingWaveProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TravelingWaveProfile")
            .field("name", &self.name)
            .field("amplitude", &self.amplitude)
            .field("direction", &self.direction)
            .field("support_hint", &self.support_hint)
            .finish()
    }
}

/// Names accepted by [`builtin_profile`].
pub const PROFILE_CATALOG: [&str; 4] = ["zero", "sech", "gaussian-bump", "compact-bump"];

/// Half-width of the `compact-bump` profile's support.
pub const COMPACT_BUMP_HALF_WIDTH: f64 = 4.0;

pub fn builtin_profile(name: &str, amplitude: f64, dim: usize) -> Result<TravelingWaveProfile> {
    let (name, shape, hint) = match name {
        "zero" => ("zero", Shape::Zero, None),
        "sech" => ("sech", Shape::Sech, Some((-10.0, 10.0))),
        "gaussian-bump" => ("gaussian-bump", Shape::Gaussian, Some((-6.0, 6.0))),
        "compact-bump" => (
            "compact-bump",
            Shape::CompactBump {
                half_width: COMPACT_BUMP_HALF_WIDTH,
            },
            Some((-COMPACT_BUMP_HALF_WIDTH, COMPACT_BUMP_HALF_WIDTH)),
        ),
        other => {
            return Err(Error::UnknownName {
                catalog: "profile",
                name: other.to_string(),
            })
        }
    };
    if dim == 0 {
        return Err(Error::InvalidArgument("profile dimension must be positive"));
    }
    Ok(TravelingWaveProfile {
        name,
        shape,
        amplitude,
        direction: vec![1.0; dim],
        support_hint: hint,
    })
}

impl TravelingWaveProfile {
    /// Profile built from a user shape function returning derivatives 0..=4.
    pub fn custom(
        shape: ShapeFn,
        amplitude: f64,
        direction: Vec<f64>,
        support_hint: Option<(f64, f64)>,
    ) -> Self {
        TravelingWaveProfile {
            name: "custom",
            shape: Shape::Custom(shape),
            amplitude,
            direction,
            support_hint,
        }
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn dim(&self) -> usize {
        self.direction.len()
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn support_hint(&self) -> Option<(f64, f64)> {
        self.support_hint
    }

    /// Same profile with a different amplitude.
    pub fn scaled(&self, amplitude: f64) -> Self {
        TravelingWaveProfile {
            amplitude,
            ..self.clone()
        }
    }

    pub fn with_direction(mut self, direction: Vec<f64>) -> Self {
        self.direction = direction;
        self
    }

    /// Scalar shape derivative `s^(order)(xi)`, without amplitude.
    pub fn shape_derivative(&self, order: usize, xi: f64) -> f64 {
        assert!(order <= 4, "profiles carry derivatives through order 4");
        match &self.shape {
            Shape::Zero => 0.0,
            Shape::Sech => sech_shape(order, xi),
            Shape::Gaussian => gaussian_shape(order, xi),
            Shape::CompactBump { half_width } => compact_shape(order, xi, *half_width),
            Shape::Custom(f) => f(order, xi),
        }
    }

    /// Writes `f^(order)(xi)` into `out`.
    #[inline]
    pub fn eval(&self, order: usize, xi: f64, out: &mut [f64]) {
        let s = self.amplitude * self.shape_derivative(order, xi);
        for (o, d) in out.iter_mut().zip(&self.direction) {
            *o = s * d;
        }
    }

    /// Euclidean norm of `f^(order)(xi)`.
    pub fn norm(&self, order: usize, xi: f64) -> f64 {
        let dnorm = self.direction.iter().map(|d| d * d).sum::<f64>().sqrt();
        (self.amplitude * self.shape_derivative(order, xi)).abs() * dnorm
    }
}

fn sech_shape(order: usize, x: f64) -> f64 {
    let sech = 1.0 / x.cosh();
    let tanh = x.tanh();
    match order {
        0 => 2.0 * (0.5 * x).tanh().atan(),
        1 => sech,
        2 => -sech * tanh,
        3 => sech * (1.0 - 2.0 * sech * sech),
        _ => sech * tanh * (6.0 * sech * sech - 1.0),
    }
}

fn gaussian_shape(order: usize, x: f64) -> f64 {
    let g = (-x * x).exp();
    match order {
        0 => 0.5 * core::f64::consts::PI.sqrt() * libm::erf(x),
        1 => g,
        2 => -2.0 * x * g,
        3 => (4.0 * x * x - 2.0) * g,
        _ => (-8.0 * x * x * x + 12.0 * x) * g,
    }
}

/// Coefficients of `(1 - z^2)^5` in ascending powers of `z`.
const BUMP_POLY: [f64; 11] = [1.0, 0.0, -5.0, 0.0, 10.0, 0.0, -10.0, 0.0, 5.0, 0.0, -1.0];

fn poly_eval(coeffs: &[f64], z: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * z + c)
}

fn compact_shape(order: usize, xi: f64, w: f64) -> f64 {
    let z = xi / w;
    if order == 0 {
        // s(xi) = w * P(z), P' = (1 - z^2)^5, P(-1) = 0.
        let mut integral = [0.0; 12];
        for (k, c) in BUMP_POLY.iter().enumerate() {
            integral[k + 1] = c / (k + 1) as f64;
        }
        let zc = z.clamp(-1.0, 1.0);
        return w * (poly_eval(&integral, zc) - poly_eval(&integral, -1.0));
    }
    if z.abs() >= 1.0 {
        return 0.0;
    }
    // d^(order-1)/dz^(order-1) of the bump polynomial, scaled by w^-(order-1).
    let mut coeffs: Vec<f64> = BUMP_POLY.to_vec();
    for _ in 1..order {
        coeffs = coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * k as f64)
            .collect();
    }
    poly_eval(&coeffs, z) / w.powi(order as i32 - 1)
}

/// Supremum of a weighted profile expression over a sampling grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayBound {
    pub value: f64,
    pub argmax: f64,
    /// The maximum sits on the first or last grid point, so widening the
    /// grid may increase it.
    pub at_boundary: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    pub m0: DecayBound,
    pub m1: DecayBound,
    pub delta: f64,
    pub grid_min: f64,
    pub grid_max: f64,
    pub grid_len: usize,
}

/// Default decay-constant grid: `[-50, 50]` with step `1e-3`.
pub fn default_decay_grid() -> Vec<f64> {
    let n = 100_001;
    (0..n).map(|i| -50.0 + i as f64 * 1e-3).collect()
}

fn weighted_sup(
    p: &TravelingWaveProfile,
    delta: f64,
    grid: &[f64],
    power: f64,
    orders: core::ops::RangeInclusive<usize>,
) -> Result<DecayBound> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument("delta must lie in (0, 1)"));
    }
    if grid.is_empty() {
        return Err(Error::InvalidArgument("decay grid is empty"));
    }
    let mut best = DecayBound {
        value: 0.0,
        argmax: grid[0],
        at_boundary: false,
    };
    let mut best_index = 0;
    for (i, &x) in grid.iter().enumerate() {
        let sum: f64 = orders.clone().map(|k| p.norm(k, x)).sum();
        let v = bracket(x).powf(power) * sum;
        if !v.is_finite() {
            return Err(Error::EvaluationFailure("profile"));
        }
        if v > best.value {
            best.value = v;
            best.argmax = x;
            best_index = i;
        }
    }
    best.at_boundary = best.value > 0.0 && (best_index == 0 || best_index + 1 == grid.len());
    Ok(best)
}

/// `M0 = sup <x>^{3(1+delta)/2} (|f'| + |f''|)` over the grid.
pub fn decay_m0(p: &TravelingWaveProfile, delta: f64, grid: &[f64]) -> Result<DecayBound> {
    weighted_sup(p, delta, grid, 1.5 * (1.0 + delta), 1..=2)
}

/// `M1 = sup <x>^{3(1+delta)} (|f'| + |f''| + |f'''| + |f''''|)` over the grid.
pub fn decay_m1(p: &TravelingWaveProfile, delta: f64, grid: &[f64]) -> Result<DecayBound> {
    weighted_sup(p, delta, grid, 3.0 * (1.0 + delta), 1..=4)
}

pub fn decay_report(p: &TravelingWaveProfile, delta: f64, grid: &[f64]) -> Result<DecayReport> {
    Ok(DecayReport {
        m0: decay_m0(p, delta, grid)?,
        m1: decay_m1(p, delta, grid)?,
        delta,
        grid_min: grid[0],
        grid_max: grid[grid.len() - 1],
        grid_len: grid.len(),
    })
}

/// Largest residual of the full system at `v = f(xi)` over the grid.
///
/// Since `v_eta = 0` the residual reduces to `-A3(f', 0) f'' - F(f', 0)`.
pub fn verify_exact_solution(
    p: &TravelingWaveProfile,
    sys: &dyn CoefficientSet,
    grid: &[f64],
    tol: f64,
) -> Result<f64> {
    let n = sys.dim();
    if p.dim() != n {
        return Err(Error::InvalidArgument("profile and system dimensions differ"));
    }
    let zero = vec![0.0; n];
    let mut fp = vec![0.0; n];
    let mut fpp = vec![0.0; n];
    let mut a3 = vec![0.0; n * n];
    let mut src = vec![0.0; n];
    let mut worst = 0.0_f64;
    for &xi in grid {
        p.eval(1, xi, &mut fp);
        p.eval(2, xi, &mut fpp);
        sys.a3(&fp, &zero, &mut a3);
        sys.source(&fp, &zero, &mut src);
        for i in 0..n {
            let r = -(0..n).map(|j| a3[i * n + j] * fpp[j]).sum::<f64>() - src[i];
            if !r.is_finite() {
                return Err(Error::EvaluationFailure("coefficient set"));
            }
            worst = worst.max(r.abs());
        }
    }
    if worst > tol {
        return Err(Error::ResidualExceedsTol {
            residual: worst,
            tol,
        });
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_check(p: &TravelingWaveProfile, lo: f64, hi: f64) {
        let h = 1e-4;
        for k in 0..=40 {
            let x = lo + (hi - lo) * k as f64 / 40.0;
            for order in 1..=4 {
                let fd = (p.shape_derivative(order - 1, x + h) - p.shape_derivative(order - 1, x - h))
                    / (2.0 * h);
                let exact = p.shape_derivative(order, x);
                assert!(
                    (fd - exact).abs() < 1e-6 * (1.0 + exact.abs()),
                    "{} order {order} at {x}: fd {fd} exact {exact}",
                    p.name()
                );
            }
        }
    }

    #[test]
    fn derivative_chains_are_consistent() {
        for name in ["sech", "gaussian-bump", "compact-bump"] {
            let p = builtin_profile(name, 1.0, 1).unwrap();
            fd_check(&p, -6.0, 6.0);
        }
    }

    #[test]
    fn sech_normalization() {
        let p = builtin_profile("sech", 2.0, 1).unwrap();
        let mut out = [0.0];
        p.eval(1, 0.0, &mut out);
        assert_eq!(out[0], 2.0);
    }

    #[test]
    fn compact_bump_vanishes_outside_support() {
        let p = builtin_profile("compact-bump", 1.5, 2).unwrap();
        let mut out = [1.0, 1.0];
        for x in [-10.0, -4.0, 4.0, 4.5, 30.0] {
            for order in 1..=4 {
                p.eval(order, x, &mut out);
                assert_eq!(out, [0.0, 0.0], "order {order} at {x}");
            }
        }
        assert!((p.shape_derivative(0, -4.0)).abs() < 1e-15);
    }

    #[test]
    fn zero_profile_is_zero() {
        let p = builtin_profile("zero", 3.0, 1).unwrap();
        for order in 0..=4 {
            assert_eq!(p.shape_derivative(order, 0.7), 0.0);
        }
        let grid = default_decay_grid();
        assert_eq!(decay_m0(&p, 0.5, &grid).unwrap().value, 0.0);
        assert_eq!(decay_m1(&p, 0.5, &grid).unwrap().value, 0.0);
    }

    #[test]
    fn unknown_profile_is_rejected() {
        assert!(matches!(
            builtin_profile("kink", 1.0, 1),
            Err(Error::UnknownName { .. })
        ));
    }
}
