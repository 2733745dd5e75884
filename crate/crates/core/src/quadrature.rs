//! One-dimensional quadrature and interpolation helpers.

// Unused when std is linked, whose inherent float methods take precedence.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

const MAX_DEPTH: u32 = 48;

/// Adaptive Simpson quadrature of `f` on `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if !delta.is_finite() {
        return Err(Error::QuadratureNonconvergence { a, b });
    }
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::QuadratureNonconvergence { a, b });
    }
    Ok(simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
}

/// Composite trapezoid rule on uniform spacing `h`.
pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => h * (values[1..n - 1].iter().sum::<f64>() + 0.5 * (values[0] + values[n - 1])),
    }
}

/// Composite trapezoid rule on arbitrary abscissae.
pub fn trapezoid_xy(xs: &[f64], ys: &[f64]) -> f64 {
    debug_assert_eq!(xs.len(), ys.len());
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

/// Lagrange interpolation of uniformly spaced samples at `x`, using the
/// `points` nodes nearest to `x` (clamped to the sample range).
pub fn lagrange_uniform(x0: f64, h: f64, values: &[f64], x: f64, points: usize) -> f64 {
    let n = values.len();
    let points = points.min(n).max(1);
    let s = (x - x0) / h;
    let start = (s.floor() as isize - (points as isize - 1) / 2)
        .max(0)
        .min((n - points) as isize) as usize;
    let mut acc = 0.0;
    for j in start..start + points {
        let mut weight = 1.0;
        for m in start..start + points {
            if m != j {
                weight *= (s - m as f64) / (j as f64 - m as f64);
            }
        }
        acc += weight * values[j];
    }
    acc
}

/// Linear interpolation of uniformly spaced samples; `None` outside the range.
pub fn linear_uniform(x0: f64, h: f64, values: &[f64], x: f64) -> Option<f64> {
    let s = (x - x0) / h;
    let last = (values.len() - 1) as f64;
    let eps = 1e-9;
    if s < -eps || s > last + eps {
        return None;
    }
    let s = s.clamp(0.0, last);
    let i = (s.floor() as usize).min(values.len().saturating_sub(2));
    let frac = s - i as f64;
    if values.len() == 1 {
        return Some(values[0]);
    }
    Some(values[i] * (1.0 - frac) + values[i + 1] * frac)
}
