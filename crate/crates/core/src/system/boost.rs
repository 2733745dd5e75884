use alloc::vec;
// Unused when std is linked, whose inherent float methods take precedence.
#[allow(unused_imports)]
use num_traits::Float;

use super::hyperbolic::background_coefficients;
use super::CoefficientSet;
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::linalg::min_sym_eigenvalue;
use crate::profile::TravelingWaveProfile;

/// Coarse rungs tried by [`find_boost`]; the first passing rung is refined in
/// steps of 0.01 from the rung below it.
pub const BOOST_LADDER: &[f64] = &[0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99, 0.999];

/// Smaller of the two boosted positivity constants over the grid.
fn boosted_margin(
    sys: &dyn CoefficientSet,
    profile: &TravelingWaveProfile,
    xi_grid: &[f64],
    c: f64,
) -> Result<f64> {
    let n = sys.dim();
    let mut rho = vec![0.0; n];
    let zero = vec![0.0; n];
    let mut a1 = vec![0.0; n * n];
    let mut a2 = vec![0.0; n * n];
    let mut p = vec![0.0; n * n];
    let mut q = vec![0.0; n * n];
    let mut worst = f64::INFINITY;
    for &xi in xi_grid {
        background_coefficients(sys, profile, xi, &mut rho, &zero, &mut a1, &mut a2)?;
        for i in 0..n {
            for j in 0..n {
                let idx = i * n + j;
                let id = if i == j { 1.0 } else { 0.0 };
                p[idx] = (1.0 + c) * (1.0 + c) * (id - a1[idx] - a2[idx]);
                q[idx] = (1.0 - c) * ((1.0 + c) * (id - a1[idx]) + (1.0 - c) * a2[idx]);
            }
        }
        worst = worst.min(min_sym_eigenvalue(&p, n)?).min(min_sym_eigenvalue(&q, n)?);
    }
    Ok(worst)
}

/// Smallest boost speed on the ladder for which both boosted positivity
/// constants exceed `margin` along the wave.
pub fn find_boost(
    sys: &dyn CoefficientSet,
    profile: &TravelingWaveProfile,
    xi_grid: &[f64],
    margin: f64,
) -> Result<f64> {
    if xi_grid.is_empty() {
        return Err(Error::InvalidGrid("empty xi grid"));
    }
    let passes = |c: f64| boosted_margin(sys, profile, xi_grid, c).map(|m| m > margin);
    for (k, &c) in BOOST_LADDER.iter().enumerate() {
        if !passes(c)? {
            continue;
        }
        if k == 0 {
            return Ok(0.0);
        }
        let lo = BOOST_LADDER[k - 1];
        let mut fine = lo + 0.01;
        while fine < c - 1e-9 {
            if passes(fine)? {
                return Ok(fine);
            }
            fine += 0.01;
        }
        return Ok(c);
    }
    Err(Error::NoBoostFound { margin })
}

/// The affine change of frame `tau = (1+c) t`, `y = x + c t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoostMap {
    pub c: f64,
}

impl BoostMap {
    pub fn forward(&self, t: f64, x: f64) -> (f64, f64) {
        ((1.0 + self.c) * t, x + self.c * t)
    }

    pub fn inverse(&self, tau: f64, y: f64) -> (f64, f64) {
        let t = tau / (1.0 + self.c);
        (t, y - self.c * t)
    }

    /// Boosted-frame time derivative of data with `u(0) = u0`, `u_t(0) = u1`.
    pub fn initial_velocity(&self, u1: f64, u0_x: f64) -> f64 {
        (u1 - self.c * u0_x) / (1.0 + self.c)
    }

    /// Physical `u_t` from the boosted-frame `u_tau`, `u_y`.
    pub fn physical_velocity(&self, u_tau: f64, u_y: f64) -> f64 {
        (1.0 + self.c) * u_tau + self.c * u_y
    }
}

/// Grid for the boosted frame covering the image of `grid` over `[0, t_end]`.
///
/// Spacing is kept; the right edge is extended by `c t_end` so the image of
/// the original domain stays inside, and the time step is reselected for the
/// boosted end time.
pub fn boost_grid(grid: &GridSpec, c: f64) -> Result<(GridSpec, BoostMap)> {
    if !(0.0..1.0).contains(&c) {
        return Err(Error::InvalidArgument("boost speed must lie in [0, 1)"));
    }
    let map = BoostMap { c };
    if c == 0.0 {
        return Ok((*grid, map));
    }
    let h = grid.spacing();
    let extra = (c * grid.t_end / h).ceil() as usize;
    let x_max = grid.x_max + extra as f64 * h;
    let boosted = GridSpec::with_boundary(
        grid.x_min,
        x_max,
        grid.nx + extra,
        (1.0 + c) * grid.t_end,
        grid.cfl,
        grid.boundary,
    )?;
    Ok((boosted, map))
}
