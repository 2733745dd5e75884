//! Null coordinates, discrete null derivatives `Z^a`, and quadrature over
//! the spacetime regions bounded by left-moving characteristics.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::SQRT_2;
// Unused when std is linked, whose inherent float methods take precedence.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::grid::{Boundary, Field, Level, SimState};
use crate::quadrature::{trapezoid, trapezoid_xy};
use crate::stencil;

/// Largest value allowed within the stencil radius of a quiet boundary.
pub const HALO_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NullPoint {
    pub xi: f64,
    pub eta: f64,
}

pub fn to_null(t: f64, x: f64) -> NullPoint {
    NullPoint {
        xi: 0.5 * (t + x),
        eta: 0.5 * (t - x),
    }
}

/// Returns `(t, x)`.
pub fn from_null(p: NullPoint) -> (f64, f64) {
    (p.xi + p.eta, p.xi - p.eta)
}

/// `Z^a = d_xi^{a1} d_eta^{a2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    pub a1: usize,
    pub a2: usize,
}

impl MultiIndex {
    pub const XI: MultiIndex = MultiIndex::new(1, 0);
    pub const ETA: MultiIndex = MultiIndex::new(0, 1);

    pub const fn new(a1: usize, a2: usize) -> Self {
        MultiIndex { a1, a2 }
    }

    pub const fn order(&self) -> usize {
        self.a1 + self.a2
    }

    /// This index followed by one more `d_xi`.
    pub const fn then_xi(self) -> Self {
        MultiIndex::new(self.a1 + 1, self.a2)
    }

    /// This index followed by one more `d_eta`.
    pub const fn then_eta(self) -> Self {
        MultiIndex::new(self.a1, self.a2 + 1)
    }

    /// Coefficients `c_m` with `Z^a = sum_m c_m d_t^{k-m} d_x^m`, `k = |a|`.
    pub fn cartesian_expansion(&self) -> Vec<f64> {
        // (1 + X)^a1 (1 - X)^a2 with X standing for d_x replacing one d_t.
        let mut c = vec![1.0];
        for sign in core::iter::repeat_n(1.0, self.a1).chain(core::iter::repeat_n(-1.0, self.a2)) {
            let mut next = vec![0.0; c.len() + 1];
            for (m, v) in c.iter().enumerate() {
                next[m] += v;
                next[m + 1] += sign * v;
            }
            c = next;
        }
        c
    }
}

/// Cartesian derivatives of the perturbation at the current time level, up
/// to a fixed total order.
///
/// Spatial derivatives use the fourth-order stencils. `u_tt` is the stored
/// evolution-equation value; `u_ttt` is the three-point backward difference
/// of the stored `u_tt` levels.
#[derive(Debug, Clone)]
pub struct NullJet {
    max_order: usize,
    /// `derivs[k][m]` holds `d_t^{k-m} d_x^m u`.
    derivs: Vec<Vec<Field>>,
}

impl NullJet {
    /// Fails with [`Error::HaloExhausted`] unless the outermost stencil
    /// radius is quiet (quiet boundaries only).
    pub fn new(state: &SimState, max_order: usize) -> Result<Self> {
        if state.grid().boundary == Boundary::Quiet {
            let r = if max_order >= 3 { stencil::radius(3) } else { stencil::radius(2) };
            let level = state.current();
            for f in [&level.u, &level.w, &level.utt] {
                check_halo(f, r)?;
            }
        }
        Self::new_unchecked(state, max_order)
    }

    /// As [`NullJet::new`] without the halo check; values within the stencil
    /// radius of a non-quiet boundary are then unreliable.
    pub fn new_unchecked(state: &SimState, max_order: usize) -> Result<Self> {
        if max_order > 3 {
            return Err(Error::InvalidArgument("null derivatives are supported up to order 3"));
        }
        if max_order == 3 && state.history_len() < 3 {
            return Err(Error::InsufficientHistory {
                needed: 3,
                available: state.history_len(),
            });
        }
        let grid = state.grid();
        let (h, bc) = (grid.spacing(), grid.boundary);
        let level = state.current();
        let d = |f: &Field, k: usize| stencil::derive(f, k, h, bc);
        let mut derivs = vec![vec![level.u.clone()]];
        if max_order >= 1 {
            derivs.push(vec![level.w.clone(), d(&level.u, 1)]);
        }
        if max_order >= 2 {
            derivs.push(vec![level.utt.clone(), d(&level.w, 1), d(&level.u, 2)]);
        }
        if max_order >= 3 {
            let levels: Vec<&Level> = state.levels().collect();
            let uttt = backward_time_derivative(levels[0], levels[1], levels[2]);
            derivs.push(vec![uttt, d(&level.utt, 1), d(&level.w, 2), d(&level.u, 3)]);
        }
        Ok(NullJet { max_order, derivs })
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    /// `d_t^{k-m} d_x^m u`.
    pub fn cartesian(&self, k: usize, m: usize) -> &Field {
        &self.derivs[k][m]
    }

    /// `Z^a u` on the grid.
    pub fn null(&self, a: MultiIndex) -> Result<Field> {
        let k = a.order();
        if k > self.max_order {
            return Err(Error::InvalidArgument("multi-index exceeds the jet order"));
        }
        let coeffs = a.cartesian_expansion();
        let mut out = Field::zeros(self.derivs[0][0].nx(), self.derivs[0][0].dim());
        for (c, f) in coeffs.iter().zip(&self.derivs[k]) {
            if *c != 0.0 {
                for (o, v) in out.as_mut_slice().iter_mut().zip(f.as_slice()) {
                    *o += c * v;
                }
            }
        }
        Ok(out)
    }
}

fn check_halo(f: &Field, radius: usize) -> Result<()> {
    let nx = f.nx();
    for i in (0..radius.min(nx)).chain(nx.saturating_sub(radius)..nx) {
        let value = f.node(i).iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if !(value <= HALO_TOL) {
            return Err(Error::HaloExhausted { node: i, value });
        }
    }
    Ok(())
}

/// Derivative at `c.t` of the quadratic interpolating `utt` at three levels.
fn backward_time_derivative(a: &Level, b: &Level, c: &Level) -> Field {
    let h1 = b.t - a.t;
    let h2 = c.t - b.t;
    let wa = h2 / (h1 * (h1 + h2));
    let wb = -(h1 + h2) / (h1 * h2);
    let wc = (h1 + 2.0 * h2) / (h2 * (h1 + h2));
    let mut out = Field::zeros(c.utt.nx(), c.utt.dim());
    for (((o, x), y), z) in out
        .as_mut_slice()
        .iter_mut()
        .zip(a.utt.as_slice())
        .zip(b.utt.as_slice())
        .zip(c.utt.as_slice())
    {
        *o = wa * x + wb * y + wc * z;
    }
    out
}

/// `Z^a u` at the current level of `state`.
pub fn apply_null_derivative(state: &SimState, a: MultiIndex) -> Result<Field> {
    NullJet::new(state, a.order())?.null(a)
}

/// Scalar samples `w(t_j, x_i)` on a uniform spatial grid at increasing times.
#[derive(Debug, Clone, PartialEq)]
pub struct SpacetimeSamples {
    x_min: f64,
    h: f64,
    nx: usize,
    times: Vec<f64>,
    rows: Vec<Vec<f64>>,
}

impl SpacetimeSamples {
    pub fn new(x_min: f64, h: f64, nx: usize) -> Self {
        SpacetimeSamples {
            x_min,
            h,
            nx,
            times: Vec::new(),
            rows: Vec::new(),
        }
    }

    /// Samples `w` at the given times on `nx` nodes starting at `x_min`.
    pub fn from_fn(x_min: f64, h: f64, nx: usize, times: &[f64], w: impl Fn(f64, f64) -> f64) -> Self {
        let mut s = Self::new(x_min, h, nx);
        for &t in times {
            let row = (0..nx).map(|i| w(t, x_min + i as f64 * h)).collect();
            s.push(t, row).expect("times are increasing");
        }
        s
    }

    pub fn push(&mut self, t: f64, row: Vec<f64>) -> Result<()> {
        if row.len() != self.nx {
            return Err(Error::InvalidArgument("row length does not match the grid"));
        }
        if self.times.last().is_some_and(|&last| !(t > last)) {
            return Err(Error::InvalidArgument("sample times must increase"));
        }
        self.times.push(t);
        self.rows.push(row);
        Ok(())
    }

    pub fn x_max(&self) -> f64 {
        self.x_min + (self.nx - 1) as f64 * self.h
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    fn value(&self, row: &[f64], x: f64) -> Result<f64> {
        crate::quadrature::linear_uniform(self.x_min, self.h, row, x)
            .ok_or(Error::RegionOutsideDomain("point off the spatial grid"))
    }

    /// `int_{x_min}^{x_hi} w dx` on one row, with a partial last cell.
    fn slice_to(&self, row: &[f64], x_hi: f64) -> Result<f64> {
        if x_hi > self.x_max() + 1e-9 * self.h {
            return Err(Error::RegionOutsideDomain("slice extends past the right edge"));
        }
        if x_hi <= self.x_min {
            return Ok(0.0);
        }
        let s = (x_hi - self.x_min) / self.h;
        let full = (s + 1e-9).floor() as usize;
        let full = full.min(self.nx - 1);
        let mut acc = trapezoid(&row[..=full], self.h);
        let rest = x_hi - (self.x_min + full as f64 * self.h);
        if rest > 1e-12 * self.h {
            acc += 0.5 * rest * (row[full] + self.value(row, x_hi)?);
        }
        Ok(acc)
    }

    /// Stored times in `[0, t0]`, with `t0` appended by linear interpolation
    /// in time when it is not stored.
    fn rows_until(&self, t0: f64) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
        let tol = 1e-9 * (1.0 + t0.abs());
        let (Some(&first), Some(&last)) = (self.times.first(), self.times.last()) else {
            return Err(Error::RegionOutsideDomain("no samples"));
        };
        if first > tol || last < t0 - tol {
            return Err(Error::RegionOutsideDomain("samples do not cover [0, t0]"));
        }
        let mut ts = Vec::new();
        let mut rows = Vec::new();
        for (t, row) in self.times.iter().zip(&self.rows) {
            if *t <= t0 + tol {
                ts.push(*t);
                rows.push(row.clone());
            }
        }
        let last_t = *ts.last().expect("first sample lies at 0");
        if last_t < t0 - tol {
            let j = ts.len();
            let (ta, tb) = (self.times[j - 1], self.times[j]);
            let s = (t0 - ta) / (tb - ta);
            let row = self.rows[j - 1]
                .iter()
                .zip(&self.rows[j])
                .map(|(a, b)| a * (1.0 - s) + b * s)
                .collect();
            ts.push(t0);
            rows.push(row);
        }
        Ok((ts, rows))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegionKind {
    /// `C^-`: `0 <= t <= t0`, `x = 2 xi0 - t`.
    SegmentC,
    /// `Sigma^-`: `t = t0`, `x <= 2 xi0 - t0`.
    SliceSigmaMinus,
    /// `S^-`: `0 <= t <= t0`, `x <= 2 xi0 - t`.
    RegionSMinus,
    /// `Sigma`: the full slice `t = t0`.
    SliceSigma,
    /// `S`: the full strip `0 <= t <= t0`.
    StripS,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionSpec {
    pub kind: RegionKind,
    pub t0: f64,
    /// Ignored by [`RegionKind::SliceSigma`] and [`RegionKind::StripS`].
    pub xi0: f64,
}

impl RegionSpec {
    pub fn new(kind: RegionKind, t0: f64, xi0: f64) -> Self {
        RegionSpec { kind, t0, xi0 }
    }
}

/// Integral of `w` over a region. Segment integrals carry the Euclidean
/// length element, so `w = 1` on `C^-` gives `sqrt(2) t0`. Outside the
/// sampled domain `w` is taken to vanish on the left, and regions reaching
/// past the right edge are rejected.
pub fn integrate_region(w: &SpacetimeSamples, r: RegionSpec) -> Result<f64> {
    if !(r.t0 >= 0.0) {
        return Err(Error::InvalidArgument("t0 must be nonnegative"));
    }
    let (ts, rows) = w.rows_until(r.t0)?;
    match r.kind {
        RegionKind::SegmentC => {
            let mut vals = Vec::with_capacity(ts.len());
            for (t, row) in ts.iter().zip(&rows) {
                let x = 2.0 * r.xi0 - t;
                if x < w.x_min - 1e-9 * w.h || x > w.x_max() + 1e-9 * w.h {
                    return Err(Error::RegionOutsideDomain("segment leaves the spatial grid"));
                }
                vals.push(w.value(row, x)?);
            }
            Ok(SQRT_2 * trapezoid_xy(&ts, &vals))
        }
        RegionKind::SliceSigmaMinus => {
            let row = rows.last().expect("rows cover t0");
            w.slice_to(row, 2.0 * r.xi0 - r.t0)
        }
        RegionKind::SliceSigma => Ok(trapezoid(rows.last().expect("rows cover t0"), w.h)),
        RegionKind::RegionSMinus => {
            let mut vals = Vec::with_capacity(ts.len());
            for (t, row) in ts.iter().zip(&rows) {
                vals.push(w.slice_to(row, 2.0 * r.xi0 - t)?);
            }
            Ok(trapezoid_xy(&ts, &vals))
        }
        RegionKind::StripS => {
            let vals: Vec<f64> = rows.iter().map(|row| trapezoid(row, w.h)).collect();
            Ok(trapezoid_xy(&ts, &vals))
        }
    }
}

/// `|int_{S^-} w dx dt - sqrt(2) int^{xi0} (int_{C^-_{t0, xi}} w) dxi|`.
///
/// The outer integral starts at the first `xi` whose segment lies inside
/// the grid and uses steps of `h / 2`, so that on a grid with `dt = h` every
/// segment passes through nodes.
pub fn fubini_residual(w: &SpacetimeSamples, t0: f64, xi0: f64) -> Result<f64> {
    let lhs = integrate_region(w, RegionSpec::new(RegionKind::RegionSMinus, t0, xi0))?;
    let xi_start = 0.5 * (w.x_min + t0);
    if xi0 <= xi_start {
        return Ok(lhs.abs());
    }
    let step = 0.5 * w.h;
    let count = ((xi0 - xi_start) / step + 1e-9).floor() as usize;
    let mut xis: Vec<f64> = (0..=count).map(|k| xi_start + k as f64 * step).collect();
    if xi0 - xis[count] > 1e-9 * step {
        xis.push(xi0);
    }
    let mut segs = Vec::with_capacity(xis.len());
    for &xi in &xis {
        segs.push(integrate_region(w, RegionSpec::new(RegionKind::SegmentC, t0, xi))?);
    }
    Ok((lhs - SQRT_2 * trapezoid_xy(&xis, &segs)).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expansion_matches_hand_formulas() {
        assert_eq!(MultiIndex::new(1, 1).cartesian_expansion(), vec![1.0, 0.0, -1.0]);
        assert_eq!(MultiIndex::new(3, 0).cartesian_expansion(), vec![1.0, 3.0, 3.0, 1.0]);
        assert_eq!(MultiIndex::new(2, 1).cartesian_expansion(), vec![1.0, 1.0, -1.0, -1.0]);
        assert_eq!(MultiIndex::new(0, 3).cartesian_expansion(), vec![1.0, -3.0, 3.0, -1.0]);
    }

    #[test]
    fn null_examples() {
        assert_eq!(to_null(1.0, 1.0), NullPoint { xi: 1.0, eta: 0.0 });
        assert_eq!(to_null(2.0, -2.0), NullPoint { xi: 0.0, eta: 2.0 });
        assert_eq!(from_null(NullPoint { xi: 3.0, eta: 1.0 }), (4.0, 2.0));
    }

    #[test]
    fn unit_weight_regions() {
        let s = SpacetimeSamples::from_fn(-5.0, 0.1, 101, &[0.0, 0.5, 1.0], |_, _| 1.0);
        let slice = integrate_region(&s, RegionSpec::new(RegionKind::SliceSigma, 1.0, 0.0)).unwrap();
        assert!((slice - 10.0).abs() < 1e-12);
        let seg = integrate_region(&s, RegionSpec::new(RegionKind::SegmentC, 1.0, 0.5)).unwrap();
        assert!((seg - SQRT_2).abs() < 1e-12);
    }
}
