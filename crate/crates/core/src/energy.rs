//! Weighted energies of the perturbation and the weight functions and
//! integral inequalities that accompany them.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, AddAssign, Mul};
// Unused when std is linked, whose inherent float methods take precedence.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::geometry::{to_null, MultiIndex, NullJet};
use crate::grid::{Boundary, Field, GridSpec, SimState};
use crate::profile::bracket;
use crate::quadrature::{adaptive_simpson, trapezoid};
use crate::stencil;

const QUAD_TOL: f64 = 1e-15;

/// Boundary nodes checked by [`initial_smallness`].
pub const SUPPORT_CHECK_NODES: usize = 4;
/// Largest data value tolerated on those nodes.
pub const SUPPORT_TOL: f64 = 1e-10;

/// `phi(x) = <x>^{2 + 2 delta}`.
pub fn phi(delta: f64, x: f64) -> f64 {
    bracket(x).powf(2.0 + 2.0 * delta)
}

pub fn phi_prime(delta: f64, x: f64) -> f64 {
    (2.0 + 2.0 * delta) * x * bracket(x).powf(2.0 * delta)
}

fn psi_integrand(delta: f64, x: f64) -> f64 {
    bracket(x).powf(-1.0 - delta)
}

/// `int_{-inf}^{x} <r>^{-1-delta} dr`.
///
/// Beyond `|r| = 1` the substitution `tau = |r|^{-delta}` turns each tail into
/// the bounded integrand `(1 + tau^{2/delta})^{-(1+delta)/2} / delta` on
/// `[0, |x|^{-delta}]`.
pub fn psi_exponent(delta: f64, x: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) && delta != 1.0 {
        return Err(Error::InvalidArgument("delta must lie in (0, 1]"));
    }
    if x == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    let tail = |upper: f64| {
        let p = 2.0 / delta;
        let e = -(1.0 + delta) / 2.0;
        adaptive_simpson(&|tau: f64| (1.0 + tau.powf(p)).powf(e) / delta, 0.0, upper, QUAD_TOL)
    };
    if x <= -1.0 {
        return tail((-x).powf(-delta));
    }
    if x > 1.0 {
        // The integrand is even: the right tail mirrors the left one.
        let half = tail(1.0)? + adaptive_simpson(&|r| psi_integrand(delta, r), -1.0, 0.0, QUAD_TOL)?;
        return Ok(2.0 * half - tail(x.powf(-delta))?);
    }
    let body = adaptive_simpson(&|r| psi_integrand(delta, r), -1.0, x, QUAD_TOL)?;
    Ok(tail(1.0)? + body)
}

/// `psi(x) = exp(-int_{-inf}^{x} <r>^{-1-delta} dr)`, by direct quadrature.
pub fn eval_psi(delta: f64, x: f64) -> Result<f64> {
    Ok(libm::exp(-psi_exponent(delta, x)?))
}

/// The weights `phi`, `psi` for one `delta`, with `psi` cached on a quintic
/// Hermite spline.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSet {
    pub delta: f64,
    /// `psi >= 1 / c_lower` everywhere.
    pub c_lower: f64,
    x_lo: f64,
    step: f64,
    psi: Vec<f64>,
}

impl WeightSet {
    pub const DEFAULT_RANGE: f64 = 200.0;
    pub const DEFAULT_STEP: f64 = 0.01;

    pub fn new(delta: f64) -> Result<Self> {
        Self::with_range(delta, Self::DEFAULT_RANGE, Self::DEFAULT_STEP)
    }

    /// Spline knots cover `[-range, range]`; `psi` is evaluated directly
    /// outside.
    pub fn with_range(delta: f64, range: f64, step: f64) -> Result<Self> {
        if !(range > 0.0 && step > 0.0) {
            return Err(Error::InvalidArgument("spline range and step must be positive"));
        }
        let n = (2.0 * range / step).ceil() as usize;
        let step = 2.0 * range / n as f64;
        let x_lo = -range;
        let mut exponent = psi_exponent(delta, x_lo)?;
        let mut psi = Vec::with_capacity(n + 1);
        psi.push(libm::exp(-exponent));
        for k in 0..n {
            let a = x_lo + k as f64 * step;
            exponent += adaptive_simpson(&|r| psi_integrand(delta, r), a, a + step, QUAD_TOL)?;
            psi.push(libm::exp(-exponent));
        }
        // The integrand is even, so the full-line integral is twice the half-line one.
        let c_lower = libm::exp(2.0 * psi_exponent(delta, 0.0)?);
        Ok(WeightSet {
            delta,
            c_lower,
            x_lo,
            step,
            psi,
        })
    }

    fn psi_derivatives(&self, x: f64, psi: f64) -> (f64, f64) {
        let d = self.delta;
        let b = bracket(x);
        let d1 = -psi * b.powf(-1.0 - d);
        let d2 = psi * (b.powf(-2.0 - 2.0 * d) + (1.0 + d) * x * b.powf(-3.0 - d));
        (d1, d2)
    }

    pub fn phi(&self, x: f64) -> f64 {
        phi(self.delta, x)
    }

    pub fn phi_prime(&self, x: f64) -> f64 {
        phi_prime(self.delta, x)
    }

    /// `psi(x)`; spline inside the cached range, quadrature outside.
    pub fn psi(&self, x: f64) -> f64 {
        self.psi_with_prime(x).0
    }

    /// Derivative of the cached interpolant, or the exact `psi'` outside the
    /// cached range.
    pub fn psi_prime(&self, x: f64) -> f64 {
        self.psi_with_prime(x).1
    }

    fn psi_with_prime(&self, x: f64) -> (f64, f64) {
        let s = (x - self.x_lo) / self.step;
        let last = self.psi.len() - 1;
        if !(s >= 0.0 && s <= last as f64) {
            let p = eval_psi(self.delta, x).unwrap_or(f64::NAN);
            return (p, self.psi_derivatives(x, p).0);
        }
        let k = (s.floor() as usize).min(last - 1);
        let (x0, x1) = (self.x_lo + k as f64 * self.step, self.x_lo + (k + 1) as f64 * self.step);
        let (p0, p1) = (self.psi[k], self.psi[k + 1]);
        let (d0, e0) = self.psi_derivatives(x0, p0);
        let (d1, e1) = self.psi_derivatives(x1, p1);
        quintic_hermite(self.step, x - x0, [p0, d0, e0], [p1, d1, e1])
    }
}

/// Quintic Hermite interpolant on `[0, h]` matching value, first and second
/// derivative at both ends; returns its value and derivative at `s`.
fn quintic_hermite(h: f64, s: f64, left: [f64; 3], right: [f64; 3]) -> (f64, f64) {
    let t = s / h;
    let (t2, t3) = (t * t, t * t * t);
    let (t4, t5) = (t3 * t, t3 * t2);
    let basis = [
        1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5,
        t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5,
        0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5),
        10.0 * t3 - 15.0 * t4 + 6.0 * t5,
        -4.0 * t3 + 7.0 * t4 - 3.0 * t5,
        0.5 * (t3 - 2.0 * t4 + t5),
    ];
    let slopes = [
        -30.0 * t2 + 60.0 * t3 - 30.0 * t4,
        1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4,
        0.5 * (2.0 * t - 9.0 * t2 + 12.0 * t3 - 5.0 * t4),
        30.0 * t2 - 60.0 * t3 + 30.0 * t4,
        -12.0 * t2 + 28.0 * t3 - 15.0 * t4,
        0.5 * (3.0 * t2 - 8.0 * t3 + 5.0 * t4),
    ];
    let coeffs = [left[0], h * left[1], h * h * left[2], right[0], h * right[1], h * h * right[2]];
    let value = basis.iter().zip(&coeffs).map(|(b, c)| b * c).sum();
    let slope = slopes.iter().zip(&coeffs).map(|(b, c)| b * c).sum::<f64>() / h;
    (value, slope)
}

/// Which null coordinate weights a term, and which derivative it carries:
/// `Eta` terms are `<eta>^{1+delta} Z^a u_eta`, `Xi` terms
/// `<xi>^{1+delta} Z^a u_xi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Eta,
    Xi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Component {
    Ebar1,
    Ehat1,
    Ebar2,
    Ehat2,
    Ebar3,
    Ehat3,
    Etilde3,
}

impl Component {
    pub const ALL: [Component; 7] = [
        Component::Ebar1,
        Component::Ehat1,
        Component::Ebar2,
        Component::Ehat2,
        Component::Ebar3,
        Component::Ehat3,
        Component::Etilde3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Component::Ebar1 => "Ebar1",
            Component::Ehat1 => "Ehat1",
            Component::Ebar2 => "Ebar2",
            Component::Ehat2 => "Ehat2",
            Component::Ebar3 => "Ebar3",
            Component::Ehat3 => "Ehat3",
            Component::Etilde3 => "Etilde3",
        }
    }

    /// Derivative order of the fields in this component.
    pub fn order(self) -> usize {
        match self {
            Component::Ebar1 | Component::Ehat1 => 1,
            Component::Ebar2 | Component::Ehat2 => 2,
            _ => 3,
        }
    }

    /// Terms `(a, family)` summed in this component.
    pub fn index_set(self) -> &'static [(MultiIndex, Family)] {
        use Family::{Eta, Xi};
        const O: MultiIndex = MultiIndex::new(0, 0);
        const X: MultiIndex = MultiIndex::new(1, 0);
        const E: MultiIndex = MultiIndex::new(0, 1);
        const XX: MultiIndex = MultiIndex::new(2, 0);
        const XE: MultiIndex = MultiIndex::new(1, 1);
        const EE: MultiIndex = MultiIndex::new(0, 2);
        match self {
            Component::Ebar1 => &[(O, Eta)],
            Component::Ehat1 => &[(O, Xi)],
            Component::Ebar2 => &[(X, Eta), (E, Eta)],
            Component::Ehat2 => &[(X, Xi), (E, Xi)],
            Component::Ebar3 => &[(XE, Eta), (EE, Eta)],
            Component::Ehat3 => &[(XX, Xi), (XE, Xi)],
            Component::Etilde3 => &[(XX, Eta), (EE, Xi)],
        }
    }
}

/// The seven energy components, in [`Component::ALL`] order.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EnergyComponents(pub [f64; 7]);

impl EnergyComponents {
    pub fn get(&self, c: Component) -> f64 {
        self.0[c as usize]
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    /// `E_k` for `k` in 1..=3.
    pub fn order_total(&self, k: usize) -> f64 {
        Component::ALL
            .iter()
            .filter(|c| c.order() == k)
            .map(|c| self.get(*c))
            .sum()
    }
}

impl Add for EnergyComponents {
    type Output = Self;

    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl AddAssign for EnergyComponents {
    fn add_assign(&mut self, rhs: Self) {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a += b;
        }
    }
}

impl Mul<f64> for EnergyComponents {
    type Output = Self;

    fn mul(mut self, s: f64) -> Self {
        self.0.iter_mut().for_each(|v| *v *= s);
        self
    }
}

/// Slice energies and accumulated spacetime energies at one time.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EnergyReport {
    pub t: f64,
    pub slice: EnergyComponents,
    pub spacetime: EnergyComponents,
}

impl EnergyReport {
    pub fn e_total(&self) -> f64 {
        self.slice.total()
    }

    pub fn se_total(&self) -> f64 {
        self.spacetime.total()
    }
}

/// Slice energies and the spacetime integrands on the current level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceDensities {
    pub t: f64,
    pub slice: EnergyComponents,
    /// Slice integrals of the spacetime energy densities.
    pub spacetime_rate: EnergyComponents,
}

/// Evaluates every component up to derivative order `max_order` (1 to 3);
/// higher components are zero.
pub fn slice_densities(state: &SimState, delta: f64, max_order: usize) -> Result<SliceDensities> {
    if !(1..=3).contains(&max_order) {
        return Err(Error::InvalidArgument("energy order must be 1, 2 or 3"));
    }
    let jet = NullJet::new(state, max_order)?;
    let grid = state.grid();
    let t = state.t();
    let nx = grid.nx;
    let p = 1.0 + delta;
    let mut w_eta = Vec::with_capacity(nx);
    let mut w_xi = Vec::with_capacity(nx);
    for i in 0..nx {
        let q = to_null(t, grid.x(i));
        w_eta.push(bracket(q.eta));
        w_xi.push(bracket(q.xi));
    }
    let mut slice = EnergyComponents::default();
    let mut rate = EnergyComponents::default();
    let mut dens = vec![0.0; nx];
    let mut sdens = vec![0.0; nx];
    let mut cache: Vec<(MultiIndex, Field)> = Vec::new();
    for comp in Component::ALL {
        if comp.order() > max_order {
            continue;
        }
        let (mut e, mut se) = (0.0, 0.0);
        for &(a, family) in comp.index_set() {
            let full = match family {
                Family::Eta => a.then_eta(),
                Family::Xi => a.then_xi(),
            };
            let field = match cache.iter().find(|(b, _)| *b == full) {
                Some((_, f)) => f,
                None => {
                    cache.push((full, jet.null(full)?));
                    &cache.last().expect("just pushed").1
                }
            };
            let (own, other) = match family {
                Family::Eta => (&w_eta, &w_xi),
                Family::Xi => (&w_xi, &w_eta),
            };
            for i in 0..nx {
                let sq: f64 = field.node(i).iter().map(|v| v * v).sum();
                let weighted = own[i].powf(2.0 * p) * sq;
                dens[i] = weighted;
                sdens[i] = other[i].powf(-p) * weighted;
            }
            e += integrate_slice(&dens, grid);
            se += integrate_slice(&sdens, grid);
        }
        slice.0[comp as usize] = e;
        rate.0[comp as usize] = se;
    }
    Ok(SliceDensities {
        t,
        slice,
        spacetime_rate: rate,
    })
}

/// Trapezoid on quiet grids; on periodic grids the closing cell is included.
fn integrate_slice(values: &[f64], grid: &GridSpec) -> f64 {
    let h = grid.spacing();
    match grid.boundary {
        Boundary::Quiet => trapezoid(values, h),
        Boundary::Periodic => h * values.iter().sum::<f64>(),
    }
}

/// Slice energy components of the current level.
pub fn slice_energy(state: &SimState, delta: f64, max_order: usize) -> Result<EnergyComponents> {
    Ok(slice_densities(state, delta, max_order)?.slice)
}

/// Running spacetime energies, advanced by the trapezoid rule in time.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpacetimeAccumulator {
    last: Option<(f64, EnergyComponents)>,
    total: EnergyComponents,
}

impl SpacetimeAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds the trapezoid increment from the previous sample to `(t, rate)`.
    pub fn push(&mut self, t: f64, rate: EnergyComponents) {
        if let Some((t0, r0)) = self.last {
            self.total += (r0 + rate) * (0.5 * (t - t0));
        }
        self.last = Some((t, rate));
    }

    pub fn total(&self) -> EnergyComponents {
        self.total
    }
}

/// Evaluates the current level, advances `acc`, and returns the report.
pub fn accumulate_spacetime(
    acc: &mut SpacetimeAccumulator,
    state: &SimState,
    delta: f64,
    max_order: usize,
) -> Result<EnergyReport> {
    let d = slice_densities(state, delta, max_order)?;
    acc.push(d.t, d.spacetime_rate);
    Ok(EnergyReport {
        t: d.t,
        slice: d.slice,
        spacetime: acc.total(),
    })
}

/// `sum_{l <= l_max} (|<x>^{1+delta} d_x^{l+1} u0| + |<x>^{1+delta} d_x^l u1|)`
/// in `L^2`, with stencil derivatives and trapezoid quadrature.
pub fn initial_smallness(u0: &Field, u1: &Field, delta: f64, l_max: usize, grid: &GridSpec) -> Result<f64> {
    if l_max > 2 {
        return Err(Error::InvalidArgument("l_max must be at most 2"));
    }
    if grid.boundary == Boundary::Quiet {
        for f in [u0, u1] {
            let nx = f.nx();
            let edge = SUPPORT_CHECK_NODES.min(nx);
            for i in (0..edge).chain(nx - edge..nx) {
                let value = f.norm_at(i);
                if !(value <= SUPPORT_TOL) {
                    return Err(Error::SupportViolation { x: grid.x(i), value });
                }
            }
        }
    }
    let h = grid.spacing();
    let weight: Vec<f64> = (0..grid.nx).map(|i| bracket(grid.x(i)).powf(2.0 + 2.0 * delta)).collect();
    let norm = |f: &Field| -> f64 {
        let dens: Vec<f64> = (0..f.nx()).map(|i| weight[i] * f.norm_at(i).powi(2)).collect();
        integrate_slice(&dens, grid).sqrt()
    };
    let mut eps = 0.0;
    for l in 0..=l_max {
        eps += norm(&stencil::derive(u0, l + 1, h, grid.boundary));
        eps += if l == 0 {
            norm(u1)
        } else {
            norm(&stencil::derive(u1, l, h, grid.boundary))
        };
    }
    Ok(eps)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GronwallOutcome {
    pub holds: bool,
    /// Smallest `conclusion_rhs - h` over the grid.
    pub slack: f64,
    pub argmin: usize,
}

/// Tolerance on negative slack for [`GronwallOutcome::holds`].
pub const GRONWALL_TOL: f64 = 1e-9;

/// Checks the integral Gronwall inequality on samples over an increasing
/// grid `xi`, with integrals from the first grid point.
///
/// Both the hypothesis `h <= alpha + int beta h` and the conclusion
/// `h <= alpha + int alpha beta exp(int beta)` use left-endpoint sums, for
/// which the implication holds exactly on every grid.
pub fn gronwall_verify(xi: &[f64], h: &[f64], alpha: &[f64], beta: &[f64]) -> Result<GronwallOutcome> {
    let n = xi.len();
    if n == 0 || h.len() != n || alpha.len() != n || beta.len() != n {
        return Err(Error::InvalidArgument("samples must match the grid length"));
    }
    if xi.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("xi grid must increase"));
    }
    if h.iter().chain(alpha).chain(beta).any(|v| !(*v >= 0.0)) {
        return Err(Error::InvalidArgument("samples must be nonnegative"));
    }
    let dx: Vec<f64> = xi.windows(2).map(|w| w[1] - w[0]).collect();

    let mut running = 0.0;
    for k in 0..n {
        let bound = alpha[k] + running;
        let excess = h[k] - bound;
        if excess > 1e-12 * (1.0 + bound.abs()) {
            return Err(Error::HypothesisViolated { index: k, excess });
        }
        if k + 1 < n {
            running += beta[k] * h[k] * dx[k];
        }
    }

    let mut outcome = GronwallOutcome {
        holds: true,
        slack: f64::INFINITY,
        argmin: 0,
    };
    let mut beta_prefix = vec![0.0; n];
    for k in 1..n {
        beta_prefix[k] = beta_prefix[k - 1] + beta[k - 1] * dx[k - 1];
    }
    for k in 0..n {
        let mut integral = 0.0;
        for j in 0..k {
            let exponent = beta_prefix[k] - beta_prefix[j];
            integral += alpha[j] * beta[j] * libm::exp(exponent) * dx[j];
        }
        let slack = alpha[k] + integral - h[k];
        if slack < outcome.slack {
            outcome.slack = slack;
            outcome.argmin = k;
        }
    }
    outcome.holds = outcome.slack >= -GRONWALL_TOL;
    Ok(outcome)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevCheck {
    /// `|<xi>^{1+delta} u_xi|_inf + |<eta>^{1+delta} u_eta|_inf` over grid nodes.
    pub lhs: f64,
    /// `E_1^{1/2} + E_2^{1/2}`.
    pub rhs: f64,
    /// `lhs / rhs`, or 0 when `rhs` vanishes.
    pub ratio: f64,
}

pub fn sobolev_check(state: &SimState, delta: f64) -> Result<SobolevCheck> {
    let jet = NullJet::new(state, 2)?;
    let u_xi = jet.null(MultiIndex::XI)?;
    let u_eta = jet.null(MultiIndex::ETA)?;
    let grid = state.grid();
    let p = 1.0 + delta;
    let (mut sup_xi, mut sup_eta) = (0.0_f64, 0.0_f64);
    for i in 0..grid.nx {
        let q = to_null(state.t(), grid.x(i));
        sup_xi = sup_xi.max(bracket(q.xi).powf(p) * u_xi.norm_at(i));
        sup_eta = sup_eta.max(bracket(q.eta).powf(p) * u_eta.norm_at(i));
    }
    let e = slice_energy(state, delta, 2)?;
    let lhs = sup_xi + sup_eta;
    let rhs = e.order_total(1).sqrt() + e.order_total(2).sqrt();
    let ratio = if rhs > 0.0 { lhs / rhs } else { 0.0 };
    Ok(SobolevCheck { lhs, rhs, ratio })
}
