//! Uniform spatial grids, vector-valued fields, and the time-level history
//! carried by a simulation.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
// Unused when std is linked, whose inherent float methods take precedence.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Default Courant factor.
pub const DEFAULT_CFL: f64 = 0.4;
/// Number of time levels kept in a [`SimState`].
pub const HISTORY_LEVELS: usize = 3;

/// How stencils treat nodes beyond the ends of the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Boundary {
    /// Fields are extended by zero; the solver requires the outermost
    /// nodes to stay quiet.
    #[default]
    Quiet,
    /// Fields wrap around. Node `nx` coincides with node `0`, so the
    /// spacing is `(x_max - x_min) / nx`.
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub dt: f64,
    pub t_end: f64,
    pub cfl: f64,
    pub boundary: Boundary,
}

impl GridSpec {
    /// Grid with quiet boundaries and the largest step `dt <= cfl * h`
    /// that divides `t_end` evenly.
    pub fn new(x_min: f64, x_max: f64, nx: usize, t_end: f64, cfl: f64) -> Result<Self> {
        Self::with_boundary(x_min, x_max, nx, t_end, cfl, Boundary::Quiet)
    }

    pub fn periodic(x_min: f64, x_max: f64, nx: usize, t_end: f64, cfl: f64) -> Result<Self> {
        Self::with_boundary(x_min, x_max, nx, t_end, cfl, Boundary::Periodic)
    }

    pub fn with_boundary(
        x_min: f64,
        x_max: f64,
        nx: usize,
        t_end: f64,
        cfl: f64,
        boundary: Boundary,
    ) -> Result<Self> {
        let mut grid = GridSpec {
            x_min,
            x_max,
            nx,
            dt: 0.0,
            t_end,
            cfl,
            boundary,
        };
        if !(t_end > 0.0) || !(cfl > 0.0) || nx < 2 || !(x_max > x_min) {
            return Err(Error::InvalidGrid("need x_max > x_min, nx >= 2, t_end > 0, cfl > 0"));
        }
        let steps = (t_end / (cfl * grid.spacing())).ceil().max(1.0) as usize;
        grid.dt = t_end / steps as f64;
        grid.validate()?;
        Ok(grid)
    }

    /// Same grid with exactly `steps` time steps to `t_end`.
    pub fn with_steps(mut self, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(Error::InvalidGrid("zero time steps"));
        }
        self.dt = self.t_end / steps as f64;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < 16 {
            return Err(Error::InvalidGrid("nx must be at least 16"));
        }
        if !(self.t_end > 0.0) {
            return Err(Error::InvalidGrid("t_end must be positive"));
        }
        if !(self.dt > 0.0) || self.dt > self.cfl * self.spacing() * (1.0 + 1e-12) {
            return Err(Error::InvalidGrid("dt must satisfy 0 < dt <= cfl * h"));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        match self.boundary {
            Boundary::Quiet => (self.x_max - self.x_min) / (self.nx - 1) as f64,
            Boundary::Periodic => (self.x_max - self.x_min) / self.nx as f64,
        }
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.nx).map(|i| self.x(i)).collect()
    }

    /// Number of steps of size `dt` that reach `t_end`.
    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }
}

/// A field of `n`-vectors sampled on the nodes of a grid, stored node-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    dim: usize,
    data: Vec<f64>,
}

impl Field {
    pub fn zeros(nx: usize, dim: usize) -> Self {
        Field {
            dim,
            data: vec![0.0; nx * dim],
        }
    }

    pub fn from_vec(dim: usize, data: Vec<f64>) -> Self {
        assert!(dim > 0 && data.len().is_multiple_of(dim), "field length must be a multiple of dim");
        Field { dim, data }
    }

    /// Samples `f(x, out)` at every grid node.
    pub fn sample(grid: &GridSpec, dim: usize, mut f: impl FnMut(f64, &mut [f64])) -> Self {
        let mut field = Field::zeros(grid.nx, dim);
        for i in 0..grid.nx {
            f(grid.x(i), field.node_mut(i));
        }
        field
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn nx(&self) -> usize {
        self.data.len() / self.dim
    }

    #[inline]
    pub fn node(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    #[inline]
    pub fn node_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.dim..(i + 1) * self.dim]
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Component `k` at every node.
    pub fn component(&self, k: usize) -> Vec<f64> {
        self.data.iter().skip(k).step_by(self.dim).copied().collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Euclidean norm of the vector at node `i`.
    pub fn norm_at(&self, i: usize) -> f64 {
        self.node(i).iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `self + a * other`, elementwise.
    pub fn plus_scaled(&self, a: f64, other: &Field) -> Field {
        debug_assert_eq!(self.data.len(), other.data.len());
        Field {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(x, y)| x + a * y)
                .collect(),
        }
    }

    pub fn scale(&mut self, a: f64) {
        self.data.iter_mut().for_each(|v| *v *= a);
    }
}

/// One stored time level: the perturbation, its time derivative, and the
/// second time derivative given by the evolution equation.
#[derive(Debug, Clone, PartialEq)]
pub struct Level {
    pub t: f64,
    pub u: Field,
    pub w: Field,
    pub utt: Field,
}

/// Simulation state: the grid and up to [`HISTORY_LEVELS`] time levels,
/// oldest first. The last level is the current one.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    grid: GridSpec,
    levels: VecDeque<Level>,
}

impl SimState {
    /// Builds a state from explicitly supplied levels (oldest first).
    pub fn from_levels(grid: GridSpec, levels: Vec<Level>) -> Result<Self> {
        if levels.is_empty() || levels.len() > HISTORY_LEVELS {
            return Err(Error::InvalidArgument("a state holds between 1 and 3 levels"));
        }
        let dim = levels[0].u.dim();
        for pair in levels.windows(2) {
            if !(pair[1].t > pair[0].t) {
                return Err(Error::InvalidArgument("level times must increase"));
            }
        }
        for level in &levels {
            for f in [&level.u, &level.w, &level.utt] {
                if f.nx() != grid.nx || f.dim() != dim {
                    return Err(Error::InvalidArgument("level field shape does not match grid"));
                }
            }
        }
        Ok(SimState {
            grid,
            levels: levels.into(),
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.current().u.dim()
    }

    pub fn current(&self) -> &Level {
        self.levels.back().expect("state always holds a level")
    }

    pub fn t(&self) -> f64 {
        self.current().t
    }

    pub fn levels(&self) -> impl ExactSizeIterator<Item = &Level> + DoubleEndedIterator {
        self.levels.iter()
    }

    pub fn history_len(&self) -> usize {
        self.levels.len()
    }

    /// Appends a new current level, dropping the oldest beyond the history depth.
    pub fn push(&mut self, level: Level) {
        debug_assert!(level.t > self.t());
        if self.levels.len() == HISTORY_LEVELS {
            self.levels.pop_front();
        }
        self.levels.push_back(level);
    }

    /// Largest `|u|` or `|w|` among the `width` outermost nodes on each side.
    pub fn edge_activity(&self, width: usize) -> f64 {
        let level = self.current();
        edge_activity(&level.u, width).max(edge_activity(&level.w, width))
    }
}

/// Largest absolute component among the `width` outermost nodes on each side.
pub fn edge_activity(field: &Field, width: usize) -> f64 {
    let nx = field.nx();
    let width = width.min(nx);
    (0..width)
        .chain(nx - width..nx)
        .flat_map(|i| field.node(i).iter())
        .fold(0.0, |m, v| m.max(v.abs()))
}
