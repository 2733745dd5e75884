//! Cauchy data `u(0) = u0`, `u_t(0) = u1` for the perturbation.

use alloc::string::ToString;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

// Unused when std is linked, whose inherent float methods take precedence.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::grid::{Field, GridSpec};

type PointFn = Arc<dyn Fn(f64, &mut [f64]) + Send + Sync>;

pub const DATA_SHAPES: &[&str] = &["zero", "gaussian", "compact-bump", "cosine"];

/// How `u1` is derived from `u0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Motion {
    /// `u1 = 0`.
    #[default]
    Still,
    /// `u1 = -u0'`, so that `u = u0(x - t)` to leading order.
    Right,
    /// `u1 = u0'`, so that `u = u0(x + t)` to leading order.
    Left,
}

/// Scalar shape `s(x)` and its derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DataShape {
    Zero,
    /// `exp(-((x - center) / width)^2)`.
    Gaussian { center: f64, width: f64 },
    /// `(1 - z^2)^5` for `|z| < 1`, `z = (x - center) / half_width`.
    CompactBump { center: f64, half_width: f64 },
    /// `cos(k x)`.
    Cosine { k: f64 },
}

impl DataShape {
    pub fn from_name(name: &str, center: f64, width: f64) -> Result<Self> {
        Ok(match name {
            "zero" => DataShape::Zero,
            "gaussian" => DataShape::Gaussian { center, width },
            "compact-bump" => DataShape::CompactBump {
                center,
                half_width: width,
            },
            "cosine" => DataShape::Cosine { k: width },
            _ => {
                return Err(Error::UnknownName {
                    catalog: "data shape",
                    name: name.to_string(),
                })
            }
        })
    }

    /// `(s(x), s'(x))`.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        match *self {
            DataShape::Zero => (0.0, 0.0),
            DataShape::Gaussian { center, width } => {
                let z = (x - center) / width;
                let g = libm::exp(-z * z);
                (g, -2.0 * z * g / width)
            }
            DataShape::CompactBump { center, half_width } => {
                let z = (x - center) / half_width;
                if z.abs() >= 1.0 {
                    return (0.0, 0.0);
                }
                let q = 1.0 - z * z;
                let q4 = q * q * q * q;
                (q4 * q, -10.0 * z * q4 / half_width)
            }
            DataShape::Cosine { k } => (libm::cos(k * x), -k * libm::sin(k * x)),
        }
    }

    /// Interval outside which the shape vanishes, if any.
    pub fn support(&self) -> Option<(f64, f64)> {
        match *self {
            DataShape::Zero => Some((0.0, 0.0)),
            DataShape::CompactBump { center, half_width } => {
                Some((center - half_width, center + half_width))
            }
            _ => None,
        }
    }
}

/// Initial data as maps `R -> R^n`, together with `u0'`.
#[derive(Clone)]
pub struct InitialData {
    dim: usize,
    u0: PointFn,
    u0_x: PointFn,
    u1: PointFn,
    support: Option<(f64, f64)>,
}

impl core::fmt::Debug for InitialData {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("InitialData")
            .field("dim", &self.dim)
            .field("support", &self.support)
            .finish_non_exhaustive()
    }
}

impl InitialData {
    /// `u0 = amplitude s(x) direction`, `u1` by `motion`.
    pub fn from_shape(dim: usize, shape: DataShape, amplitude: f64, motion: Motion) -> Self {
        Self::from_shape_along(vec![1.0; dim], shape, amplitude, motion)
    }

    pub fn from_shape_along(direction: Vec<f64>, shape: DataShape, amplitude: f64, motion: Motion) -> Self {
        let dim = direction.len();
        let dir: Arc<[f64]> = direction.into();
        let (d0, d1, d2) = (dir.clone(), dir.clone(), dir);
        let sign = match motion {
            Motion::Still => 0.0,
            Motion::Right => -1.0,
            Motion::Left => 1.0,
        };
        InitialData {
            dim,
            u0: Arc::new(move |x, out| {
                let s = amplitude * shape.eval(x).0;
                out.iter_mut().zip(d0.iter()).for_each(|(o, d)| *o = s * d);
            }),
            u0_x: Arc::new(move |x, out| {
                let s = amplitude * shape.eval(x).1;
                out.iter_mut().zip(d1.iter()).for_each(|(o, d)| *o = s * d);
            }),
            u1: Arc::new(move |x, out| {
                let s = sign * amplitude * shape.eval(x).1;
                out.iter_mut().zip(d2.iter()).for_each(|(o, d)| *o = s * d);
            }),
            support: shape.support(),
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self::from_shape(dim, DataShape::Zero, 0.0, Motion::Still)
    }

    pub fn custom(
        dim: usize,
        u0: impl Fn(f64, &mut [f64]) + Send + Sync + 'static,
        u0_x: impl Fn(f64, &mut [f64]) + Send + Sync + 'static,
        u1: impl Fn(f64, &mut [f64]) + Send + Sync + 'static,
    ) -> Self {
        InitialData {
            dim,
            u0: Arc::new(u0),
            u0_x: Arc::new(u0_x),
            u1: Arc::new(u1),
            support: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn support(&self) -> Option<(f64, f64)> {
        self.support
    }

    pub fn u0(&self, x: f64, out: &mut [f64]) {
        (self.u0)(x, out)
    }

    pub fn u0_x(&self, x: f64, out: &mut [f64]) {
        (self.u0_x)(x, out)
    }

    pub fn u1(&self, x: f64, out: &mut [f64]) {
        (self.u1)(x, out)
    }

    /// The same data multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        let scale = |f: PointFn| -> PointFn {
            Arc::new(move |x, out: &mut [f64]| {
                f(x, out);
                out.iter_mut().for_each(|v| *v *= s);
            })
        };
        InitialData {
            dim: self.dim,
            u0: scale(self.u0.clone()),
            u0_x: scale(self.u0_x.clone()),
            u1: scale(self.u1.clone()),
            support: self.support,
        }
    }

    /// `(u0, u1)` sampled on the grid.
    pub fn sample(&self, grid: &GridSpec) -> (Field, Field) {
        (
            Field::sample(grid, self.dim, |x, o| self.u0(x, o)),
            Field::sample(grid, self.dim, |x, o| self.u1(x, o)),
        )
    }
}
