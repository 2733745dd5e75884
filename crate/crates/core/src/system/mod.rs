//! Wave systems `v_{xi eta} = A1 v_{xi eta} + A2 v_{eta eta} + A3 v_{xi xi} + F`
//! with coefficients depending on `(rho, theta) = (v_xi, v_eta)`.

mod boost;
mod builtin;
mod hyperbolic;
mod structure;

use alloc::boxed::Box;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

pub use boost::{boost_grid, find_boost, BoostMap, BOOST_LADDER};
pub use builtin::{
    builtin_system, QuasilinearScalar, QuasilinearVector, SemilinearBilinear, SemilinearVector,
    SystemParams, ViolatingSource, SYSTEM_CATALOG,
};
pub use hyperbolic::{cartesian_coefficients, hyperbolicity_margin, CartesianCoefficients, HyperbolicityReport};
pub use structure::{check_structure, ConditionReport, StructureOptions, StructureReport};

/// Structural class of a coefficient set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemKind {
    /// `A1 = A2 = A3 = 0`.
    Semilinear,
    Quasilinear,
}

/// Coefficient maps of a wave system.
///
/// Matrices are written row-major into `out` (length `n * n`); the source
/// term into a vector of length `n`. Implementations must be reentrant.
/// The semilinear defaults write zero matrices.
pub trait CoefficientSet: Send + Sync {
    fn dim(&self) -> usize;

    fn kind(&self) -> SystemKind;

    fn a1(&self, _rho: &[f64], _theta: &[f64], out: &mut [f64]) {
        out.fill(0.0);
    }

    fn a2(&self, _rho: &[f64], _theta: &[f64], out: &mut [f64]) {
        out.fill(0.0);
    }

    fn a3(&self, _rho: &[f64], _theta: &[f64], out: &mut [f64]) {
        out.fill(0.0);
    }

    /// The source term `F(rho, theta)`.
    fn source(&self, rho: &[f64], theta: &[f64], out: &mut [f64]);
}

type MatrixFn = Arc<dyn Fn(&[f64], &[f64], &mut [f64]) + Send + Sync>;

/// Coefficient set assembled from closures; unspecified matrices are zero.
#[derive(Clone)]
pub struct FnSystem {
    dim: usize,
    kind: SystemKind,
    a1: Option<MatrixFn>,
    a2: Option<MatrixFn>,
    a3: Option<MatrixFn>,
    source: MatrixFn,
}

impl FnSystem {
    pub fn semilinear(
        dim: usize,
        source: impl Fn(&[f64], &[f64], &mut [f64]) + Send + Sync + 'static,
    ) -> Self {
        FnSystem {
            dim,
            kind: SystemKind::Semilinear,
            a1: None,
            a2: None,
            a3: None,
            source: Arc::new(source),
        }
    }

    pub fn quasilinear(
        dim: usize,
        source: impl Fn(&[f64], &[f64], &mut [f64]) + Send + Sync + 'static,
    ) -> Self {
        FnSystem {
            kind: SystemKind::Quasilinear,
            ..Self::semilinear(dim, source)
        }
    }

    pub fn with_a1(mut self, f: impl Fn(&[f64], &[f64], &mut [f64]) + Send + Sync + 'static) -> Self {
        self.a1 = Some(Arc::new(f));
        self
    }

    pub fn with_a2(mut self, f: impl Fn(&[f64], &[f64], &mut [f64]) + Send + Sync + 'static) -> Self {
        self.a2 = Some(Arc::new(f));
        self
    }

    pub fn with_a3(mut self, f: impl Fn(&[f64], &[f64], &mut [f64]) + Send + Sync + 'static) -> Self {
        self.a3 = Some(Arc::new(f));
        self
    }

    pub fn boxed(self) -> Box<dyn CoefficientSet> {
        Box::new(self)
    }
}

impl CoefficientSet for FnSystem {
    fn dim(&self) -> usize {
        self.dim
    }

    fn kind(&self) -> SystemKind {
        self.kind
    }

    fn a1(&self, rho: &[f64], theta: &[f64], out: &mut [f64]) {
        match &self.a1 {
            Some(f) => f(rho, theta, out),
            None => out.fill(0.0),
        }
    }

    fn a2(&self, rho: &[f64], theta: &[f64], out: &mut [f64]) {
        match &self.a2 {
            Some(f) => f(rho, theta, out),
            None => out.fill(0.0),
        }
    }

    fn a3(&self, rho: &[f64], theta: &[f64], out: &mut [f64]) {
        match &self.a3 {
            Some(f) => f(rho, theta, out),
            None => out.fill(0.0),
        }
    }

    fn source(&self, rho: &[f64], theta: &[f64], out: &mut [f64]) {
        (self.source)(rho, theta, out)
    }
}

/// All four coefficients evaluated at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSample {
    pub a1: Vec<f64>,
    pub a2: Vec<f64>,
    pub a3: Vec<f64>,
    pub f: Vec<f64>,
}

pub fn evaluate(sys: &dyn CoefficientSet, rho: &[f64], theta: &[f64]) -> CoefficientSample {
    let n = sys.dim();
    let mut s = CoefficientSample {
        a1: vec![0.0; n * n],
        a2: vec![0.0; n * n],
        a3: vec![0.0; n * n],
        f: vec![0.0; n],
    };
    sys.a1(rho, theta, &mut s.a1);
    sys.a2(rho, theta, &mut s.a2);
    sys.a3(rho, theta, &mut s.a3);
    sys.source(rho, theta, &mut s.f);
    s
}
