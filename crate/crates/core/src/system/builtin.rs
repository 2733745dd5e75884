use alloc::string::ToString;
use alloc::sync::Arc;

use super::{CoefficientSet, SystemKind};
use crate::error::{Error, Result};

pub const SYSTEM_CATALOG: &[&str] = &[
    "linear",
    "semilinear-bilinear",
    "semilinear-vector",
    "quasilinear-scalar",
    "quasilinear-vector",
    "violating-F",
];

/// Scalar knobs of the builtin systems. Systems ignore the ones they do not use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub kappa: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        SystemParams {
            alpha: 1.0,
            beta: 1.0,
            gamma: 1.0,
            kappa: 1.0,
        }
    }
}

pub fn builtin_system(name: &str, params: SystemParams) -> Result<Arc<dyn CoefficientSet>> {
    Ok(match name {
        "linear" => Arc::new(SemilinearBilinear { kappa: 0.0 }),
        "semilinear-bilinear" => Arc::new(SemilinearBilinear {
            kappa: params.kappa,
        }),
        "semilinear-vector" => Arc::new(SemilinearVector {
            kappa: params.kappa,
        }),
        "quasilinear-scalar" => Arc::new(QuasilinearScalar {
            alpha: params.alpha,
            beta: params.beta,
            gamma: params.gamma,
            kappa: params.kappa,
        }),
        "quasilinear-vector" => Arc::new(QuasilinearVector { params }),
        "violating-F" => Arc::new(ViolatingSource {
            kappa: params.kappa,
        }),
        _ => {
            return Err(Error::UnknownName {
                catalog: "system",
                name: name.to_string(),
            })
        }
    })
}

/// `n = 1`, `F = kappa rho theta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemilinearBilinear {
    pub kappa: f64,
}

impl CoefficientSet for SemilinearBilinear {
    fn dim(&self) -> usize {
        1
    }

    fn kind(&self) -> SystemKind {
        SystemKind::Semilinear
    }

    fn source(&self, rho: &[f64], theta: &[f64], out: &mut [f64]) {
        out[0] = self.kappa * rho[0] * theta[0];
    }
}

/// `n = 2`, `F_i = kappa sum_jk c_ijk rho_j theta_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemilinearVector {
    pub kappa: f64,
}

impl SemilinearVector {
    pub const C: [[[f64; 2]; 2]; 2] = [[[1.0, 0.5], [0.0, -1.0]], [[0.25, 1.0], [-0.5, 0.0]]];
}

impl CoefficientSet for SemilinearVector {
    fn dim(&self) -> usize {
        2
    }

    fn kind(&self) -> SystemKind {
        SystemKind::Semilinear
    }

    fn source(&self, rho: &[f64], theta: &[f64], out: &mut [f64]) {
        for (i, ci) in Self::C.iter().enumerate() {
            let mut acc = 0.0;
            for (j, cij) in ci.iter().enumerate() {
                for (k, c) in cij.iter().enumerate() {
                    acc += c * rho[j] * theta[k];
                }
            }
            out[i] = self.kappa * acc;
        }
    }
}

/// `n = 1`: `A1 = alpha (rho + theta)`, `A2 = beta rho`, `A3 = gamma theta`,
/// `F = kappa rho theta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasilinearScalar {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub kappa: f64,
}

impl CoefficientSet for QuasilinearScalar {
    fn dim(&self) -> usize {
        1
    }

    fn kind(&self) -> SystemKind {
        SystemKind::Quasilinear
    }

    fn a1(&self, rho: &[f64], theta: &[f64], out: &mut [f64]) {
        out[0] = self.alpha * (rho[0] + theta[0]);
    }

    fn a2(&self, rho: &[f64], _theta: &[f64], out: &mut [f64]) {
        out[0] = self.beta * rho[0];
    }

    fn a3(&self, _rho: &[f64], theta: &[f64], out: &mut [f64]) {
        out[0] = self.gamma * theta[0];
    }

    fn source(&self, rho: &[f64], theta: &[f64], out: &mut [f64]) {
        out[0] = self.kappa * rho[0] * theta[0];
    }
}

/// `n = 2` analogue of [`QuasilinearScalar`] built from the symmetric matrices
/// `S(v) = [[v0, v1], [v1, -v0]]` and `D(v) = diag(v0, v1)`, each linear in `v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasilinearVector {
    pub params: SystemParams,
}

fn write_sym(a: f64, s: &[f64], d: &[f64], out: &mut [f64]) {
    out[0] = a * (s[0] + d[0]);
    out[1] = a * s[1];
    out[2] = a * s[1];
    out[3] = a * (-s[0] + d[1]);
}

impl CoefficientSet for QuasilinearVector {
    fn dim(&self) -> usize {
        2
    }

    fn kind(&self) -> SystemKind {
        SystemKind::Quasilinear
    }

    /// `alpha (S(rho) + D(theta))`.
    fn a1(&self, rho: &[f64], theta: &[f64], out: &mut [f64]) {
        write_sym(self.params.alpha, rho, theta, out);
    }

    /// `beta (S(rho) + D(rho))`.
    fn a2(&self, rho: &[f64], _theta: &[f64], out: &mut [f64]) {
        write_sym(self.params.beta, rho, rho, out);
    }

    /// `gamma (S(theta) + D(theta))`.
    fn a3(&self, _rho: &[f64], theta: &[f64], out: &mut [f64]) {
        write_sym(self.params.gamma, theta, theta, out);
    }

    fn source(&self, rho: &[f64], theta: &[f64], out: &mut [f64]) {
        let k = self.params.kappa;
        out[0] = k * (rho[0] * theta[1] + rho[1] * theta[0]);
        out[1] = k * rho[0] * theta[0];
    }
}

/// `n = 1`, `F = kappa theta^2`; not `O(|rho||theta|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ViolatingSource {
    pub kappa: f64,
}

impl CoefficientSet for ViolatingSource {
    fn dim(&self) -> usize {
        1
    }

    fn kind(&self) -> SystemKind {
        SystemKind::Semilinear
    }

    fn source(&self, _rho: &[f64], theta: &[f64], out: &mut [f64]) {
        out[0] = self.kappa * theta[0] * theta[0];
    }
}
