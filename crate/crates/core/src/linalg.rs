//! Small dense linear algebra on row-major `n x n` slices.
//!
//! The per-node solves in the time stepper use the hand-written LU below so
//! that no allocation happens inside the node loop. Eigenvalue work, which
//! only runs in checks and in the periodic speed monitor, goes through
//! nalgebra.

use alloc::vec::Vec;
use nalgebra::DMatrix;
// Unused when std is linked, whose inherent float methods take precedence.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// In-place LU factorization with partial pivoting.
///
/// Returns `Err(col)` when the pivot in column `col` is zero.
pub fn lu_factor(a: &mut [f64], n: usize, piv: &mut [usize]) -> Result<(), usize> {
    for (i, p) in piv.iter_mut().enumerate().take(n) {
        *p = i;
    }
    for col in 0..n {
        let mut best = col;
        let mut best_abs = a[col * n + col].abs();
        for row in col + 1..n {
            let v = a[row * n + col].abs();
            if v > best_abs {
                best = row;
                best_abs = v;
            }
        }
        if best_abs == 0.0 || !best_abs.is_finite() {
            return Err(col);
        }
        if best != col {
            for k in 0..n {
                a.swap(col * n + k, best * n + k);
            }
            piv.swap(col, best);
        }
        let pivot = a[col * n + col];
        for row in col + 1..n {
            let factor = a[row * n + col] / pivot;
            a[row * n + col] = factor;
            for k in col + 1..n {
                a[row * n + k] -= factor * a[col * n + k];
            }
        }
    }
    Ok(())
}

/// Solves `A x = b` given the output of [`lu_factor`]; `b` is overwritten with `x`.
pub fn lu_solve(lu: &[f64], n: usize, piv: &[usize], b: &mut [f64], scratch: &mut [f64]) {
    for i in 0..n {
        scratch[i] = b[piv[i]];
    }
    for i in 0..n {
        let mut acc = scratch[i];
        for k in 0..i {
            acc -= lu[i * n + k] * scratch[k];
        }
        scratch[i] = acc;
    }
    for i in (0..n).rev() {
        let mut acc = scratch[i];
        for k in i + 1..n {
            acc -= lu[i * n + k] * scratch[k];
        }
        scratch[i] = acc / lu[i * n + i];
    }
    b[..n].copy_from_slice(&scratch[..n]);
}

/// 1-norm condition number `||A||_1 ||A^-1||_1`, using the factorization of `a`.
pub fn cond1(a: &[f64], lu: &[f64], n: usize, piv: &[usize], scratch: &mut [f64]) -> f64 {
    if n == 1 {
        return 1.0;
    }
    let norm_a = (0..n)
        .map(|c| (0..n).map(|r| a[r * n + c].abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let (col, rest) = scratch.split_at_mut(n);
    let mut norm_inv = 0.0_f64;
    for c in 0..n {
        col.iter_mut().for_each(|v| *v = 0.0);
        col[c] = 1.0;
        lu_solve(lu, n, piv, col, rest);
        norm_inv = norm_inv.max(col.iter().map(|v| v.abs()).sum());
    }
    norm_a * norm_inv
}

/// Largest absolute entry of `A - A^T`.
pub fn symmetry_defect(a: &[f64], n: usize) -> f64 {
    let mut defect = 0.0_f64;
    for i in 0..n {
        for j in i + 1..n {
            defect = defect.max((a[i * n + j] - a[j * n + i]).abs());
        }
    }
    defect
}

/// Frobenius norm.
pub fn frobenius(a: &[f64]) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_sym_eigenvalue(a: &[f64], n: usize) -> Result<f64> {
    if n == 1 {
        return if a[0].is_finite() { Ok(a[0]) } else { Err(Error::EigenFailure) };
    }
    let m = DMatrix::from_row_slice(n, n, a);
    let eig = m.try_symmetric_eigen(1e-14, 10_000).ok_or(Error::EigenFailure)?;
    eig.eigenvalues
        .iter()
        .copied()
        .reduce(f64::min)
        .filter(|v| v.is_finite())
        .ok_or(Error::EigenFailure)
}

/// Characteristic speeds of the frozen-coefficient operator
/// `a00 u_tt = a11 u_xx + across u_tx`, i.e. the roots `s` of
/// `det(a00 s^2 + across s - a11) = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Speeds {
    pub max_abs: f64,
    /// Largest imaginary part among the roots, relative to `max_abs`.
    pub imag_defect: f64,
}

pub fn characteristic_speeds(a00: &[f64], a11: &[f64], across: &[f64], n: usize) -> Result<Speeds> {
    if n == 1 {
        let (a, b, c) = (a00[0], across[0], -a11[0]);
        if a == 0.0 {
            return Err(Error::EigenFailure);
        }
        let disc = b * b - 4.0 * a * c;
        let re = -b / (2.0 * a);
        let root = disc.abs().sqrt() / (2.0 * a.abs());
        return Ok(if disc >= 0.0 {
            Speeds {
                max_abs: re.abs() + root,
                imag_defect: 0.0,
            }
        } else {
            let max_abs = (re * re + root * root).sqrt();
            Speeds {
                max_abs,
                imag_defect: root / max_abs.max(f64::MIN_POSITIVE),
            }
        });
    }
    let inv = DMatrix::from_row_slice(n, n, a00)
        .try_inverse()
        .ok_or(Error::EigenFailure)?;
    let m11 = &inv * DMatrix::from_row_slice(n, n, a11);
    let mc = &inv * DMatrix::from_row_slice(n, n, across);
    let mut companion = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        companion[(i, n + i)] = 1.0;
        for j in 0..n {
            companion[(n + i, j)] = m11[(i, j)];
            companion[(n + i, n + j)] = -mc[(i, j)];
        }
    }
    let roots: Vec<_> = companion.complex_eigenvalues().iter().copied().collect();
    if roots.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::EigenFailure);
    }
    let max_abs = roots.iter().map(|z| z.re.hypot(z.im)).fold(0.0, f64::max);
    let imag = roots.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    Ok(Speeds {
        max_abs,
        imag_defect: imag / max_abs.max(f64::MIN_POSITIVE),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn lu_solves_permuted_system() {
        let a = [0.0, 2.0, 1.0, 1.0, 1.0, 0.0, 3.0, 0.0, 1.0];
        let mut lu = a;
        let mut piv = [0; 3];
        lu_factor(&mut lu, 3, &mut piv).unwrap();
        let x_true = [1.0, -2.0, 0.5];
        let mut b: Vec<f64> = (0..3)
            .map(|r| (0..3).map(|c| a[r * 3 + c] * x_true[c]).sum())
            .collect();
        let mut scratch = vec![0.0; 3];
        lu_solve(&lu, 3, &piv, &mut b, &mut scratch);
        for (x, t) in b.iter().zip(x_true) {
            assert!((x - t).abs() < 1e-14);
        }
    }

    #[test]
    fn singular_matrix_reports_column() {
        let mut a = [1.0, 2.0, 2.0, 4.0];
        let mut piv = [0; 2];
        assert_eq!(lu_factor(&mut a, 2, &mut piv), Err(1));
    }

    #[test]
    fn cond_of_diagonal() {
        let a = [4.0, 0.0, 0.0, 0.5];
        let mut lu = a;
        let mut piv = [0; 2];
        lu_factor(&mut lu, 2, &mut piv).unwrap();
        let mut scratch = vec![0.0; 4];
        assert!((cond1(&a, &lu, 2, &piv, &mut scratch) - 8.0).abs() < 1e-12);
    }

    #[test]
    fn min_eigenvalue_of_2x2() {
        // eigenvalues 1 and 3
        let a = [2.0, 1.0, 1.0, 2.0];
        assert!((min_sym_eigenvalue(&a, 2).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn wave_operator_speeds_are_unit() {
        let i2 = [1.0, 0.0, 0.0, 1.0];
        let z = [0.0; 4];
        let s = characteristic_speeds(&i2, &i2, &z, 2).unwrap();
        assert!((s.max_abs - 1.0).abs() < 1e-12);
        assert!(s.imag_defect < 1e-12);
        let s1 = characteristic_speeds(&[1.0], &[1.0], &[0.0], 1).unwrap();
        assert_eq!(s1.max_abs, 1.0);
    }

    #[test]
    fn scalar_speeds_with_cross_term() {
        // 2.25 s^2 + 2.5 s + 0.25 = 0 -> s in {-1, -1/9}
        let s = characteristic_speeds(&[2.25], &[-0.25], &[2.5], 1).unwrap();
        assert!((s.max_abs - 1.0).abs() < 1e-12);
        // elliptic symbol: s^2 + 1 = 0
        let e = characteristic_speeds(&[1.0], &[-1.0], &[0.0], 1).unwrap();
        assert!(e.imag_defect > 0.99);
    }
}
