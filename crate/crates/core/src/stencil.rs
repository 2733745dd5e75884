//! Fourth-order centered finite differences on uniform grids.

// Unused when std is linked, whose inherent float methods take precedence.
#[allow(unused_imports)]
use num_traits::Float;

use crate::grid::{Boundary, Field};

const D1: [f64; 5] = [1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0];
const D2: [f64; 5] = [-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0];
const D3: [f64; 7] = [
    1.0 / 8.0,
    -1.0,
    13.0 / 8.0,
    0.0,
    -13.0 / 8.0,
    1.0,
    -1.0 / 8.0,
];

/// Stencil weights (unscaled by `h`) for derivative `order` in 1..=3.
pub fn weights(order: usize) -> &'static [f64] {
    match order {
        1 => &D1,
        2 => &D2,
        3 => &D3,
        _ => panic!("stencils exist for derivative orders 1 to 3"),
    }
}

/// Half-width of the stencil for derivative `order`.
pub fn radius(order: usize) -> usize {
    weights(order).len() / 2
}

/// Writes the `order`-th spatial derivative of every component of `f` into `out`.
///
/// With [`Boundary::Quiet`] the field is extended by zero past the ends;
/// with [`Boundary::Periodic`] indices wrap.
pub fn derivative(f: &Field, order: usize, h: f64, boundary: Boundary, out: &mut Field) {
    let w = weights(order);
    let r = w.len() / 2;
    let nx = f.nx();
    let dim = f.dim();
    debug_assert_eq!(out.nx(), nx);
    debug_assert_eq!(out.dim(), dim);
    let scale = 1.0 / h.powi(order as i32);
    let src = f.as_slice();
    let dst = out.as_mut_slice();

    let interior = r..nx.saturating_sub(r);
    for i in interior.clone() {
        for k in 0..dim {
            let mut acc = 0.0;
            for (j, wj) in w.iter().enumerate() {
                acc += wj * src[(i + j - r) * dim + k];
            }
            dst[i * dim + k] = acc * scale;
        }
    }
    for i in (0..nx).filter(|i| !interior.contains(i)) {
        for k in 0..dim {
            let mut acc = 0.0;
            for (j, wj) in w.iter().enumerate() {
                let idx = i as isize + j as isize - r as isize;
                let v = match boundary {
                    Boundary::Quiet if idx < 0 || idx >= nx as isize => 0.0,
                    Boundary::Quiet => src[idx as usize * dim + k],
                    Boundary::Periodic => src[idx.rem_euclid(nx as isize) as usize * dim + k],
                };
                acc += wj * v;
            }
            dst[i * dim + k] = acc * scale;
        }
    }
}

/// Convenience wrapper returning a new field.
pub fn derive(f: &Field, order: usize, h: f64, boundary: Boundary) -> Field {
    let mut out = Field::zeros(f.nx(), f.dim());
    derivative(f, order, h, boundary, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    #[test]
    fn exact_on_low_degree_polynomials() {
        let g = GridSpec::new(-1.0, 1.0, 41, 1.0, 0.4).unwrap();
        let h = g.spacing();
        // x^4: first through third derivatives are reproduced exactly by 4th-order stencils.
        let f = Field::sample(&g, 1, |x, o| o[0] = x.powi(4));
        let d1 = derive(&f, 1, h, Boundary::Quiet);
        let d2 = derive(&f, 2, h, Boundary::Quiet);
        let d3 = derive(&f, 3, h, Boundary::Quiet);
        for i in 3..g.nx - 3 {
            let x = g.x(i);
            assert!((d1.node(i)[0] - 4.0 * x.powi(3)).abs() < 1e-10);
            assert!((d2.node(i)[0] - 12.0 * x * x).abs() < 1e-8);
            assert!((d3.node(i)[0] - 24.0 * x).abs() < 1e-6);
        }
    }

    #[test]
    fn fourth_order_convergence_periodic() {
        let err = |nx: usize| {
            let g = GridSpec::periodic(0.0, 2.0 * core::f64::consts::PI, nx, 1.0, 0.4).unwrap();
            let f = Field::sample(&g, 1, |x, o| o[0] = x.sin());
            let d3 = derive(&f, 3, g.spacing(), Boundary::Periodic);
            (0..nx)
                .map(|i| (d3.node(i)[0] + g.x(i).cos()).abs())
                .fold(0.0, f64::max)
        };
        let order = (err(32) / err(64)).log2();
        assert!(order > 3.8, "observed order {order}");
    }
}
