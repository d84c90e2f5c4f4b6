//! Collisionless advection `f_t + v f_x = 0` on a periodic grid.
//!
//! Each velocity row is advanced with a third-order, four-point
//! Lax-Wendroff-type update, upwind-biased toward the incoming side:
//! cells `i-2..=i+1` when `v_j > 0`, cells `i-1..=i+2` when `v_j < 0`.
//! The weights are stored in factored form so that `nu = 1` and `nu = 2`
//! collapse to exact one- and two-cell shifts.

use rayon::prelude::*;

use crate::error::Result;
use crate::field::DistributionField;
use crate::grid::PhaseSpaceGrid;

/// Signed Courant numbers `nu_j = v_j dt / dx`, one per velocity row.
#[derive(Debug, Clone, PartialEq)]
pub struct CourantNumbers {
    nu: Vec<f64>,
}

impl CourantNumbers {
    pub fn new(grid: &PhaseSpaceGrid, dt: f64) -> Self {
        let ratio = dt / grid.dx();
        Self {
            nu: grid.v_centers().iter().map(|v| v * ratio).collect(),
        }
    }

    pub fn from_vec(nu: Vec<f64>) -> Self {
        Self { nu }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.nu
    }

    pub fn max_abs(&self) -> f64 {
        self.nu.iter().fold(0.0, |m, n| m.max(n.abs()))
    }
}

/// Four weights applied to cells `i + offset .. i + offset + 3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stencil {
    pub offset: isize,
    pub weights: [f64; 4],
}

impl Stencil {
    pub fn for_courant(nu: f64) -> Self {
        if nu > 0.0 {
            Stencil {
                offset: -2,
                weights: [
                    nu * (nu * nu - 1.0) / 6.0,
                    nu * (1.0 + nu) * (2.0 - nu) / 2.0,
                    (1.0 - nu * nu) * (2.0 - nu) / 2.0,
                    -nu * (1.0 - nu) * (2.0 - nu) / 6.0,
                ],
            }
        } else if nu < 0.0 {
            // Mirror image of the positive case with s = -nu.
            let s = -nu;
            Stencil {
                offset: -1,
                weights: [
                    -s * (1.0 - s) * (2.0 - s) / 6.0,
                    (1.0 - s * s) * (2.0 - s) / 2.0,
                    s * (1.0 + s) * (2.0 - s) / 2.0,
                    s * (s * s - 1.0) / 6.0,
                ],
            }
        } else {
            Stencil {
                offset: 0,
                weights: [1.0, 0.0, 0.0, 0.0],
            }
        }
    }
}

/// Advances every row by one transport step. Reads only from `f_star`;
/// `out` must be a distinct buffer of the same shape.
pub fn transport_step_into(f_star: &DistributionField, nu: &CourantNumbers, out: &mut DistributionField) -> Result<()> {
    f_star.same_shape(out)?;
    let n_x = f_star.n_x();
    let n_v = f_star.n_v();
    assert_eq!(nu.as_slice().len(), n_v, "one Courant number per velocity row");

    let stencils: Vec<Stencil> = nu.as_slice().iter().map(|&n| Stencil::for_courant(n)).collect();
    let wrap = |i: usize, off: isize| -> usize { (i as isize + off).rem_euclid(n_x as isize) as usize };

    out.values_mut()
        .par_chunks_exact_mut(n_v)
        .enumerate()
        .for_each(|(i, cell)| {
            let left2 = f_star.cell(wrap(i, -2));
            let left1 = f_star.cell(wrap(i, -1));
            let here = f_star.cell(i);
            let right1 = f_star.cell(wrap(i, 1));
            let right2 = f_star.cell(wrap(i, 2));
            for (j, (dst, s)) in cell.iter_mut().zip(&stencils).enumerate() {
                let [w0, w1, w2, w3] = s.weights;
                *dst = match s.offset {
                    -2 => w0 * left2[j] + w1 * left1[j] + w2 * here[j] + w3 * right1[j],
                    -1 => w0 * left1[j] + w1 * here[j] + w2 * right1[j] + w3 * right2[j],
                    _ => here[j],
                };
            }
        });
    Ok(())
}

pub fn transport_step(f_star: &DistributionField, nu: &CourantNumbers) -> Result<DistributionField> {
    let mut out = DistributionField::zeros(f_star.n_x(), f_star.n_v());
    transport_step_into(f_star, nu, &mut out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Literal transcription of the expanded update formulas, used as an
    /// oracle for the factored weights. `f` is indexed with periodic wrap.
    fn expanded(f: &[f64], i: usize, nu: f64) -> f64 {
        let n = f.len() as isize;
        let at = |k: isize| f[(i as isize + k).rem_euclid(n) as usize];
        let (m2, m1, c, p1, p2) = (at(-2), at(-1), at(0), at(1), at(2));
        if nu < 0.0 {
            c - nu / 6.0 * (-2.0 * m1 - 3.0 * c + 6.0 * p1 - p2) + nu * nu / 2.0 * (m1 - 2.0 * c + p1)
                - nu * nu * nu / 6.0 * (-m1 + 3.0 * c - 3.0 * p1 + p2)
        } else if nu > 0.0 {
            c - nu / 6.0 * (m2 - 6.0 * m1 + 3.0 * c + 2.0 * p1) + nu * nu / 2.0 * (m1 - 2.0 * c + p1)
                - nu * nu * nu / 6.0 * (-m2 + 3.0 * m1 - 3.0 * c + p1)
        } else {
            c
        }
    }

    fn row_field(row: &[f64]) -> DistributionField {
        DistributionField::from_vec(row.len(), 1, row.to_vec())
    }

    #[test]
    fn zero_velocity_copies() {
        let f = row_field(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        let out = transport_step(&f, &CourantNumbers::from_vec(vec![0.0])).unwrap();
        assert_eq!(out, f);
    }

    #[test]
    fn unit_and_double_courant_are_exact_shifts() {
        let row: Vec<f64> = (0..9).map(|k| (k as f64 * 0.37).sin() + 0.1 / (k as f64 + 1.0)).collect();
        let f = row_field(&row);
        for (nu, shift) in [(1.0, 1isize), (2.0, 2), (-1.0, -1), (-2.0, -2)] {
            let out = transport_step(&f, &CourantNumbers::from_vec(vec![nu])).unwrap();
            for i in 0..9 {
                let src = (i as isize - shift).rem_euclid(9) as usize;
                assert_eq!(out.get(i, 0).to_bits(), row[src].to_bits(), "nu = {nu}, i = {i}");
            }
        }
    }

    #[test]
    fn factored_weights_match_expanded_formulas() {
        let row: Vec<f64> = (0..7).map(|k| ((k * k) as f64 * 0.3).cos()).collect();
        for nu in [-1.95, -1.3, -0.7, -0.1, 0.1, 0.5, 0.9, 1.4, 1.95] {
            let out = transport_step(&row_field(&row), &CourantNumbers::from_vec(vec![nu])).unwrap();
            for i in 0..7 {
                assert!((out.get(i, 0) - expanded(&row, i, nu)).abs() < 1e-14, "nu = {nu}");
            }
        }
    }

    #[test]
    fn cubics_are_advected_exactly() {
        // Interior cells only: the wrap would break the polynomial.
        let n = 24;
        let dx = 0.1;
        let p = |x: f64| 0.3 - 1.2 * x + 0.7 * x * x - 0.25 * x * x * x;
        let row: Vec<f64> = (0..n).map(|i| p(i as f64 * dx)).collect();
        for nu in [0.2, 0.75, -0.4, -0.9, 1.6] {
            let out = transport_step(&row_field(&row), &CourantNumbers::from_vec(vec![nu])).unwrap();
            for i in 3..n - 3 {
                let exact = p(i as f64 * dx - nu * dx);
                assert!((out.get(i, 0) - exact).abs() < 1e-13, "nu = {nu}, i = {i}");
            }
        }
    }

    #[test]
    fn stencil_weights_sum_to_one() {
        for k in -40..=40 {
            let nu = k as f64 * 0.05;
            let s: f64 = Stencil::for_courant(nu).weights.iter().sum();
            assert!((s - 1.0).abs() < 1e-15, "nu = {nu}");
        }
    }

    #[test]
    fn reads_only_from_pre_step_buffer() {
        let grid = PhaseSpaceGrid::new(0.0, 1.0, -1.5, 1.5, 6, 3).unwrap();
        let f = DistributionField::from_fn(&grid, |x, v| x + 10.0 * v);
        let nu = CourantNumbers::from_vec(vec![-0.5, 0.0, 0.5]);
        let a = transport_step(&f, &nu).unwrap();
        let mut b = DistributionField::from_fn(&grid, |_, _| f64::NAN);
        transport_step_into(&f, &nu, &mut b).unwrap();
        assert_eq!(a, b);
    }

    proptest! {
        #[test]
        fn row_mass_is_conserved(
            row in prop::collection::vec(0.0f64..2.0, 5..40),
            nu in -2.0f64..2.0,
        ) {
            let f = row_field(&row);
            let out = transport_step(&f, &CourantNumbers::from_vec(vec![nu])).unwrap();
            let before: f64 = row.iter().sum();
            let after: f64 = out.values().iter().sum();
            prop_assert!((before - after).abs() <= 1e-13 * before.abs().max(1e-300) + 1e-13);
        }

        #[test]
        fn commutes_with_periodic_rotation(
            row in prop::collection::vec(-1.0f64..1.0, 5..30),
            nu in -2.0f64..2.0,
            r in 0usize..30,
        ) {
            let n = row.len();
            let r = r % n;
            let rotate = |v: &[f64]| -> Vec<f64> { (0..n).map(|i| v[(i + r) % n]).collect() };
            let nu = CourantNumbers::from_vec(vec![nu]);
            let a = rotate(transport_step(&row_field(&row), &nu).unwrap().values());
            let b = transport_step(&row_field(&rotate(&row)), &nu).unwrap().into_vec();
            prop_assert_eq!(a, b);
        }
    }
}
