//! Conservative Hermite correction of the discrete Maxwellian.
//!
//! The grid Maxwellian `M_ij` does not carry exactly the discrete mass,
//! momentum and energy of the field it was built from: the velocity window is
//! truncated and the midpoint rule is inexact. Multiplying it by
//! `a1 + a2 mu + a3 (mu^2 - 1)` and choosing the three coefficients per cell
//! from a 3x3 system restores the match, so a collision blend toward the
//! corrected Maxwellian leaves all three totals untouched.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::DistributionField;
use crate::grid::PhaseSpaceGrid;
use crate::moments::FluidMoments;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Relative determinant threshold below which the correction is refused.
pub const SINGULAR_THRESHOLD: f64 = 1e-10;

/// Hermite multiplier of one spatial cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellCorrection {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub det: f64,
}

impl CellCorrection {
    pub const IDENTITY: CellCorrection = CellCorrection {
        a1: 1.0,
        a2: 0.0,
        a3: 0.0,
        det: -2.0,
    };

    #[inline]
    pub fn multiplier(&self, mu: f64) -> f64 {
        self.a1 + self.a2 * mu + self.a3 * (mu * mu - 1.0)
    }
}

/// Per-cell multipliers together with the sums `A_0..A_4` they were solved from.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectionCoefficients {
    pub a1: Vec<f64>,
    pub a2: Vec<f64>,
    pub a3: Vec<f64>,
    pub sums: Vec<[f64; 5]>,
    pub det: Vec<f64>,
}

impl CorrectionCoefficients {
    pub fn len(&self) -> usize {
        self.a1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a1.is_empty()
    }

    pub fn cell(&self, i: usize) -> CellCorrection {
        CellCorrection {
            a1: self.a1[i],
            a2: self.a2[i],
            a3: self.a3[i],
            det: self.det[i],
        }
    }

    /// Multipliers that leave the Maxwellian unchanged; used when the
    /// correction is switched off.
    pub fn identity(n_x: usize) -> Self {
        Self {
            a1: vec![1.0; n_x],
            a2: vec![0.0; n_x],
            a3: vec![0.0; n_x],
            sums: vec![[1.0, 0.0, 1.0, 0.0, 3.0]; n_x],
            det: vec![-2.0; n_x],
        }
    }
}

/// `A_k = dv / sqrt(2 pi T) * sum_j mu_j^k exp(-mu_j^2 / 2)` for `k = 0..=4`.
pub fn cell_quadrature_sums(u: f64, t: f64, v: &[f64], dv: f64) -> [f64; 5] {
    let inv_sqrt_t = 1.0 / t.sqrt();
    let mut s = [0.0; 5];
    for &vj in v {
        let mu = (vj - u) * inv_sqrt_t;
        let w = (-0.5 * mu * mu).exp();
        let mu2 = mu * mu;
        s[0] += w;
        s[1] += mu * w;
        s[2] += mu2 * w;
        s[3] += mu2 * mu * w;
        s[4] += mu2 * mu2 * w;
    }
    let scale = dv / (TWO_PI * t).sqrt();
    s.map(|x| scale * x)
}

pub fn quadrature_sums(moments: &FluidMoments, grid: &PhaseSpaceGrid) -> Vec<[f64; 5]> {
    let v = grid.v_centers();
    let dv = grid.dv();
    (0..moments.len())
        .into_par_iter()
        .map(|i| cell_quadrature_sums(moments.u[i], moments.temperature[i], v, dv))
        .collect()
}

/// Determinant of the moment-matching system.
pub fn correction_determinant(a: &[f64; 5]) -> f64 {
    let [a0, a1, a2, a3, a4] = *a;
    a2 * a2 * a2 - 2.0 * a1 * a2 * a3 + a0 * a3 * a3 + a1 * a1 * a4 - a0 * a2 * a4
}

/// Closed-form solution of
///
/// ```text
/// | A0  A1  A2-A0 | |a1|   |1|
/// | A1  A2  A3-A1 | |a2| = |0|
/// | A2  A3  A4-A2 | |a3|   |1|
/// ```
///
/// The returned `SingularCorrection` carries `cell = 0`; callers that know
/// the cell replace it.
pub fn solve_correction(a: &[f64; 5]) -> Result<CellCorrection> {
    let [a0, a1, a2, a3, a4] = *a;
    let det = correction_determinant(a);
    let threshold = SINGULAR_THRESHOLD * 1f64.max(a2.abs().powi(3));
    if !(det.abs() > threshold) {
        return Err(Error::SingularCorrection {
            cell: 0,
            det,
            sums: *a,
        });
    }
    Ok(CellCorrection {
        a1: (a1 * a1 + a2 * (2.0 * a2 - a0 - a4) - a3 * (2.0 * a1 - a3)) / det,
        a2: (a1 * (a4 - a2) + a3 * (a0 - a2)) / det,
        a3: (a1 * (a1 - a3) + a2 * (a2 - a0)) / det,
        det,
    })
}

/// Quadrature sums and multipliers for every cell.
pub fn compute_correction(moments: &FluidMoments, grid: &PhaseSpaceGrid) -> Result<CorrectionCoefficients> {
    let sums = quadrature_sums(moments, grid);
    let n = sums.len();
    let mut out = CorrectionCoefficients {
        a1: Vec::with_capacity(n),
        a2: Vec::with_capacity(n),
        a3: Vec::with_capacity(n),
        sums: Vec::with_capacity(n),
        det: Vec::with_capacity(n),
    };
    for (i, s) in sums.into_iter().enumerate() {
        let c = solve_correction(&s).map_err(|e| match e {
            Error::SingularCorrection { det, sums, .. } => Error::SingularCorrection { cell: i + 1, det, sums },
            other => other,
        })?;
        out.a1.push(c.a1);
        out.a2.push(c.a2);
        out.a3.push(c.a3);
        out.det.push(c.det);
        out.sums.push(s);
    }
    Ok(out)
}

/// Writes the corrected Maxwellian
/// `rho_i / sqrt(2 pi T_i) exp(-mu^2/2) (a1 + a2 mu + a3 (mu^2 - 1))` into `out`.
pub fn eval_modified_maxwellian_into(
    moments: &FluidMoments,
    coeffs: &CorrectionCoefficients,
    grid: &PhaseSpaceGrid,
    out: &mut DistributionField,
) -> Result<()> {
    out.check_grid(grid)?;
    let v = grid.v_centers();
    out.values_mut()
        .par_chunks_exact_mut(grid.n_v())
        .enumerate()
        .for_each(|(i, cell)| {
            let (rho, u, t) = (moments.rho[i], moments.u[i], moments.temperature[i]);
            let c = coeffs.cell(i);
            let scale = rho / (TWO_PI * t).sqrt();
            let inv_sqrt_t = 1.0 / t.sqrt();
            for (m, &vj) in cell.iter_mut().zip(v) {
                let mu = (vj - u) * inv_sqrt_t;
                *m = scale * (-0.5 * mu * mu).exp() * c.multiplier(mu);
            }
        });
    Ok(())
}

pub fn eval_modified_maxwellian(
    moments: &FluidMoments,
    coeffs: &CorrectionCoefficients,
    grid: &PhaseSpaceGrid,
) -> Result<DistributionField> {
    let mut out = DistributionField::zeros_like(grid);
    eval_modified_maxwellian_into(moments, coeffs, grid, &mut out)?;
    Ok(out)
}
