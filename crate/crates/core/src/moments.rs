//! Discrete fluid moments by midpoint quadrature and the plain Maxwellian.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::DistributionField;
use crate::grid::PhaseSpaceGrid;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Maxwellian with density `rho`, mean velocity `u` and temperature `t`, at velocity `v`.
pub fn maxwellian(rho: f64, u: f64, t: f64, v: f64) -> f64 {
    let mu = (v - u) / t.sqrt();
    rho / (TWO_PI * t).sqrt() * (-0.5 * mu * mu).exp()
}

/// Per-cell `(rho, m, E, u, T)`.
///
/// `rho`, `mom` and `energy` are the raw quadrature sums; `u` and `temperature`
/// are derived from them, so `mom = rho * u` and `energy = rho * (u^2 + T)` up
/// to one rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct FluidMoments {
    pub rho: Vec<f64>,
    pub mom: Vec<f64>,
    pub energy: Vec<f64>,
    pub u: Vec<f64>,
    pub temperature: Vec<f64>,
}

impl FluidMoments {
    /// Builds moments from primitive variables.
    pub fn from_primitive(rho: Vec<f64>, u: Vec<f64>, temperature: Vec<f64>) -> Result<Self> {
        assert!(rho.len() == u.len() && u.len() == temperature.len());
        let mom = rho.iter().zip(&u).map(|(r, u)| r * u).collect();
        let energy = rho
            .iter()
            .zip(&u)
            .zip(&temperature)
            .map(|((r, u), t)| r * (u * u + t))
            .collect();
        let m = Self {
            rho,
            mom,
            energy,
            u,
            temperature,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    fn validate(&self) -> Result<()> {
        for (i, (&rho, &t)) in self.rho.iter().zip(&self.temperature).enumerate() {
            // Written negated so NaN fails too.
            if !(rho > 0.0) {
                return Err(Error::NonPositiveDensity { cell: i + 1, value: rho });
            }
            if !(t > 0.0) {
                return Err(Error::NonPositiveTemperature { cell: i + 1, value: t });
            }
        }
        Ok(())
    }
}

/// Midpoint-rule sums `dv * sum_j (1, v_j, v_j^2) f_ij` for one cell, ascending in `j`.
pub(crate) fn raw_moments(cell: &[f64], v: &[f64], dv: f64) -> [f64; 3] {
    let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
    for (&f, &vj) in cell.iter().zip(v) {
        s0 += f;
        s1 += vj * f;
        s2 += vj * vj * f;
    }
    [dv * s0, dv * s1, dv * s2]
}

pub fn compute_moments(f: &DistributionField, grid: &PhaseSpaceGrid) -> Result<FluidMoments> {
    f.check_grid(grid)?;
    let v = grid.v_centers();
    let dv = grid.dv();
    let sums: Vec<[f64; 3]> = f
        .values()
        .par_chunks_exact(f.n_v())
        .map(|cell| raw_moments(cell, v, dv))
        .collect();

    let n = sums.len();
    let mut out = FluidMoments {
        rho: Vec::with_capacity(n),
        mom: Vec::with_capacity(n),
        energy: Vec::with_capacity(n),
        u: Vec::with_capacity(n),
        temperature: Vec::with_capacity(n),
    };
    for [rho, mom, energy] in sums {
        let u = mom / rho;
        out.rho.push(rho);
        out.mom.push(mom);
        out.energy.push(energy);
        out.u.push(u);
        out.temperature.push(energy / rho - u * u);
    }
    out.validate()?;
    Ok(out)
}

/// Writes `M_ij = rho_i / sqrt(2 pi T_i) exp(-mu_ij^2 / 2)` into `out`.
pub fn eval_maxwellian_into(
    moments: &FluidMoments,
    grid: &PhaseSpaceGrid,
    out: &mut DistributionField,
) -> Result<()> {
    out.check_grid(grid)?;
    moments.validate()?;
    let v = grid.v_centers();
    out.values_mut()
        .par_chunks_exact_mut(grid.n_v())
        .enumerate()
        .for_each(|(i, cell)| {
            let (rho, u, t) = (moments.rho[i], moments.u[i], moments.temperature[i]);
            let scale = rho / (TWO_PI * t).sqrt();
            let inv_sqrt_t = 1.0 / t.sqrt();
            for (m, &vj) in cell.iter_mut().zip(v) {
                let mu = (vj - u) * inv_sqrt_t;
                *m = scale * (-0.5 * mu * mu).exp();
            }
        });
    Ok(())
}

pub fn eval_maxwellian(moments: &FluidMoments, grid: &PhaseSpaceGrid) -> Result<DistributionField> {
    let mut out = DistributionField::zeros_like(grid);
    eval_maxwellian_into(moments, grid, &mut out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{sample_initial_condition, GridSpec, InitialCondition};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn default_grid() -> PhaseSpaceGrid {
        GridSpec::default().build().unwrap()
    }

    #[test]
    fn zero_field_has_no_density() {
        let g = PhaseSpaceGrid::new(0.0, 1.0, -1.0, 1.0, 5, 4).unwrap();
        let f = DistributionField::zeros_like(&g);
        assert!(matches!(
            compute_moments(&f, &g),
            Err(Error::NonPositiveDensity { cell: 1, .. })
        ));
    }

    #[test]
    fn negative_temperature_is_reported() {
        // Mass concentrated at one velocity with a negative lobe elsewhere.
        let g = PhaseSpaceGrid::new(0.0, 1.0, -1.0, 1.0, 5, 4).unwrap();
        let f = DistributionField::from_fn(&g, |_, v| if v.abs() < 0.5 { 1.0 } else { -0.2 });
        assert!(matches!(
            compute_moments(&f, &g),
            Err(Error::NonPositiveTemperature { .. })
        ));
    }

    #[test]
    fn constant_field_matches_brute_force() {
        let g = PhaseSpaceGrid::new(0.0, 1.0, -7.0, 7.0, 5, 128).unwrap();
        let f = DistributionField::from_fn(&g, |_, _| 1.0);
        let m = compute_moments(&f, &g).unwrap();

        // Independent oracle: recompute each centre from scratch.
        let dv = 14.0 / 128.0;
        let mut e = 0.0;
        for j in 1..=128 {
            let v = -7.0 + (j as f64 - 0.5) * dv;
            e += v * v;
        }
        e *= dv;
        for i in 0..5 {
            assert_relative_eq!(m.rho[i], 14.0, max_relative = 1e-15);
            assert!(m.mom[i].abs() < 1e-13);
            assert!(m.u[i].abs() < 1e-14);
            assert_relative_eq!(m.energy[i], e, max_relative = 1e-14);
            assert_relative_eq!(m.temperature[i], e / 14.0, max_relative = 1e-14);
        }
        // Closed form of the midpoint sum: (v_hi^3 - v_lo^3)/3 - (v_hi - v_lo) dv^2 / 12.
        assert_relative_eq!(e, 2.0 * 343.0 / 3.0 - 14.0 * dv * dv / 12.0, max_relative = 1e-14);
    }

    #[test]
    fn inner_state_is_recovered() {
        let g = default_grid();
        let f = sample_initial_condition(&g, &InitialCondition::default());
        let m = compute_moments(&f, &g).unwrap();
        let i = g.n_x() / 2;
        assert!((m.rho[i] - 1.0).abs() < 1e-9);
        assert!((m.u[i] - 0.25).abs() < 1e-9);
        assert!((m.temperature[i] - 1.0).abs() < 1e-9);
        assert!((m.rho[0] - 0.125).abs() < 1e-9);
        assert!((m.u[0] + 0.1).abs() < 1e-9);
        assert!((m.temperature[0] - 0.8).abs() < 1e-9);
    }

    #[test]
    fn maxwellian_peaks() {
        assert_relative_eq!(maxwellian(1.0, 0.0, 1.0, 0.0), 0.398_942_280_401_432_7, max_relative = 1e-15);
        assert_relative_eq!(
            maxwellian(2.0, 3.0, 4.0, 3.0),
            2.0 / (8.0 * std::f64::consts::PI).sqrt(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn grid_maxwellian_mass_is_close_but_not_exact() {
        let g = default_grid();
        let m = FluidMoments::from_primitive(vec![1.0; g.n_x()], vec![0.25; g.n_x()], vec![1.0; g.n_x()])
            .unwrap();
        let mx = eval_maxwellian(&m, &g).unwrap();
        let mass = raw_moments(mx.cell(0), g.v_centers(), g.dv())[0];
        assert!((mass - 1.0).abs() < 1e-9);
        assert_ne!(mass, 1.0);
    }

    #[test]
    fn eval_matches_pointwise_formula() {
        let g = PhaseSpaceGrid::new(0.0, 1.0, -4.0, 6.0, 6, 17).unwrap();
        let rho: Vec<f64> = (0..6).map(|i| 0.5 + 0.1 * i as f64).collect();
        let u: Vec<f64> = (0..6).map(|i| -0.3 + 0.2 * i as f64).collect();
        let t: Vec<f64> = (0..6).map(|i| 0.7 + 0.15 * i as f64).collect();
        let m = FluidMoments::from_primitive(rho.clone(), u.clone(), t.clone()).unwrap();
        let mx = eval_maxwellian(&m, &g).unwrap();
        for i in 0..6 {
            for (j, &v) in g.v_centers().iter().enumerate() {
                assert_relative_eq!(mx.get(i, j), maxwellian(rho[i], u[i], t[i], v), max_relative = 1e-14);
                assert!(mx.get(i, j) > 0.0);
            }
        }
    }

    proptest! {
        #[test]
        fn raw_moments_are_linear(
            a in -3.0f64..3.0, b in -3.0f64..3.0,
            f in prop::collection::vec(-1.0f64..1.0, 24),
            h in prop::collection::vec(-1.0f64..1.0, 24),
        ) {
            let g = PhaseSpaceGrid::new(0.0, 1.0, -3.0, 3.0, 5, 24).unwrap();
            let combo: Vec<f64> = f.iter().zip(&h).map(|(x, y)| a * x + b * y).collect();
            let mf = raw_moments(&f, g.v_centers(), g.dv());
            let mh = raw_moments(&h, g.v_centers(), g.dv());
            let mc = raw_moments(&combo, g.v_centers(), g.dv());
            for k in 0..3 {
                prop_assert!((mc[k] - (a * mf[k] + b * mh[k])).abs() < 1e-12);
            }
        }

        #[test]
        fn maxwellian_translation_covariance(
            rho in 0.1f64..3.0, u in -2.0f64..2.0, t in 0.2f64..3.0,
            v in -5.0f64..5.0, c in -0.5f64..0.5,
        ) {
            let shifted = maxwellian(rho, u + c, t, v + c);
            let base = maxwellian(rho, u, t, v);
            prop_assert!((shifted - base).abs() <= 1e-12 * base.max(1e-300) + 1e-300);
        }

        #[test]
        fn moment_identities_hold(
            cell in prop::collection::vec(0.01f64..1.0, 32),
        ) {
            let g = PhaseSpaceGrid::new(0.0, 1.0, -4.0, 4.0, 5, 32).unwrap();
            let mut values = Vec::new();
            for _ in 0..5 { values.extend_from_slice(&cell); }
            let f = DistributionField::from_vec(5, 32, values);
            let m = compute_moments(&f, &g).unwrap();
            for i in 0..5 {
                prop_assert!((m.mom[i] - m.rho[i] * m.u[i]).abs() <= 4.0 * f64::EPSILON * m.mom[i].abs() + 1e-300);
                let e = m.rho[i] * (m.u[i] * m.u[i] + m.temperature[i]);
                prop_assert!((m.energy[i] - e).abs() <= 8.0 * f64::EPSILON * m.energy[i]);
            }
        }
    }
}
