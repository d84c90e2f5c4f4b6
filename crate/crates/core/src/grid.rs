//! Phase-space mesh, initial data and run parameters.

use crate::error::{Error, Result};
use crate::field::DistributionField;
use crate::moments::maxwellian;

/// Smallest spatial resolution for which the four-point transport stencils
/// plus periodic wrap never read a cell twice.
pub const MIN_SPATIAL_CELLS: usize = 5;
pub const MIN_VELOCITY_CELLS: usize = 3;

/// CFL values above this are accepted but logged.
pub const CFL_WARN: f64 = 1.999;
pub const CFL_MAX: f64 = 2.0;

/// Truncated uniform mesh on `[x_low, x_high] x [v_low, v_high]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpaceGrid {
    x_low: f64,
    x_high: f64,
    v_low: f64,
    v_high: f64,
    dx: f64,
    dv: f64,
    x_centers: Vec<f64>,
    v_centers: Vec<f64>,
    v_max_abs: f64,
}

impl PhaseSpaceGrid {
    pub fn new(
        x_low: f64,
        x_high: f64,
        v_low: f64,
        v_high: f64,
        n_x: usize,
        n_v: usize,
    ) -> Result<Self> {
        // `!(a > b)` also rejects NaN bounds.
        if !(x_high > x_low) || !x_low.is_finite() || !x_high.is_finite() {
            return Err(Error::DomainOrder {
                axis: "x",
                low: x_low,
                high: x_high,
            });
        }
        if !(v_high > v_low) || !v_low.is_finite() || !v_high.is_finite() {
            return Err(Error::DomainOrder {
                axis: "v",
                low: v_low,
                high: v_high,
            });
        }
        if n_x < MIN_SPATIAL_CELLS {
            return Err(Error::StencilTooSmall(n_x));
        }
        if n_v < MIN_VELOCITY_CELLS {
            return Err(Error::TooFewVelocityCells(n_v));
        }

        let dx = (x_high - x_low) / n_x as f64;
        let dv = (v_high - v_low) / n_v as f64;
        let x_centers = (0..n_x).map(|i| x_low + (i as f64 + 0.5) * dx).collect();
        let v_centers = (0..n_v).map(|j| v_low + (j as f64 + 0.5) * dv).collect();

        Ok(Self {
            x_low,
            x_high,
            v_low,
            v_high,
            dx,
            dv,
            x_centers,
            v_centers,
            v_max_abs: v_low.abs().max(v_high.abs()),
        })
    }

    pub fn n_x(&self) -> usize {
        self.x_centers.len()
    }

    pub fn n_v(&self) -> usize {
        self.v_centers.len()
    }

    pub fn x_low(&self) -> f64 {
        self.x_low
    }

    pub fn x_high(&self) -> f64 {
        self.x_high
    }

    pub fn v_low(&self) -> f64 {
        self.v_low
    }

    pub fn v_high(&self) -> f64 {
        self.v_high
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dv(&self) -> f64 {
        self.dv
    }

    pub fn x_centers(&self) -> &[f64] {
        &self.x_centers
    }

    pub fn v_centers(&self) -> &[f64] {
        &self.v_centers
    }

    pub fn v_max_abs(&self) -> f64 {
        self.v_max_abs
    }

    pub fn length(&self) -> f64 {
        self.x_high - self.x_low
    }
}

/// Grid construction parameters as read from a config file.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub x_low: f64,
    pub x_high: f64,
    pub v_low: f64,
    pub v_high: f64,
    pub n_x: usize,
    pub n_v: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            x_low: -1.25,
            x_high: 1.25,
            v_low: -7.0,
            v_high: 7.0,
            n_x: 256,
            n_v: 128,
        }
    }
}

impl GridSpec {
    pub fn build(&self) -> Result<PhaseSpaceGrid> {
        PhaseSpaceGrid::new(
            self.x_low,
            self.x_high,
            self.v_low,
            self.v_high,
            self.n_x,
            self.n_v,
        )
    }
}

/// Macroscopic state `(rho, u, T)` of a Maxwellian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluidState {
    pub rho: f64,
    pub u: f64,
    pub temperature: f64,
}

impl FluidState {
    pub const fn new(rho: f64, u: f64, temperature: f64) -> Self {
        Self { rho, u, temperature }
    }

    fn validate(&self, label: &str) -> Result<()> {
        let ok = self.rho > 0.0
            && self.temperature > 0.0
            && self.rho.is_finite()
            && self.u.is_finite()
            && self.temperature.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "{label} state needs finite rho > 0 and T > 0, got {self:?}"
            )))
        }
    }
}

/// Piecewise-Maxwellian initial data: `inner` where `|x| < inner_halfwidth`,
/// `outer` elsewhere (ties go to `outer`).
#[derive(Debug, Clone, PartialEq)]
pub struct InitialCondition {
    pub inner_halfwidth: f64,
    pub inner: FluidState,
    pub outer: FluidState,
}

impl Default for InitialCondition {
    fn default() -> Self {
        Self {
            inner_halfwidth: 0.5,
            inner: FluidState::new(1.0, 0.25, 1.0),
            outer: FluidState::new(0.125, -0.1, 0.8),
        }
    }
}

impl InitialCondition {
    pub fn uniform(state: FluidState) -> Self {
        Self {
            inner_halfwidth: 1.0,
            inner: state,
            outer: state,
        }
    }

    pub fn state_at(&self, x: f64) -> FluidState {
        if x.abs() < self.inner_halfwidth {
            self.inner
        } else {
            self.outer
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.inner_halfwidth > 0.0) || !self.inner_halfwidth.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "inner_halfwidth must be positive, got {}",
                self.inner_halfwidth
            )));
        }
        self.inner.validate("inner")?;
        self.outer.validate("outer")
    }
}

/// Everything that controls a run apart from the mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Knudsen number.
    pub epsilon: f64,
    pub cfl: f64,
    pub final_time: f64,
    pub ic: InitialCondition,
    pub correction_enabled: bool,
    /// Snapshot cadence in steps; 0 writes the first and last step only.
    pub output_every: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.01,
            cfl: 1.95,
            final_time: 0.16,
            ic: InitialCondition::default(),
            correction_enabled: true,
            output_every: 0,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "epsilon must be > 0, got {}",
                self.epsilon
            )));
        }
        if !(self.cfl > 0.0 && self.cfl <= CFL_MAX) {
            return Err(Error::InvalidConfig(format!(
                "cfl must lie in (0, {CFL_MAX}], got {}",
                self.cfl
            )));
        }
        if self.cfl > CFL_WARN {
            log::warn!("cfl = {} is at the edge of the usable range", self.cfl);
        }
        if !(self.final_time > 0.0) || !self.final_time.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "final_time must be > 0, got {}",
                self.final_time
            )));
        }
        self.ic.validate()
    }
}

/// Samples the piecewise Maxwellian initial data at every cell centre.
pub fn sample_initial_condition(grid: &PhaseSpaceGrid, ic: &InitialCondition) -> DistributionField {
    DistributionField::from_fn(grid, |x, v| {
        let s = ic.state_at(x);
        maxwellian(s.rho, s.u, s.temperature, v)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn default_grid_spacings() {
        let g = PhaseSpaceGrid::new(-1.25, 1.25, -7.0, 7.0, 256, 128).unwrap();
        assert_eq!(g.dx(), 2.5 / 256.0);
        assert_eq!(g.dv(), 0.109375);
        assert_eq!(g.v_max_abs(), 7.0);
    }

    #[test]
    fn midpoint_centres() {
        let g = PhaseSpaceGrid::new(0.0, 1.0, -1.0, 1.0, 10, 4).unwrap();
        for (i, &x) in g.x_centers().iter().enumerate() {
            assert_relative_eq!(x, 0.05 + 0.1 * i as f64, epsilon = 1e-15);
        }
        assert_eq!(g.v_centers(), &[-0.75, -0.25, 0.25, 0.75]);
    }

    #[test]
    fn asymmetric_velocity_bound() {
        let g = PhaseSpaceGrid::new(0.0, 1.0, -2.0, 1.0, 8, 3).unwrap();
        assert_eq!(g.v_max_abs(), 2.0);
    }

    #[test]
    fn rejects_bad_domains() {
        assert!(matches!(
            PhaseSpaceGrid::new(1.0, 1.0, -1.0, 1.0, 8, 4),
            Err(Error::DomainOrder { axis: "x", .. })
        ));
        assert!(matches!(
            PhaseSpaceGrid::new(0.0, 1.0, 1.0, -1.0, 8, 4),
            Err(Error::DomainOrder { axis: "v", .. })
        ));
        assert!(matches!(
            PhaseSpaceGrid::new(0.0, 1.0, -1.0, 1.0, 4, 4),
            Err(Error::StencilTooSmall(4))
        ));
        assert!(matches!(
            PhaseSpaceGrid::new(0.0, 1.0, -1.0, 1.0, 5, 2),
            Err(Error::TooFewVelocityCells(2))
        ));
        assert!(PhaseSpaceGrid::new(f64::NAN, 1.0, -1.0, 1.0, 8, 4).is_err());
    }

    #[test]
    fn symmetric_velocity_centres() {
        let g = PhaseSpaceGrid::new(-1.25, 1.25, -7.0, 7.0, 16, 128).unwrap();
        let v = g.v_centers();
        for j in 0..v.len() {
            assert_eq!(v[j], -v[v.len() - 1 - j]);
            assert_ne!(v[j], 0.0);
        }
    }

    #[test]
    fn default_ic_peak_near_inner_mean() {
        let grid = GridSpec::default().build().unwrap();
        let ic = InitialCondition::default();
        let f = sample_initial_condition(&grid, &ic);
        // x_i = 0 is not a centre on an even grid; take the nearest one.
        let i = grid.n_x() / 2;
        assert!(grid.x_centers()[i].abs() < grid.dx());
        let (j, &v) = grid
            .v_centers()
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - 0.25).abs().total_cmp(&(b.1 - 0.25).abs()))
            .unwrap();
        let expected = (-(v - 0.25) * (v - 0.25) / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
        assert_relative_eq!(f.get(i, j), expected, max_relative = 1e-15);
        assert!((f.get(i, j) - 0.398_942_280_4).abs() < 1e-2);
        assert!(f.values().iter().all(|&v| v > 0.0 && v.is_finite()));
    }

    #[test]
    fn uniform_ic_is_x_independent() {
        let grid = PhaseSpaceGrid::new(0.0, 2.0, -5.0, 5.0, 12, 20).unwrap();
        let f = sample_initial_condition(&grid, &InitialCondition::uniform(FluidState::new(1.0, 0.0, 1.0)));
        for i in 0..grid.n_x() {
            for (j, &v) in grid.v_centers().iter().enumerate() {
                let expected = (-v * v / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
                assert_relative_eq!(f.get(i, j), expected, max_relative = 1e-15);
            }
        }
    }

    #[test]
    fn discontinuity_tie_goes_outside() {
        let ic = InitialCondition::default();
        assert_eq!(ic.state_at(0.5), ic.outer);
        assert_eq!(ic.state_at(-0.5), ic.outer);
        assert_eq!(ic.state_at(0.499_999), ic.inner);
    }

    #[test]
    fn run_config_validation() {
        assert!(RunConfig::default().validate().is_ok());
        let bad = |f: fn(&mut RunConfig)| {
            let mut c = RunConfig::default();
            f(&mut c);
            c.validate().is_err()
        };
        assert!(bad(|c| c.epsilon = 0.0));
        assert!(bad(|c| c.cfl = 2.5));
        assert!(bad(|c| c.cfl = 0.0));
        assert!(bad(|c| c.final_time = 0.0));
        assert!(bad(|c| c.ic.inner.temperature = -1.0));
        assert!(bad(|c| c.ic.outer.rho = 0.0));
        let edge = RunConfig {
            cfl: 2.0,
            ..RunConfig::default()
        };
        assert!(edge.validate().is_ok());
    }
}
