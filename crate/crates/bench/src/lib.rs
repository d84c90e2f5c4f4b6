//! Shared fixtures for the criterion benches.

use bgk_core::{
    compute_moments, plan_timestepping, sample_initial_condition, DistributionField, FluidMoments, GridSpec,
    PhaseSpaceGrid, RunConfig, TimeStepping,
};

pub struct Fixture {
    pub grid: PhaseSpaceGrid,
    pub config: RunConfig,
    pub timing: TimeStepping,
    pub field: DistributionField,
    pub moments: FluidMoments,
}

/// The reference Riemann setup at the given resolution.
pub fn riemann(n_x: usize, n_v: usize) -> Fixture {
    let grid = GridSpec {
        n_x,
        n_v,
        ..GridSpec::default()
    }
    .build()
    .expect("valid grid");
    let config = RunConfig::default();
    let timing = plan_timestepping(&grid, &config).expect("valid plan");
    let field = sample_initial_condition(&grid, &config.ic);
    let moments = compute_moments(&field, &grid).expect("positive moments");
    Fixture {
        grid,
        config,
        timing,
        field,
        moments,
    }
}
