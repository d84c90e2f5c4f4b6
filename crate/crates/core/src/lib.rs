//! Conservative finite-difference solver for the 1D1V Boltzmann-BGK equation
//!
//! ```text
//! f_t + v f_x = (M[f] - f) / eps
//! ```
//!
//! on a periodic, velocity-truncated phase-space mesh. Each time step is
//! Strang split into two collision half-steps around a full transport step.
//! Transport uses a third-order four-point Lax-Wendroff-type stencil;
//! collisions use the closed-form TR-BDF2 blend toward a Maxwellian whose
//! Hermite correction makes the discrete mass, momentum and energy exact.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod collision;
pub mod config;
pub mod correction;
pub mod error;
pub mod field;
pub mod grid;
pub mod moments;
pub mod output;
pub mod stepper;
pub mod transport;

pub use collision::{collision_step, collision_theta, CollisionParams, ThetaRule};
pub use config::{parse_config, SolverConfig};
pub use correction::{
    compute_correction, eval_modified_maxwellian, quadrature_sums, solve_correction, CellCorrection,
    CorrectionCoefficients,
};
pub use error::{Error, Result};
pub use field::DistributionField;
pub use grid::{sample_initial_condition, FluidState, GridSpec, InitialCondition, PhaseSpaceGrid, RunConfig};
pub use moments::{compute_moments, eval_maxwellian, maxwellian, FluidMoments};
pub use stepper::{
    plan_timestepping, run, strang_step, ConservationRecord, ConservationSeries, RunOutput, Simulation, Snapshot,
    StrangStepper, TimeStepping,
};
pub use transport::{transport_step, CourantNumbers};
