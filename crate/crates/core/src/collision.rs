//! BGK relaxation sub-step.
//!
//! With the equilibrium held fixed over the sub-step, the two TR-BDF2 stages
//! collapse to a single blend `f <- theta * M + (1 - theta) * f`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::DistributionField;

/// Blend weight of one TR-BDF2 step of length `h`:
/// `h (h + 12 eps) / ((h + 3 eps)(h + 4 eps))`.
pub fn collision_theta(h: f64, epsilon: f64) -> Result<f64> {
    if !(h > 0.0 && epsilon > 0.0) || !h.is_finite() || !epsilon.is_finite() {
        return Err(Error::InvalidCollision { h, epsilon });
    }
    Ok(h * (h + 12.0 * epsilon) / ((h + 3.0 * epsilon) * (h + 4.0 * epsilon)))
}

/// Which expression feeds the half-step blend weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThetaRule {
    /// `collision_theta(dt / 2, eps) = dt (dt + 24 eps) / ((dt + 6 eps)(dt + 8 eps))`.
    #[default]
    HalfStep,
    /// `dt (dt + 48 eps) / ((dt + 6 eps)(dt + 8 eps))`. Inconsistent with the
    /// TR-BDF2 reduction; kept only so tests can show the difference.
    Printed48,
}

impl ThetaRule {
    pub fn name(self) -> &'static str {
        match self {
            ThetaRule::HalfStep => "half_step_24eps",
            ThetaRule::Printed48 => "printed_48eps",
        }
    }

    /// Weight for one collision half-step of a Strang step of length `dt`.
    pub fn half_step_theta(self, dt: f64, epsilon: f64) -> Result<f64> {
        match self {
            ThetaRule::HalfStep => collision_theta(0.5 * dt, epsilon),
            ThetaRule::Printed48 => {
                collision_theta(dt, epsilon)?;
                Ok(dt * (dt + 48.0 * epsilon) / ((dt + 6.0 * epsilon) * (dt + 8.0 * epsilon)))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionParams {
    pub theta: f64,
    pub substep: f64,
    pub epsilon: f64,
}

impl CollisionParams {
    pub fn new(substep: f64, epsilon: f64) -> Result<Self> {
        Ok(Self {
            theta: collision_theta(substep, epsilon)?,
            substep,
            epsilon,
        })
    }
}

/// In-place blend `f_ij <- theta * target_ij + (1 - theta) * f_ij`.
pub fn collision_step(f: &mut DistributionField, target: &DistributionField, theta: f64) -> Result<()> {
    f.same_shape(target)?;
    let keep = 1.0 - theta;
    f.values_mut()
        .par_iter_mut()
        .zip(target.values().par_iter())
        .for_each(|(fv, &m)| *fv = theta * m + keep * *fv);
    Ok(())
}
