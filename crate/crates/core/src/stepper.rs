//! Strang-split time loop: half collision, full transport, half collision.

use crate::collision::{collision_step, ThetaRule};
use crate::correction::{compute_correction, eval_modified_maxwellian_into};
use crate::error::{Error, Result};
use crate::field::DistributionField;
use crate::grid::{sample_initial_condition, PhaseSpaceGrid, RunConfig};
use crate::moments::{compute_moments, eval_maxwellian_into, FluidMoments};
use crate::transport::{transport_step_into, CourantNumbers};

/// Resolved step size and blend weight for a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeStepping {
    pub dt: f64,
    pub n_steps: usize,
    /// `v_max_abs * dt / dx` after the step size was shrunk to divide `final_time`.
    pub cfl_effective: f64,
    pub theta_half: f64,
    pub theta_rule: ThetaRule,
    pub final_time: f64,
}

impl TimeStepping {
    /// Uses exactly `n_steps` steps to reach `final_time`.
    pub fn with_steps(grid: &PhaseSpaceGrid, epsilon: f64, final_time: f64, n_steps: usize, rule: ThetaRule) -> Result<Self> {
        if n_steps == 0 {
            return Err(Error::InvalidConfig("n_steps must be positive".into()));
        }
        let dt = final_time / n_steps as f64;
        Ok(Self {
            dt,
            n_steps,
            cfl_effective: grid.v_max_abs() * dt / grid.dx(),
            theta_half: rule.half_step_theta(dt, epsilon)?,
            theta_rule: rule,
            final_time,
        })
    }

    /// Time reached after `step` steps; the last step lands on `final_time` exactly.
    pub fn time_at(&self, step: usize) -> f64 {
        if step >= self.n_steps {
            self.final_time
        } else {
            step as f64 * self.dt
        }
    }
}

/// Number of steps for a provisional `dt = dx * cfl / v_max`. A ratio within
/// a few ulps of an integer is not rounded up to the next one.
fn step_count(final_time: f64, provisional_dt: f64) -> usize {
    let ratio = final_time / provisional_dt;
    let nearest = ratio.round();
    let n = if nearest >= 1.0 && (ratio - nearest).abs() <= 4.0 * f64::EPSILON * ratio {
        nearest
    } else {
        ratio.ceil()
    };
    (n as usize).max(1)
}

pub fn plan_timestepping(grid: &PhaseSpaceGrid, config: &RunConfig) -> Result<TimeStepping> {
    plan_timestepping_with(grid, config, ThetaRule::HalfStep)
}

pub fn plan_timestepping_with(grid: &PhaseSpaceGrid, config: &RunConfig, rule: ThetaRule) -> Result<TimeStepping> {
    let provisional = grid.dx() * config.cfl / grid.v_max_abs();
    let n_steps = step_count(config.final_time, provisional);
    TimeStepping::with_steps(grid, config.epsilon, config.final_time, n_steps, rule)
}

/// Fills `out` with the collision target built from the moments of `f`: the
/// corrected Maxwellian, or the plain one when `corrected` is false.
pub fn equilibrium_into(
    f: &DistributionField,
    grid: &PhaseSpaceGrid,
    corrected: bool,
    out: &mut DistributionField,
) -> Result<FluidMoments> {
    let moments = compute_moments(f, grid)?;
    if corrected {
        let coeffs = compute_correction(&moments, grid)?;
        eval_modified_maxwellian_into(&moments, &coeffs, grid, out)?;
    } else {
        eval_maxwellian_into(&moments, grid, out)?;
    }
    Ok(moments)
}

/// What a single Strang step observed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    /// Smallest value of either collision target in this step.
    pub min_target: f64,
}

/// Owns the scratch buffers for repeated Strang steps on one grid.
#[derive(Debug, Clone)]
pub struct StrangStepper {
    grid: PhaseSpaceGrid,
    timing: TimeStepping,
    corrected: bool,
    courant: CourantNumbers,
    f_star: DistributionField,
    target: DistributionField,
}

impl StrangStepper {
    pub fn new(grid: &PhaseSpaceGrid, timing: TimeStepping, corrected: bool) -> Self {
        Self {
            courant: CourantNumbers::new(grid, timing.dt),
            f_star: DistributionField::zeros_like(grid),
            target: DistributionField::zeros_like(grid),
            grid: grid.clone(),
            timing,
            corrected,
        }
    }

    pub fn timing(&self) -> &TimeStepping {
        &self.timing
    }

    pub fn courant(&self) -> &CourantNumbers {
        &self.courant
    }

    /// The most recent collision target.
    pub fn last_target(&self) -> &DistributionField {
        &self.target
    }

    pub fn step(&mut self, f: &mut DistributionField) -> Result<StepReport> {
        f.check_grid(&self.grid)?;
        let theta = self.timing.theta_half;

        equilibrium_into(f, &self.grid, self.corrected, &mut self.target)?;
        let mut min_target = self.target.min();
        collision_step(f, &self.target, theta)?;

        self.f_star.values_mut().copy_from_slice(f.values());
        transport_step_into(&self.f_star, &self.courant, f)?;

        equilibrium_into(f, &self.grid, self.corrected, &mut self.target)?;
        min_target = min_target.min(self.target.min());
        collision_step(f, &self.target, theta)?;

        f.check_finite()?;
        Ok(StepReport { min_target })
    }
}

/// One Strang step with freshly allocated scratch space.
pub fn strang_step(
    f: &mut DistributionField,
    grid: &PhaseSpaceGrid,
    timing: &TimeStepping,
    corrected: bool,
) -> Result<StepReport> {
    StrangStepper::new(grid, *timing, corrected).step(f)
}

/// Relative changes of the discrete totals, plus positivity diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservationRecord {
    pub step: usize,
    pub time: f64,
    pub drho: f64,
    pub dm: f64,
    pub de: f64,
    pub min_f: f64,
    pub min_mtilde: f64,
}

impl ConservationRecord {
    pub fn max_deviation(&self) -> f64 {
        self.drho.max(self.dm).max(self.de)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConservationSeries {
    pub records: Vec<ConservationRecord>,
}

impl ConservationSeries {
    pub fn last(&self) -> Option<&ConservationRecord> {
        self.records.last()
    }

    pub fn max_deviation(&self) -> f64 {
        self.records.iter().map(|r| r.max_deviation()).fold(0.0, f64::max)
    }
}

/// Compares totals `sum_ij g_j f_ij` for `g in {1, v, v^2}` against the initial field.
///
/// Each deviation is `|sum_ij (g_j f_ij - g_j f0_ij)| / |sum_ij g_j f0_ij|`, summed
/// with `i` then `j` ascending. When the initial total is negligible against
/// `sum_ij |g_j f0_ij|` (zero net momentum, say) that absolute sum is the
/// denominator instead.
#[derive(Debug, Clone)]
pub struct ConservationTracker {
    initial: DistributionField,
    v: Vec<f64>,
    denominators: [f64; 3],
}

/// Relative size below which a net initial total counts as zero.
pub const NEGLIGIBLE_TOTAL: f64 = 1e-8;

impl ConservationTracker {
    pub fn new(initial: &DistributionField, grid: &PhaseSpaceGrid) -> Self {
        let v = grid.v_centers().to_vec();
        let mut net = [0.0; 3];
        let mut abs = [0.0; 3];
        for cell in initial.cells() {
            for (&f, &vj) in cell.iter().zip(&v) {
                let g = [f, vj * f, vj * vj * f];
                for k in 0..3 {
                    net[k] += g[k];
                    abs[k] += g[k].abs();
                }
            }
        }
        let denominators = std::array::from_fn(|k| {
            if net[k].abs() > NEGLIGIBLE_TOTAL * abs[k] {
                net[k].abs()
            } else {
                abs[k]
            }
        });
        Self {
            initial: initial.clone(),
            v,
            denominators,
        }
    }

    pub fn denominators(&self) -> [f64; 3] {
        self.denominators
    }

    pub fn deviations(&self, f: &DistributionField) -> [f64; 3] {
        let mut diff = [0.0; 3];
        for (cell, cell0) in f.cells().zip(self.initial.cells()) {
            for ((&fv, &f0), &vj) in cell.iter().zip(cell0).zip(&self.v) {
                diff[0] += fv - f0;
                diff[1] += vj * fv - vj * f0;
                diff[2] += vj * vj * fv - vj * vj * f0;
            }
        }
        std::array::from_fn(|k| {
            let d = self.denominators[k];
            if d > 0.0 {
                diff[k].abs() / d
            } else {
                diff[k].abs()
            }
        })
    }
}

/// Field and moments at one recorded step.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub step: usize,
    pub time: f64,
    pub field: DistributionField,
    pub moments: FluidMoments,
}

/// A run in progress: owns the field, the stepper and the diagnostics.
#[derive(Debug, Clone)]
pub struct Simulation {
    grid: PhaseSpaceGrid,
    config: RunConfig,
    stepper: StrangStepper,
    field: DistributionField,
    tracker: ConservationTracker,
    series: ConservationSeries,
    step: usize,
}

impl Simulation {
    /// Validates `config`, samples the initial condition and plans the steps.
    pub fn new(grid: &PhaseSpaceGrid, config: &RunConfig) -> Result<Self> {
        config.validate()?;
        let timing = plan_timestepping(grid, config)?;
        let field = sample_initial_condition(grid, &config.ic);
        Self::from_field(grid, config, timing, field)
    }

    /// Starts from an arbitrary field with an explicit step plan.
    pub fn from_field(
        grid: &PhaseSpaceGrid,
        config: &RunConfig,
        timing: TimeStepping,
        field: DistributionField,
    ) -> Result<Self> {
        field.check_grid(grid)?;
        field.check_finite()?;
        let mut stepper = StrangStepper::new(grid, timing, config.correction_enabled);
        let mut scratch = DistributionField::zeros_like(grid);
        equilibrium_into(&field, grid, config.correction_enabled, &mut scratch).map_err(|e| e.at_step(0))?;
        stepper.target = scratch;

        let tracker = ConservationTracker::new(&field, grid);
        let series = ConservationSeries {
            records: vec![ConservationRecord {
                step: 0,
                time: 0.0,
                drho: 0.0,
                dm: 0.0,
                de: 0.0,
                min_f: field.min(),
                min_mtilde: stepper.target.min(),
            }],
        };
        Ok(Self {
            grid: grid.clone(),
            config: config.clone(),
            stepper,
            field,
            tracker,
            series,
            step: 0,
        })
    }

    pub fn grid(&self) -> &PhaseSpaceGrid {
        &self.grid
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn timing(&self) -> &TimeStepping {
        self.stepper.timing()
    }

    pub fn field(&self) -> &DistributionField {
        &self.field
    }

    pub fn into_field(self) -> DistributionField {
        self.field
    }

    pub fn series(&self) -> &ConservationSeries {
        &self.series
    }

    pub fn deviation_denominators(&self) -> [f64; 3] {
        self.tracker.denominators()
    }

    pub fn step_index(&self) -> usize {
        self.step
    }

    pub fn time(&self) -> f64 {
        if self.step == 0 {
            0.0
        } else {
            self.timing().time_at(self.step)
        }
    }

    pub fn is_finished(&self) -> bool {
        self.step >= self.timing().n_steps
    }

    pub fn moments(&self) -> Result<FluidMoments> {
        compute_moments(&self.field, &self.grid)
    }

    pub fn snapshot(&self) -> Result<Snapshot> {
        Ok(Snapshot {
            step: self.step,
            time: self.time(),
            field: self.field.clone(),
            moments: self.moments().map_err(|e| e.at_step(self.step))?,
        })
    }

    /// Advances one Strang step and records the conservation diagnostics.
    pub fn step(&mut self) -> Result<ConservationRecord> {
        let next = self.step + 1;
        let report = self.stepper.step(&mut self.field).map_err(|e| e.at_step(next))?;
        self.step = next;
        let [drho, dm, de] = self.tracker.deviations(&self.field);
        let record = ConservationRecord {
            step: next,
            time: self.time(),
            drho,
            dm,
            de,
            min_f: self.field.min(),
            min_mtilde: report.min_target,
        };
        self.series.records.push(record);
        Ok(record)
    }

    fn wants_snapshot(&self) -> bool {
        let every = self.config.output_every;
        self.step == 0 || self.is_finished() || (every > 0 && self.step.is_multiple_of(every))
    }

    /// Runs to `final_time`, handing every scheduled snapshot to `observer`.
    pub fn run_with(&mut self, mut observer: impl FnMut(&Snapshot) -> Result<()>) -> Result<()> {
        if self.wants_snapshot() {
            observer(&self.snapshot()?)?;
        }
        while !self.is_finished() {
            self.step()?;
            if self.wants_snapshot() {
                observer(&self.snapshot()?)?;
            }
        }
        Ok(())
    }
}

/// Result of a complete run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub field: DistributionField,
    pub series: ConservationSeries,
    pub snapshots: Vec<Snapshot>,
    pub timing: TimeStepping,
}

/// Initialises from `config.ic`, then steps to `config.final_time`.
pub fn run(grid: &PhaseSpaceGrid, config: &RunConfig) -> Result<RunOutput> {
    let mut sim = Simulation::new(grid, config)?;
    let mut snapshots = Vec::new();
    sim.run_with(|s| {
        snapshots.push(s.clone());
        Ok(())
    })?;
    Ok(RunOutput {
        timing: *sim.timing(),
        series: sim.series.clone(),
        field: sim.field,
        snapshots,
    })
}
