//! Cell-centred samples of the particle distribution function.

use crate::error::{Error, Result};
use crate::grid::PhaseSpaceGrid;

/// PDF values `f_ij` stored cell-major: the `n_v` velocity samples of
/// spatial cell `i` are contiguous, so `values[i * n_v + j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionField {
    n_x: usize,
    n_v: usize,
    values: Vec<f64>,
}

impl DistributionField {
    pub fn zeros(n_x: usize, n_v: usize) -> Self {
        Self {
            n_x,
            n_v,
            values: vec![0.0; n_x * n_v],
        }
    }

    pub fn zeros_like(grid: &PhaseSpaceGrid) -> Self {
        Self::zeros(grid.n_x(), grid.n_v())
    }

    /// Wraps a cell-major buffer. Panics if the length is not `n_x * n_v`.
    pub fn from_vec(n_x: usize, n_v: usize, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), n_x * n_v, "buffer length must be n_x * n_v");
        Self { n_x, n_v, values }
    }

    /// Samples `f(x_i, v_j)` at every cell centre of `grid`.
    pub fn from_fn(grid: &PhaseSpaceGrid, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.n_x() * grid.n_v());
        for &x in grid.x_centers() {
            for &v in grid.v_centers() {
                values.push(f(x, v));
            }
        }
        Self::from_vec(grid.n_x(), grid.n_v(), values)
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn n_v(&self) -> usize {
        self.n_v
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    /// Velocity samples of spatial cell `i` (0-based).
    pub fn cell(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_v..(i + 1) * self.n_v]
    }

    pub fn cell_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.values[i * self.n_v..(i + 1) * self.n_v]
    }

    pub fn cells(&self) -> std::slice::ChunksExact<'_, f64> {
        self.values.chunks_exact(self.n_v)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n_v + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.values[i * self.n_v + j] = value;
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn same_shape(&self, other: &Self) -> Result<()> {
        if self.n_x == other.n_x && self.n_v == other.n_v {
            Ok(())
        } else {
            Err(Error::ShapeMismatch {
                expected_x: self.n_x,
                expected_v: self.n_v,
                found_x: other.n_x,
                found_v: other.n_v,
            })
        }
    }

    pub fn check_grid(&self, grid: &PhaseSpaceGrid) -> Result<()> {
        if self.n_x == grid.n_x() && self.n_v == grid.n_v() {
            Ok(())
        } else {
            Err(Error::ShapeMismatch {
                expected_x: grid.n_x(),
                expected_v: grid.n_v(),
                found_x: self.n_x,
                found_v: self.n_v,
            })
        }
    }

    /// Fails on the first NaN or infinite entry.
    pub fn check_finite(&self) -> Result<()> {
        match self.values.iter().position(|v| !v.is_finite()) {
            None => Ok(()),
            Some(k) => Err(Error::NonFinite {
                cell: k / self.n_v + 1,
                velocity: k % self.n_v + 1,
                value: self.values[k],
            }),
        }
    }
}
