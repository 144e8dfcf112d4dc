//! Uniform one-dimensional grids, point-valued solution states and scalar
//! flux functions.
//!
//! All public indexing is 1-based: cell `i` spans
//! `[x_left + (i - 1) h, x_left + i h]` for `i = 1..=n_cells`.

use std::ops::RangeInclusive;

use crate::error::{Error, Result};

/// Number of fixed cells at each end of a Dirichlet-padded grid.
pub const PAD_WIDTH: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    /// Index 0 maps to n and n + 1 maps to 1.
    Periodic,
    /// Cells {1, 2, n - 1, n} hold exact values and are never updated.
    DirichletPadded,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    n_cells: usize,
    h: f64,
    x_left: f64,
    topology: Topology,
}

impl Grid {
    pub fn new(n_cells: usize, length: f64, x_left: f64, topology: Topology) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) || !x_left.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "domain [{x_left}, {x_left} + {length}] is not a positive finite interval"
            )));
        }
        let min_cells = match topology {
            Topology::Periodic => 3,
            Topology::DirichletPadded => 2 * PAD_WIDTH + 1,
        };
        if n_cells < min_cells {
            return Err(Error::InvalidGrid(format!(
                "{topology:?} grid needs at least {min_cells} cells, got {n_cells}"
            )));
        }
        Ok(Self {
            n_cells,
            h: length / n_cells as f64,
            x_left,
            topology,
        })
    }

    /// Grid over the unit interval `[0, 1]`.
    pub fn unit(n_cells: usize, topology: Topology) -> Result<Self> {
        Self::new(n_cells, 1.0, 0.0, topology)
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn x_left(&self) -> f64 {
        self.x_left
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn is_periodic(&self) -> bool {
        self.topology == Topology::Periodic
    }

    pub fn cell_center(&self, i: usize) -> Result<f64> {
        if i == 0 || i > self.n_cells {
            return Err(Error::IndexOutOfRange {
                index: i,
                n_cells: self.n_cells,
            });
        }
        Ok(self.center_unchecked(i))
    }

    #[inline]
    pub(crate) fn center_unchecked(&self, i: usize) -> f64 {
        self.x_left + (i as f64 - 0.5) * self.h
    }

    /// Stencil access for offsets in `-2..=2`.
    ///
    /// Periodic grids wrap. Padded grids return the raw index and panic if it
    /// leaves `1..=n`; callers only ask for neighbours of interior cells.
    #[inline]
    pub fn neighbor(&self, i: usize, offset: isize) -> usize {
        assert!(offset.abs() <= 2, "stencil offset {offset} outside [-2, 2]");
        let n = self.n_cells as isize;
        let j = i as isize + offset;
        match self.topology {
            Topology::Periodic => ((j - 1).rem_euclid(n) + 1) as usize,
            Topology::DirichletPadded => {
                assert!(
                    (1..=n).contains(&j),
                    "padded grid: neighbor {j} of cell {i} is outside 1..={n}"
                );
                j as usize
            }
        }
    }

    /// Cells whose residual is assembled and whose values are unknowns.
    pub fn interior(&self) -> RangeInclusive<usize> {
        match self.topology {
            Topology::Periodic => 1..=self.n_cells,
            Topology::DirichletPadded => (PAD_WIDTH + 1)..=(self.n_cells - PAD_WIDTH),
        }
    }

    pub fn n_interior(&self) -> usize {
        let r = self.interior();
        r.end() - r.start() + 1
    }

    pub fn is_fixed(&self, i: usize) -> bool {
        !self.interior().contains(&i)
    }

    /// Centres of all cells, in order.
    pub fn centers(&self) -> impl Iterator<Item = f64> + '_ {
        (1..=self.n_cells).map(move |i| self.center_unchecked(i))
    }
}

/// Point values `u_i` at cell centres.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    grid: Grid,
    values: Vec<f64>,
}

impl State {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_cells() {
            return Err(Error::LengthMismatch {
                expected: grid.n_cells(),
                actual: values.len(),
            });
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: "state",
                cell: k + 1,
            });
        }
        Ok(Self { grid, values })
    }

    /// Samples `f` at every cell centre.
    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid, grid.centers().map(f).collect())
    }

    pub fn try_from_fn(grid: Grid, f: impl Fn(f64) -> Result<f64>) -> Result<Self> {
        let values = grid.centers().map(f).collect::<Result<Vec<_>>>()?;
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// 1-based access.
    #[inline]
    pub fn at(&self, i: usize) -> f64 {
        self.values[i - 1]
    }

    /// Value at `neighbor(i, offset)`.
    #[inline]
    pub fn around(&self, i: usize, offset: isize) -> f64 {
        self.values[self.grid.neighbor(i, offset) - 1]
    }
}

/// Scalar physical flux `f(u)` with its exact derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FluxFunction {
    /// `f = a u`
    Linear(f64),
    /// `f = u^2 / 2`
    Burgers,
}

impl FluxFunction {
    #[inline]
    pub fn eval(&self, u: f64) -> f64 {
        match *self {
            FluxFunction::Linear(a) => a * u,
            FluxFunction::Burgers => 0.5 * u * u,
        }
    }

    #[inline]
    pub fn derivative(&self, u: f64) -> f64 {
        match *self {
            FluxFunction::Linear(a) => a,
            FluxFunction::Burgers => u,
        }
    }
}
