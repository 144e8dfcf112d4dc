//! L1 truncation and discretization error norms and observed orders.
//!
//! Padded grids average over the `n - 4` interior cells, periodic grids over
//! all `n` cells. The numerical solution is always read as point values; the
//! cell-average norms compare it, unconverted, with exact cell averages.

use crate::domain::{Grid, State};
use crate::error::{Error, Result};
use crate::problems::Problem;
use crate::residual::assemble_residual;
use crate::scheme::SchemeConfig;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ErrorReport {
    pub n_cells: usize,
    pub h: f64,
    pub te_point: Option<f64>,
    pub te_cellavg: Option<f64>,
    pub de_point: Option<f64>,
    pub de_cellavg: Option<f64>,
}

/// Which of the four norms of an [`ErrorReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Norm {
    TePoint,
    TeCellAvg,
    DePoint,
    DeCellAvg,
}

impl Norm {
    pub const ALL: [Norm; 4] = [Norm::TePoint, Norm::TeCellAvg, Norm::DePoint, Norm::DeCellAvg];

    pub fn name(self) -> &'static str {
        match self {
            Norm::TePoint => "te_point",
            Norm::TeCellAvg => "te_cellavg",
            Norm::DePoint => "de_point",
            Norm::DeCellAvg => "de_cellavg",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Norm::TePoint => "L1 truncation error, point-valued exact solution",
            Norm::TeCellAvg => "L1 truncation error, cell-averaged exact solution",
            Norm::DePoint => "L1 discretization error vs exact point values",
            Norm::DeCellAvg => "L1 discretization error vs exact cell averages",
        }
    }
}

impl ErrorReport {
    pub fn get(&self, norm: Norm) -> Option<f64> {
        match norm {
            Norm::TePoint => self.te_point,
            Norm::TeCellAvg => self.te_cellavg,
            Norm::DePoint => self.de_point,
            Norm::DeCellAvg => self.de_cellavg,
        }
    }
}

/// Mean absolute residual with the exact point values (`te_point`) and with
/// the exact cell averages (`te_cellavg`) substituted.
pub fn truncation_error_norms(problem: &Problem, config: &SchemeConfig, grid: &Grid) -> Result<(f64, f64)> {
    if !problem.is_steady() {
        return Err(Error::Config("truncation errors are defined for steady problems".into()));
    }
    let h = grid.h();
    let point = State::try_from_fn(*grid, |x| problem.exact_point(x))?;
    let avg = State::try_from_fn(*grid, |x| problem.exact_cell_avg(x, h))?;
    let te_p = assemble_residual(&point, problem, config)?.l1_mean(grid.interior());
    let te_c = assemble_residual(&avg, problem, config)?.l1_mean(grid.interior());
    Ok((te_p, te_c))
}

/// `(de_point, de_cellavg)` at the problem's reference time.
pub fn discretization_error_norms(solution: &State, problem: &Problem, interior_only: bool) -> Result<(f64, f64)> {
    let grid = solution.grid();
    let h = grid.h();
    let cells = if interior_only {
        grid.interior()
    } else {
        1..=grid.n_cells()
    };
    let count = (cells.end() + 1 - cells.start()) as f64;
    let (mut ep, mut ec) = (0.0, 0.0);
    for i in cells {
        let x = grid.center_unchecked(i);
        let u = solution.at(i);
        ep += (u - problem.exact_point(x)?).abs();
        ec += (u - problem.exact_cell_avg(x, h)?).abs();
    }
    Ok((ep / count, ec / count))
}

/// `log(e_c / e_f) / log(h_c / h_f)`; `None` when any input is not positive
/// or the grids coincide.
pub fn observed_order(e_coarse: f64, e_fine: f64, h_coarse: f64, h_fine: f64) -> Option<f64> {
    let ok = |v: f64| v.is_finite() && v > 0.0;
    if !(ok(e_coarse) && ok(e_fine) && ok(h_coarse) && ok(h_fine)) || h_coarse == h_fine {
        return None;
    }
    Some((e_coarse / e_fine).ln() / (h_coarse / h_fine).ln())
}

/// Least-squares slope of `log e` against `log h`.
pub fn least_squares_order(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 || points.iter().any(|&(h, e)| !(h > 0.0 && e > 0.0)) {
        return None;
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderRow {
    pub h_coarse: f64,
    pub h_fine: f64,
    pub error_coarse: f64,
    pub error_fine: f64,
    pub observed_order: Option<f64>,
}

/// Pairwise observed orders over a refinement sequence of one scheme and
/// one norm.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OrderTable {
    pub label: String,
    pub norm: Option<Norm>,
    /// `(h, error)` from coarsest to finest.
    pub points: Vec<(f64, f64)>,
    pub rows: Vec<OrderRow>,
}

impl OrderTable {
    /// Builds the table from `(h, error)` pairs in any order.
    pub fn new(label: impl Into<String>, norm: Option<Norm>, mut points: Vec<(f64, f64)>) -> Self {
        points.sort_by(|a, b| b.0.total_cmp(&a.0));
        let rows = points
            .windows(2)
            .map(|w| OrderRow {
                h_coarse: w[0].0,
                h_fine: w[1].0,
                error_coarse: w[0].1,
                error_fine: w[1].1,
                observed_order: observed_order(w[0].1, w[1].1, w[0].0, w[1].0),
            })
            .collect();
        Self {
            label: label.into(),
            norm,
            points,
            rows,
        }
    }

    /// Order on the finest pair of grids.
    pub fn finest_order(&self) -> Option<f64> {
        self.rows.last().and_then(|r| r.observed_order)
    }

    /// Least-squares order over the last `k` grids.
    pub fn tail_order(&self, k: usize) -> Option<f64> {
        let start = self.points.len().checked_sub(k)?;
        least_squares_order(&self.points[start..])
    }
}
