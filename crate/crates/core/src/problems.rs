//! Model problems with exact point values, exact cell averages and exact
//! cell-averaged forcing.
//!
//! Steady problems live on `[0, 1]` with two fixed cells at each end and
//! exact solution `sin(2x)`. Unsteady problems are periodic on `[0, 1]` and
//! start from `sin(2 pi x)`.

use std::f64::consts::PI;

use crate::domain::{FluxFunction, Grid, Topology};
use crate::error::{Error, Result};

/// Final time of the unsteady studies.
pub const UNSTEADY_FINAL_TIME: f64 = 0.105;

/// Default advection speed of the linear convection problem.
pub const LINEAR_SPEED: f64 = 0.75;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProblemKind {
    /// `(u^2/2)_x = s`, `u = sin 2x`.
    SteadyBurgers,
    /// `(u^2/2)_x = nu u_xx + s`, `u = sin 2x`.
    SteadyViscousBurgers,
    /// `u_t + (u^2/2)_x = 0`, `u(x, 0) = sin 2 pi x`, periodic.
    UnsteadyBurgers,
    /// `u_t + (a u)_x = 0`, `u(x, 0) = sin 2 pi x`, periodic.
    UnsteadyLinear,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Problem {
    pub kind: ProblemKind,
    pub flux: FluxFunction,
    pub nu: f64,
    pub final_time: Option<f64>,
    /// Whether the source term enters the residual.
    pub forcing: bool,
}

pub fn steady_burgers() -> Problem {
    Problem {
        kind: ProblemKind::SteadyBurgers,
        flux: FluxFunction::Burgers,
        nu: 0.0,
        final_time: None,
        forcing: true,
    }
}

pub fn steady_viscous_burgers() -> Problem {
    steady_viscous_burgers_with(1.0)
}

pub fn steady_viscous_burgers_with(nu: f64) -> Problem {
    Problem {
        kind: ProblemKind::SteadyViscousBurgers,
        flux: FluxFunction::Burgers,
        nu,
        final_time: None,
        forcing: true,
    }
}

pub fn unsteady_burgers() -> Problem {
    Problem {
        kind: ProblemKind::UnsteadyBurgers,
        flux: FluxFunction::Burgers,
        nu: 0.0,
        final_time: Some(UNSTEADY_FINAL_TIME),
        forcing: false,
    }
}

pub fn unsteady_linear(a: f64) -> Problem {
    Problem {
        kind: ProblemKind::UnsteadyLinear,
        flux: FluxFunction::Linear(a),
        nu: 0.0,
        final_time: Some(UNSTEADY_FINAL_TIME),
        forcing: false,
    }
}

impl Problem {
    pub fn is_steady(&self) -> bool {
        matches!(
            self.kind,
            ProblemKind::SteadyBurgers | ProblemKind::SteadyViscousBurgers
        )
    }

    pub fn topology(&self) -> Topology {
        if self.is_steady() {
            Topology::DirichletPadded
        } else {
            Topology::Periodic
        }
    }

    pub fn grid(&self, n_cells: usize) -> Result<Grid> {
        Grid::unit(n_cells, self.topology())
    }

    /// Time at which errors are measured: 0 for steady problems.
    pub fn reference_time(&self) -> f64 {
        self.final_time.unwrap_or(0.0)
    }

    pub fn with_final_time(mut self, t: f64) -> Self {
        if !self.is_steady() {
            self.final_time = Some(t);
        }
        self
    }

    pub fn initial(&self, x: f64) -> f64 {
        match self.kind {
            ProblemKind::SteadyBurgers | ProblemKind::SteadyViscousBurgers => (2.0 * x).sin(),
            _ => (2.0 * PI * x).sin(),
        }
    }

    /// Exact point value at `(x, t)`; `t` is ignored for steady problems.
    pub fn exact_at(&self, x: f64, t: f64) -> Result<f64> {
        Ok(match self.kind {
            ProblemKind::SteadyBurgers | ProblemKind::SteadyViscousBurgers => (2.0 * x).sin(),
            ProblemKind::UnsteadyBurgers => {
                let xi = burgers_foot(x, t)?;
                (2.0 * PI * xi).sin()
            }
            ProblemKind::UnsteadyLinear => (2.0 * PI * (x - self.speed() * t)).sin(),
        })
    }

    pub fn exact_point(&self, x: f64) -> Result<f64> {
        self.exact_at(x, self.reference_time())
    }

    /// Exact average over `[x_i - h/2, x_i + h/2]` at time `t`.
    pub fn exact_cell_avg_at(&self, x_i: f64, h: f64, t: f64) -> Result<f64> {
        Ok(match self.kind {
            ProblemKind::SteadyBurgers | ProblemKind::SteadyViscousBurgers => {
                ((h - 2.0 * x_i).cos() - (h + 2.0 * x_i).cos()) / (2.0 * h)
            }
            ProblemKind::UnsteadyBurgers => {
                // x = xi + t u0(xi) maps the cell to [xa, xb] in foot
                // coordinates; integrate u0 (1 + t u0') d xi there.
                let xa = burgers_foot(x_i - 0.5 * h, t)?;
                let xb = burgers_foot(x_i + 0.5 * h, t)?;
                let w = 2.0 * PI;
                let (sa, sb) = ((w * xa).sin(), (w * xb).sin());
                (((w * xa).cos() - (w * xb).cos()) / w + 0.5 * t * (sb * sb - sa * sa)) / h
            }
            ProblemKind::UnsteadyLinear => {
                let s = self.speed() * t;
                let w = 2.0 * PI;
                ((w * (x_i - 0.5 * h - s)).cos() - (w * (x_i + 0.5 * h - s)).cos()) / (w * h)
            }
        })
    }

    pub fn exact_cell_avg(&self, x_i: f64, h: f64) -> Result<f64> {
        self.exact_cell_avg_at(x_i, h, self.reference_time())
    }

    pub fn has_forcing(&self) -> bool {
        self.forcing && self.is_steady()
    }

    /// Same problem with the source term switched off.
    pub fn without_forcing(mut self) -> Self {
        self.forcing = false;
        self
    }

    pub fn forcing_point(&self, x: f64) -> f64 {
        match self.kind {
            ProblemKind::SteadyBurgers => 2.0 * (2.0 * x).sin() * (2.0 * x).cos(),
            ProblemKind::SteadyViscousBurgers => {
                2.0 * (2.0 * x).sin() * (2.0 * x).cos() + 4.0 * self.nu * (2.0 * x).sin()
            }
            _ => 0.0,
        }
    }

    pub fn forcing_cell_avg(&self, x_i: f64, h: f64) -> f64 {
        let convective = || {
            let (cm, cp) = ((h - 2.0 * x_i).cos(), (h + 2.0 * x_i).cos());
            (cm * cm - cp * cp) / (2.0 * h)
        };
        match self.kind {
            ProblemKind::SteadyBurgers => convective(),
            ProblemKind::SteadyViscousBurgers => {
                convective()
                    + 2.0 * self.nu / h * ((h - 2.0 * x_i).cos() - (h + 2.0 * x_i).cos())
            }
            _ => 0.0,
        }
    }

    fn speed(&self) -> f64 {
        match self.flux {
            FluxFunction::Linear(a) => a,
            FluxFunction::Burgers => 0.0,
        }
    }
}

/// Foot of the characteristic through `(x, t)` for inviscid Burgers with
/// `u0 = sin(2 pi x)`: solves `xi + t sin(2 pi xi) = x`.
///
/// Safeguarded Newton on the bracket `[x - t, x + t]`. Fails once the
/// characteristics have crossed (`2 pi t >= 1`).
pub fn burgers_foot(x: f64, t: f64) -> Result<f64> {
    if t == 0.0 {
        return Ok(x);
    }
    let w = 2.0 * PI;
    if !(t > 0.0 && w * t < 1.0) {
        return Err(Error::Characteristics { x, t });
    }
    let g = |xi: f64| xi + t * (w * xi).sin() - x;
    let (mut lo, mut hi) = (x - t, x + t);
    let mut xi = x - t * (w * x).sin();
    for _ in 0..100 {
        let r = g(xi);
        if r == 0.0 {
            return Ok(xi);
        }
        if r < 0.0 {
            lo = xi;
        } else {
            hi = xi;
        }
        let mut next = xi - r / (1.0 + w * t * (w * xi).cos());
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - xi).abs() <= 1e-15 * (1.0 + xi.abs()) {
            return Ok(next);
        }
        xi = next;
    }
    Err(Error::Characteristics { x, t })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// 5-point Gauss-Legendre average over `[c - h/2, c + h/2]`.
    fn gauss5_avg(f: impl Fn(f64) -> f64, c: f64, h: f64) -> f64 {
        let a = (245.0 - 14.0 * (70.0f64).sqrt()).sqrt() / 21.0;
        let b = (245.0 + 14.0 * (70.0f64).sqrt()).sqrt() / 21.0;
        let wa = (322.0 + 13.0 * (70.0f64).sqrt()) / 900.0;
        let wb = (322.0 - 13.0 * (70.0f64).sqrt()) / 900.0;
        let nodes = [(0.0, 128.0 / 225.0), (a, wa), (-a, wa), (b, wb), (-b, wb)];
        0.5 * nodes.iter().map(|&(s, w)| w * f(c + 0.5 * h * s)).sum::<f64>()
    }

    /// Composite rule over `m` equal sub-cells.
    fn gauss5_avg_composite(f: impl Fn(f64) -> f64, c: f64, h: f64, m: usize) -> f64 {
        let hs = h / m as f64;
        (0..m)
            .map(|k| gauss5_avg(&f, c - 0.5 * h + (k as f64 + 0.5) * hs, hs))
            .sum::<f64>()
            / m as f64
    }

    fn grids() -> impl Iterator<Item = usize> {
        [15usize, 31, 63, 127].into_iter()
    }

    #[test]
    fn steady_closed_forms_match_quadrature() {
        for p in [steady_burgers(), steady_viscous_burgers()] {
            for n in grids() {
                let g = p.grid(n).unwrap();
                let h = g.h();
                for x in g.centers() {
                    let q = gauss5_avg(|y| p.forcing_point(y), x, h);
                    assert!((q - p.forcing_cell_avg(x, h)).abs() < 1e-12, "{:?} n={n}", p.kind);
                    let q = gauss5_avg(|y| p.exact_at(y, 0.0).unwrap(), x, h);
                    assert!((q - p.exact_cell_avg(x, h).unwrap()).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn viscous_forcing_reduces_to_inviscid() {
        let v = steady_viscous_burgers_with(0.0);
        let b = steady_burgers();
        for x in [0.1, 0.37, 0.9] {
            assert_eq!(v.forcing_point(x), b.forcing_point(x));
            assert_eq!(v.forcing_cell_avg(x, 0.05), b.forcing_cell_avg(x, 0.05));
        }
    }

    #[test]
    fn steady_exact_solutions_satisfy_their_equations() {
        for p in [steady_burgers(), steady_viscous_burgers()] {
            for k in 0..1000 {
                let x = k as f64 / 999.0;
                let u = (2.0 * x).sin();
                let ux = 2.0 * (2.0 * x).cos();
                let uxx = -4.0 * u;
                let r = u * ux - p.nu * uxx - p.forcing_point(x);
                assert!(r.abs() < 1e-12);
            }
        }
        assert_eq!(steady_burgers().exact_point(0.0).unwrap(), 0.0);
    }

    #[test]
    fn cell_average_deconvolution_is_second_order() {
        // avg - u = (h^2/24) u_xx + O(h^4) with u_xx = -4 sin 2x.
        let p = steady_burgers();
        let x = 0.3;
        let gap = |h: f64| p.exact_cell_avg(x, h).unwrap() - (2.0 * x).sin();
        let lead = |h: f64| -h * h / 6.0 * (2.0 * x).sin();
        let e1 = (gap(0.1) - lead(0.1)).abs();
        let e2 = (gap(0.05) - lead(0.05)).abs();
        assert!(((e1 / e2).log2() - 4.0).abs() < 0.1);
        let order = (gap(0.1) / gap(0.05)).log2();
        assert!((order - 2.0).abs() < 0.01);
    }

    #[test]
    fn unsteady_reference_values() {
        let p = unsteady_burgers();
        for x in [0.0, 0.13, 0.5, 0.77] {
            assert_eq!(p.exact_at(x, 0.0).unwrap(), p.initial(x));
        }
        for t in [0.0, 0.05, 0.105, 0.15] {
            assert!(p.exact_at(0.0, t).unwrap().abs() < 1e-14);
            assert!(p.exact_at(0.5, t).unwrap().abs() < 1e-14);
        }
        // characteristic relation u = u0(x - u t)
        for k in 0..50 {
            let x = k as f64 / 50.0;
            let t = UNSTEADY_FINAL_TIME;
            let u = p.exact_at(x, t).unwrap();
            assert!((u - (2.0 * PI * (x - u * t)).sin()).abs() < 1e-13);
        }
        assert!(burgers_foot(0.2, 0.2).is_err());
    }

    #[test]
    fn unsteady_cell_averages_match_quadrature() {
        let t = UNSTEADY_FINAL_TIME;
        for p in [unsteady_burgers(), unsteady_linear(LINEAR_SPEED)] {
            for n in [32usize, 64, 128] {
                let g = p.grid(n).unwrap();
                for x in g.centers() {
                    let q = gauss5_avg_composite(|y| p.exact_at(y, t).unwrap(), x, g.h(), 16);
                    assert!((q - p.exact_cell_avg(x, g.h()).unwrap()).abs() < 1e-12, "{:?}", p.kind);
                }
            }
        }
    }

    #[test]
    fn linear_translation() {
        let p = unsteady_linear(LINEAR_SPEED);
        for x in [0.0, 0.2, 0.9] {
            assert_eq!(p.exact_at(x, 0.0).unwrap(), p.initial(x));
            let t = 0.37;
            let shifted = (x - 0.75 * t).rem_euclid(1.0);
            assert!((p.exact_at(x, t).unwrap() - p.exact_at(shifted, 0.0).unwrap()).abs() < 1e-13);
        }
    }
}
