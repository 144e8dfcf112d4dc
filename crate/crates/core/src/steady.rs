//! Steady solver: defect correction of the high-order residual with the
//! exact Jacobian of the first-order upwind scheme.
//!
//! Each iteration solves `(J1 + D/dtau) du = -Res_high(u)` on the padded
//! grid, with a pseudo-time term that starts at CFL 10, doubles every
//! iteration and is dropped once the CFL exceeds `cfl_max`.

use crate::domain::State;
use crate::error::{Error, Result};
use crate::flux::dissipation_coefficient;
use crate::linalg::TridiagonalSystem;
use crate::par::Execution;
use crate::problems::Problem;
use crate::residual::{assemble_with, FaceEvaluator};
use crate::scheme::SchemeConfig;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyOptions {
    /// Target mean absolute residual over the interior cells.
    pub tol: f64,
    pub max_iter: usize,
    pub cfl_start: f64,
    pub cfl_growth: f64,
    /// Above this CFL the pseudo-time term is dropped.
    pub cfl_max: f64,
}

impl Default for SteadyOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 10_000,
            cfl_start: 10.0,
            cfl_growth: 2.0,
            cfl_max: 1e6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteadySolveReport {
    /// Number of solution updates performed.
    pub iterations: usize,
    pub final_residual_l1: f64,
    /// Tolerance actually applied: the requested one, raised to the
    /// round-off floor of the residual where that is larger.
    pub effective_tol: f64,
    pub converged: bool,
    /// Mean absolute residual before each update, plus the final value.
    pub history: Vec<f64>,
}

impl SteadySolveReport {
    /// `iteration,l1_residual` lines with a header.
    pub fn history_csv(&self) -> String {
        let mut out = String::from("iteration,l1_residual\n");
        for (k, r) in self.history.iter().enumerate() {
            out.push_str(&format!("{k},{r:e}\n"));
        }
        out
    }
}

/// Multiple of machine epsilon used for the round-off floor.
pub const ROUNDOFF_FACTOR: f64 = 16.0;

/// Smallest mean residual that can be resolved in double precision:
/// `ROUNDOFF_FACTOR * eps * max|u| * (max|f'(u)| / h + nu / h^2)`.
///
/// Rounding each `u_i` to the nearest double already changes the residual by
/// about `eps |u| nu / h^2`, so on fine viscous grids a fixed absolute
/// tolerance can sit below what any representable state achieves.
pub fn roundoff_floor(state: &State, problem: &Problem) -> f64 {
    let h = state.grid().h();
    let (mut umax, mut amax) = (0.0f64, 0.0f64);
    for &u in state.values() {
        umax = umax.max(u.abs());
        amax = amax.max(problem.flux.derivative(u).abs());
    }
    ROUNDOFF_FACTOR * f64::EPSILON * umax * (amax / h + problem.nu / (h * h))
}

/// Jacobian of the first-order residual
/// `(F1_{i+1/2} - F1_{i-1/2}) / h - s_i`, with
/// `F1_{i+1/2} = (f(u_i) + f(u_{i+1}))/2 - D/2 (u_{i+1} - u_i) - nu (u_{i+1} - u_i)/h`
/// and `D = |f'((u_i + u_{i+1})/2)|` frozen. Fixed cells get identity rows.
pub fn first_order_jacobian(state: &State, problem: &Problem) -> TridiagonalSystem {
    let grid = state.grid();
    let n = grid.n_cells();
    let h = grid.h();
    let flux = problem.flux;
    let visc = problem.nu / h;
    let mut jac = TridiagonalSystem::identity(n);

    // dF/du_left and dF/du_right at face i + 1/2
    let face_partials = |i: usize| {
        let (ul, ur) = (state.at(i), state.around(i, 1));
        let d = dissipation_coefficient(ul, ur, flux);
        (
            0.5 * flux.derivative(ul) + 0.5 * d + visc,
            0.5 * flux.derivative(ur) - 0.5 * d - visc,
        )
    };

    for i in grid.interior() {
        let left = grid.neighbor(i, -1);
        let (west_l, west_r) = face_partials(left);
        let (east_l, east_r) = face_partials(i);
        let k = i - 1;
        jac.lower[k] = -west_l / h;
        jac.diag[k] = (east_l - west_r) / h;
        jac.upper[k] = east_r / h;
    }
    if grid.is_periodic() {
        jac.cyclic = true;
    }
    jac
}

/// Drives the high-order residual of `config` to `opts.tol` (or to the
/// round-off floor, see [`roundoff_floor`]).
///
/// Fixed cells of the padded grid keep their initial values bit for bit.
/// Non-convergence is reported through `converged = false`, not as an error.
pub fn solve_steady(
    state0: &State,
    problem: &Problem,
    config: &SchemeConfig,
    opts: &SteadyOptions,
) -> Result<(State, SteadySolveReport)> {
    if !problem.is_steady() || state0.grid().is_periodic() {
        return Err(Error::Config("steady solves need a steady problem on a padded grid".into()));
    }
    let eval = FaceEvaluator::new(problem, config)?;
    let grid = *state0.grid();
    let interior = grid.interior();
    let h = grid.h();
    let mut state = state0.clone();
    let mut history = Vec::new();
    let mut cfl = opts.cfl_start;

    let residual = |s: &State| assemble_with(Execution::Sequential, &eval, s, problem, config.forcing);

    let mut res = residual(&state)?;
    let mut l1 = res.l1_mean(interior.clone());
    history.push(l1);
    let mut tol = opts.tol.max(roundoff_floor(&state, problem));
    let mut iterations = 0;
    let mut diverged = false;
    while l1 > tol && iterations < opts.max_iter {
        let mut jac = first_order_jacobian(&state, problem);
        if cfl <= opts.cfl_max {
            for i in interior.clone() {
                let u = state.at(i);
                let rate = problem.flux.derivative(u).abs() / h + 2.0 * problem.nu / (h * h);
                jac.diag[i - 1] += rate.max(1.0 / h) / cfl;
            }
        }
        let rhs: Vec<f64> = res.values().iter().map(|r| -r).collect();
        let du = jac.solve(&rhs)?;
        let mut next = state.clone();
        for i in interior.clone() {
            next.values_mut()[i - 1] += du[i - 1];
        }
        iterations += 1;
        cfl *= opts.cfl_growth;
        // a diverged iterate ends the solve unconverged; the last finite
        // state is returned
        match residual(&next) {
            Ok(r) if next.values().iter().all(|v| v.is_finite()) => {
                state = next;
                res = r;
                tol = opts.tol.max(roundoff_floor(&state, problem));
                l1 = res.l1_mean(interior.clone());
                history.push(l1);
            }
            Ok(_) | Err(Error::NonFinite { .. }) => {
                history.push(f64::INFINITY);
                diverged = true;
                break;
            }
            Err(e) => return Err(e),
        }
    }

    let report = SteadySolveReport {
        iterations,
        final_residual_l1: if diverged { f64::INFINITY } else { l1 },
        effective_tol: tol,
        converged: !diverged && l1 <= tol,
        history,
    };
    Ok((state, report))
}
