//! Spatial residual `Res_i = (F_{i+1/2} - F_{i-1/2}) / h - s_i`.
//!
//! Face fluxes are computed once per face in a single sweep and then
//! differenced, so every face flux enters exactly two cells with opposite
//! signs.

use crate::domain::{FluxFunction, State};
use crate::error::{Error, Result};
use crate::flux::{convective_flux_from_traces, diffusive_flux, FaceFlux};
use crate::par::{self, Execution};
use crate::problems::Problem;
use crate::reconstruction::{face_flux_states, face_states, interp_left, interp_right};
use crate::scheme::{ForcingMode, ReconMode, SchemeConfig};

/// One entry per cell; fixed cells of padded grids hold exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualVector {
    values: Vec<f64>,
}

impl ResidualVector {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// 1-based access.
    pub fn at(&self, i: usize) -> f64 {
        self.values[i - 1]
    }

    /// Mean absolute value over the cells in `range` (1-based, inclusive).
    pub fn l1_mean(&self, range: std::ops::RangeInclusive<usize>) -> f64 {
        let n = range.end() + 1 - range.start();
        range.map(|i| self.values[i - 1].abs()).sum::<f64>() / n as f64
    }
}

/// Per-face flux evaluation with the scheme constants resolved once.
#[derive(Debug, Clone, Copy)]
pub(crate) struct FaceEvaluator {
    flux: FluxFunction,
    nu: f64,
    kappa: f64,
    damping_kappa: f64,
    alpha: f64,
    recon: ReconMode,
    dissipation: bool,
}

impl FaceEvaluator {
    pub(crate) fn new(problem: &Problem, config: &SchemeConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            flux: problem.flux,
            nu: problem.nu,
            kappa: config.kappa,
            damping_kappa: config.damping_kappa(),
            alpha: config.resolved_alpha()?,
            recon: config.recon,
            dissipation: config.dissipation,
        })
    }

    #[inline]
    pub(crate) fn eval(&self, state: &State, i: usize) -> FaceFlux {
        let face = face_states(state, i, self.kappa);
        // a linear flux commutes with the interpolation, so both modes share
        // the solution-trace path and agree to the bit
        let convective = match self.recon {
            ReconMode::FluxInterp if matches!(self.flux, FluxFunction::Burgers) => {
                let (f_l, f_r) = face_flux_states(state, self.flux, i, self.kappa);
                convective_flux_from_traces(f_l, f_r, face.u_l, face.u_r, self.flux, self.dissipation)
            }
            _ => convective_flux_from_traces(
                self.flux.eval(face.u_l),
                self.flux.eval(face.u_r),
                face.u_l,
                face.u_r,
                self.flux,
                self.dissipation,
            ),
        };
        let diffusive = if self.nu == 0.0 {
            0.0
        } else if self.damping_kappa == self.kappa {
            diffusive_flux(&face, self.nu, self.alpha, state.grid().h())
        } else {
            let mut damped = face;
            let k = self.damping_kappa;
            damped.u_l = interp_left(state.around(i, -1), state.at(i), state.around(i, 1), k);
            damped.u_r = interp_right(state.at(i), state.around(i, 1), state.around(i, 2), k);
            diffusive_flux(&damped, self.nu, self.alpha, state.grid().h())
        };
        FaceFlux::new(convective, diffusive)
    }
}

/// Total numerical flux at face `i + 1/2`.
pub fn flux_at_face(state: &State, problem: &Problem, config: &SchemeConfig, i: usize) -> Result<FaceFlux> {
    Ok(FaceEvaluator::new(problem, config)?.eval(state, i))
}

pub fn assemble_residual(state: &State, problem: &Problem, config: &SchemeConfig) -> Result<ResidualVector> {
    assemble_residual_in(Execution::default(), state, problem, config)
}

/// [`assemble_residual`] with an explicit execution mode.
pub fn assemble_residual_in(
    exec: Execution,
    state: &State,
    problem: &Problem,
    config: &SchemeConfig,
) -> Result<ResidualVector> {
    let eval = FaceEvaluator::new(problem, config)?;
    assemble_with(exec, &eval, state, problem, config.forcing)
}

pub(crate) fn assemble_with(
    exec: Execution,
    eval: &FaceEvaluator,
    state: &State,
    problem: &Problem,
    forcing: ForcingMode,
) -> Result<ResidualVector> {
    let grid = *state.grid();
    let n = grid.n_cells();
    let h = grid.h();
    let interior = grid.interior();
    let (first, last) = (*interior.start(), *interior.end());

    // faces[k] is the total flux at face (first - 1 + k) + 1/2
    let lo = first - 1;
    let faces: Vec<f64> = if grid.is_periodic() {
        let mut f = par::map_range(exec, 1, n + 1, par::PAR_MIN_LEN, |i| eval.eval(state, i).total);
        f.insert(0, f[n - 1]);
        f
    } else {
        par::map_range(exec, lo, last + 1, par::PAR_MIN_LEN, |i| eval.eval(state, i).total)
    };

    let mut values = vec![0.0; n];
    for i in first..=last {
        let k = i - lo;
        let mut r = (faces[k] - faces[k - 1]) / h;
        if problem.has_forcing() {
            let x = grid.center_unchecked(i);
            r -= match forcing {
                ForcingMode::CellAveraged => problem.forcing_cell_avg(x, h),
                ForcingMode::PointValue => problem.forcing_point(x),
            };
        }
        if !r.is_finite() {
            return Err(Error::NonFinite {
                context: "residual",
                cell: i,
            });
        }
        values[i - 1] = r;
    }
    Ok(ResidualVector { values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{Grid, Topology};
    use crate::problems::{self, ProblemKind};
    use crate::scheme::{AlphaSetting, TimeTreatment};

    fn pseudo_random(n: usize, seed: u64) -> Vec<f64> {
        let mut s = seed;
        (0..n)
            .map(|_| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
            })
            .collect()
    }

    fn pure_diffusion(nu: f64) -> Problem {
        Problem {
            kind: ProblemKind::UnsteadyLinear,
            flux: FluxFunction::Linear(0.0),
            nu,
            final_time: Some(1.0),
            forcing: false,
        }
    }

    #[test]
    fn constants_give_zero_residual() {
        let cfgs = [
            SchemeConfig::quick(),
            SchemeConfig::with_kappa(0.0).recon(ReconMode::FluxInterp),
            SchemeConfig::quickest(ReconMode::SolutionInterp),
            SchemeConfig::with_kappa(1.0 / 3.0).dissipation(false),
        ];
        let mut ps = vec![problems::unsteady_burgers(), problems::unsteady_linear(0.75)];
        ps.push(pure_diffusion(2.0));
        for p in &ps {
            let g = p.grid(16).unwrap();
            let s = State::new(g, vec![0.7; 16]).unwrap();
            for c in &cfgs {
                let r = assemble_residual(&s, p, c).unwrap();
                assert!(r.values().iter().all(|&v| v == 0.0), "{c:?}");
            }
        }
    }

    #[test]
    fn padded_cells_carry_zero() {
        let p = problems::steady_burgers();
        let g = p.grid(15).unwrap();
        let s = State::from_fn(g, |x| (2.0 * x).sin()).unwrap();
        let r = assemble_residual(&s, &p, &SchemeConfig::quick()).unwrap();
        for i in [1, 2, 14, 15] {
            assert_eq!(r.at(i), 0.0);
        }
        assert!(r.at(3) != 0.0);
    }

    #[test]
    fn face_flux_examples() {
        let p = problems::unsteady_linear(0.75);
        let g = p.grid(8).unwrap();
        let s = State::new(g, vec![2.0; 8]).unwrap();
        let f = flux_at_face(&s, &p, &SchemeConfig::quick(), 3).unwrap();
        assert_eq!(f, FaceFlux { convective: 1.5, diffusive: 0.0, total: 1.5 });

        let s = State::new(g, pseudo_random(8, 3)).unwrap();
        let sol = flux_at_face(&s, &p, &SchemeConfig::quick(), 3).unwrap();
        let fl = flux_at_face(&s, &p, &SchemeConfig::quick().recon(ReconMode::FluxInterp), 3).unwrap();
        let u_l = face_states(&s, 3, 0.5).u_l;
        assert!((sol.total - 0.75 * u_l).abs() < 1e-15);
        assert!((sol.total - fl.total).abs() < 1e-15);
    }

    #[test]
    fn periodic_conservation() {
        for p in [problems::unsteady_burgers(), problems::unsteady_linear(-0.4), pure_diffusion(0.3)] {
            let g = p.grid(37).unwrap();
            let s = State::new(g, pseudo_random(37, 11)).unwrap();
            for c in [SchemeConfig::quick(), SchemeConfig::with_kappa(0.0).recon(ReconMode::FluxInterp)] {
                let r = assemble_residual(&s, &p, &c).unwrap();
                let total: f64 = r.values().iter().map(|v| v * g.h()).sum();
                assert!(total.abs() < 1e-13, "{total}");
            }
        }
    }

    #[test]
    fn translation_equivariance() {
        let p = problems::unsteady_burgers();
        let g = p.grid(20).unwrap();
        let v = pseudo_random(20, 5);
        let mut shifted = v.clone();
        shifted.rotate_right(1);
        let c = SchemeConfig::quick();
        let r0 = assemble_residual(&State::new(g, v).unwrap(), &p, &c).unwrap();
        let r1 = assemble_residual(&State::new(g, shifted).unwrap(), &p, &c).unwrap();
        let mut expect = r0.into_values();
        expect.rotate_right(1);
        assert_eq!(expect, r1.into_values());
    }

    #[test]
    fn linear_flux_modes_agree() {
        let p = problems::unsteady_linear(0.75);
        let g = p.grid(24).unwrap();
        let s = State::new(g, pseudo_random(24, 9)).unwrap();
        for k in [-1.0, 0.0, 1.0 / 3.0, 0.5, 1.0] {
            let c = SchemeConfig::with_kappa(k).alpha(AlphaSetting::Value(0.0));
            let a = assemble_residual(&s, &p, &c).unwrap();
            let b = assemble_residual(&s, &p, &c.recon(ReconMode::FluxInterp)).unwrap();
            for (x, y) in a.values().iter().zip(b.values()) {
                assert!((x - y).abs() <= 1e-14 * (1.0 + x.abs()));
            }
        }
    }

    fn stencil_apply(v: &[f64], i: usize, w: [f64; 5], scale: f64) -> f64 {
        let n = v.len() as isize;
        (0..5)
            .map(|k| {
                let j = (i as isize - 1 + k as isize - 2).rem_euclid(n) as usize;
                w[k] * v[j]
            })
            .sum::<f64>()
            * scale
    }

    #[test]
    fn compatible_diffusion_stencil_is_unique() {
        let nu = 1.7;
        let p = pure_diffusion(nu);
        let g = Grid::new(16, 2.0, 0.0, Topology::Periodic).unwrap();
        let h = g.h();
        let v = pseudo_random(16, 21);
        let s = State::new(g, v.clone()).unwrap();
        for k in [0.0, 1.0 / 3.0, 0.5] {
            let r = assemble_residual(&s, &p, &SchemeConfig::with_kappa(k)).unwrap();
            for i in 1..=16 {
                let expect = stencil_apply(&v, i, [-1.0, 28.0, -54.0, 28.0, -1.0], -nu / (24.0 * h * h));
                assert!((r.at(i) - expect).abs() < 1e-12 * (1.0 + expect.abs()), "kappa={k}");
            }
        }
        let c = SchemeConfig::quick().alpha(AlphaSetting::Value(4.0 / 3.0));
        let r = assemble_residual(&s, &p, &c).unwrap();
        for i in 1..=16 {
            let expect = stencil_apply(&v, i, [-1.0, 16.0, -30.0, 16.0, -1.0], -nu / (12.0 * h * h));
            assert!((r.at(i) - expect).abs() < 1e-12 * (1.0 + expect.abs()));
        }
    }

    #[test]
    fn diffusion_on_polynomials() {
        // Pure diffusion with point forcing added back leaves only the flux balance.
        let nu = 0.9;
        let mut p = problems::steady_viscous_burgers_with(nu);
        p.flux = FluxFunction::Linear(0.0);
        let g = Grid::unit(12, Topology::DirichletPadded).unwrap();
        let h = g.h();
        let c = SchemeConfig::quick().forcing(ForcingMode::PointValue);
        let balance = |i: usize, r: &ResidualVector| r.at(i) + p.forcing_point(g.cell_center(i).unwrap());

        let quad = State::from_fn(g, |x| 3.0 - x + 2.5 * x * x).unwrap();
        let r = assemble_residual(&quad, &p, &c).unwrap();
        for i in g.interior() {
            assert!((balance(i, &r) - (-nu * 5.0)).abs() < 1e-10);
        }

        let quartic = State::from_fn(g, |x| x.powi(4)).unwrap();
        let r = assemble_residual(&quartic, &p, &c).unwrap();
        for i in g.interior() {
            let x = g.cell_center(i).unwrap();
            // exact cell average of u_xx
            let expect = -nu * (12.0 * x * x + h * h);
            assert!((balance(i, &r) - expect).abs() < 1e-10, "{i}");
        }
    }

    #[test]
    fn parallel_and_sequential_are_bit_identical() {
        let p = problems::unsteady_burgers();
        let g = p.grid(20_000).unwrap();
        let s = State::new(g, pseudo_random(20_000, 1)).unwrap();
        let c = SchemeConfig::quick().time(TimeTreatment::LumpedMass);
        let a = assemble_residual_in(Execution::Sequential, &s, &p, &c).unwrap();
        let b = assemble_residual_in(Execution::Parallel, &s, &p, &c).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn invalid_config_is_rejected() {
        let p = problems::unsteady_burgers();
        let s = State::new(p.grid(8).unwrap(), vec![0.0; 8]).unwrap();
        let c = SchemeConfig::with_kappa(1.0);
        assert!(matches!(assemble_residual(&s, &p, &c), Err(Error::Config(_))));
    }
}
