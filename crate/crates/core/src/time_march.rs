//! Explicit semi-discrete time integration.
//!
//! The point-value time derivative is obtained from the spatial residual in
//! one of four ways:
//!
//! * coupled: `du/dt = -M^{-1} Res`, `M = (1, 22, 1)/24` cyclic,
//! * lumped: `du/dt = -Res`,
//! * QUICKEST: `du/dt = -Res` with kappa = 1/3 and point forcing,
//! * Van Leer: `du/dt = -(Res - (1/24)(Res_{i+1} - 2 Res_i + Res_{i-1}))`.
//!
//! and advanced with three-stage SSP Runge-Kutta.

use crate::domain::State;
use crate::error::{Error, Result};
use crate::linalg::TridiagonalSystem;
use crate::par::Execution;
use crate::problems::Problem;
use crate::residual::{assemble_with, FaceEvaluator};
use crate::scheme::{ForcingMode, SchemeConfig, TimeTreatment};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeMarchConfig {
    pub dt: f64,
    pub n_steps: usize,
}

/// Time step of the unsteady studies.
pub const STANDARD_DT: f64 = 0.000125;
/// Number of steps to reach `t = 0.105` at [`STANDARD_DT`].
pub const STANDARD_STEPS: usize = 840;

impl TimeMarchConfig {
    pub fn new(dt: f64, n_steps: usize) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::Config(format!("time step must be positive, got {dt}")));
        }
        if n_steps == 0 {
            return Err(Error::Config("at least one time step is required".into()));
        }
        Ok(Self { dt, n_steps })
    }

    pub fn standard() -> Self {
        Self {
            dt: STANDARD_DT,
            n_steps: STANDARD_STEPS,
        }
    }

    pub fn final_time(&self) -> f64 {
        self.dt * self.n_steps as f64
    }
}

/// Right-hand side `du/dt` for a fixed problem and scheme. Holds the
/// resolved flux constants and, for the coupled treatment, the mass matrix.
#[derive(Debug, Clone)]
pub struct Rhs {
    problem: Problem,
    treatment: TimeTreatment,
    forcing: ForcingMode,
    eval: FaceEvaluator,
    mass: Option<TridiagonalSystem>,
    exec: Execution,
}

impl Rhs {
    pub fn new(problem: &Problem, config: &SchemeConfig, n_cells: usize) -> Result<Self> {
        config.validate()?;
        if problem.is_steady() {
            return Err(Error::Config(format!(
                "{:?} is a steady problem; time marching needs a periodic one",
                problem.kind
            )));
        }
        let forcing = match config.time {
            TimeTreatment::QuickestFd => {
                if problem.nu != 0.0 {
                    return Err(Error::Config("QUICKEST is only set up for nu = 0".into()));
                }
                ForcingMode::PointValue
            }
            _ => config.forcing,
        };
        let mass = (config.time == TimeTreatment::CoupledMass)
            .then(|| TridiagonalSystem::mass_matrix(n_cells, true));
        Ok(Self {
            problem: *problem,
            treatment: config.time,
            forcing,
            eval: FaceEvaluator::new(problem, config)?,
            mass,
            exec: Execution::default(),
        })
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    pub fn treatment(&self) -> TimeTreatment {
        self.treatment
    }

    pub fn eval(&self, state: &State) -> Result<Vec<f64>> {
        if !state.grid().is_periodic() {
            return Err(Error::Config("time marching requires a periodic grid".into()));
        }
        let res = assemble_with(self.exec, &self.eval, state, &self.problem, self.forcing)?.into_values();
        match self.treatment {
            TimeTreatment::LumpedMass | TimeTreatment::QuickestFd => Ok(res.into_iter().map(|r| -r).collect()),
            TimeTreatment::CoupledMass => {
                let solved = match &self.mass {
                    Some(m) if m.len() == res.len() => m.solve(&res)?,
                    _ => TridiagonalSystem::mass_matrix(res.len(), true).solve(&res)?,
                };
                Ok(solved.into_iter().map(|v| -v).collect())
            }
            TimeTreatment::VanLeerExplicit => Ok(van_leer_correction(&res).into_iter().map(|r| -r).collect()),
        }
    }
}

/// `Res_i - (1/24)(Res_{i+1} - 2 Res_i + Res_{i-1})` on a periodic index set.
pub fn van_leer_correction(res: &[f64]) -> Vec<f64> {
    let n = res.len();
    (0..n)
        .map(|k| {
            let prev = res[(k + n - 1) % n];
            let next = res[(k + 1) % n];
            res[k] - (next - 2.0 * res[k] + prev) / 24.0
        })
        .collect()
}

fn rhs_for(state: &State, problem: &Problem, config: &SchemeConfig, time: TimeTreatment) -> Result<Vec<f64>> {
    let mut cfg = *config;
    cfg.time = time;
    Rhs::new(problem, &cfg, state.grid().n_cells())?.eval(state)
}

/// `-M^{-1} Res(u)` with the cyclic mass matrix.
pub fn rhs_coupled(state: &State, problem: &Problem, config: &SchemeConfig) -> Result<Vec<f64>> {
    rhs_for(state, problem, config, TimeTreatment::CoupledMass)
}

/// `-Res(u)`.
pub fn rhs_lumped(state: &State, problem: &Problem, config: &SchemeConfig) -> Result<Vec<f64>> {
    rhs_for(state, problem, config, TimeTreatment::LumpedMass)
}

/// `-Res(u)` in finite-difference form: kappa must be 1/3 and any forcing is
/// taken at the cell centre.
pub fn rhs_quickest(state: &State, problem: &Problem, config: &SchemeConfig) -> Result<Vec<f64>> {
    let mut cfg = *config;
    cfg.forcing = ForcingMode::PointValue;
    rhs_for(state, problem, &cfg, TimeTreatment::QuickestFd)
}

/// Van Leer's explicit correction of the residual by its second difference.
pub fn rhs_vanleer(state: &State, problem: &Problem, config: &SchemeConfig) -> Result<Vec<f64>> {
    rhs_for(state, problem, config, TimeTreatment::VanLeerExplicit)
}

/// One step of three-stage SSP Runge-Kutta (Shu-Osher form).
pub fn ssp_rk3_step<F>(state: &State, mut rhs: F, dt: f64) -> Result<State>
where
    F: FnMut(&State) -> Result<Vec<f64>>,
{
    let u0 = state.values();
    let stage = |rhs_val: Vec<f64>, base: &[f64], keep: f64, prev: &[f64]| -> Result<Vec<f64>> {
        if rhs_val.len() != base.len() {
            return Err(Error::LengthMismatch {
                expected: base.len(),
                actual: rhs_val.len(),
            });
        }
        let out: Vec<f64> = base
            .iter()
            .zip(prev)
            .zip(&rhs_val)
            .map(|((b, p), r)| keep * b + (1.0 - keep) * (p + dt * r))
            .collect();
        if let Some(k) = out.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { context: "stage", cell: k + 1 });
        }
        Ok(out)
    };

    let grid = *state.grid();
    let u1 = stage(rhs(state)?, u0, 0.0, u0)?;
    let s1 = State::new(grid, u1)?;
    let u2 = stage(rhs(&s1)?, u0, 0.75, s1.values())?;
    let s2 = State::new(grid, u2)?;
    let u3 = stage(rhs(&s2)?, u0, 1.0 / 3.0, s2.values())?;
    State::new(grid, u3)
}

pub fn march(state0: &State, problem: &Problem, config: &SchemeConfig, tm: &TimeMarchConfig) -> Result<State> {
    march_observed(state0, problem, config, tm, |_, _| {})
}

/// [`march`], calling `observe(step, state)` after every completed step.
pub fn march_observed<O>(
    state0: &State,
    problem: &Problem,
    config: &SchemeConfig,
    tm: &TimeMarchConfig,
    mut observe: O,
) -> Result<State>
where
    O: FnMut(usize, &State),
{
    let tm = TimeMarchConfig::new(tm.dt, tm.n_steps)?;
    if let Some(tf) = problem.final_time {
        if (tm.final_time() - tf).abs() > 1e-12 {
            return Err(Error::Config(format!(
                "{} steps of {} reach t = {}, but the problem is evaluated at t = {tf}",
                tm.n_steps,
                tm.dt,
                tm.final_time()
            )));
        }
    }
    let rhs = Rhs::new(problem, config, state0.grid().n_cells())?;
    let mut state = state0.clone();
    for step in 1..=tm.n_steps {
        state = ssp_rk3_step(&state, |s| rhs.eval(s), tm.dt).map_err(|e| Error::March {
            step,
            source: Box::new(e),
        })?;
        observe(step, &state);
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{Grid, Topology};
    use crate::problems;
    use crate::residual::assemble_residual;
    use crate::scheme::ReconMode;

    fn sample(problem: &Problem, n: usize) -> State {
        State::from_fn(problem.grid(n).unwrap(), |x| problem.initial(x) + 0.1 * (4.0 * std::f64::consts::PI * x).cos())
            .unwrap()
    }

    #[test]
    fn rk3_trivial_right_hand_sides() {
        let g = Grid::unit(5, Topology::Periodic).unwrap();
        let s = State::new(g, vec![1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        let same = ssp_rk3_step(&s, |s| Ok(vec![0.0; s.values().len()]), 0.1).unwrap();
        assert_eq!(same, s);
        let shifted = ssp_rk3_step(&s, |s| Ok(vec![1.0; s.values().len()]), 0.25).unwrap();
        for (a, b) in shifted.values().iter().zip(s.values()) {
            assert!((a - (b + 0.25)).abs() < 1e-15);
        }
    }

    #[test]
    fn rk3_linear_amplification() {
        let g = Grid::unit(3, Topology::Periodic).unwrap();
        for (lambda, dt) in [(-1.0, 0.1), (-3.0, 0.5), (2.0, 0.05), (-0.7, 1.3)] {
            let s = State::new(g, vec![1.0, 1.0, 1.0]).unwrap();
            let out = ssp_rk3_step(&s, |s| Ok(s.values().iter().map(|v| lambda * v).collect()), dt).unwrap();
            let z: f64 = lambda * dt;
            let expect = 1.0 + z + z * z / 2.0 + z * z * z / 6.0;
            assert!((out.at(1) - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn rk3_detects_nan() {
        let g = Grid::unit(3, Topology::Periodic).unwrap();
        let s = State::new(g, vec![1.0; 3]).unwrap();
        let r = ssp_rk3_step(&s, |_| Ok(vec![f64::NAN, 0.0, 0.0]), 0.1);
        assert!(matches!(r, Err(Error::NonFinite { cell: 1, .. })));
    }

    #[test]
    fn rhs_definitions() {
        let p = problems::unsteady_burgers();
        let s = sample(&p, 32);
        let c = SchemeConfig::quick();
        let res = assemble_residual(&s, &p, &c).unwrap().into_values();

        let lumped = rhs_lumped(&s, &p, &c).unwrap();
        assert!(lumped.iter().zip(&res).all(|(a, b)| *a == -b));

        let coupled = rhs_coupled(&s, &p, &c).unwrap();
        let back = TridiagonalSystem::mass_matrix(32, true)
            .matvec(&coupled.iter().map(|v| -v).collect::<Vec<_>>())
            .unwrap();
        for (a, b) in back.iter().zip(&res) {
            assert!((a - b).abs() < 1e-12 * (1.0 + b.abs()));
        }

        let vl = rhs_vanleer(&s, &p, &c).unwrap();
        let n = res.len();
        for k in 0..n {
            let d2 = res[(k + 1) % n] - 2.0 * res[k] + res[(k + n - 1) % n];
            assert!((vl[k] + res[k] - d2 / 24.0).abs() < 1e-13);
        }
    }

    #[test]
    fn constant_residual_passes_through_corrections() {
        assert_eq!(van_leer_correction(&[2.0; 6]), vec![2.0; 6]);
        assert_eq!(van_leer_correction(&[0.0; 6]), vec![0.0; 6]);
        let m = TridiagonalSystem::mass_matrix(6, true);
        for v in m.solve(&[3.0; 6]).unwrap() {
            assert!((v - 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_state_gives_zero_rhs() {
        let p = problems::unsteady_burgers();
        let s = State::new(p.grid(16).unwrap(), vec![0.0; 16]).unwrap();
        let c = SchemeConfig::quick();
        for r in [rhs_coupled(&s, &p, &c), rhs_lumped(&s, &p, &c), rhs_vanleer(&s, &p, &c)] {
            assert!(r.unwrap().iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn quickest_matches_lumped_one_third_on_linear_problem() {
        let p = problems::unsteady_linear(0.75);
        let s = sample(&p, 40);
        for recon in [ReconMode::SolutionInterp, ReconMode::FluxInterp] {
            let q = rhs_quickest(&s, &p, &SchemeConfig::quickest(recon)).unwrap();
            let lumped_cfg = SchemeConfig::with_kappa(1.0 / 3.0)
                .forcing(ForcingMode::PointValue)
                .recon(ReconMode::SolutionInterp);
            let l = rhs_lumped(&s, &p, &lumped_cfg).unwrap();
            assert_eq!(q, l);
        }
        assert!(matches!(rhs_quickest(&s, &p, &SchemeConfig::quick()), Err(Error::Config(_))));
    }

    #[test]
    fn coupled_and_lumped_agree_as_h_shrinks() {
        let p = problems::unsteady_burgers();
        let c = SchemeConfig::quick();
        let gap = |n: usize| {
            let s = State::from_fn(p.grid(n).unwrap(), |x| p.initial(x)).unwrap();
            let a = rhs_coupled(&s, &p, &c).unwrap();
            let b = rhs_lumped(&s, &p, &c).unwrap();
            let d: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).sum();
            d / b.iter().map(|v| v.abs()).sum::<f64>()
        };
        let (g1, g2) = (gap(64), gap(128));
        assert!(((g1 / g2).log2() - 2.0).abs() < 0.1, "{g1} {g2}");
    }

    #[test]
    fn march_rejects_bad_requests() {
        let p = problems::unsteady_burgers();
        let s = sample(&p, 16);
        let c = SchemeConfig::quick();
        assert!(TimeMarchConfig::new(0.1, 0).is_err());
        assert!(TimeMarchConfig::new(-0.1, 3).is_err());
        let short = TimeMarchConfig { dt: 0.001, n_steps: 10 };
        assert!(matches!(march(&s, &p, &c, &short), Err(Error::Config(_))));
        let steady = problems::steady_burgers();
        assert!(Rhs::new(&steady, &c, 16).is_err());
    }

    #[test]
    fn march_reaches_standard_final_time() {
        let tm = TimeMarchConfig::standard();
        assert!((tm.final_time() - 0.105).abs() < 1e-12);
        let p = problems::unsteady_linear(0.75).with_final_time(0.01);
        let s = State::new(p.grid(8).unwrap(), vec![0.25; 8]).unwrap();
        let tm = TimeMarchConfig::new(0.001, 10).unwrap();
        let mut seen = 0;
        let out = march_observed(&s, &p, &SchemeConfig::quick(), &tm, |k, _| seen = k).unwrap();
        assert_eq!(seen, 10);
        for v in out.values() {
            assert!((v - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn march_conserves_the_total() {
        let p = problems::unsteady_burgers();
        let s0 = sample(&p, 64);
        let total0: f64 = s0.values().iter().sum();
        for time in [
            TimeTreatment::CoupledMass,
            TimeTreatment::LumpedMass,
            TimeTreatment::VanLeerExplicit,
        ] {
            let c = SchemeConfig::quick().time(time);
            let out = march(&s0, &p, &c, &TimeMarchConfig::standard()).unwrap();
            let total: f64 = out.values().iter().sum();
            assert!((total - total0).abs() <= 1e-10, "{time}: {}", total - total0);
        }
    }
}
