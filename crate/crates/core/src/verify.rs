//! Self-check suite behind `quickfv verify`: the order-of-accuracy studies
//! with their expected slopes, plus the structural properties of the scheme.

use std::fmt;

use crate::domain::{FluxFunction, Grid, State, Topology};
use crate::error::Result;
use crate::flux::dissipation_coefficient;
use crate::harness::{self, ExperimentResult, ExperimentSpec};
use crate::linalg::TridiagonalSystem;
use crate::metrics::{observed_order, Norm};
use crate::par::Execution;
use crate::problems::{self, Problem};
use crate::reconstruction::{face_states, interp_left, interp_right};
use crate::residual::assemble_residual;
use crate::scheme::{AlphaSetting, ReconMode, SchemeConfig, TimeTreatment};
use crate::steady::first_order_jacobian;
use crate::time_march::{march, ssp_rk3_step, TimeMarchConfig};

/// Half-width of the accepted band around a nominal order.
pub const ORDER_BAND: f64 = 0.3;

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {}. {}: {}", self.id, self.name, self.detail)
    }
}

/// Accumulates named checks for one criterion.
#[derive(Default)]
struct Checks {
    items: Vec<(String, bool)>,
}

impl Checks {
    fn add(&mut self, what: impl Into<String>, ok: bool) {
        self.items.push((what.into(), ok));
    }

    /// Order check; `None` orders fail.
    fn order(&mut self, what: &str, order: Option<f64>, ok: impl Fn(f64) -> bool) {
        match order {
            Some(o) => self.add(format!("{what} {o:.2}"), ok(o)),
            None => self.add(format!("{what} undefined"), false),
        }
    }

    fn near(&mut self, what: &str, order: Option<f64>, target: f64) {
        self.order(what, order, |o| (o - target).abs() <= ORDER_BAND);
    }

    fn finish(self, id: u8, name: &'static str) -> Outcome {
        let passed = self.items.iter().all(|i| i.1);
        let detail = self
            .items
            .iter()
            .map(|(w, ok)| if *ok { w.clone() } else { format!("{w} (FAILED)") })
            .collect::<Vec<_>>()
            .join("; ");
        Outcome { id, name, passed, detail }
    }
}

fn failed(id: u8, name: &'static str, err: impl fmt::Display) -> Outcome {
    Outcome {
        id,
        name,
        passed: false,
        detail: format!("error: {err}"),
    }
}

fn run_preset(name: &str, keep: impl Fn(&SchemeConfig) -> bool, exec: Execution) -> Result<ExperimentResult> {
    let mut spec: ExperimentSpec = harness::preset(name)?;
    spec.schemes.retain(|s| keep(s));
    harness::run_experiment(&spec, exec)
}

fn finest(r: &ExperimentResult, s: &SchemeConfig, norm: Norm) -> Option<f64> {
    r.order_table(&s.label(), norm).finest_order()
}

fn tail3(r: &ExperimentResult, s: &SchemeConfig, norm: Norm) -> Option<f64> {
    r.order_table(&s.label(), norm).tail_order(3)
}

fn k(v: f64) -> SchemeConfig {
    SchemeConfig::with_kappa(v)
}

fn criterion1(exec: Execution) -> Result<Checks> {
    let r = run_preset("fig4", |_| true, exec)?;
    let mut c = Checks::default();
    c.near("kappa=1/2 te_point", finest(&r, &k(0.5), Norm::TePoint), 3.0);
    c.near("kappa=1/2 de_point", finest(&r, &k(0.5), Norm::DePoint), 3.0);
    c.near("kappa=1/3 te_cellavg", finest(&r, &k(1.0 / 3.0), Norm::TeCellAvg), 3.0);
    c.near("kappa=1/3 de_cellavg", finest(&r, &k(1.0 / 3.0), Norm::DeCellAvg), 3.0);
    c.near("kappa=0 de_point", finest(&r, &k(0.0), Norm::DePoint), 2.0);
    Ok(c)
}

fn criterion2(exec: Execution) -> Result<Checks> {
    let r = run_preset("fig5", |_| true, exec)?;
    let mut c = Checks::default();
    c.near("kappa=1/2 te_point", finest(&r, &k(0.5), Norm::TePoint), 3.0);
    c.near("kappa=1/2 de_point", finest(&r, &k(0.5), Norm::DePoint), 3.0);
    for (name, kv) in [("0", 0.0), ("1/3", 1.0 / 3.0)] {
        c.near(&format!("kappa={name} te_point"), finest(&r, &k(kv), Norm::TePoint), 2.0);
        c.near(&format!("kappa={name} de_point"), finest(&r, &k(kv), Norm::DePoint), 2.0);
    }
    for (name, kv) in [("0", 0.0), ("1/3", 1.0 / 3.0), ("1/2", 0.5)] {
        c.order(&format!("kappa={name} de_cellavg"), finest(&r, &k(kv), Norm::DeCellAvg), |o| o <= 2.3);
    }
    Ok(c)
}

fn criterion3(exec: Execution) -> Result<Checks> {
    let r = run_preset("fig6", |s| s.kappa == 0.5, exec)?;
    let s = k(0.5).alpha(AlphaSetting::Value(4.0 / 3.0));
    let mut c = Checks::default();
    c.near("kappa=1/2 alpha=4/3 te_point", finest(&r, &s, Norm::TePoint), 2.0);
    c.near("kappa=1/2 alpha=4/3 de_point", finest(&r, &s, Norm::DePoint), 2.0);
    Ok(c)
}

fn criterion4(exec: Execution) -> Result<Checks> {
    let r = run_preset("fig8", |s| s.kappa == 0.5, exec)?;
    let coupled = k(0.5);
    let lumped = k(0.5).time(TimeTreatment::LumpedMass);
    let mut c = Checks::default();
    c.near("coupled de_point", tail3(&r, &coupled, Norm::DePoint), 3.0);
    c.near("coupled de_cellavg", tail3(&r, &coupled, Norm::DeCellAvg), 2.0);
    c.near("lumped de_point", tail3(&r, &lumped, Norm::DePoint), 2.0);
    Ok(c)
}

fn criterion5(exec: Execution) -> Result<Checks> {
    let r = run_preset("fig9", |_| true, exec)?;
    let mut c = Checks::default();
    c.near(
        "solution-interp de_point",
        tail3(&r, &SchemeConfig::quickest(ReconMode::SolutionInterp), Norm::DePoint),
        2.0,
    );
    c.near(
        "flux-interp de_point",
        tail3(&r, &SchemeConfig::quickest(ReconMode::FluxInterp), Norm::DePoint),
        3.0,
    );
    Ok(c)
}

fn criterion6(exec: Execution) -> Result<Checks> {
    let r = run_preset("fig9-linear", |_| true, exec)?;
    let sol = SchemeConfig::quickest(ReconMode::SolutionInterp);
    let flx = SchemeConfig::quickest(ReconMode::FluxInterp);
    let mut c = Checks::default();
    c.near("solution-interp de_point", tail3(&r, &sol, Norm::DePoint), 3.0);
    c.near("flux-interp de_point", tail3(&r, &flx, Norm::DePoint), 3.0);
    let p = problems::unsteady_linear(problems::LINEAR_SPEED);
    let mut identical = true;
    for n in [32, 256] {
        let s = State::from_fn(p.grid(n)?, |x| p.initial(x) + 0.2 * (6.0 * std::f64::consts::PI * x).cos())?;
        let a = assemble_residual(&s, &p, &sol)?;
        let b = assemble_residual(&s, &p, &flx)?;
        identical &= a.values().iter().zip(b.values()).all(|(x, y)| x.to_bits() == y.to_bits());
    }
    c.add("residuals bit-identical", identical);
    Ok(c)
}

fn criterion7(exec: Execution) -> Result<Checks> {
    let r = run_preset("fig10", |s| s.kappa == 0.5, exec)?;
    let s = k(0.5).time(TimeTreatment::VanLeerExplicit);
    let mut c = Checks::default();
    c.near("de_point", tail3(&r, &s, Norm::DePoint), 3.0);
    c.near("de_cellavg", tail3(&r, &s, Norm::DeCellAvg), 2.0);
    Ok(c)
}

/// Deterministic values in [-1, 1).
fn sample(n: usize, seed: u64) -> Vec<f64> {
    let mut s = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(1);
    (0..n)
        .map(|_| {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s >> 11) as f64 / (1u64 << 52) as f64 - 1.0
        })
        .collect()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / (1.0 + b.abs())
}

fn pure_diffusion(nu: f64) -> Problem {
    let mut p = problems::steady_viscous_burgers_with(nu).without_forcing();
    p.flux = FluxFunction::Linear(0.0);
    p
}

fn stencil_error(nu: f64, cfg: &SchemeConfig, w: [f64; 5], scale: f64) -> Result<f64> {
    let n = 16;
    let g = Grid::new(n, 2.0, 0.0, Topology::Periodic)?;
    let h = g.h();
    let v = sample(n, 21);
    let s = State::new(g, v.clone())?;
    let r = assemble_residual(&s, &pure_diffusion(nu), cfg)?;
    let mut worst = 0.0f64;
    for i in 0..n {
        let expect: f64 = (0..5).map(|k| w[k] * v[(i + n + k - 2) % n]).sum::<f64>() * (-nu / (scale * h * h));
        worst = worst.max(rel(r.values()[i], expect));
    }
    Ok(worst)
}

fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let p = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap_or(col);
        a.swap(col, p);
        b.swap(col, p);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

/// First-order residual with `D` frozen at `frozen`.
fn first_order_residual(u: &[f64], frozen: &[f64], p: &Problem, h: f64) -> Vec<f64> {
    let n = u.len();
    let face = |i: usize| {
        let d = dissipation_coefficient(frozen[i], frozen[i + 1], p.flux);
        0.5 * (p.flux.eval(u[i]) + p.flux.eval(u[i + 1])) - 0.5 * d * (u[i + 1] - u[i]) - p.nu * (u[i + 1] - u[i]) / h
    };
    let mut r = vec![0.0; n];
    for i in 2..n - 2 {
        r[i] = (face(i) - face(i - 1)) / h;
    }
    r
}

fn gauss_avg(f: impl Fn(f64) -> f64, c: f64, h: f64, m: usize) -> f64 {
    let a = (245.0 - 14.0 * 70f64.sqrt()).sqrt() / 21.0;
    let b = (245.0 + 14.0 * 70f64.sqrt()).sqrt() / 21.0;
    let wa = (322.0 + 13.0 * 70f64.sqrt()) / 900.0;
    let wb = (322.0 - 13.0 * 70f64.sqrt()) / 900.0;
    let nodes = [(0.0, 128.0 / 225.0), (a, wa), (-a, wa), (b, wb), (-b, wb)];
    let hs = h / m as f64;
    (0..m)
        .map(|j| {
            let cj = c - 0.5 * h + (j as f64 + 0.5) * hs;
            0.5 * nodes.iter().map(|&(s, w)| w * f(cj + 0.5 * hs * s)).sum::<f64>()
        })
        .sum::<f64>()
        / m as f64
}

fn criterion8() -> Result<Checks> {
    let mut c = Checks::default();
    let coeffs = sample(32, 3);

    let mut quad = 0.0f64;
    let mut cubic = 0.0f64;
    for q in coeffs.chunks(4) {
        let f = |x: f64| q[0] + q[1] * x + q[2] * x * x + q[3] * x * x * x;
        let g = |x: f64| q[0] + q[1] * x + q[2] * x * x;
        quad = quad.max(rel(interp_left(g(-1.0), g(0.0), g(1.0), 0.5), g(0.5)));
        quad = quad.max(rel(interp_right(g(0.0), g(1.0), g(2.0), 0.5), g(0.5)));
        let avg = 0.5 * (interp_left(f(-1.0), f(0.0), f(1.0), 0.5) + interp_right(f(0.0), f(1.0), f(2.0), 0.5));
        cubic = cubic.max(rel(avg, f(0.5)));
    }
    c.add(format!("quadratic exactness {quad:.1e}"), quad <= 1e-14);
    c.add(format!("average cubic exactness {cubic:.1e}"), cubic <= 1e-14);

    let mut worst = 0.0f64;
    for kv in [0.0, 1.0 / 3.0, 0.5] {
        worst = worst.max(stencil_error(1.7, &k(kv), [-1.0, 28.0, -54.0, 28.0, -1.0], 24.0)?);
    }
    c.add(format!("(-1,28,-54,28,-1)/24h^2 stencil {worst:.1e}"), worst <= 1e-12);
    let e = stencil_error(1.7, &k(0.5).alpha(AlphaSetting::Value(4.0 / 3.0)), [-1.0, 16.0, -30.0, 16.0, -1.0], 12.0)?;
    c.add(format!("(-1,16,-30,16,-1)/12h^2 stencil {e:.1e}"), e <= 1e-12);

    let m = TridiagonalSystem::mass_matrix(9, true);
    let rows = (0..9).map(|r| (m.lower[r] + m.diag[r] + m.upper[r] - 1.0).abs()).fold(0.0, f64::max);
    c.add(format!("mass row sums {rows:.1e}"), rows <= 1e-15);

    let n = 8;
    let v = sample(4 * n, 9);
    let sys = TridiagonalSystem::new(
        v[..n].to_vec(),
        v[n..2 * n].iter().map(|d| 3.0 + d).collect(),
        v[2 * n..3 * n].to_vec(),
        true,
    )?;
    let b = v[3 * n..].to_vec();
    let x = sys.solve(&b)?;
    let mut dense = vec![vec![0.0; n]; n];
    for r in 0..n {
        dense[r][r] = sys.diag[r];
        dense[r][(r + n - 1) % n] += sys.lower[r];
        dense[r][(r + 1) % n] += sys.upper[r];
    }
    let oracle = dense_solve(dense, b);
    let err = x.iter().zip(&oracle).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    c.add(format!("cyclic solve vs dense {err:.1e}"), err <= 1e-12);

    let g = Grid::unit(3, Topology::Periodic)?;
    let mut amp = 0.0f64;
    for z in [-2.5, -1.0, -0.3, 0.1, 0.7] {
        let s = State::new(g, vec![1.0, 2.0, -0.5])?;
        let out = ssp_rk3_step(&s, |s| Ok(s.values().iter().map(|u| z * u).collect()), 1.0)?;
        let factor = 1.0 + z + z * z / 2.0 + z * z * z / 6.0;
        for (a, b) in out.values().iter().zip(s.values()) {
            amp = amp.max((a - factor * b).abs() / b.abs());
        }
    }
    c.add(format!("RK3 amplification {amp:.1e}"), amp <= 1e-14);

    let p = problems::unsteady_burgers().with_final_time(TimeMarchConfig::standard().final_time());
    let s0 = State::from_fn(p.grid(64)?, |x| p.initial(x) + 0.1 * (4.0 * std::f64::consts::PI * x).cos())?;
    let mut drift = 0.0f64;
    for t in [TimeTreatment::CoupledMass, TimeTreatment::LumpedMass, TimeTreatment::VanLeerExplicit] {
        let s = march(&s0, &p, &k(0.5).time(t), &TimeMarchConfig::standard())?;
        let h = s.grid().h();
        let before: f64 = s0.values().iter().sum::<f64>() * h;
        let after: f64 = s.values().iter().sum::<f64>() * h;
        drift = drift.max((after - before).abs());
    }
    c.add(format!("conservation drift over 840 steps {drift:.1e}"), drift <= 1e-10);

    let p = problems::steady_viscous_burgers_with(0.3);
    let g = p.grid(15)?;
    let s = State::from_fn(g, |x| (2.0 * x).sin() + 0.05 * (7.0 * x).cos())?;
    let jac = first_order_jacobian(&s, &p);
    let u = s.values().to_vec();
    let h = g.h();
    let mut jerr = 0.0f64;
    for j in 0..15 {
        let eps = 1e-6;
        let (mut up, mut dn) = (u.clone(), u.clone());
        up[j] += eps;
        dn[j] -= eps;
        let rp = first_order_residual(&up, &u, &p, h);
        let rm = first_order_residual(&dn, &u, &p, h);
        for i in 2..13 {
            let fd = (rp[i] - rm[i]) / (2.0 * eps);
            let exact = if i + 1 == j {
                jac.upper[i]
            } else if i == j {
                jac.diag[i]
            } else if i == j + 1 {
                jac.lower[i]
            } else {
                0.0
            };
            let scale = jac.diag[i].abs();
            jerr = jerr.max((fd - exact).abs() / scale);
        }
    }
    c.add(format!("first-order Jacobian vs finite differences {jerr:.1e}"), jerr <= 1e-6);

    let mut qerr = 0.0f64;
    for p in [problems::steady_burgers(), problems::steady_viscous_burgers()] {
        for n in [15, 63] {
            let g = p.grid(n)?;
            for i in 1..=n {
                let x = g.cell_center(i)?;
                let exact_avg = gauss_avg(|y| p.exact_point(y).unwrap_or(f64::NAN), x, g.h(), 4);
                qerr = qerr.max((p.exact_cell_avg(x, g.h())? - exact_avg).abs());
                let s_avg = gauss_avg(|y| p.forcing_point(y), x, g.h(), 4);
                qerr = qerr.max((p.forcing_cell_avg(x, g.h()) - s_avg).abs());
            }
        }
    }
    let tf = TimeMarchConfig::standard().final_time();
    for p in [problems::unsteady_burgers(), problems::unsteady_linear(problems::LINEAR_SPEED)] {
        let p = p.with_final_time(tf);
        for n in [32, 128] {
            let g = p.grid(n)?;
            for i in 1..=n {
                let x = g.cell_center(i)?;
                let q = gauss_avg(|y| p.exact_point(y).unwrap_or(f64::NAN), x, g.h(), 16);
                qerr = qerr.max((p.exact_cell_avg(x, g.h())? - q).abs());
            }
        }
    }
    c.add(format!("cell averages vs Gauss quadrature {qerr:.1e}"), qerr <= 1e-12);
    Ok(c)
}

/// L1 mean of the face-differenced dissipation term
/// `D/2 (u_R - u_L)` at `i + 1/2` minus the same at `i - 1/2`.
pub fn dissipation_difference_l1(n: usize, kappa: f64) -> Result<f64> {
    let g = Grid::unit(n, Topology::Periodic)?;
    let s = State::from_fn(g, |x| 2.0 + (2.0 * std::f64::consts::PI * x).sin())?;
    let phi: Vec<f64> = (1..=n)
        .map(|i| {
            let f = face_states(&s, i, kappa);
            0.5 * dissipation_coefficient(f.u_l, f.u_r, FluxFunction::Burgers) * (f.u_r - f.u_l)
        })
        .collect();
    Ok((0..n).map(|i| (phi[i] - phi[(i + n - 1) % n]).abs()).sum::<f64>() / n as f64)
}

fn criterion9() -> Result<Checks> {
    let mut c = Checks::default();
    for kv in [0.0, 1.0 / 3.0, 0.5] {
        let grids = [32usize, 64, 128, 256];
        let pts = grids
            .iter()
            .map(|&n| dissipation_difference_l1(n, kv).map(|e| (1.0 / n as f64, e)))
            .collect::<Result<Vec<_>>>()?;
        let last = observed_order(pts[2].1, pts[3].1, pts[2].0, pts[3].0);
        c.order(&format!("kappa={} finest-pair slope", crate::scheme::format_fraction(kv)), last, |o| o >= 3.7);
    }
    Ok(c)
}

pub const CRITERIA: [&str; 9] = [
    "steady Burgers orders",
    "steady viscous Burgers, compatible alpha",
    "steady viscous Burgers, alpha = 4/3",
    "unsteady Burgers, coupled and lumped QUICK",
    "QUICKEST on unsteady Burgers",
    "QUICKEST on linear convection",
    "Van Leer explicit QUICK",
    "property suite",
    "dissipation-term order",
];

pub fn run_criterion(id: u8, exec: Execution) -> Outcome {
    let name = CRITERIA[(id - 1) as usize];
    let checks = match id {
        1 => criterion1(exec),
        2 => criterion2(exec),
        3 => criterion3(exec),
        4 => criterion4(exec),
        5 => criterion5(exec),
        6 => criterion6(exec),
        7 => criterion7(exec),
        8 => criterion8(),
        _ => criterion9(),
    };
    match checks {
        Ok(c) => c.finish(id, name),
        Err(e) => failed(id, name, e),
    }
}

pub fn run_all(exec: Execution) -> Vec<Outcome> {
    (1..=9).map(|id| run_criterion(id, exec)).collect()
}
