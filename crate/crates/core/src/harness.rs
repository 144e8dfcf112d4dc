//! Grid-convergence experiments: run scheme x grid sequences, compute error
//! norms and orders, and write CSV tables and SVG plots.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::domain::State;
use crate::error::{Error, Result};
use crate::metrics::{self, observed_order, ErrorReport, Norm, OrderTable};
use crate::par::{self, Execution};
use crate::plot;
use crate::problems::{self, Problem, LINEAR_SPEED};
use crate::scheme::{format_fraction, AlphaSetting, ReconMode, SchemeConfig, TimeTreatment};
use crate::steady::{solve_steady, SteadyOptions, SteadySolveReport};
use crate::time_march::{march, TimeMarchConfig};

pub const CSV_HEADER: [&str; 15] = [
    "experiment",
    "scheme",
    "kappa",
    "alpha",
    "recon_mode",
    "time_treatment",
    "n_cells",
    "h",
    "te_point",
    "te_cellavg",
    "de_point",
    "de_cellavg",
    "order_te_point",
    "order_de_point",
    "order_de_cellavg",
];

pub const STEADY_GRIDS: [usize; 4] = [15, 31, 63, 127];
pub const UNSTEADY_GRIDS: [usize; 7] = [32, 64, 128, 256, 512, 1024, 2048];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Experiment {
    SteadyBurgers,
    SteadyViscBurgers,
    UnsteadyBurgers,
    UnsteadyLinear,
}

impl Experiment {
    pub const ALL: [Experiment; 4] = [
        Experiment::SteadyBurgers,
        Experiment::SteadyViscBurgers,
        Experiment::UnsteadyBurgers,
        Experiment::UnsteadyLinear,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::SteadyBurgers => "steady-burgers",
            Experiment::SteadyViscBurgers => "steady-visc-burgers",
            Experiment::UnsteadyBurgers => "unsteady-burgers",
            Experiment::UnsteadyLinear => "unsteady-linear",
        }
    }

    pub fn is_steady(self) -> bool {
        matches!(self, Experiment::SteadyBurgers | Experiment::SteadyViscBurgers)
    }

    /// The problem, without a final time for the unsteady cases.
    pub fn problem(self) -> Problem {
        match self {
            Experiment::SteadyBurgers => problems::steady_burgers(),
            Experiment::SteadyViscBurgers => problems::steady_viscous_burgers(),
            Experiment::UnsteadyBurgers => problems::unsteady_burgers(),
            Experiment::UnsteadyLinear => problems::unsteady_linear(LINEAR_SPEED),
        }
    }

    pub fn default_grids(self) -> Vec<usize> {
        if self.is_steady() {
            STEADY_GRIDS.to_vec()
        } else {
            UNSTEADY_GRIDS.to_vec()
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment '{s}'")))
    }
}

/// Starting guess for steady solves; fixed cells always hold exact values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SteadyInit {
    #[default]
    Exact,
    Zero,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    /// Used for the CSV `experiment` column and output file names.
    pub name: String,
    pub experiment: Experiment,
    pub schemes: Vec<SchemeConfig>,
    pub grids: Vec<usize>,
    pub time: Option<TimeMarchConfig>,
    pub steady: SteadyOptions,
    pub init: SteadyInit,
    /// Also write per-case solution CSVs (and a profile plot).
    pub snapshots: bool,
    /// Also write per-case steady convergence histories.
    pub histories: bool,
}

impl ExperimentSpec {
    pub fn new(experiment: Experiment, schemes: Vec<SchemeConfig>) -> Self {
        Self {
            name: experiment.name().to_string(),
            experiment,
            schemes,
            grids: experiment.default_grids(),
            time: (!experiment.is_steady()).then(TimeMarchConfig::standard),
            steady: SteadyOptions::default(),
            init: SteadyInit::Exact,
            snapshots: false,
            histories: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.schemes.is_empty() || self.grids.is_empty() {
            return Err(Error::Config("an experiment needs at least one scheme and one grid".into()));
        }
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(Error::Config(format!("bad experiment name '{}'", self.name)));
        }
        let mut labels: Vec<String> = self.schemes.iter().map(|s| s.label()).collect();
        labels.sort();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Config("duplicate schemes in experiment".into()));
        }
        let mut grids = self.grids.clone();
        grids.sort_unstable();
        if grids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Config("duplicate grids in experiment".into()));
        }
        let problem = self.experiment.problem();
        for &n in &self.grids {
            problem.grid(n)?;
        }
        for s in &self.schemes {
            s.validate()?;
            if self.experiment.is_steady() && s.time == TimeTreatment::QuickestFd {
                return Err(Error::Config("QUICKEST applies to unsteady experiments only".into()));
            }
        }
        match (self.experiment.is_steady(), &self.time) {
            (false, None) => Err(Error::Config(format!("{} needs a time step and step count", self.experiment))),
            (false, Some(tm)) => TimeMarchConfig::new(tm.dt, tm.n_steps).map(|_| ()),
            (true, _) if self.steady.tol.is_nan() || self.steady.tol <= 0.0 || self.steady.max_iter == 0 => {
                Err(Error::Config("steady solves need tol > 0 and max_iter > 0".into()))
            }
            (true, _) => Ok(()),
        }
    }

    /// The problem as actually solved (with the final time set).
    pub fn problem(&self) -> Problem {
        let p = self.experiment.problem();
        match &self.time {
            Some(tm) if !self.experiment.is_steady() => p.with_final_time(tm.final_time()),
            _ => p,
        }
    }
}

/// One scheme on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseResult {
    pub scheme: SchemeConfig,
    pub report: ErrorReport,
    pub solve: Option<SteadySolveReport>,
    pub initial: State,
    pub solution: State,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub spec: ExperimentSpec,
    /// Sorted by (scheme label, n_cells).
    pub cases: Vec<CaseResult>,
}

impl ExperimentResult {
    /// Distinct scheme labels in output order.
    pub fn labels(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for c in &self.cases {
            let l = c.scheme.label();
            if out.last() != Some(&l) {
                out.push(l);
            }
        }
        out
    }

    pub fn cases_for(&self, label: &str) -> impl Iterator<Item = &CaseResult> + '_ {
        let label = label.to_string();
        self.cases.iter().filter(move |c| c.scheme.label() == label)
    }

    pub fn order_table(&self, label: &str, norm: Norm) -> OrderTable {
        let pts = self
            .cases_for(label)
            .filter_map(|c| c.report.get(norm).map(|e| (c.report.h, e)))
            .collect();
        OrderTable::new(label, Some(norm), pts)
    }

    pub fn order_tables(&self, norm: Norm) -> Vec<OrderTable> {
        self.labels().iter().map(|l| self.order_table(l, norm)).collect()
    }

    /// Norms with a value in at least one case.
    pub fn norms(&self) -> Vec<Norm> {
        Norm::ALL
            .into_iter()
            .filter(|&n| self.cases.iter().any(|c| c.report.get(n).is_some()))
            .collect()
    }
}

fn run_case(spec: &ExperimentSpec, problem: &Problem, scheme: &SchemeConfig, n: usize) -> Result<CaseResult> {
    let grid = problem.grid(n)?;
    let h = grid.h();
    let mut report = ErrorReport {
        n_cells: n,
        h,
        ..Default::default()
    };
    if problem.is_steady() {
        let (tp, tc) = metrics::truncation_error_norms(problem, scheme, &grid)?;
        report.te_point = Some(tp);
        report.te_cellavg = Some(tc);
        let initial = match spec.init {
            SteadyInit::Exact => State::try_from_fn(grid, |x| problem.exact_point(x))?,
            SteadyInit::Zero => {
                let mut s = State::try_from_fn(grid, |x| problem.exact_point(x))?;
                for i in grid.interior() {
                    s.values_mut()[i - 1] = 0.0;
                }
                s
            }
        };
        let (solution, solve) = solve_steady(&initial, problem, scheme, &spec.steady)?;
        if !solve.converged {
            return Err(Error::NotConverged {
                iterations: solve.iterations,
                residual: solve.final_residual_l1,
            });
        }
        let (ep, ec) = metrics::discretization_error_norms(&solution, problem, true)?;
        report.de_point = Some(ep);
        report.de_cellavg = Some(ec);
        Ok(CaseResult {
            scheme: *scheme,
            report,
            solve: Some(solve),
            initial,
            solution,
        })
    } else {
        let tm = spec
            .time
            .ok_or_else(|| Error::Config("unsteady experiment without a time step".into()))?;
        let initial = State::from_fn(grid, |x| problem.initial(x))?;
        let solution = march(&initial, problem, scheme, &tm)?;
        let (ep, ec) = metrics::discretization_error_norms(&solution, problem, false)?;
        report.de_point = Some(ep);
        report.de_cellavg = Some(ec);
        Ok(CaseResult {
            scheme: *scheme,
            report,
            solve: None,
            initial,
            solution,
        })
    }
}

/// Runs every scheme on every grid. Cases run concurrently under
/// [`Execution::Parallel`]; the result does not depend on the execution
/// mode. The first failing case (in scheme, grid order) is reported.
pub fn run_experiment(spec: &ExperimentSpec, exec: Execution) -> Result<ExperimentResult> {
    spec.validate()?;
    let problem = spec.problem();
    let mut jobs: Vec<(SchemeConfig, usize)> = Vec::new();
    for s in &spec.schemes {
        for &n in &spec.grids {
            jobs.push((*s, n));
        }
    }
    let results = par::map_items(exec, &jobs, |(s, n)| {
        run_case(spec, &problem, s, *n).map_err(|e| Error::Run {
            scheme: s.label(),
            n_cells: *n,
            source: Box::new(e),
        })
    });
    let mut cases = results.into_iter().collect::<Result<Vec<_>>>()?;
    cases.sort_by(|a, b| {
        a.scheme
            .label()
            .cmp(&b.scheme.label())
            .then(a.report.n_cells.cmp(&b.report.n_cells))
    });
    Ok(ExperimentResult {
        spec: spec.clone(),
        cases,
    })
}

fn num(v: f64) -> String {
    format!("{v:e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// CSV rows (header first). Orders compare each grid with the next coarser
/// grid of the same scheme and are empty on the coarsest.
pub fn csv_string(result: &ExperimentResult) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Config(format!("csv: {e}"));
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    let mut prev: Option<&CaseResult> = None;
    for c in &result.cases {
        let label = c.scheme.label();
        let coarser = prev.filter(|p| p.scheme.label() == label);
        let order = |norm: Norm| {
            coarser
                .and_then(|p| {
                    let (ec, ef) = (p.report.get(norm)?, c.report.get(norm)?);
                    observed_order(ec, ef, p.report.h, c.report.h)
                })
                .map(num)
                .unwrap_or_default()
        };
        let alpha = c.scheme.resolved_alpha()?;
        w.write_record([
            result.spec.name.clone(),
            label.clone(),
            format!("{}", c.scheme.kappa),
            format!("{alpha}"),
            c.scheme.recon.to_string(),
            c.scheme.time.to_string(),
            c.report.n_cells.to_string(),
            num(c.report.h),
            opt(c.report.te_point),
            opt(c.report.te_cellavg),
            opt(c.report.de_point),
            opt(c.report.de_cellavg),
            order(Norm::TePoint),
            order(Norm::DePoint),
            order(Norm::DeCellAvg),
        ])
        .map_err(csv_err)?;
        prev = Some(c);
    }
    let bytes = w.into_inner().map_err(|e| Error::Config(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Config(format!("csv: {e}")))
}

pub fn emit_csv(result: &ExperimentResult, path: &Path) -> Result<()> {
    if result.cases.is_empty() {
        return Err(Error::Config("no results to write".into()));
    }
    write(path, &csv_string(result)?)
}

/// `key,value` lines describing the run.
pub fn meta_string(result: &ExperimentResult) -> String {
    let spec = &result.spec;
    let p = spec.problem();
    let mut out = String::from("key,value\n");
    out.push_str(&format!("experiment,{}\n", spec.name));
    out.push_str(&format!("problem,{}\n", spec.experiment));
    out.push_str(&format!("nu,{}\n", p.nu));
    match &spec.time {
        Some(tm) if !spec.experiment.is_steady() => {
            out.push_str(&format!("final_time,{}\n", tm.final_time()));
            out.push_str(&format!("dt,{}\n", tm.dt));
            out.push_str(&format!("steps,{}\n", tm.n_steps));
        }
        _ => {
            out.push_str(&format!("tol,{:e}\n", spec.steady.tol));
            out.push_str(&format!("max_iter,{}\n", spec.steady.max_iter));
            let init = match spec.init {
                SteadyInit::Exact => "exact",
                SteadyInit::Zero => "zero",
            };
            out.push_str(&format!("init,{init}\n"));
        }
    }
    let grids: Vec<String> = spec.grids.iter().map(|n| n.to_string()).collect();
    out.push_str(&format!("grids,{}\n", grids.join(" ")));
    out
}

pub fn emit_convergence_plot(tables: &[OrderTable], title: &str, path: &Path) -> Result<()> {
    if tables.is_empty() {
        return Err(Error::Config("no order tables to plot".into()));
    }
    write(path, &plot::convergence_svg(tables, title))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Label made safe for file names.
pub fn slug(label: &str) -> String {
    let mut s: String = label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '-' })
        .collect();
    while s.contains("--") {
        s = s.replace("--", "-");
    }
    s.trim_matches('-').to_string()
}

/// Writes the CSV, metadata, one SVG per available norm and any requested
/// snapshots and histories into `dir`. Returns the written paths.
pub fn write_outputs(result: &ExperimentResult, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let stem = &result.spec.name;
    let mut written = Vec::new();

    let path = dir.join(format!("{stem}.csv"));
    emit_csv(result, &path)?;
    written.push(path);

    let path = dir.join(format!("{stem}_meta.csv"));
    write(&path, &meta_string(result))?;
    written.push(path);

    for norm in result.norms() {
        let path = dir.join(format!("{stem}_{}.svg", norm.name()));
        let title = format!("{}: {}", result.spec.experiment, norm.title());
        emit_convergence_plot(&result.order_tables(norm), &title, &path)?;
        written.push(path);
    }

    if result.spec.snapshots {
        let problem = result.spec.problem();
        let mut profiles = Vec::new();
        for c in &result.cases {
            let name = format!("{stem}_solution_{}_n{}.csv", slug(&c.scheme.label()), c.report.n_cells);
            let path = dir.join(name);
            let mut out = String::from("i,x,u_initial,u_final,u_exact\n");
            let grid = c.solution.grid();
            for i in 1..=grid.n_cells() {
                let x = grid.cell_center(i)?;
                out.push_str(&format!(
                    "{i},{},{},{},{}\n",
                    num(x),
                    num(c.initial.at(i)),
                    num(c.solution.at(i)),
                    num(problem.exact_point(x)?)
                ));
            }
            write(&path, &out)?;
            written.push(path);
            let pts = |s: &State| (1..=grid.n_cells()).map(|i| (grid.center_unchecked(i), s.at(i))).collect();
            if profiles.is_empty() {
                profiles.push(plot::Series {
                    label: format!("initial, {} cells", c.report.n_cells),
                    points: pts(&c.initial),
                });
            }
            profiles.push(plot::Series {
                label: format!("{}, {} cells", c.scheme.label(), c.report.n_cells),
                points: pts(&c.solution),
            });
        }
        let path = dir.join(format!("{stem}_solution.svg"));
        write(&path, &plot::profile_svg(&profiles, &format!("{}: solution", result.spec.experiment)))?;
        written.push(path);
    }

    if result.spec.histories {
        for c in &result.cases {
            if let Some(solve) = &c.solve {
                let name = format!("{stem}_history_{}_n{}.csv", slug(&c.scheme.label()), c.report.n_cells);
                let path = dir.join(name);
                write(&path, &solve.history_csv())?;
                written.push(path);
            }
        }
    }
    Ok(written)
}

pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
}

pub const PRESETS: [Preset; 8] = [
    Preset {
        name: "fig4",
        description: "steady Burgers, kappa 0, 1/3, 1/2: truncation and discretization errors",
    },
    Preset {
        name: "fig5",
        description: "steady viscous Burgers (nu = 1), compatible alpha, kappa 0, 1/3, 1/2",
    },
    Preset {
        name: "fig6",
        description: "steady viscous Burgers (nu = 1), alpha = 4/3, kappa 0, 1/3, 1/2",
    },
    Preset {
        name: "fig7",
        description: "unsteady Burgers initial and final solutions on the coarsest grid",
    },
    Preset {
        name: "fig8",
        description: "unsteady Burgers, coupled and lumped mass, kappa 0, 1/3, 1/2",
    },
    Preset {
        name: "fig9",
        description: "unsteady Burgers, QUICKEST with solution and flux interpolation",
    },
    Preset {
        name: "fig9-linear",
        description: "linear convection (a = 0.75), QUICKEST with solution and flux interpolation",
    },
    Preset {
        name: "fig10",
        description: "unsteady Burgers, explicit QUICK of Van Leer, kappa 0, 1/3, 1/2",
    },
];

fn kappas() -> [f64; 3] {
    [0.0, 1.0 / 3.0, 0.5]
}

fn each_kappa(f: impl Fn(SchemeConfig) -> SchemeConfig) -> Vec<SchemeConfig> {
    kappas().into_iter().map(|k| f(SchemeConfig::with_kappa(k))).collect()
}

pub fn is_preset(name: &str) -> bool {
    PRESETS.iter().any(|p| p.name == name)
}

pub fn preset(name: &str) -> Result<ExperimentSpec> {
    let quickest = || vec![SchemeConfig::quickest(ReconMode::SolutionInterp), SchemeConfig::quickest(ReconMode::FluxInterp)];
    let (experiment, schemes) = match name {
        "fig4" => (Experiment::SteadyBurgers, each_kappa(|s| s)),
        "fig5" => (Experiment::SteadyViscBurgers, each_kappa(|s| s)),
        "fig6" => (
            Experiment::SteadyViscBurgers,
            each_kappa(|s| s.alpha(AlphaSetting::Value(4.0 / 3.0))),
        ),
        "fig7" => (Experiment::UnsteadyBurgers, vec![SchemeConfig::quick()]),
        "fig8" => {
            let mut v = each_kappa(|s| s);
            v.extend(each_kappa(|s| s.time(TimeTreatment::LumpedMass)));
            (Experiment::UnsteadyBurgers, v)
        }
        "fig9" => (Experiment::UnsteadyBurgers, quickest()),
        "fig9-linear" => (Experiment::UnsteadyLinear, quickest()),
        "fig10" => (
            Experiment::UnsteadyBurgers,
            each_kappa(|s| s.time(TimeTreatment::VanLeerExplicit)),
        ),
        _ => return Err(Error::Config(format!("unknown preset '{name}'"))),
    };
    let mut spec = ExperimentSpec::new(experiment, schemes);
    spec.name = name.to_string();
    if name == "fig7" {
        spec.grids = vec![UNSTEADY_GRIDS[0]];
        spec.snapshots = true;
    }
    Ok(spec)
}

/// One-line description of a scheme list, e.g. for progress output.
pub fn describe(spec: &ExperimentSpec) -> String {
    let kappas: Vec<String> = spec.schemes.iter().map(|s| format_fraction(s.kappa)).collect();
    format!(
        "{} ({}): {} scheme(s) [kappa {}], grids {:?}",
        spec.name,
        spec.experiment,
        spec.schemes.len(),
        kappas.join(", "),
        spec.grids
    )
}
