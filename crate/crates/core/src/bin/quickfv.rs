use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use quickfv::harness::{self, Experiment, ExperimentSpec, SteadyInit, PRESETS};
use quickfv::scheme::{parse_fraction, AlphaSetting, ForcingMode, ReconMode, SchemeConfig, TimeTreatment};
use quickfv::time_march::TimeMarchConfig;
use quickfv::{verify, Error, Execution, Result};

#[derive(Parser)]
#[command(name = "quickfv", version, about = "Point-valued QUICK finite-volume convergence studies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment or a figure preset and write CSV and SVG output.
    Run(RunArgs),
    /// List the figure presets.
    Presets,
    /// Run the acceptance checks and print one PASS/FAIL line per criterion.
    Verify,
}

#[derive(Clone, Copy, ValueEnum)]
enum Recon {
    Solution,
    Flux,
}

#[derive(Clone, Copy, ValueEnum)]
enum Time {
    Coupled,
    Lumped,
    Quickest,
    Vanleer,
}

#[derive(Clone, Copy, ValueEnum)]
enum OnOff {
    On,
    Off,
}

#[derive(Clone, Copy, ValueEnum)]
enum Forcing {
    Cellavg,
    Point,
}

#[derive(Clone, Copy, ValueEnum)]
enum Init {
    Exact,
    Zero,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment (steady-burgers, steady-visc-burgers, unsteady-burgers,
    /// unsteady-linear) or preset name (fig4 ... fig10).
    #[arg(long)]
    experiment: String,
    /// Comma-separated kappa values, e.g. `0,1/3,1/2`.
    #[arg(long, value_delimiter = ',')]
    kappa: Option<Vec<String>>,
    /// Comma-separated cell counts.
    #[arg(long, value_delimiter = ',')]
    grids: Option<Vec<usize>>,
    /// `auto` or a number.
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long, value_enum)]
    recon: Option<Recon>,
    #[arg(long, value_enum)]
    time: Option<Time>,
    #[arg(long, requires = "steps")]
    dt: Option<f64>,
    #[arg(long, requires = "dt")]
    steps: Option<usize>,
    #[arg(long, value_enum)]
    dissipation: Option<OnOff>,
    #[arg(long, value_enum)]
    forcing: Option<Forcing>,
    /// Steady solver starting guess.
    #[arg(long, value_enum)]
    init: Option<Init>,
    /// Steady residual tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Write solution snapshots.
    #[arg(long)]
    snapshots: bool,
    /// Write steady convergence histories.
    #[arg(long)]
    histories: bool,
    /// Run cases one at a time.
    #[arg(long)]
    sequential: bool,
    #[arg(long)]
    out: PathBuf,
}

fn parse_alpha(s: &str) -> Result<AlphaSetting> {
    if s.eq_ignore_ascii_case("auto") {
        Ok(AlphaSetting::Auto)
    } else {
        Ok(AlphaSetting::Value(parse_fraction(s)?))
    }
}

/// Preset (or default) schemes with the command-line overrides applied.
fn build_spec(args: &RunArgs) -> Result<ExperimentSpec> {
    let mut spec = if harness::is_preset(&args.experiment) {
        harness::preset(&args.experiment)?
    } else {
        let experiment: Experiment = args.experiment.parse()?;
        ExperimentSpec::new(experiment, vec![SchemeConfig::quick()])
    };

    let mut templates = spec.schemes.clone();
    for s in &mut templates {
        if let Some(a) = &args.alpha {
            s.alpha = parse_alpha(a)?;
        }
        if let Some(r) = args.recon {
            s.recon = match r {
                Recon::Solution => ReconMode::SolutionInterp,
                Recon::Flux => ReconMode::FluxInterp,
            };
        }
        if let Some(t) = args.time {
            s.time = match t {
                Time::Coupled => TimeTreatment::CoupledMass,
                Time::Lumped => TimeTreatment::LumpedMass,
                Time::Quickest => TimeTreatment::QuickestFd,
                Time::Vanleer => TimeTreatment::VanLeerExplicit,
            };
            if s.time == TimeTreatment::QuickestFd && args.forcing.is_none() {
                s.forcing = ForcingMode::PointValue;
            }
        }
        if let Some(d) = args.dissipation {
            s.dissipation = matches!(d, OnOff::On);
        }
        if let Some(f) = args.forcing {
            s.forcing = match f {
                Forcing::Cellavg => ForcingMode::CellAveraged,
                Forcing::Point => ForcingMode::PointValue,
            };
        }
    }
    let mut schemes: Vec<SchemeConfig> = Vec::new();
    match &args.kappa {
        Some(list) => {
            let kappas = list.iter().map(|k| parse_fraction(k)).collect::<Result<Vec<_>>>()?;
            for t in &templates {
                for &k in &kappas {
                    let s = SchemeConfig { kappa: k, ..*t };
                    if !schemes.iter().any(|o| o.label() == s.label()) {
                        schemes.push(s);
                    }
                }
            }
        }
        None => {
            for t in templates {
                if !schemes.iter().any(|o| o.label() == t.label()) {
                    schemes.push(t);
                }
            }
        }
    }
    spec.schemes = schemes;

    if let Some(g) = &args.grids {
        spec.grids = g.clone();
    }
    if let (Some(dt), Some(steps)) = (args.dt, args.steps) {
        if spec.experiment.is_steady() {
            return Err(Error::Config("--dt/--steps apply to unsteady experiments only".into()));
        }
        spec.time = Some(TimeMarchConfig::new(dt, steps)?);
    }
    if let Some(i) = args.init {
        spec.init = match i {
            Init::Exact => SteadyInit::Exact,
            Init::Zero => SteadyInit::Zero,
        };
    }
    if let Some(t) = args.tol {
        spec.steady.tol = t;
    }
    if let Some(m) = args.max_iter {
        spec.steady.max_iter = m;
    }
    spec.snapshots |= args.snapshots;
    spec.histories |= args.histories;
    spec.validate()?;
    Ok(spec)
}

fn run(args: &RunArgs) -> Result<()> {
    let spec = build_spec(args)?;
    eprintln!("running {}", harness::describe(&spec));
    let exec = if args.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let result = harness::run_experiment(&spec, exec)?;
    for norm in result.norms() {
        for t in result.order_tables(norm) {
            let finest = t.finest_order().map(|o| format!("{o:.2}")).unwrap_or_else(|| "-".into());
            let tail = t.tail_order(3).map(|o| format!("{o:.2}")).unwrap_or_else(|| "-".into());
            println!("{:<11} {:<40} finest-pair order {finest:>6}  last-3 slope {tail:>6}", norm.name(), t.label);
        }
    }
    for path in harness::write_outputs(&result, &args.out)? {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run(args) => run(args),
        Command::Presets => {
            for p in &PRESETS {
                println!("{:<12} {}", p.name, p.description);
            }
            Ok(())
        }
        Command::Verify => {
            let mut all = true;
            for id in 1..=verify::CRITERIA.len() as u8 {
                let o = verify::run_criterion(id, Execution::Parallel);
                println!("{o}");
                all &= o.passed;
            }
            if all {
                Ok(())
            } else {
                return ExitCode::from(1);
            }
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
