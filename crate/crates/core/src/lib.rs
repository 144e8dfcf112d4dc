//! Point-valued QUICK finite-volume schemes for 1D conservation laws, with a
//! grid-convergence harness.
//!
//! Solution values are point values at cell centers. The residual is
//! `(F_{i+1/2} - F_{i-1/2}) / h - s_i` with kappa-interpolated face states,
//! an upwind convective flux and an alpha-damped diffusive flux.

pub mod domain;
pub mod error;
pub mod flux;
pub mod harness;
pub mod linalg;
pub mod metrics;
pub mod par;
pub mod plot;
pub mod problems;
pub mod reconstruction;
pub mod residual;
pub mod scheme;
pub mod steady;
pub mod time_march;
pub mod verify;

pub use domain::{FluxFunction, Grid, State, Topology};
pub use error::{Error, Result};
pub use flux::FaceFlux;
pub use harness::{run_experiment, Experiment, ExperimentResult, ExperimentSpec};
pub use linalg::TridiagonalSystem;
pub use metrics::{ErrorReport, Norm, OrderTable};
pub use par::Execution;
pub use problems::{Problem, ProblemKind};
pub use reconstruction::FaceData;
pub use residual::{assemble_residual, flux_at_face, ResidualVector};
pub use scheme::{AlphaSetting, ForcingMode, ReconMode, SchemeConfig, TimeTreatment};
pub use steady::{solve_steady, SteadyOptions, SteadySolveReport};
pub use time_march::{march, TimeMarchConfig};
