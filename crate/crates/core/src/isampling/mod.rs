//! Importance sampling for Gaussian-measure integrals with plain Monte Carlo
//! or randomly shifted lattice points.

mod assumptions;
mod estimator;
mod plan;
mod problem;

pub use assumptions::{check_assumptions, probe_growth, AssumptionReport, GrowthProbe, Verdict};
pub use estimator::{estimate, EstimateResult, PointSource, Sampling};
pub use plan::{find_mode, resolve_plan, resolve_plan_with, ISPlan, Mode, ProposalKind, TScale, LOG_OVERFLOW};
pub use problem::{fd_gradient, fd_hessian, GaussianProblem, LogIntegrand, LogPosterior};
