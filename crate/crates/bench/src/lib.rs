//! Shared fixtures for the benchmarks.

use qmcis::isampling::{resolve_plan, GaussianProblem, ISPlan, ProposalKind};
use qmcis::lattice::{cbc_construct, make_pod_weights, GeneratingVector, PodWeights};
use qmcis::models::RbInstance;
use qmcis::rkhs::{ThetaGrid, WeightScheme};

pub const KAPPA: f64 = 0.1;
pub const ETA: f64 = 3.1;
pub const LAMBDA_W: f64 = 0.51;

pub fn scheme() -> WeightScheme {
    WeightScheme::gaussian(4.0).expect("alpha^2 = 4 is well defined")
}

pub fn weights(d: usize) -> PodWeights {
    make_pod_weights(d, KAPPA, ETA, LAMBDA_W).expect("valid weights")
}

pub fn grid(n: u64) -> ThetaGrid {
    ThetaGrid::new(&scheme(), n as usize).expect("theta grid")
}

pub fn lattice(n: u64, d: usize) -> GeneratingVector {
    cbc_construct(n, d, &weights(d), &grid(n)).expect("cbc")
}

pub fn bond(d: usize, kind: ProposalKind) -> (GaussianProblem, ISPlan) {
    let p = RbInstance::baseline(d).problem().expect("bond problem");
    let plan = resolve_plan(&p, kind).expect("plan");
    (p, plan)
}
