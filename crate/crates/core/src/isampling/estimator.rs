use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::plan::{ISPlan, ProposalKind, LOG_OVERFLOW};
use super::problem::GaussianProblem;
use crate::error::{Error, Result};
use crate::lattice::{lattice_coordinate, random_shift, GeneratingVector};
use crate::numkit::rng::{open01, RngStream};
use crate::numkit::special::{normal_inv_cdf, student_t_inv_cdf};

#[derive(Debug, Clone, PartialEq)]
pub enum PointSource {
    /// N fresh uniforms per replication.
    MonteCarlo { n: usize },
    /// One random shift of the lattice per replication.
    Lattice(GeneratingVector),
}

impl PointSource {
    pub fn n(&self) -> usize {
        match self {
            PointSource::MonteCarlo { n } => *n,
            PointSource::Lattice(g) => g.n as usize,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            PointSource::MonteCarlo { .. } => "mc",
            PointSource::Lattice(_) => "rqmc",
        }
    }
}

/// Replication r draws from `RngStream::keyed(seed, &[cell, r])`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sampling {
    pub replications: usize,
    pub seed: u64,
    pub cell: u64,
}

impl Sampling {
    pub fn new(replications: usize, seed: u64) -> Self {
        Self {
            replications,
            seed,
            cell: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub value: f64,
    /// Sample standard deviation of the replicates over √R.
    pub rmse: f64,
    pub per_shift: Vec<f64>,
    pub n: usize,
    pub replications: usize,
    pub seed: u64,
}

/// Keeps a unit-cube coordinate strictly inside (0, 1).
#[inline]
fn interior(u: f64) -> f64 {
    if u <= 0.0 {
        f64::from_bits(1)
    } else if u >= 1.0 {
        1.0 - f64::EPSILON / 2.0
    } else {
        u
    }
}

fn inverse_cdf(kind: ProposalKind, u: f64) -> Result<f64> {
    match kind {
        ProposalKind::StudentT { nu } => student_t_inv_cdf(interior(u), nu),
        _ => normal_inv_cdf(interior(u)),
    }
}

/// Mean of f over one point set; `unit` fills a point of the unit cube.
fn replicate(
    p: &GaussianProblem,
    plan: &ISPlan,
    n: usize,
    shift_index: usize,
    mut unit: impl FnMut(usize, &mut [f64]),
) -> Result<f64> {
    let d = p.dim();
    let mut u = vec![0.0; d];
    let mut x = vec![0.0; d];
    let mut sum = 0.0;
    for i in 0..n {
        unit(i, &mut u);
        for (xj, &uj) in x.iter_mut().zip(&u) {
            *xj = inverse_cdf(plan.kind, uj)?;
        }
        let lf = plan.log_integrand(p, &x);
        if lf > LOG_OVERFLOW || lf.is_nan() {
            return Err(Error::Overflow {
                log_value: lf,
                shift: shift_index,
                point: i,
            });
        }
        sum += lf.exp();
    }
    Ok(sum / n as f64)
}

/// Runs R independent replications of the (randomized) rule.
pub fn estimate(
    p: &GaussianProblem,
    plan: &ISPlan,
    source: &PointSource,
    sampling: &Sampling,
) -> Result<EstimateResult> {
    let r = sampling.replications;
    if r < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 replications, got {r}")));
    }
    let d = p.dim();
    let n = source.n();
    if n == 0 {
        return Err(Error::InvalidInput("empty point set".into()));
    }
    if let PointSource::Lattice(g) = source {
        if g.dim() != d {
            return Err(Error::InvalidInput(format!(
                "lattice has dimension {}, problem has {d}",
                g.dim()
            )));
        }
    }
    let per_shift: Vec<f64> = (0..r)
        .into_par_iter()
        .map(|k| {
            let mut rng = RngStream::keyed(sampling.seed, &[sampling.cell, k as u64]).rng();
            match source {
                PointSource::MonteCarlo { n } => replicate(p, plan, *n, k, |_, u| {
                    for uj in u.iter_mut() {
                        *uj = open01(&mut rng);
                    }
                }),
                PointSource::Lattice(g) => {
                    let delta = random_shift(d, &mut rng);
                    replicate(p, plan, n, k, |i, u| {
                        for (j, uj) in u.iter_mut().enumerate() {
                            *uj = lattice_coordinate(i as u64 + 1, g.z[j], g.n, delta[j]);
                        }
                    })
                }
            }
        })
        .collect::<Result<_>>()?;
    let (value, rmse) = if per_shift.iter().all(|&v| v == per_shift[0]) {
        (per_shift[0], 0.0)
    } else {
        let mean = per_shift.iter().sum::<f64>() / r as f64;
        let var = per_shift.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (r - 1) as f64;
        (mean, (var / r as f64).sqrt())
    };
    Ok(EstimateResult {
        value,
        rmse,
        per_shift,
        n,
        replications: r,
        seed: sampling.seed,
    })
}
