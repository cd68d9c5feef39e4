//! Experiment drivers. These return data; `commands` does the I/O.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use qmcis::isampling::{
    check_assumptions, estimate, resolve_plan_with, AssumptionReport, GaussianProblem, ISPlan,
    PointSource, ProposalKind, Sampling,
};
use qmcis::lattice::{read_vector_file, worst_case_error_sq, GeneratingVector};
use qmcis::models::{glmm_condition, rb_alpha_bound, GlmmConditionReport, RbAlphaBound};
use qmcis::numkit::fit_loglog_slope;
use qmcis::rkhs::{rate_certificate, theta_hat, ThetaGrid, WeightScheme};

use crate::cache::{sha256_hex, VectorCache};
use crate::config::{ExperimentConfig, Method, Model, Sampler};
use crate::error::CliError;

pub const STATUS_OK: &str = "ok";

/// Stream key of one (method, N) cell. Independent of the order methods are
/// listed in, so a cell reproduces across configs.
pub fn cell_key(method: &Method, n: u64) -> u64 {
    let h = sha256_hex(format!("{method}|{n}").as_bytes());
    u64::from_str_radix(&h[..16], 16).expect("hex digest")
}

fn sampling(cfg: &ExperimentConfig, method: &Method, n: u64) -> Sampling {
    Sampling {
        replications: cfg.replications,
        seed: cfg.seed,
        cell: cell_key(method, n),
    }
}

fn plans(cfg: &ExperimentConfig, p: &GaussianProblem) -> Vec<(ProposalKind, Result<ISPlan, CliError>)> {
    cfg.proposals()
        .into_iter()
        .map(|k| (k, resolve_plan_with(p, k, cfg.t_scale).map_err(CliError::from)))
        .collect()
}

fn source(method: &Method, n: u64, lattice: Option<&Result<GeneratingVector, CliError>>) -> Result<PointSource, String> {
    match method.sampler {
        Sampler::Mc => Ok(PointSource::MonteCarlo { n: n as usize }),
        Sampler::Rqmc => match lattice {
            Some(Ok(g)) => Ok(PointSource::Lattice(g.clone())),
            Some(Err(e)) => Err(format!("lattice: {e}")),
            None => Err("lattice: not constructed".into()),
        },
    }
}

fn failure_status(e: &CliError) -> String {
    match e {
        CliError::Overflow(m) => format!("overflow: {m}"),
        other => format!("error: {other}"),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub method: String,
    pub proposal: String,
    #[serde(rename = "N")]
    pub n: u64,
    pub value: f64,
    pub rmse: f64,
    #[serde(rename = "R")]
    pub replications: usize,
    pub seed: u64,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRow {
    pub method: String,
    pub proposal: String,
    pub slope: f64,
    pub intercept: f64,
    pub points: usize,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    pub fits: Vec<FitRow>,
}

impl ConvergenceReport {
    pub fn fit(&self, method: &Method) -> Option<&FitRow> {
        let (s, p) = (method.sampler.as_str(), method.proposal.to_string());
        self.fits.iter().find(|f| f.method == s && f.proposal == p)
    }

    pub fn row(&self, method: &Method, n: u64) -> Option<&ConvergenceRow> {
        let (s, p) = (method.sampler.as_str(), method.proposal.to_string());
        self.rows.iter().find(|r| r.method == s && r.proposal == p && r.n == n)
    }

    pub fn failed_cells(&self) -> usize {
        self.rows.iter().filter(|r| r.status != STATUS_OK).count()
    }
}

/// RMSE over the N grid for every method; one log-log fit per method.
pub fn run_convergence(cfg: &ExperimentConfig, cache: &VectorCache) -> Result<ConvergenceReport, CliError> {
    let methods = cfg.require_methods()?;
    if cfg.n_list.is_empty() {
        return Err(CliError::Config("n_list is empty".into()));
    }
    let model = cfg.model()?;
    let p = model.problem()?;
    let plans = plans(cfg, &p);
    let lattices: Vec<Option<Result<GeneratingVector, CliError>>> =
        if methods.iter().any(|m| m.sampler == Sampler::Rqmc) {
            cfg.n_list
                .iter()
                .map(|&n| Some(cache.get_or_build(n, p.dim(), &cfg.pod, &cfg.scheme)))
                .collect()
        } else {
            cfg.n_list.iter().map(|_| None).collect()
        };

    let cells: Vec<(usize, usize)> = (0..methods.len())
        .flat_map(|mi| (0..cfg.n_list.len()).map(move |ni| (mi, ni)))
        .collect();
    let mut rows: Vec<(usize, usize, ConvergenceRow)> = cells
        .par_iter()
        .map(|&(mi, ni)| {
            let method = &methods[mi];
            let n = cfg.n_list[ni];
            let plan = &plans.iter().find(|(k, _)| *k == method.proposal).expect("planned").1;
            let outcome = match plan {
                Err(e) => Err(format!("plan: {e}")),
                Ok(plan) => source(method, n, lattices[ni].as_ref()).and_then(|src| {
                    estimate(&p, plan, &src, &sampling(cfg, method, n))
                        .map_err(|e| failure_status(&CliError::from(e)))
                }),
            };
            let (value, rmse, status) = match outcome {
                Ok(r) => (r.value, r.rmse, STATUS_OK.to_string()),
                Err(s) => (f64::NAN, f64::NAN, s),
            };
            let row = ConvergenceRow {
                method: method.sampler.as_str().into(),
                proposal: method.proposal.to_string(),
                n,
                value,
                rmse,
                replications: cfg.replications,
                seed: cfg.seed,
                status,
            };
            (mi, ni, row)
        })
        .collect();
    rows.sort_by_key(|(mi, ni, _)| (*mi, *ni));
    let rows: Vec<ConvergenceRow> = rows.into_iter().map(|(_, _, r)| r).collect();

    let fits = methods
        .iter()
        .map(|m| {
            let (s, pr) = (m.sampler.as_str(), m.proposal.to_string());
            let pts: Vec<(f64, f64)> = rows
                .iter()
                .filter(|r| r.method == s && r.proposal == pr && r.status == STATUS_OK)
                .filter(|r| r.rmse > 0.0 && r.rmse.is_finite())
                .map(|r| (r.n as f64, r.rmse))
                .collect();
            let total = cfg.n_list.len();
            let (slope, intercept, status) = match fit_loglog_slope(&pts) {
                Ok(f) if pts.len() == total => (f.slope, f.intercept, STATUS_OK.to_string()),
                Ok(f) => (f.slope, f.intercept, format!("partial: {} of {total} cells", pts.len())),
                Err(e) => (f64::NAN, f64::NAN, format!("no fit: {e}")),
            };
            FitRow {
                method: s.into(),
                proposal: pr,
                slope,
                intercept,
                points: pts.len(),
                status,
            }
        })
        .collect();
    Ok(ConvergenceReport { rows, fits })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodEstimate {
    pub method: String,
    pub proposal: String,
    pub value: f64,
    pub rmse: f64,
    pub per_shift: Vec<f64>,
    pub replications: usize,
    pub seed: u64,
    pub assumptions: AssumptionReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub problem: String,
    pub dim: usize,
    #[serde(rename = "N")]
    pub n: u64,
    /// Known value of the integral, for fixtures that have one.
    pub exact: Option<f64>,
    pub results: Vec<MethodEstimate>,
}

fn estimate_n(cfg: &ExperimentConfig) -> Result<u64, CliError> {
    cfg.estimate
        .as_ref()
        .map(|e| e.n)
        .or_else(|| cfg.n_list.last().copied())
        .ok_or_else(|| CliError::Config("no [estimate] n and no n_list".into()))
}

fn estimate_lattice(cfg: &ExperimentConfig, cache: &VectorCache, n: u64, d: usize) -> Result<GeneratingVector, CliError> {
    match cfg.estimate.as_ref().and_then(|e| e.vector.as_ref()) {
        Some(path) => {
            let g = read_vector_file(path)?;
            if g.n != n || g.dim() < d {
                return Err(CliError::Config(format!(
                    "{} holds N = {}, d = {}; need N = {n}, d >= {d}",
                    path.display(),
                    g.n,
                    g.dim()
                )));
            }
            Ok(g.prefix(d))
        }
        None => cache.get_or_build(n, d, &cfg.pod, &cfg.scheme),
    }
}

/// One estimate per configured method at a single N, with the assumption
/// report of its plan. Integrand overflow aborts with the growth verdict.
pub fn run_estimate(cfg: &ExperimentConfig, cache: &VectorCache) -> Result<EstimateReport, CliError> {
    let methods = cfg.require_methods()?;
    let n = estimate_n(cfg)?;
    let model = cfg.model()?;
    let p = model.problem()?;
    let lattice = if methods.iter().any(|m| m.sampler == Sampler::Rqmc) {
        Some(estimate_lattice(cfg, cache, n, p.dim())?)
    } else {
        None
    };
    let mut results = Vec::with_capacity(methods.len());
    for method in methods {
        let plan = resolve_plan_with(&p, method.proposal, cfg.t_scale)?;
        let report = check_assumptions(&p, &plan, &cfg.scheme)?;
        let src = match (&method.sampler, &lattice) {
            (Sampler::Rqmc, Some(g)) => PointSource::Lattice(g.clone()),
            _ => PointSource::MonteCarlo { n: n as usize },
        };
        let r = estimate(&p, &plan, &src, &sampling(cfg, method, n)).map_err(|e| match e {
            qmcis::Error::Overflow { .. } => CliError::Overflow(format!(
                "{method}: {e}; growth heuristic {:?} (exponent {:.3}), plan conditions {}",
                report.growth_verdict,
                report.growth.exponent,
                if report.plan_conditions_hold() { "hold" } else { "violated" }
            )),
            other => other.into(),
        })?;
        results.push(MethodEstimate {
            method: method.sampler.as_str().into(),
            proposal: method.proposal.to_string(),
            value: r.value,
            rmse: r.rmse,
            per_shift: r.per_shift,
            replications: r.replications,
            seed: r.seed,
            assumptions: report,
        });
    }
    let exact = match &model {
        Model::Synthetic(s) => s.exact_value().ok(),
        Model::RandlemanBartter(m) if m.sigma == 0.0 => qmcis::models::rb_price_closed_form_sigma0(m).ok(),
        _ => None,
    };
    Ok(EstimateReport {
        problem: cfg.problem.as_ref().map(|p| p.label()).unwrap_or_default(),
        dim: p.dim(),
        n,
        exact,
        results,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanAssumptions {
    pub proposal: String,
    pub center: Option<Vec<f64>>,
    pub report: Option<AssumptionReport>,
    pub conditions_hold: Option<bool>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RbAssumptions {
    pub bound: RbAlphaBound,
    /// α² of the configured gaussian scheme, when it is one.
    pub alpha_sq: Option<f64>,
    pub alpha_sq_within_bound: Option<bool>,
    /// σ²/4, the bound on κ quoted for the model.
    pub kappa_bound_sigma_sq_over_4: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionsOutput {
    pub problem: String,
    pub scheme: WeightScheme,
    pub plans: Vec<PlanAssumptions>,
    pub glmm: Option<GlmmConditionReport>,
    pub randleman_bartter: Option<RbAssumptions>,
    /// Model-specific checks that could not run.
    pub model_error: Option<String>,
}

/// Report-only: failures are recorded in the output, never raised.
pub fn run_assumptions(cfg: &ExperimentConfig) -> Result<AssumptionsOutput, CliError> {
    let model = cfg.model()?;
    let p = model.problem()?;
    let proposals = if cfg.methods.is_empty() {
        vec![ProposalKind::None, ProposalKind::Odis, ProposalKind::Lapis]
    } else {
        cfg.proposals()
    };
    let plans = proposals
        .into_iter()
        .map(|k| match resolve_plan_with(&p, k, cfg.t_scale) {
            Ok(plan) => match check_assumptions(&p, &plan, &cfg.scheme) {
                Ok(report) => PlanAssumptions {
                    proposal: k.to_string(),
                    center: Some(plan.center.clone()),
                    conditions_hold: Some(report.plan_conditions_hold()),
                    report: Some(report),
                    error: None,
                },
                Err(e) => PlanAssumptions {
                    proposal: k.to_string(),
                    center: Some(plan.center.clone()),
                    report: None,
                    conditions_hold: None,
                    error: Some(e.to_string()),
                },
            },
            Err(e) => PlanAssumptions {
                proposal: k.to_string(),
                center: None,
                report: None,
                conditions_hold: None,
                error: Some(e.to_string()),
            },
        })
        .collect();
    let alpha_sq = match cfg.scheme {
        WeightScheme::Gaussian { alpha_sq } => Some(alpha_sq),
        WeightScheme::Rational { .. } => None,
    };
    let (mut glmm, mut rb, mut model_error) = (None, None, None);
    match &model {
        Model::Glmm(g) => match glmm_condition(g, &cfg.scheme) {
            Ok(r) => glmm = Some(r),
            Err(e) => model_error = Some(e.to_string()),
        },
        Model::RandlemanBartter(m) => match rb_alpha_bound(m) {
            Ok(bound) => {
                rb = Some(RbAssumptions {
                    alpha_sq_within_bound: alpha_sq.map(|a| a < bound.alpha_sq_max),
                    bound,
                    alpha_sq,
                    kappa_bound_sigma_sq_over_4: m.sigma * m.sigma / 4.0,
                })
            }
            Err(e) => model_error = Some(e.to_string()),
        },
        Model::Synthetic(_) => {}
    }
    Ok(AssumptionsOutput {
        problem: cfg.problem.as_ref().map(|p| p.label()).unwrap_or_default(),
        scheme: cfg.scheme,
        plans,
        glmm,
        randleman_bartter: rb,
        model_error,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierRow {
    pub h: i64,
    pub theta_hat: f64,
    pub bound: f64,
    pub ratio: f64,
}

/// θ̂(h) against the certified bound C₂ h^{−2r₂} for h = 1..h_max.
pub fn run_fourier_check(scheme: &WeightScheme, h_max: i64) -> Result<Vec<FourierRow>, CliError> {
    let cert = rate_certificate(scheme)?;
    (1..=h_max)
        .into_par_iter()
        .map(|h| {
            let t = theta_hat(h, scheme)?;
            let bound = cert.bound(h);
            Ok(FourierRow {
                h,
                theta_hat: t,
                bound,
                ratio: t / bound,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CbcOutput {
    pub vector: GeneratingVector,
    /// Squared worst-case error of each prefix, s = 1..d.
    pub prefix_error_sq: Vec<f64>,
}

pub fn run_cbc(cfg: &ExperimentConfig, cache: &VectorCache) -> Result<CbcOutput, CliError> {
    let c = cfg
        .cbc
        .ok_or_else(|| CliError::Config("config has no [cbc] section (n, d)".into()))?;
    let vector = cache.get_or_build(c.n, c.d, &cfg.pod, &cfg.scheme)?;
    let grid = ThetaGrid::new(&cfg.scheme, c.n as usize)?;
    let w = cfg.pod.weights(c.d)?;
    let prefix_error_sq = (1..=c.d)
        .map(|s| worst_case_error_sq(&vector.prefix(s), &w, &grid))
        .collect::<qmcis::Result<_>>()?;
    Ok(CbcOutput {
        vector,
        prefix_error_sq,
    })
}
