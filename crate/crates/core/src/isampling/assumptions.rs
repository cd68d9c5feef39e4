//! Checks of the growth, minimax-eigenvalue and curvature conditions under
//! which the randomized lattice estimators keep their rate.

use serde::{Deserialize, Serialize};

use super::plan::{find_mode, ISPlan, Mode, ProposalKind};
use super::problem::GaussianProblem;
use crate::numkit::linalg::sym_eigenvalues;
use crate::numkit::regression::fit_loglog_slope;
use crate::numkit::rng::{open01, RngStream};
use crate::numkit::special::normal_inv_cdf;
use crate::rkhs::WeightScheme;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Satisfied,
    Violated,
    HeuristicPass,
    HeuristicFail,
    NotApplicable,
}

impl Verdict {
    pub fn holds(self) -> bool {
        matches!(self, Verdict::Satisfied | Verdict::HeuristicPass)
    }

    fn exact(ok: bool) -> Self {
        if ok {
            Verdict::Satisfied
        } else {
            Verdict::Violated
        }
    }
}

pub const GROWTH_DIRECTIONS: usize = 32;
pub const GROWTH_THRESHOLD: f64 = 1.95;
const GROWTH_SEED: u64 = 0x5eed_9a0b;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthProbe {
    /// Largest log-log slope of |g(μ₀ + r·u)| over radii r = 2³..2¹⁰.
    /// Infinite when g overflows along some direction.
    pub exponent: f64,
    /// Same probe on the positive part max(g, 0); `None` when g ≤ 0 on every probed ray.
    pub upper_exponent: Option<f64>,
    pub directions: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    pub plan: ProposalKind,
    pub growth: GrowthProbe,
    pub growth_verdict: Verdict,
    /// β = 2 variant: max λ(Σ⋆) < 1/(2α), only evaluated when the probed
    /// exponent is within 0.05 of 2.
    pub growth_quadratic_verdict: Verdict,
    pub h_min: f64,
    pub lambda_max: f64,
    /// −h_min · λ_max
    pub eigen_lhs: f64,
    /// 1/α; `None` for the rational scheme.
    pub eigen_rhs: Option<f64>,
    pub eigen_verdict: Verdict,
    pub convex_min_eigenvalue: f64,
    pub convex_verdict: Verdict,
}

impl AssumptionReport {
    /// Whether the conditions the plan relies on hold (growth for every
    /// plan, plus the eigenvalue condition for LapIS).
    pub fn plan_conditions_hold(&self) -> bool {
        let growth = self.growth_verdict.holds() || self.growth_quadratic_verdict.holds();
        match self.plan {
            ProposalKind::Lapis => growth && self.eigen_verdict.holds(),
            _ => growth,
        }
    }
}

/// Probes the growth exponent of |g| along fixed pseudo-random directions.
pub fn probe_growth(p: &GaussianProblem) -> GrowthProbe {
    let d = p.dim();
    let mut rng = RngStream::keyed(GROWTH_SEED, &[d as u64]).rng();
    let mut exponent: f64 = 0.0;
    let mut upper: Option<f64> = None;
    for _ in 0..GROWTH_DIRECTIONS {
        let mut u: Vec<f64> = (0..d)
            .map(|_| normal_inv_cdf(open01(&mut rng)).unwrap_or(0.0))
            .collect();
        let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        u.iter_mut().for_each(|x| *x /= norm);
        let values: Vec<(f64, f64)> = (3..=10)
            .map(|k| {
                let r = f64::from(1u32 << k);
                let z: Vec<f64> = p.mu0.iter().zip(&u).map(|(m, uj)| m + r * uj).collect();
                (r, p.log_g(&z))
            })
            .collect();
        if values.iter().any(|(_, g)| !g.is_finite()) {
            exponent = f64::INFINITY;
            continue;
        }
        let slope = |pts: Vec<(f64, f64)>| fit_loglog_slope(&pts).ok().map(|f| f.slope);
        let abs: Vec<(f64, f64)> = values.iter().filter(|v| v.1 != 0.0).map(|&(r, g)| (r, g.abs())).collect();
        if let Some(s) = slope(abs) {
            exponent = exponent.max(s);
        }
        let pos: Vec<(f64, f64)> = values.iter().filter(|v| v.1 > 0.0).copied().collect();
        if let Some(s) = slope(pos) {
            upper = Some(upper.map_or(s, |m| m.max(s)));
        }
    }
    GrowthProbe {
        exponent,
        upper_exponent: upper,
        directions: GROWTH_DIRECTIONS,
    }
}

/// Evaluates the three conditions at the plan's mode (solving for it when
/// the plan has none).
pub fn check_assumptions(
    p: &GaussianProblem,
    plan: &ISPlan,
    scheme: &WeightScheme,
) -> crate::error::Result<AssumptionReport> {
    let mode: Mode = match &plan.mode {
        Some(m) => m.clone(),
        None => find_mode(p)?,
    };
    let h = sym_eigenvalues(&mode.hess_g);
    let lam = sym_eigenvalues(&mode.sigma_star);
    let h_min = h[0];
    let lambda_max = *lam.last().expect("dimension >= 1");
    let alpha = match *scheme {
        WeightScheme::Gaussian { alpha_sq } => Some(alpha_sq.sqrt()),
        WeightScheme::Rational { .. } => None,
    };
    let growth = probe_growth(p);
    let growth_verdict = if growth.exponent < GROWTH_THRESHOLD {
        Verdict::HeuristicPass
    } else {
        Verdict::HeuristicFail
    };
    let growth_quadratic_verdict = match alpha {
        Some(a) if (growth.exponent - 2.0).abs() <= 0.05 => {
            if lambda_max < 1.0 / (2.0 * a) {
                Verdict::HeuristicPass
            } else {
                Verdict::HeuristicFail
            }
        }
        _ => Verdict::NotApplicable,
    };
    let eigen_lhs = -h_min * lambda_max;
    let eigen_rhs = alpha.map(|a| 1.0 / a);
    let eigen_verdict = match eigen_rhs {
        Some(rhs) => Verdict::exact(eigen_lhs < rhs),
        None => Verdict::NotApplicable,
    };
    let tol = 1e-10 * (1.0 + mode.hess_g.max_abs());
    Ok(AssumptionReport {
        plan: plan.kind,
        growth,
        growth_verdict,
        growth_quadratic_verdict,
        h_min,
        lambda_max,
        eigen_lhs,
        eigen_rhs,
        eigen_verdict,
        convex_min_eigenvalue: h_min,
        convex_verdict: Verdict::exact(h_min >= -tol),
    })
}
