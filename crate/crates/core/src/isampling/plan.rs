use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::problem::GaussianProblem;
use crate::error::{Error, Result};
use crate::numkit::linalg::{cholesky, dot, spd_inverse, LowerTriangular, SymMatrix};
use crate::numkit::newton::{newton_maximize, NewtonOptions};
use crate::numkit::special::{ln_student_t_pdf, LN_SQRT_2PI};

/// Largest admissible log-value of the transformed integrand.
pub const LOG_OVERFLOW: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum ProposalKind {
    None,
    Odis,
    Lapis,
    StudentT { nu: f64 },
}

impl fmt::Display for ProposalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProposalKind::None => f.write_str("none"),
            ProposalKind::Odis => f.write_str("odis"),
            ProposalKind::Lapis => f.write_str("lapis"),
            ProposalKind::StudentT { nu } => write!(f, "student_t:{nu}"),
        }
    }
}

impl FromStr for ProposalKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(ProposalKind::None),
            "odis" => Ok(ProposalKind::Odis),
            "lapis" => Ok(ProposalKind::Lapis),
            _ => {
                let nu = s
                    .strip_prefix("student_t:")
                    .and_then(|v| v.parse::<f64>().ok())
                    .ok_or_else(|| Error::Parse(format!("unknown proposal {s:?}")))?;
                if !(nu > 0.0) || !nu.is_finite() {
                    return Err(Error::Parse(format!("degrees of freedom must be positive in {s:?}")));
                }
                Ok(ProposalKind::StudentT { nu })
            }
        }
    }
}

impl From<ProposalKind> for String {
    fn from(k: ProposalKind) -> String {
        k.to_string()
    }
}

impl TryFrom<String> for ProposalKind {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Scale of the t proposal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TScale {
    /// Cholesky factor of Σ₀.
    #[default]
    Prior,
    /// Cholesky factor of the Laplace covariance Σ⋆.
    Laplace,
}

/// Mode z⋆ of H and the curvature there.
#[derive(Debug, Clone, PartialEq)]
pub struct Mode {
    pub z_star: Vec<f64>,
    pub hess_g: SymMatrix,
    /// Σ⋆ = (−∇²H(z⋆))⁻¹.
    pub sigma_star: SymMatrix,
    pub iterations: usize,
}

/// Resolved proposal: z = center + scale · x.
#[derive(Debug, Clone, PartialEq)]
pub struct ISPlan {
    pub kind: ProposalKind,
    pub center: Vec<f64>,
    pub scale: LowerTriangular,
    pub dof: Option<f64>,
    /// ln det(scale) − ½ ln det Σ₀.
    pub log_norm_const: f64,
    pub mode: Option<Mode>,
    /// L₀⁻¹(center − μ₀)
    shift: Vec<f64>,
    /// L₀⁻¹ · scale
    mix: LowerTriangular,
}

/// Maximizes H from μ₀ and forms Σ⋆.
pub fn find_mode(p: &GaussianProblem) -> Result<Mode> {
    let h = p.log_posterior();
    let r = newton_maximize(&h, &p.mu0, &NewtonOptions::default())?;
    if !r.converged {
        return Err(Error::ModeNotFound {
            iterations: r.iterations,
            grad_norm: r.grad_norm,
        });
    }
    let hess_g = p.integrand.hess_g(&r.x);
    let neg_hess_h = p.precision().sub(&hess_g);
    let sigma_star = spd_inverse(&neg_hess_h)?;
    Ok(Mode {
        z_star: r.x,
        hess_g,
        sigma_star,
        iterations: r.iterations,
    })
}

pub fn resolve_plan(p: &GaussianProblem, kind: ProposalKind) -> Result<ISPlan> {
    resolve_plan_with(p, kind, TScale::Prior)
}

pub fn resolve_plan_with(p: &GaussianProblem, kind: ProposalKind, t_scale: TScale) -> Result<ISPlan> {
    let (center, scale, mode, dof) = match kind {
        ProposalKind::None => (p.mu0.clone(), p.chol0.clone(), None, None),
        ProposalKind::Odis => {
            let m = find_mode(p)?;
            (m.z_star.clone(), p.chol0.clone(), Some(m), None)
        }
        ProposalKind::Lapis => {
            let m = find_mode(p)?;
            let l = cholesky(&m.sigma_star)?;
            (m.z_star.clone(), l, Some(m), None)
        }
        ProposalKind::StudentT { nu } => {
            if !(nu > 0.0) || !nu.is_finite() {
                return Err(Error::Domain {
                    what: "degrees of freedom",
                    value: nu,
                });
            }
            let m = find_mode(p)?;
            let l = match t_scale {
                TScale::Prior => p.chol0.clone(),
                TScale::Laplace => cholesky(&m.sigma_star)?,
            };
            (m.z_star.clone(), l, Some(m), Some(nu))
        }
    };
    let shift = p.whiten(&center);
    let mix = p.chol0.solve_lower(&scale);
    Ok(ISPlan {
        kind,
        log_norm_const: scale.ln_det() - p.chol0.ln_det(),
        center,
        scale,
        dof,
        mode,
        shift,
        mix,
    })
}

impl ISPlan {
    /// z = center + scale · x
    pub fn point(&self, x: &[f64]) -> Vec<f64> {
        let lx = self.scale.matvec(x);
        self.center.iter().zip(lx).map(|(c, v)| c + v).collect()
    }

    /// ln f(x), where f(x) is G times the density ratio of the original
    /// measure to the proposal at z = center + scale·x.
    ///
    /// * none: g(z)
    /// * odis: g(z) − vᵀx − ½vᵀv, v = L₀⁻¹(z⋆ − μ₀)
    /// * lapis: g(z) + c + ½xᵀx − ½‖v + Mx‖², M = L₀⁻¹L⋆
    /// * t: g(z) − d ln√(2π) + c − ½‖v + Mx‖² − Σ_j ln t_ν(x_j)
    pub fn log_integrand(&self, p: &GaussianProblem, x: &[f64]) -> f64 {
        let z = self.point(x);
        let g = p.log_g(&z);
        match self.kind {
            ProposalKind::None => g,
            ProposalKind::Odis => {
                let v = &self.shift;
                g - dot(v, x) - 0.5 * dot(v, v)
            }
            ProposalKind::Lapis => {
                let w = self.whitened(x);
                g + self.log_norm_const + 0.5 * dot(x, x) - 0.5 * dot(&w, &w)
            }
            ProposalKind::StudentT { nu } => {
                let w = self.whitened(x);
                let ln_q: f64 = x.iter().map(|&xj| ln_student_t_pdf(xj, nu)).sum();
                g - x.len() as f64 * LN_SQRT_2PI + self.log_norm_const - 0.5 * dot(&w, &w) - ln_q
            }
        }
    }

    fn whitened(&self, x: &[f64]) -> Vec<f64> {
        let mx = self.mix.matvec(x);
        self.shift.iter().zip(mx).map(|(a, b)| a + b).collect()
    }

    /// f(x) = exp(ln f(x)); fails with [`Error::Overflow`] above e^700.
    pub fn transformed_integrand(&self, p: &GaussianProblem, x: &[f64]) -> Result<f64> {
        let lf = self.log_integrand(p, x);
        if lf > LOG_OVERFLOW || lf.is_nan() {
            return Err(Error::Overflow {
                log_value: lf,
                shift: 0,
                point: 0,
            });
        }
        Ok(lf.exp())
    }
}
