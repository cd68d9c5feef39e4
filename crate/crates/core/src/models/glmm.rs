//! Poisson GLMM with AR(1) random effects: the inner integral over ω.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::isampling::{find_mode, GaussianProblem, LogIntegrand};
use crate::numkit::linalg::{sym_eigenvalues, SymMatrix};
use crate::numkit::special::ln_gamma;
use crate::rkhs::WeightScheme;

/// y_j | ω ~ Poisson(exp(ω_j + β)), ω ~ N(0, Σ), Σ_ij = σ²κ^{|i−j|}/(1−κ²).
#[derive(Debug, Clone, PartialEq)]
pub struct GlmmInstance {
    pub y: Vec<u64>,
    pub beta: f64,
    pub kappa: f64,
    pub sigma: f64,
    ln_y_fact: Vec<f64>,
}

impl GlmmInstance {
    pub fn new(y: Vec<u64>, beta: f64, kappa: f64, sigma: f64) -> Result<Self> {
        if y.is_empty() {
            return Err(Error::InvalidInput("GLMM needs at least one observation".into()));
        }
        if !(0.0..1.0).contains(&kappa) {
            return Err(Error::InvalidInput(format!("kappa must lie in [0, 1), got {kappa}")));
        }
        if !(sigma > 0.0) || !sigma.is_finite() || !beta.is_finite() {
            return Err(Error::InvalidInput(format!(
                "need finite beta and sigma > 0, got beta = {beta}, sigma = {sigma}"
            )));
        }
        let ln_y_fact = y.iter().map(|&v| ln_gamma(v as f64 + 1.0)).collect();
        Ok(Self {
            y,
            beta,
            kappa,
            sigma,
            ln_y_fact,
        })
    }

    pub fn covariance(&self) -> SymMatrix {
        let c = self.sigma * self.sigma / (1.0 - self.kappa * self.kappa);
        SymMatrix::from_fn(self.y.len(), |i, j| c * self.kappa.powi(i.abs_diff(j) as i32))
    }

    pub fn problem(&self) -> Result<GaussianProblem> {
        let d = self.y.len();
        GaussianProblem::new("glmm", Arc::new(self.clone()), vec![0.0; d], self.covariance())
    }
}

impl LogIntegrand for GlmmInstance {
    fn dim(&self) -> usize {
        self.y.len()
    }

    /// Σ_j [y_j(ω_j+β) − e^{ω_j+β} − ln y_j!]
    fn log_g(&self, w: &[f64]) -> f64 {
        w.iter()
            .zip(&self.y)
            .zip(&self.ln_y_fact)
            .map(|((&wj, &yj), &lf)| {
                let eta = wj + self.beta;
                yj as f64 * eta - eta.exp() - lf
            })
            .sum()
    }

    fn grad_g(&self, w: &[f64]) -> Vec<f64> {
        w.iter()
            .zip(&self.y)
            .map(|(&wj, &yj)| yj as f64 - (wj + self.beta).exp())
            .collect()
    }

    fn hess_g(&self, w: &[f64]) -> SymMatrix {
        let diag: Vec<f64> = w.iter().map(|&wj| -(wj + self.beta).exp()).collect();
        SymMatrix::from_diag(&diag)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlmmConditionReport {
    pub omega_star: Vec<f64>,
    pub lambda_max: f64,
    pub max_omega: f64,
    pub alpha_sq: f64,
    /// max λ(Σ⋆) < e^{−β}/(α² e^{max ω⋆})
    pub sufficient: bool,
    pub sufficient_rhs: f64,
    pub sufficient_margin: f64,
    /// 2 e^β max λ(Σ⋆) e^{max ω⋆} < 1
    pub necessary: bool,
    pub necessary_lhs: f64,
    pub necessary_margin: f64,
}

/// Closed-form sufficient and necessary conditions at the mode ω⋆.
pub fn glmm_condition(inst: &GlmmInstance, scheme: &WeightScheme) -> Result<GlmmConditionReport> {
    let WeightScheme::Gaussian { alpha_sq } = *scheme else {
        return Err(Error::IllDefinedScheme(
            "the GLMM condition is stated for the gaussian weight".into(),
        ));
    };
    let mode = find_mode(&inst.problem()?)?;
    let lambda_max = *sym_eigenvalues(&mode.sigma_star).last().expect("d >= 1");
    let max_omega = mode.z_star.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sufficient_rhs = (-inst.beta - max_omega).exp() / alpha_sq;
    let necessary_lhs = 2.0 * (inst.beta + max_omega).exp() * lambda_max;
    Ok(GlmmConditionReport {
        omega_star: mode.z_star,
        lambda_max,
        max_omega,
        alpha_sq,
        sufficient: lambda_max < sufficient_rhs,
        sufficient_rhs,
        sufficient_margin: sufficient_rhs - lambda_max,
        necessary: necessary_lhs < 1.0,
        necessary_lhs,
        necessary_margin: 1.0 - necessary_lhs,
    })
}
