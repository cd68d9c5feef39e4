//! Small fixtures with known integrals under N(0, I).

use std::f64::consts::{PI, SQRT_2, TAU};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::isampling::{GaussianProblem, LogIntegrand};
use crate::numkit::linalg::{dot, SymMatrix};
use crate::numkit::quad::adaptive_quad;

/// G(z) = exp(aᵀz); E[G] = exp(‖a‖²/2).
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMgf {
    pub a: Vec<f64>,
}

impl LogIntegrand for GaussianMgf {
    fn dim(&self) -> usize {
        self.a.len()
    }
    fn log_g(&self, z: &[f64]) -> f64 {
        dot(&self.a, z)
    }
    fn grad_g(&self, _z: &[f64]) -> Vec<f64> {
        self.a.clone()
    }
    fn hess_g(&self, _z: &[f64]) -> SymMatrix {
        SymMatrix::zeros(self.a.len())
    }
}

/// G ≡ 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantOne {
    pub d: usize,
}

impl LogIntegrand for ConstantOne {
    fn dim(&self) -> usize {
        self.d
    }
    fn log_g(&self, _z: &[f64]) -> f64 {
        0.0
    }
    fn grad_g(&self, _z: &[f64]) -> Vec<f64> {
        vec![0.0; self.d]
    }
    fn hess_g(&self, _z: &[f64]) -> SymMatrix {
        SymMatrix::zeros(self.d)
    }
}

/// G(z) = exp(sin(2πz₁) + z₂²/4), d = 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinQuadratic;

impl LogIntegrand for SinQuadratic {
    fn dim(&self) -> usize {
        2
    }
    fn log_g(&self, z: &[f64]) -> f64 {
        (TAU * z[0]).sin() + 0.25 * z[1] * z[1]
    }
    fn grad_g(&self, z: &[f64]) -> Vec<f64> {
        vec![TAU * (TAU * z[0]).cos(), 0.5 * z[1]]
    }
    fn hess_g(&self, z: &[f64]) -> SymMatrix {
        SymMatrix::from_diag(&[-TAU * TAU * (TAU * z[0]).sin(), 0.5])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "fixture", rename_all = "snake_case")]
pub enum Synthetic {
    GaussianMgf { a: Vec<f64> },
    ConstantOne { d: usize },
    SinQuadratic,
}

impl Synthetic {
    pub fn problem(&self) -> Result<GaussianProblem> {
        match self {
            Synthetic::GaussianMgf { a } => {
                if a.is_empty() || a.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidInput("gaussian_mgf needs a finite non-empty a".into()));
                }
                GaussianProblem::standard("gaussian_mgf", Arc::new(GaussianMgf { a: a.clone() }))
            }
            Synthetic::ConstantOne { d } => {
                GaussianProblem::standard("constant_one", Arc::new(ConstantOne { d: *d }))
            }
            Synthetic::SinQuadratic => GaussianProblem::standard("sin_quadratic", Arc::new(SinQuadratic)),
        }
    }

    /// E[G(Z)] under N(0, I).
    pub fn exact_value(&self) -> Result<f64> {
        match self {
            Synthetic::GaussianMgf { a } => Ok((0.5 * dot(a, a)).exp()),
            Synthetic::ConstantOne { .. } => Ok(1.0),
            Synthetic::SinQuadratic => {
                // E[exp(Z²/4)] = √2, the sine factor by quadrature
                let c = 1.0 / (2.0 * PI).sqrt();
                let s = adaptive_quad(
                    |z| ((TAU * z).sin() - 0.5 * z * z).exp() * c,
                    f64::NEG_INFINITY,
                    f64::INFINITY,
                    1e-14,
                )?;
                Ok(SQRT_2 * s)
            }
        }
    }
}
