use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numkit::linalg::{cholesky, LowerTriangular, SymMatrix};
use crate::numkit::newton::TwiceDifferentiable;

/// g = ln G for an integrand G > 0.
///
/// Derivatives default to central differences with step 1e−5·(1+|z_i|); the
/// default Hessian differentiates [`LogIntegrand::grad_g`].
pub trait LogIntegrand: Send + Sync {
    fn dim(&self) -> usize;

    fn log_g(&self, z: &[f64]) -> f64;

    fn grad_g(&self, z: &[f64]) -> Vec<f64> {
        fd_gradient(|p| self.log_g(p), z)
    }

    fn hess_g(&self, z: &[f64]) -> SymMatrix {
        fd_hessian(|p| self.grad_g(p), z)
    }
}

fn fd_step(zi: f64) -> f64 {
    1e-5 * (1.0 + zi.abs())
}

pub fn fd_gradient(f: impl Fn(&[f64]) -> f64, z: &[f64]) -> Vec<f64> {
    let mut p = z.to_vec();
    (0..z.len())
        .map(|i| {
            let h = fd_step(z[i]);
            p[i] = z[i] + h;
            let up = f(&p);
            p[i] = z[i] - h;
            let down = f(&p);
            p[i] = z[i];
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// Central differences of a gradient, symmetrized.
pub fn fd_hessian(grad: impl Fn(&[f64]) -> Vec<f64>, z: &[f64]) -> SymMatrix {
    let d = z.len();
    let mut p = z.to_vec();
    let mut cols = Vec::with_capacity(d);
    for i in 0..d {
        let h = fd_step(z[i]);
        p[i] = z[i] + h;
        let up = grad(&p);
        p[i] = z[i] - h;
        let down = grad(&p);
        p[i] = z[i];
        cols.push(up.iter().zip(&down).map(|(a, b)| (a - b) / (2.0 * h)).collect::<Vec<_>>());
    }
    SymMatrix::from_fn(d, |i, j| 0.5 * (cols[i][j] + cols[j][i]))
}

/// C = ∫ G(z) p(z; μ₀, Σ₀) dz.
#[derive(Clone)]
pub struct GaussianProblem {
    pub name: String,
    pub integrand: Arc<dyn LogIntegrand>,
    pub mu0: Vec<f64>,
    pub sigma0: SymMatrix,
    /// Cholesky factor L₀ of Σ₀.
    pub chol0: LowerTriangular,
}

impl fmt::Debug for GaussianProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GaussianProblem")
            .field("name", &self.name)
            .field("dim", &self.dim())
            .field("mu0", &self.mu0)
            .finish_non_exhaustive()
    }
}

impl GaussianProblem {
    pub fn new(
        name: impl Into<String>,
        integrand: Arc<dyn LogIntegrand>,
        mu0: Vec<f64>,
        sigma0: SymMatrix,
    ) -> Result<Self> {
        let d = integrand.dim();
        if d == 0 || mu0.len() != d || sigma0.dim() != d {
            return Err(Error::InvalidInput(format!(
                "integrand has dimension {d}, mean {}, covariance {}",
                mu0.len(),
                sigma0.dim()
            )));
        }
        let chol0 = cholesky(&sigma0)?;
        Ok(Self {
            name: name.into(),
            integrand,
            mu0,
            sigma0,
            chol0,
        })
    }

    /// Problem under the standard normal measure N(0, I).
    pub fn standard(name: impl Into<String>, integrand: Arc<dyn LogIntegrand>) -> Result<Self> {
        let d = integrand.dim();
        Self::new(name, integrand, vec![0.0; d], SymMatrix::identity(d))
    }

    pub fn dim(&self) -> usize {
        self.mu0.len()
    }

    pub fn log_g(&self, z: &[f64]) -> f64 {
        self.integrand.log_g(z)
    }

    /// L₀⁻¹(z − μ₀)
    pub fn whiten(&self, z: &[f64]) -> Vec<f64> {
        let c: Vec<f64> = z.iter().zip(&self.mu0).map(|(a, b)| a - b).collect();
        self.chol0.solve(&c)
    }

    /// Σ₀⁻¹(z − μ₀)
    pub fn precision_times(&self, z: &[f64]) -> Vec<f64> {
        self.chol0.solve_transpose(&self.whiten(z))
    }

    /// Σ₀⁻¹ as a dense matrix.
    pub fn precision(&self) -> SymMatrix {
        let d = self.dim();
        let cols: Vec<Vec<f64>> = (0..d)
            .map(|k| {
                let e: Vec<f64> = (0..d).map(|i| if i == k { 1.0 } else { 0.0 }).collect();
                self.chol0.solve_transpose(&self.chol0.solve(&e))
            })
            .collect();
        SymMatrix::from_fn(d, |i, j| 0.5 * (cols[i][j] + cols[j][i]))
    }

    /// H(z) = g(z) − ½(z − μ₀)ᵀΣ₀⁻¹(z − μ₀), the log of the unnormalized
    /// integrand-times-density whose mode centres ODIS and LapIS.
    pub fn log_posterior(&self) -> LogPosterior<'_> {
        LogPosterior {
            problem: self,
            precision: self.precision(),
        }
    }
}

pub struct LogPosterior<'a> {
    problem: &'a GaussianProblem,
    precision: SymMatrix,
}

impl TwiceDifferentiable for LogPosterior<'_> {
    fn dim(&self) -> usize {
        self.problem.dim()
    }

    fn value(&self, z: &[f64]) -> f64 {
        let w = self.problem.whiten(z);
        self.problem.log_g(z) - 0.5 * w.iter().map(|x| x * x).sum::<f64>()
    }

    fn gradient(&self, z: &[f64]) -> Vec<f64> {
        let g = self.problem.integrand.grad_g(z);
        let p = self.problem.precision_times(z);
        g.iter().zip(p).map(|(a, b)| a - b).collect()
    }

    fn hessian(&self, z: &[f64]) -> SymMatrix {
        self.problem.integrand.hess_g(z).sub(&self.precision)
    }
}
