//! Zero-coupon bond price under the Randleman–Bartter short-rate model with
//! the standard (cumulative-sum) Brownian construction.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::isampling::{find_mode, GaussianProblem, LogIntegrand};
use crate::numkit::linalg::{sym_eigenvalues, LowerTriangular, SymMatrix};

/// r_k = r₀ exp(−kσ²/2 + σB_k), B = Az with A the all-ones lower triangle,
/// G(z) = ∏_{k=0}^{d} 1/(1 + r_k).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RbInstance {
    pub d: usize,
    pub r0: f64,
    pub sigma: f64,
}

impl RbInstance {
    pub fn new(d: usize, r0: f64, sigma: f64) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidInput("need at least one random year".into()));
        }
        if !(r0 > 0.0) || !r0.is_finite() || !(sigma >= 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidInput(format!(
                "need r0 > 0 and sigma >= 0, got r0 = {r0}, sigma = {sigma}"
            )));
        }
        Ok(Self { d, r0, sigma })
    }

    /// Reference parameters r₀ = 0.1, σ = 0.01.
    pub fn baseline(d: usize) -> Self {
        Self {
            d,
            r0: 0.1,
            sigma: 0.01,
        }
    }

    /// r_1..r_d
    pub fn rates(&self, z: &[f64]) -> Vec<f64> {
        let s2 = self.sigma * self.sigma;
        let mut b = 0.0;
        z.iter()
            .enumerate()
            .map(|(i, &zi)| {
                b += zi;
                let k = (i + 1) as f64;
                self.r0 * (-0.5 * k * s2 + self.sigma * b).exp()
            })
            .collect()
    }

    /// R_k = σ² r_k/(1+r_k)², k = 1..d.
    pub fn curvatures(&self, z: &[f64]) -> Vec<f64> {
        let s2 = self.sigma * self.sigma;
        self.rates(z)
            .into_iter()
            .map(|r| s2 * r / ((1.0 + r) * (1.0 + r)))
            .collect()
    }

    /// Upper-triangular H with H_ij = √R_j (j ≥ i), so H Hᵀ = −∇²g. Row-major.
    pub fn h_factor(&self, z: &[f64]) -> Vec<Vec<f64>> {
        let r = self.curvatures(z);
        (0..self.d)
            .map(|i| (0..self.d).map(|j| if j >= i { r[j].sqrt() } else { 0.0 }).collect())
            .collect()
    }

    pub fn problem(&self) -> Result<GaussianProblem> {
        GaussianProblem::standard(format!("randleman_bartter_d{}", self.d), Arc::new(*self))
    }
}

/// The standard construction matrix A (all ones on and below the diagonal).
pub fn standard_construction(d: usize) -> LowerTriangular {
    LowerTriangular::from_fn(d, |_, _| 1.0)
}

impl LogIntegrand for RbInstance {
    fn dim(&self) -> usize {
        self.d
    }

    /// −Σ_{k=0}^{d} ln(1 + r_k)
    fn log_g(&self, z: &[f64]) -> f64 {
        -self.r0.ln_1p() - self.rates(z).iter().map(|r| r.ln_1p()).sum::<f64>()
    }

    /// ∂g/∂z_i = −Σ_{k≥i} σ r_k/(1+r_k)
    fn grad_g(&self, z: &[f64]) -> Vec<f64> {
        let rates = self.rates(z);
        let mut out = vec![0.0; self.d];
        let mut tail = 0.0;
        for i in (0..self.d).rev() {
            tail += self.sigma * rates[i] / (1.0 + rates[i]);
            out[i] = -tail;
        }
        out
    }

    /// ∂²g/∂z_i∂z_j = −Σ_{k≥max(i,j)} R_k
    fn hess_g(&self, z: &[f64]) -> SymMatrix {
        let r = self.curvatures(z);
        let mut tail = vec![0.0; self.d];
        let mut acc = 0.0;
        for k in (0..self.d).rev() {
            acc += r[k];
            tail[k] = acc;
        }
        SymMatrix::from_fn(self.d, |i, j| -tail[i.max(j)])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RbAlphaBound {
    pub r_star: f64,
    /// σ²/(2 + r⋆ + 1/r⋆), a lower bound on every R_k(z⋆).
    pub kappa: f64,
    /// (1/κ)√(6/(d³+2d²+2d+1))
    pub alpha_sq_max: f64,
    /// d(d³+2d²+2d+1)κ²/6
    pub s_d: f64,
    /// ‖−∇²g(z⋆)‖_F²
    pub frobenius_sq: f64,
    pub s_d_holds: bool,
    /// Exact max eigenvalue of Σ⋆, against the bound 1 used in the argument.
    pub lambda_max: f64,
    pub lambda_max_bound: f64,
}

pub fn rb_alpha_bound(inst: &RbInstance) -> Result<RbAlphaBound> {
    let mode = find_mode(&inst.problem()?)?;
    let r_star = inst
        .rates(&mode.z_star)
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let kappa = inst.sigma * inst.sigma / (2.0 + r_star + 1.0 / r_star);
    let d = inst.d as f64;
    let poly = d * d * d + 2.0 * d * d + 2.0 * d + 1.0;
    let s_d = d * poly * kappa * kappa / 6.0;
    let frobenius_sq = mode.hess_g.frobenius_sq();
    Ok(RbAlphaBound {
        r_star,
        kappa,
        alpha_sq_max: (6.0 / poly).sqrt() / kappa,
        s_d,
        frobenius_sq,
        s_d_holds: s_d <= frobenius_sq,
        lambda_max: *sym_eigenvalues(&mode.sigma_star).last().expect("d >= 1"),
        lambda_max_bound: 1.0,
    })
}

/// (1 + r₀)^{−(d+1)}: the price when σ = 0.
pub fn rb_price_closed_form_sigma0(inst: &RbInstance) -> Result<f64> {
    if inst.sigma != 0.0 {
        return Err(Error::InvalidInput(format!(
            "closed form needs sigma = 0, got {}",
            inst.sigma
        )));
    }
    Ok((1.0 + inst.r0).powi(-(inst.d as i32 + 1)))
}
