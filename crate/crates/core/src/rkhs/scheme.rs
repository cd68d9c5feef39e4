use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit::special::{
    ln_normal_sf, ln_student_t_pdf, normal_inv_cdf, normal_sf, student_t_inv_cdf, student_t_sf,
    LN_SQRT_2PI,
};

/// Weight function ψ of the weighted Sobolev space together with the
/// one-dimensional marginal it is paired with.
///
/// * `Gaussian`: ψ(x) = exp(−x²/(2α²)) with a standard normal marginal.
/// * `Rational`: ψ(x) = ((λ−1)/2)(1+|x|)^{−λ} with a Student t_ν marginal.
///
/// Constructing an ill-defined scheme is allowed so that divergence can be
/// demonstrated; every kernel quantity except [`super::c1_constant`] rejects it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightScheme {
    Gaussian { alpha_sq: f64 },
    Rational { lambda: f64, nu: f64 },
}

impl WeightScheme {
    pub fn gaussian(alpha_sq: f64) -> Result<Self> {
        let s = WeightScheme::Gaussian { alpha_sq };
        s.validate()?;
        Ok(s)
    }

    pub fn rational(lambda: f64, nu: f64) -> Result<Self> {
        let s = WeightScheme::Rational { lambda, nu };
        s.validate()?;
        Ok(s)
    }

    /// Checks the condition under which the kernel is finite.
    pub fn validate(&self) -> Result<()> {
        match *self {
            WeightScheme::Gaussian { alpha_sq } => {
                if !(alpha_sq > 2.0) || !alpha_sq.is_finite() {
                    return Err(Error::IllDefinedScheme(format!(
                        "gaussian weight needs alpha^2 > 2, got {alpha_sq}"
                    )));
                }
            }
            WeightScheme::Rational { lambda, nu } => {
                if !(lambda > 1.0) || !lambda.is_finite() {
                    return Err(Error::IllDefinedScheme(format!(
                        "rational weight needs lambda > 1, got {lambda}"
                    )));
                }
                if !(nu > 2.0 * lambda + 1.0) || !nu.is_finite() {
                    return Err(Error::IllDefinedScheme(format!(
                        "rational weight with lambda = {lambda} needs nu > {}, got {nu}",
                        2.0 * lambda + 1.0
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn is_well_defined(&self) -> bool {
        self.validate().is_ok()
    }

    /// ln(1/ψ²(x)).
    pub fn ln_inv_psi_sq(&self, x: f64) -> f64 {
        match *self {
            WeightScheme::Gaussian { alpha_sq } => x * x / alpha_sq,
            WeightScheme::Rational { lambda, .. } => {
                2.0 * lambda * x.abs().ln_1p() - 2.0 * (0.5 * (lambda - 1.0)).ln()
            }
        }
    }

    /// ψ(x).
    pub fn psi(&self, x: f64) -> f64 {
        (-0.5 * self.ln_inv_psi_sq(x)).exp()
    }

    /// Survival function of the marginal, S(x) = 1 − F(x).
    pub fn marginal_sf(&self, x: f64) -> f64 {
        match *self {
            WeightScheme::Gaussian { .. } => normal_sf(x),
            WeightScheme::Rational { nu, .. } => student_t_sf(x, nu),
        }
    }

    pub fn ln_marginal_sf(&self, x: f64) -> f64 {
        match *self {
            WeightScheme::Gaussian { .. } => ln_normal_sf(x),
            WeightScheme::Rational { nu, .. } => student_t_sf(x, nu).ln(),
        }
    }

    pub fn ln_marginal_pdf(&self, x: f64) -> f64 {
        match *self {
            WeightScheme::Gaussian { .. } => -0.5 * x * x - LN_SQRT_2PI,
            WeightScheme::Rational { nu, .. } => ln_student_t_pdf(x, nu),
        }
    }

    /// The point a ≥ 0 with S(a) = p, for p ∈ (0, ½].
    pub fn upper_quantile(&self, p: f64) -> Result<f64> {
        let q = match *self {
            WeightScheme::Gaussian { .. } => normal_inv_cdf(p)?,
            WeightScheme::Rational { nu, .. } => student_t_inv_cdf(p, nu)?,
        };
        Ok((-q).max(0.0))
    }

    pub fn label(&self) -> String {
        match *self {
            WeightScheme::Gaussian { alpha_sq } => format!("gaussian(alpha_sq={alpha_sq})"),
            WeightScheme::Rational { lambda, nu } => format!("rational(lambda={lambda},nu={nu})"),
        }
    }
}
