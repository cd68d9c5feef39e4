//! Decay certificates θ̂(h) ≤ C₂ |h|^{−2r₂} and the Student t sandwich constants.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::WeightScheme;
use crate::error::{Error, Result};
use crate::numkit::special::ln_student_t_norm_const;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateCertificate {
    /// Constant as stated in closed form (Gaussian) or assembled from the
    /// displayed proof steps (rational).
    pub c2: f64,
    /// Constant obtained by carrying every factor of the proof chain through.
    pub c2_chain: f64,
    pub r2: f64,
    pub scheme: WeightScheme,
}

impl RateCertificate {
    pub fn bound(&self, h: i64) -> f64 {
        self.c2 * (h.unsigned_abs() as f64).powf(-2.0 * self.r2)
    }

    pub fn chain_bound(&self, h: i64) -> f64 {
        self.c2_chain * (h.unsigned_abs() as f64).powf(-2.0 * self.r2)
    }
}

/// Gaussian weight: C₂ = √2 π^{2/α²−3/2}/(α²−1), r₂ = 1 − 1/α².
///
/// The chain constant keeps the factor 2^{c−1}α⁴ (c = 2/α²) that the closed
/// form drops between the u^{−1−c} bound and the final display; without it the
/// stated C₂ is exceeded by θ̂(1) once α² ≥ 4.
///
/// Rational weight with t_ν marginal: r₂ = 1 − (2λ+1)/(2ν) and
/// C(λ,ν) = (2/π²) · 2/(νL_ν) · (U_ν/2)^{1+c} · (2π)^c/(c(2−c)), c = (2λ+1)/ν.
/// The chain constant also keeps the (2/(λ−1))² normalization of ψ.
pub fn rate_certificate(scheme: &WeightScheme) -> Result<RateCertificate> {
    scheme.validate()?;
    let cert = match *scheme {
        WeightScheme::Gaussian { alpha_sq } => {
            let c = 2.0 / alpha_sq;
            let c2 = 2f64.sqrt() * PI.powf(c - 1.5) / (alpha_sq - 1.0);
            RateCertificate {
                c2,
                c2_chain: c2 * 2f64.powf(c - 1.0) * alpha_sq * alpha_sq,
                r2: 1.0 - 1.0 / alpha_sq,
                scheme: *scheme,
            }
        }
        WeightScheme::Rational { lambda, nu } => {
            let c = (2.0 * lambda + 1.0) / nu;
            let (l, u) = sandwich_constants(nu)?;
            let c2 = 2.0 / (PI * PI) * 2.0 / (nu * l)
                * (0.5 * u).powf(1.0 + c)
                * (2.0 * PI).powf(c)
                / (c * (2.0 - c));
            RateCertificate {
                c2,
                c2_chain: c2 * (2.0 / (lambda - 1.0)).powi(2),
                r2: 1.0 - c / 2.0,
                scheme: *scheme,
            }
        }
    };
    if !(cert.r2 > 0.5) || !cert.c2.is_finite() {
        return Err(Error::IllDefinedScheme(format!(
            "no decay certificate for {}",
            scheme.label()
        )));
    }
    Ok(cert)
}

/// (L_ν, U_ν) with L_ν ≤ t_ν(x)/ρ(x) ≤ U_ν, ρ(x) = (ν/2)(1+|x|)^{−(ν+1)}.
pub fn sandwich_constants(nu: f64) -> Result<(f64, f64)> {
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(Error::Domain {
            what: "degrees of freedom",
            value: nu,
        });
    }
    let ln_pre = (2.0f64).ln() + ln_student_t_norm_const(nu) - nu.ln();
    let e = 0.5 * (nu + 1.0);
    let l = (ln_pre + e * nu.min(1.0).ln()).exp();
    let u = (ln_pre + e * (1.0 + nu).ln()).exp();
    Ok((l, u))
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 1.0) || !lambda.is_finite() {
        return Err(Error::Domain {
            what: "rational exponent",
            value: lambda,
        });
    }
    Ok(())
}

/// CDF of the density ((λ−1)/2)(1+|x|)^{−λ}.
pub fn rational_cdf(x: f64, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    if x.is_nan() {
        return Err(Error::Domain {
            what: "rational cdf argument",
            value: x,
        });
    }
    Ok(if x < 0.0 {
        0.5 * (1.0 - x).powf(1.0 - lambda)
    } else {
        1.0 - 0.5 * (1.0 + x).powf(1.0 - lambda)
    })
}

pub fn rational_inv_cdf(u: f64, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::Domain {
            what: "probability",
            value: u,
        });
    }
    let k = 1.0 / (1.0 - lambda);
    Ok(if u < 0.5 {
        1.0 - (2.0 * u).powf(k)
    } else {
        (2.0 * (1.0 - u)).powf(k) - 1.0
    })
}
