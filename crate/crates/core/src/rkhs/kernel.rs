//! The one-dimensional shift-invariant kernel θ, its Fourier coefficients and
//! the constant C₁ = θ(0).
//!
//! With S the marginal survival function and both ψ and the marginal
//! symmetric, for x ≤ ½
//!
//! ```text
//! θ(x) = 2 ∫_0^{a} (S(t) − x) / ψ²(t) dt,   S(a) = x,
//! ```
//!
//! and θ(1 − x) = θ(x). Substituting t = S(x) in the single-integral form of
//! θ̂(h) gives
//!
//! ```text
//! θ̂(h) = 2/(π²h²) ∫_0^∞ sin²(πh S(x)) / ψ²(x) dx,   θ̄ = θ̂(0) = 2 ∫_0^∞ S²/ψ².
//! ```

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::WeightScheme;
use crate::error::{Error, Result};
use crate::numkit::quad::{integrate, QuadOptions};

const KERNEL_TOL: f64 = 1e-13;

fn opts() -> QuadOptions {
    QuadOptions {
        abs_tol: KERNEL_TOL,
        rel_tol: 1e-13,
        max_subdivisions: 4000,
    }
}

/// S(t)/ψ²(t), evaluated in log space so neither factor overflows.
fn c1_integrand(scheme: &WeightScheme, t: f64) -> f64 {
    (scheme.ln_marginal_sf(t) + scheme.ln_inv_psi_sq(t)).exp()
}

/// θ(x) for x ∈ [0, 1).
pub fn theta(x: f64, scheme: &WeightScheme) -> Result<f64> {
    scheme.validate()?;
    if !(0.0..1.0).contains(&x) {
        return Err(Error::Domain {
            what: "kernel argument",
            value: x,
        });
    }
    let x = x.min(1.0 - x);
    if x == 0.0 {
        return c1_integral(scheme, f64::INFINITY);
    }
    let a = scheme.upper_quantile(x)?;
    let r = integrate(
        |t| (scheme.marginal_sf(t) - x) * scheme.ln_inv_psi_sq(t).exp(),
        0.0,
        a,
        &opts(),
    )?;
    Ok(2.0 * r.value)
}

fn c1_integral(scheme: &WeightScheme, upper: f64) -> Result<f64> {
    let r = integrate(|t| c1_integrand(scheme, t), 0.0, upper, &opts())?;
    Ok(2.0 * r.value)
}

/// C₁ = ∫_{−∞}^0 F/ψ² + ∫_0^∞ (1 − F)/ψ² = 2 ∫_0^∞ S/ψ².
///
/// The integral is first evaluated on [0, T] for T = 10, 20, 40; growth of
/// more than 10% per doubling (or a non-finite partial value) is reported as
/// [`Error::Diverged`] with the partial estimates attached.
pub fn c1_constant(scheme: &WeightScheme) -> Result<f64> {
    let mut estimates = Vec::with_capacity(3);
    let mut diverged = false;
    for t in [10.0, 20.0, 40.0] {
        match c1_integral(scheme, t) {
            Ok(v) if v.is_finite() => estimates.push(v),
            Ok(v) | Err(Error::ToleranceNotMet { estimate: v, .. }) => {
                estimates.push(v);
                diverged = true;
                break;
            }
            Err(e) => return Err(e),
        }
    }
    diverged |= estimates.windows(2).any(|w| w[1] > 1.1 * w[0]);
    if diverged || !scheme.is_well_defined() {
        return Err(Error::Diverged { estimates });
    }
    c1_integral(scheme, f64::INFINITY)
}

/// θ̄ = ∫_0^1 θ(x) dx.
pub fn theta_bar(scheme: &WeightScheme) -> Result<f64> {
    scheme.validate()?;
    let r = integrate(
        |t| (2.0 * scheme.ln_marginal_sf(t) + scheme.ln_inv_psi_sq(t)).exp(),
        0.0,
        f64::INFINITY,
        &opts(),
    )?;
    Ok(2.0 * r.value)
}

/// θ̂(h); `h = 0` gives θ̄.
pub fn theta_hat(h: i64, scheme: &WeightScheme) -> Result<f64> {
    if h == 0 {
        return theta_bar(scheme);
    }
    scheme.validate()?;
    let hf = h.unsigned_abs() as f64;
    let ln_pih = (PI * hf).ln();
    let f = |x: f64| {
        let ln_s = scheme.ln_marginal_sf(x);
        let ln_sin_sq = if ln_s < -30.0 {
            2.0 * (ln_pih + ln_s)
        } else {
            let s = (PI * hf * ln_s.exp()).sin();
            if s == 0.0 {
                return 0.0;
            }
            2.0 * s.abs().ln()
        };
        (ln_sin_sq + scheme.ln_inv_psi_sq(x)).exp()
    };
    let r = integrate(
        f,
        0.0,
        f64::INFINITY,
        &QuadOptions {
            abs_tol: 1e-15,
            rel_tol: 1e-11,
            max_subdivisions: 20_000,
        },
    )?;
    Ok(2.0 * r.value / (PI * PI * hf * hf))
}

/// θ on the grid {k/N : k = 0..N}, shared by every CBC candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaGrid {
    pub scheme: WeightScheme,
    pub n: usize,
    /// θ(k/N) for k = 0..N−1.
    pub values: Vec<f64>,
    pub theta_bar: f64,
}

impl ThetaGrid {
    /// Builds the grid from cumulative integrals
    /// P(a) = ∫_0^a S/ψ² and Q(a) = ∫_0^a 1/ψ², so θ(x) = 2(P(a) − xQ(a)).
    pub fn new(scheme: &WeightScheme, n: usize) -> Result<Self> {
        scheme.validate()?;
        if n < 2 {
            return Err(Error::InvalidInput(format!("theta grid needs N >= 2, got {n}")));
        }
        let half = n / 2;
        // a_k for k = 1..=half, decreasing in k; a_half = 0 when N is even
        let nodes: Vec<f64> = (1..=half)
            .map(|k| scheme.upper_quantile(k as f64 / n as f64))
            .collect::<Result<_>>()?;
        // panels [a_{k+1}, a_k] for k = 1..half-1, then [0, a_half]
        let panels: Vec<(f64, f64)> = (0..half)
            .map(|i| {
                let hi = nodes[i];
                let lo = if i + 1 < half { nodes[i + 1] } else { 0.0 };
                (lo, hi)
            })
            .collect();
        let pieces: Vec<(f64, f64)> = panels
            .par_iter()
            .map(|&(lo, hi)| -> Result<(f64, f64)> {
                let p = integrate(|t| c1_integrand(scheme, t), lo, hi, &opts())?.value;
                let q = integrate(|t| scheme.ln_inv_psi_sq(t).exp(), lo, hi, &opts())?.value;
                Ok((p, q))
            })
            .collect::<Result<_>>()?;
        let mut values = vec![0.0; n];
        values[0] = c1_integral(scheme, f64::INFINITY)?;
        // accumulate from a = 0 upwards, i.e. from k = half down to 1
        let (mut p, mut q) = (0.0, 0.0);
        for k in (1..=half).rev() {
            let (dp, dq) = pieces[k - 1];
            p += dp;
            q += dq;
            let x = k as f64 / n as f64;
            let v = if 2 * k == n { 0.0 } else { 2.0 * (p - x * q) };
            values[k] = v;
            values[n - k] = v;
        }
        Ok(Self {
            scheme: *scheme,
            n,
            values,
            theta_bar: theta_bar(scheme)?,
        })
    }

    /// θ({k/N}).
    #[inline]
    pub fn at(&self, k: u64) -> f64 {
        self.values[(k % self.n as u64) as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::special::{normal_inv_cdf, normal_sf};

    fn g4() -> WeightScheme {
        WeightScheme::gaussian(4.0).unwrap()
    }

    // trapezoid rule on the raw two-integral form of θ with 10^6 panels per integral
    fn theta_trapezoid(x: f64, alpha_sq: f64) -> f64 {
        let trap = |f: &dyn Fn(f64) -> f64, a: f64, b: f64| {
            let n = 1_000_000;
            let h = (b - a) / n as f64;
            let mut s = 0.5 * (f(a) + f(b));
            for i in 1..n {
                s += f(a + i as f64 * h);
            }
            s * h
        };
        let w = |t: f64| (t * t / alpha_sq).exp();
        let lo = normal_inv_cdf(x).unwrap();
        let hi = normal_inv_cdf(1.0 - x).unwrap();
        let first = trap(&|t| (1.0 - normal_sf(t) - x) * w(t), lo, 0.0);
        let second = trap(&|t| (1.0 - normal_sf(t) - 1.0 + x) * w(t), hi, 0.0);
        first + second
    }

    #[test]
    fn theta_matches_trapezoid_oracle() {
        for x in [0.25, 0.5, 0.1] {
            let v = theta(x, &g4()).unwrap();
            let o = theta_trapezoid(x, 4.0);
            assert!((v - o).abs() < 1e-7, "x={x}: {v} vs {o}");
        }
        assert_eq!(theta(0.5, &g4()).unwrap(), 0.0);
    }

    #[test]
    fn theta_is_symmetric() {
        for x in [0.1, 0.25, 0.4] {
            let a = theta(x, &g4()).unwrap();
            let b = theta(1.0 - x, &g4()).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn c1_equals_theta_at_zero() {
        let c1 = c1_constant(&g4()).unwrap();
        assert!((theta(0.0, &g4()).unwrap() - c1).abs() < 1e-8);
    }

    #[test]
    fn c1_matches_fixed_grid_oracle() {
        // 10^7-point midpoint rule on [0, 40] of 2(1 − Φ(t))e^{t²/4}
        let n = 10_000_000;
        let h = 40.0 / n as f64;
        let mut s = 0.0;
        for i in 0..n {
            let t = (i as f64 + 0.5) * h;
            s += normal_sf(t) * (t * t / 4.0).exp();
        }
        let oracle = 2.0 * s * h;
        let c1 = c1_constant(&g4()).unwrap();
        assert!((c1 - oracle).abs() < 1e-7, "{c1} vs {oracle}");
        assert!((c1 - 0.994_523_594_021_096).abs() < 1e-10);
    }

    #[test]
    fn c1_divergence_tracks_alpha() {
        for a2 in [1.5, 2.0] {
            let s = WeightScheme::Gaussian { alpha_sq: a2 };
            assert!(matches!(c1_constant(&s), Err(Error::Diverged { .. })), "{a2}");
        }
        for a2 in [2.5, 4.0, 9.0] {
            let s = WeightScheme::Gaussian { alpha_sq: a2 };
            assert!(c1_constant(&s).unwrap().is_finite());
        }
        let bad = WeightScheme::Rational { lambda: 2.0, nu: 4.0 };
        assert!(matches!(c1_constant(&bad), Err(Error::Diverged { .. })));
        let good = WeightScheme::Rational { lambda: 2.0, nu: 20.0 };
        assert!(c1_constant(&good).unwrap().is_finite());
    }

    #[test]
    fn theta_hat_is_even_and_nonnegative() {
        for h in [1, 2, 7] {
            let a = theta_hat(h, &g4()).unwrap();
            let b = theta_hat(-h, &g4()).unwrap();
            assert!(a > 0.0);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn theta_hat_matches_fourier_coefficient_of_theta() {
        // midpoint rule for ∫_0^1 θ(x)cos(2πhx)dx on a dense θ grid
        let m = 4000;
        let grid: Vec<(f64, f64)> = (0..m)
            .map(|i| {
                let x = (i as f64 + 0.5) / m as f64;
                (x, theta(x, &g4()).unwrap())
            })
            .collect();
        for h in [1i64, 2] {
            let direct: f64 = grid
                .iter()
                .map(|&(x, t)| t * (2.0 * PI * h as f64 * x).cos())
                .sum::<f64>()
                / m as f64;
            let closed = theta_hat(h, &g4()).unwrap();
            assert!((direct - closed).abs() < 1e-6, "h={h}: {direct} vs {closed}");
        }
        let mean = grid.iter().map(|p| p.1).sum::<f64>() / m as f64;
        assert!((mean - theta_bar(&g4()).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn fourier_partial_sums_approach_c1() {
        let c1 = c1_constant(&g4()).unwrap();
        let mut sum = theta_bar(&g4()).unwrap();
        let mut gaps = Vec::new();
        for h in 1..=512i64 {
            sum += 2.0 * theta_hat(h, &g4()).unwrap();
            if h == 128 || h == 256 || h == 512 {
                gaps.push(c1 - sum);
            }
        }
        assert!(gaps.iter().all(|&g| g > 0.0));
        // a tail Σ_{h>H} K h^{-3/2} shrinks by √2 per doubling of H; the
        // observed ratio is still pre-asymptotic at these H
        assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2]);
        let ratio = gaps[1] / gaps[2];
        assert!(ratio > 1.3 && ratio < 1.7, "{ratio}");
        // at H = 512 the partial sum is 1.07% short of C₁
        assert!(gaps[2] / c1 < 0.011, "{}", gaps[2] / c1);
    }

    #[test]
    fn grid_matches_pointwise_theta() {
        for scheme in [g4(), WeightScheme::rational(2.0, 20.0).unwrap()] {
            let grid = ThetaGrid::new(&scheme, 64).unwrap();
            for k in [0u64, 1, 5, 17, 31, 32, 33, 63] {
                let direct = theta(k as f64 / 64.0, &scheme).unwrap();
                assert!((grid.at(k) - direct).abs() < 1e-11, "k={k}");
            }
            assert_eq!(grid.at(64), grid.at(0));
            for k in 1..64 {
                assert_eq!(grid.values[k], grid.values[64 - k]);
            }
        }
    }

    #[test]
    fn ill_defined_schemes_are_rejected() {
        let s = WeightScheme::Gaussian { alpha_sq: 1.5 };
        assert!(matches!(theta(0.3, &s), Err(Error::IllDefinedScheme(_))));
        assert!(matches!(theta_hat(1, &s), Err(Error::IllDefinedScheme(_))));
        assert!(ThetaGrid::new(&s, 8).is_err());
    }
}
