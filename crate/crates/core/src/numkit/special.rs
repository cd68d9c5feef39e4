//! Univariate distribution functions for the standard normal and Student t laws.
//!
//! `erfc` and `lgamma` come from `libm` (musl ports, about 1 ulp); the
//! regularized incomplete beta and its inverse come from `statrs`;
//! everything built on top of them (tails in log space, the normal quantile
//! with Halley polishing, the t quantile) lives here.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use statrs::function::beta;

use crate::error::{Error, Result};

/// 1/√(2π)
pub const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
/// ln √(2π)
pub const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// ln Γ(x) for x > 0.
#[inline]
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

#[inline]
pub fn normal_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

#[inline]
pub fn ln_normal_pdf(x: f64) -> f64 {
    -0.5 * x * x - LN_SQRT_2PI
}

/// Φ(x).
#[inline]
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// 1 − Φ(x), accurate in the upper tail.
#[inline]
pub fn normal_sf(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

/// ln(1 − Φ(x)) without underflow for large `x`.
pub fn ln_normal_sf(x: f64) -> f64 {
    if x < -5.0 {
        (-normal_cdf(x)).ln_1p()
    } else if x < 30.0 {
        normal_sf(x).ln()
    } else {
        // Asymptotic Mills-ratio series; five terms are exact to rounding for x >= 30.
        let z = 1.0 / (x * x);
        let series = 1.0 - z * (1.0 - 3.0 * z * (1.0 - 5.0 * z * (1.0 - 7.0 * z)));
        ln_normal_pdf(x) - x.ln() + series.ln()
    }
}

/// Φ⁻¹(u) on the open unit interval.
///
/// Wichura's AS241 rational approximation followed by one Halley step
/// against [`normal_cdf`] (or [`normal_sf`] in the upper half so the
/// residual is computed without cancellation).
pub fn normal_inv_cdf(u: f64) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::Domain {
            what: "probability",
            value: u,
        });
    }
    if u == 0.5 {
        return Ok(0.0);
    }
    let x = as241(u);
    if !x.is_finite() {
        return Ok(x);
    }
    let pdf = normal_pdf(x);
    if pdf == 0.0 {
        return Ok(x);
    }
    // residual e = Φ(x) − u, evaluated on the side with the small tail
    let e = if u < 0.5 {
        normal_cdf(x) - u
    } else {
        (1.0 - u) - normal_sf(x)
    };
    let step = e / pdf;
    Ok(x - step / (1.0 + 0.5 * x * step))
}

#[allow(clippy::excessive_precision)]
fn as241(u: f64) -> f64 {
    const A: [f64; 8] = [
        3.387_132_872_796_366_608_0E0,
        1.331_416_678_917_843_774_5E2,
        1.971_590_950_306_551_442_7E3,
        1.373_169_376_550_946_112_5E4,
        4.592_195_393_154_987_145_7E4,
        6.726_577_092_700_870_085_3E4,
        3.343_057_558_358_812_810_5E4,
        2.509_080_928_730_122_672_7E3,
    ];
    const B: [f64; 8] = [
        1.0,
        4.231_333_070_160_091_125_2E1,
        6.871_870_074_920_579_083_0E2,
        5.394_196_021_424_751_107_7E3,
        2.121_379_430_158_659_586_7E4,
        3.930_789_580_009_271_061_0E4,
        2.872_908_573_572_194_267_4E4,
        5.226_495_278_852_854_561_0E3,
    ];
    const C: [f64; 8] = [
        1.423_437_110_749_683_577_34E0,
        4.630_337_846_156_545_295_90E0,
        5.769_497_221_460_691_405_50E0,
        3.647_848_324_763_204_605_04E0,
        1.270_458_252_452_368_382_58E0,
        2.417_807_251_774_506_117_70E-1,
        2.272_384_498_926_918_458_33E-2,
        7.745_450_142_783_414_076_40E-4,
    ];
    const D: [f64; 8] = [
        1.0,
        2.053_191_626_637_758_821_87E0,
        1.676_384_830_183_803_849_40E0,
        6.897_673_349_851_000_045_50E-1,
        1.481_039_764_274_800_745_90E-1,
        1.519_866_656_361_645_719_66E-2,
        5.475_938_084_995_344_946_00E-4,
        1.050_750_071_644_416_843_24E-9,
    ];
    const E: [f64; 8] = [
        6.657_904_643_501_103_777_20E0,
        5.463_784_911_164_114_369_90E0,
        1.784_826_539_917_291_335_80E0,
        2.965_605_718_285_048_912_30E-1,
        2.653_218_952_657_612_309_30E-2,
        1.242_660_947_388_078_438_60E-3,
        2.711_555_568_743_487_578_15E-5,
        2.010_334_399_292_288_132_65E-7,
    ];
    const F: [f64; 8] = [
        1.0,
        5.998_322_065_558_879_376_90E-1,
        1.369_298_809_227_358_053_10E-1,
        1.487_536_129_085_061_485_25E-2,
        7.868_691_311_456_132_591_00E-4,
        1.846_318_317_510_054_681_80E-5,
        1.421_511_758_316_445_888_70E-7,
        2.044_263_103_389_939_785_64E-15,
    ];

    fn poly(c: &[f64; 8], r: f64) -> f64 {
        c.iter().rev().fold(0.0, |acc, &k| acc * r + k)
    }

    let q = u - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180_625 - q * q;
        return q * poly(&A, r) / poly(&B, r);
    }
    let tail = if q < 0.0 { u } else { 1.0 - u };
    let mut r = (-tail.ln()).sqrt();
    let x = if r <= 5.0 {
        r -= 1.6;
        poly(&C, r) / poly(&D, r)
    } else {
        r -= 5.0;
        poly(&E, r) / poly(&F, r)
    };
    if q < 0.0 {
        -x
    } else {
        x
    }
}

/// ln of the Student t normalizing constant c_ν = Γ((ν+1)/2) / (√(νπ) Γ(ν/2)).
pub fn ln_student_t_norm_const(nu: f64) -> f64 {
    ln_gamma(0.5 * (nu + 1.0)) - ln_gamma(0.5 * nu) - 0.5 * (nu * PI).ln()
}

#[inline]
pub fn ln_student_t_pdf(x: f64, nu: f64) -> f64 {
    ln_student_t_norm_const(nu) - 0.5 * (nu + 1.0) * (x * x / nu).ln_1p()
}

#[inline]
pub fn student_t_pdf(x: f64, nu: f64) -> f64 {
    ln_student_t_pdf(x, nu).exp()
}

/// Upper tail P(T > x) of the t law with `nu` degrees of freedom.
pub fn student_t_sf(x: f64, nu: f64) -> f64 {
    if x == 0.0 {
        return 0.5;
    }
    let upper = |x: f64| 0.5 * beta::beta_reg(0.5 * nu, 0.5, nu / (nu + x * x));
    if x > 0.0 {
        upper(x)
    } else {
        1.0 - upper(-x)
    }
}

#[inline]
pub fn student_t_cdf(x: f64, nu: f64) -> f64 {
    student_t_sf(-x, nu)
}

/// Quantile of the t law with `nu` degrees of freedom.
pub fn student_t_inv_cdf(u: f64, nu: f64) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::Domain {
            what: "probability",
            value: u,
        });
    }
    if !(nu > 0.0) {
        return Err(Error::Domain {
            what: "degrees of freedom",
            value: nu,
        });
    }
    if u == 0.5 {
        return Ok(0.0);
    }
    // work with the upper tail probability p = P(T > x), x >= 0
    let (p, sign) = if u < 0.5 { (u, -1.0) } else { (1.0 - u, 1.0) };
    let x = if nu == 1.0 {
        1.0 / (PI * p).tan()
    } else if nu == 2.0 {
        let a = 4.0 * p * (1.0 - p);
        (2.0 / a - 2.0).sqrt()
    } else {
        upper_tail_quantile(p, nu)
    };
    Ok(sign * x)
}

fn upper_tail_quantile(p: f64, nu: f64) -> f64 {
    // sf(x) = ½ I_y(ν/2, ½) with y = ν/(ν+x²)
    let y = beta::inv_beta_reg(0.5 * nu, 0.5, 2.0 * p);
    let mut x = if y > 0.0 {
        (nu * (1.0 / y - 1.0)).max(0.0).sqrt()
    } else {
        // deep tail: sf(x) ≈ c_ν ν^{(ν-1)/2} x^{-ν} / ν
        let ln_c = ln_student_t_norm_const(nu);
        ((ln_c + 0.5 * (nu - 1.0) * nu.ln() - p.ln() - nu.ln()) / nu).exp()
    };
    // Newton polish on the tail probability; sf is monotone so a few steps suffice
    for _ in 0..4 {
        let pdf = student_t_pdf(x, nu);
        if !(pdf > 0.0) {
            break;
        }
        let step = (student_t_sf(x, nu) - p) / pdf;
        let next = (x + step).max(0.5 * x);
        if (next - x).abs() <= 1e-15 * x.abs().max(1.0) {
            x = next;
            break;
        }
        x = next;
    }
    x
}
