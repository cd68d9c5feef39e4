//! Least-squares rate fitting on log-log axes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
}

/// Fits `ln err = intercept + slope · ln n`.
pub fn fit_loglog_slope(points: &[(f64, f64)]) -> Result<LogLogFit> {
    if points.len() < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            got: points.len(),
        });
    }
    if points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::InvalidInput("sample sizes must be strictly increasing".into()));
    }
    if let Some(&(_, e)) = points.iter().find(|p| !(p.1 > 0.0) || !p.1.is_finite() || !(p.0 > 0.0)) {
        return Err(Error::Domain {
            what: "error magnitude",
            value: e,
        });
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Ok(LogLogFit {
        slope,
        intercept: my - slope * mx,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_laws() {
        let f = fit_loglog_slope(&[(2.0, 1.0), (4.0, 0.5), (8.0, 0.25)]).unwrap();
        assert!((f.slope + 1.0).abs() < 1e-15);
        let c = 3.7;
        let pts: Vec<_> = [10.0f64, 100.0, 1000.0].iter().map(|&n| (n, c * n.powf(-0.5))).collect();
        let f = fit_loglog_slope(&pts).unwrap();
        assert!((f.slope + 0.5).abs() < 1e-14);
        assert!((f.intercept - c.ln()).abs() < 1e-13);
    }

    #[test]
    fn matches_normal_equations() {
        let pts = [(8.0, 0.31), (16.0, 0.22), (32.0, 0.09), (64.0, 0.071), (128.0, 0.033)];
        // direct 2x2 normal equations on raw sums
        let (mut s1, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for &(n, e) in &pts {
            let (x, y) = (f64::ln(n), f64::ln(e));
            s1 += 1.0;
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        let det = s1 * sxx - sx * sx;
        let slope = (s1 * sxy - sx * sy) / det;
        let intercept = (sxx * sy - sx * sxy) / det;
        let f = fit_loglog_slope(&pts).unwrap();
        assert!((f.slope - slope).abs() < 1e-12);
        assert!((f.intercept - intercept).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            fit_loglog_slope(&[(1.0, 1.0), (2.0, 1.0)]),
            Err(Error::InsufficientData { .. })
        ));
        assert!(fit_loglog_slope(&[(1.0, 1.0), (1.0, 1.0), (2.0, 1.0)]).is_err());
        assert!(fit_loglog_slope(&[(1.0, 1.0), (2.0, 0.0), (3.0, 1.0)]).is_err());
    }
}
