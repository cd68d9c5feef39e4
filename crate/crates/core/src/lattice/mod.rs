//! Randomly shifted rank-1 lattice rules and their component-by-component
//! construction under product-and-order-dependent (POD) weights.

mod cbc;
mod file;

pub use cbc::{cbc_construct, worst_case_error_sq};
pub use file::{format_vector, parse_vector, read_vector_file, write_vector_file};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit::rng::open01;
use crate::numkit::special::ln_gamma;
use crate::rkhs::WeightScheme;

/// Parameters a vector was constructed for; carried through the vector file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CbcProvenance {
    pub kappa: f64,
    pub eta: f64,
    pub lambda_w: f64,
    pub scheme: WeightScheme,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratingVector {
    pub n: u64,
    pub z: Vec<u64>,
    pub provenance: Option<CbcProvenance>,
}

impl GeneratingVector {
    /// N must be a power of two ≥ 8 and every z_j odd in [1, N−1].
    pub fn new(n: u64, z: Vec<u64>) -> Result<Self> {
        check_n(n)?;
        if z.is_empty() {
            return Err(Error::InvalidInput("generating vector needs d >= 1".into()));
        }
        if let Some(&bad) = z.iter().find(|&&zj| zj == 0 || zj >= n || zj % 2 == 0) {
            return Err(Error::InvalidInput(format!(
                "component {bad} is not an odd integer in [1, {}]",
                n - 1
            )));
        }
        Ok(Self {
            n,
            z,
            provenance: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.z.len()
    }

    /// The first `s` components.
    pub fn prefix(&self, s: usize) -> Self {
        Self {
            n: self.n,
            z: self.z[..s].to_vec(),
            provenance: self.provenance,
        }
    }
}

pub(crate) fn check_n(n: u64) -> Result<()> {
    if n < 8 || !n.is_power_of_two() {
        return Err(Error::InvalidInput(format!(
            "lattice size must be a power of two >= 8, got {n}"
        )));
    }
    Ok(())
}

/// γ_u = Γ_{|u|} ∏_{j∈u} β_j with Γ_ℓ = (ℓ!)^{2/(1+λw)} and β_j = (κ̃/j^η)^{1/(1+λw)}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PodWeights {
    pub kappa: f64,
    pub eta: f64,
    pub lambda_w: f64,
    /// Γ_1..Γ_d
    pub order: Vec<f64>,
    /// β_1..β_d
    pub product: Vec<f64>,
}

impl PodWeights {
    pub fn dim(&self) -> usize {
        self.product.len()
    }

    /// Γ_ℓ for 1 ≤ ℓ ≤ d.
    pub fn order_weight(&self, l: usize) -> f64 {
        self.order[l - 1]
    }

    /// γ_u for a set of zero-based coordinates.
    pub fn gamma(&self, u: &[usize]) -> f64 {
        if u.is_empty() {
            return 1.0;
        }
        self.order_weight(u.len()) * u.iter().map(|&j| self.product[j]).product::<f64>()
    }
}

pub fn make_pod_weights(d: usize, kappa: f64, eta: f64, lambda_w: f64) -> Result<PodWeights> {
    if d == 0 {
        return Err(Error::InvalidInput("weights need d >= 1".into()));
    }
    for (what, v) in [("kappa", kappa), ("eta", eta), ("lambda_w", lambda_w)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::InvalidInput(format!("{what} must be positive, got {v}")));
        }
    }
    let p = 1.0 / (1.0 + lambda_w);
    let order = (1..=d)
        .map(|l| (2.0 * p * ln_gamma(l as f64 + 1.0)).exp())
        .collect();
    let product = (1..=d)
        .map(|j| (kappa / (j as f64).powf(eta)).powf(p))
        .collect();
    Ok(PodWeights {
        kappa,
        eta,
        lambda_w,
        order,
        product,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftedPointSet {
    pub generator: GeneratingVector,
    pub shift: Vec<f64>,
    /// N × d, row i−1 holds point i.
    pub points: Vec<f64>,
}

impl ShiftedPointSet {
    pub fn len(&self) -> usize {
        self.generator.n as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, i: usize) -> &[f64] {
        let d = self.generator.dim();
        &self.points[i * d..(i + 1) * d]
    }
}

/// Coordinate j of point i: frac(i z_j / N + Δ_j).
#[inline]
pub fn lattice_coordinate(i: u64, zj: u64, n: u64, shift: f64) -> f64 {
    let v = ((i % n) * (zj % n) % n) as f64 / n as f64 + shift;
    if v >= 1.0 {
        v - 1.0
    } else {
        v
    }
}

/// The points {i z/N + Δ}, i = 1..N (the last one is the shifted origin).
pub fn lattice_points(gen: &GeneratingVector, shift: &[f64]) -> Result<ShiftedPointSet> {
    if shift.len() != gen.dim() {
        return Err(Error::InvalidInput(format!(
            "shift has length {}, lattice has dimension {}",
            shift.len(),
            gen.dim()
        )));
    }
    if let Some(&s) = shift.iter().find(|s| !(0.0..1.0).contains(*s)) {
        return Err(Error::Domain {
            what: "shift coordinate",
            value: s,
        });
    }
    let mut points = Vec::with_capacity(gen.n as usize * gen.dim());
    for i in 1..=gen.n {
        for (&zj, &sj) in gen.z.iter().zip(shift) {
            points.push(lattice_coordinate(i, zj, gen.n, sj));
        }
    }
    Ok(ShiftedPointSet {
        generator: gen.clone(),
        shift: shift.to_vec(),
        points,
    })
}

/// Uniform shift on the open cube (0,1)^d.
pub fn random_shift(d: usize, rng: &mut impl Rng) -> Vec<f64> {
    (0..d).map(|_| open01(rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pod_weight_examples() {
        let w = make_pod_weights(3, 0.1, 3.1, 0.51).unwrap();
        assert!((w.product[0] - 0.1f64.powf(1.0 / 1.51)).abs() < 1e-15);
        assert!((w.product[0] - 0.217_644_824_545_109).abs() < 1e-14);
        assert!((w.order[0] - 1.0).abs() < 1e-15);
        assert!((w.order[1] - 2.504_466_495_086_861).abs() < 1e-14);
        for lw in [0.1, 0.51, 3.0] {
            assert!((make_pod_weights(2, 0.1, 3.1, lw).unwrap().order[0] - 1.0).abs() < 1e-15);
        }
        // γ_u = ((|u|!)² ∏ κ̃/i^η)^{1/(1+λ)}
        let direct = ((2.0f64 * 3.0).powi(2) * (0.1 / 1.0) * (0.1 / 2f64.powf(3.1)) * (0.1 / 3f64.powf(3.1)))
            .powf(1.0 / 1.51);
        assert!((w.gamma(&[0, 1, 2]) / direct - 1.0).abs() < 1e-13);
        assert!(make_pod_weights(3, 0.0, 3.1, 0.51).is_err());
    }

    #[test]
    fn point_examples() {
        let g = GeneratingVector {
            n: 4,
            z: vec![1],
            provenance: None,
        };
        let p = lattice_points(&g, &[0.0]).unwrap();
        assert_eq!(p.points, vec![0.25, 0.5, 0.75, 0.0]);

        let g = GeneratingVector::new(8, vec![1, 3]).unwrap();
        let p = lattice_points(&g, &[0.0, 0.0]).unwrap();
        assert_eq!(p.point(1), &[0.25, 0.75]);
        let q = lattice_points(&g, &[0.5, 0.5]).unwrap();
        for i in 0..8 {
            for j in 0..2 {
                let expect = (p.point(i)[j] + 0.5).fract();
                assert_eq!(q.point(i)[j], expect);
            }
        }
    }

    #[test]
    fn vector_validation() {
        assert!(GeneratingVector::new(16, vec![1, 5, 7]).is_ok());
        assert!(GeneratingVector::new(12, vec![1]).is_err());
        assert!(GeneratingVector::new(4, vec![1]).is_err());
        assert!(GeneratingVector::new(16, vec![1, 4]).is_err());
        assert!(GeneratingVector::new(16, vec![17]).is_err());
        assert!(GeneratingVector::new(16, vec![]).is_err());
    }

    #[test]
    fn random_shifts_stay_inside() {
        let mut rng = crate::numkit::RngStream::new(1, 2).rng();
        for _ in 0..1000 {
            assert!(random_shift(4, &mut rng).iter().all(|&s| s > 0.0 && s < 1.0));
        }
    }
}
