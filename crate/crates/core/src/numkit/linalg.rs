//! Small dense symmetric linear algebra: Cholesky, triangular solves and a
//! cyclic Jacobi eigensolver. Dimensions here are at most a few dozen.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Symmetric matrix stored as a full row-major square; every write mirrors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        Self {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_diag(&vec![1.0; dim])
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    /// Builds from a closure evaluated on the lower triangle.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..=i {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Accepts a row-major square; rejects anything not exactly symmetric.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidInput("matrix must be square and non-empty".into()));
        }
        for i in 0..dim {
            for j in 0..i {
                if rows[i][j] != rows[j][i] {
                    return Err(Error::InvalidInput(format!(
                        "matrix not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        Ok(Self {
            dim,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] = v;
        self.data[j * self.dim + i] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    /// `self - other`
    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|i| dot(&self.data[i * self.dim..(i + 1) * self.dim], x))
            .collect()
    }

    /// xᵀ M x
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        dot(x, &self.matvec(x))
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.dim).map(<[f64]>::to_vec).collect()
    }
}

/// Lower-triangular square matrix (strict upper part is structurally zero).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerTriangular {
    dim: usize,
    data: Vec<f64>,
}

impl LowerTriangular {
    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    /// Builds from a closure evaluated on the lower triangle only.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in 0..=i {
                data[i * dim + j] = f(i, j);
            }
        }
        Self { dim, data }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    /// L x
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim;
        (0..n)
            .map(|i| dot(&self.data[i * n..i * n + i + 1], &x[..=i]))
            .collect()
    }

    /// Lᵀ x
    pub fn transpose_matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let mut out = vec![0.0; n];
        for i in 0..n {
            for j in 0..=i {
                out[j] += self.get(i, j) * x[i];
            }
        }
        out
    }

    /// Solves L y = b by forward substitution.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let mut y = vec![0.0; n];
        for i in 0..n {
            let s = b[i] - dot(&self.data[i * n..i * n + i], &y[..i]);
            y[i] = s / self.get(i, i);
        }
        y
    }

    /// Solves Lᵀ x = b by back substitution.
    pub fn solve_transpose(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = b[i];
            for k in i + 1..n {
                s -= self.get(k, i) * x[k];
            }
            x[i] = s / self.get(i, i);
        }
        x
    }

    /// L⁻¹ M for a lower-triangular M; the result is lower triangular.
    pub fn solve_lower(&self, m: &LowerTriangular) -> LowerTriangular {
        let n = self.dim;
        let mut out = LowerTriangular::from_fn(n, |_, _| 0.0);
        for col in 0..n {
            let b: Vec<f64> = (0..n).map(|i| m.get(i, col)).collect();
            let y = self.solve(&b);
            for i in col..n {
                out.data[i * n + col] = y[i];
            }
        }
        out
    }

    /// L Lᵀ
    pub fn gram(&self) -> SymMatrix {
        let n = self.dim;
        SymMatrix::from_fn(n, |i, j| {
            dot(&self.data[i * n..i * n + j + 1], &self.data[j * n..j * n + j + 1])
        })
    }

    pub fn ln_det(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i).abs().ln()).sum()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.dim).map(<[f64]>::to_vec).collect()
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Cholesky factor with positive diagonal.
pub fn cholesky(m: &SymMatrix) -> Result<LowerTriangular> {
    let n = m.dim();
    let tol = 1e-14 * (1.0 + m.max_abs());
    let mut l = LowerTriangular::from_fn(n, |_, _| 0.0);
    for j in 0..n {
        let row_j = &l.data[j * n..j * n + j];
        let pivot = m.get(j, j) - dot(row_j, row_j);
        if !(pivot > tol) {
            return Err(Error::NotPositiveDefinite { pivot: j, value: pivot });
        }
        let djj = pivot.sqrt();
        l.data[j * n + j] = djj;
        for i in j + 1..n {
            let s = m.get(i, j) - dot(&l.data[i * n..i * n + j], &l.data[j * n..j * n + j]);
            l.data[i * n + j] = s / djj;
        }
    }
    Ok(l)
}

/// Inverse of a symmetric positive definite matrix via its Cholesky factor.
pub fn spd_inverse(m: &SymMatrix) -> Result<SymMatrix> {
    let l = cholesky(m)?;
    let n = m.dim();
    let mut inv = SymMatrix::zeros(n);
    for col in 0..n {
        let mut e = vec![0.0; n];
        e[col] = 1.0;
        let x = l.solve_transpose(&l.solve(&e));
        for row in col..n {
            inv.set(row, col, x[row]);
        }
    }
    Ok(inv)
}

/// Full spectrum of a symmetric matrix, ascending, by cyclic Jacobi rotations.
pub fn sym_eigenvalues(m: &SymMatrix) -> Vec<f64> {
    let n = m.dim();
    let mut a = m.rows();
    let scale = m.max_abs().max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-13 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    eig.sort_by(f64::total_cmp);
    eig
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cholesky_examples() {
        let id = SymMatrix::identity(4);
        assert_eq!(cholesky(&id).unwrap(), LowerTriangular::identity(4));

        let m = SymMatrix::from_rows(&[vec![4.0, 2.0], vec![2.0, 5.0]]).unwrap();
        let l = cholesky(&m).unwrap();
        assert_eq!(l.rows(), vec![vec![2.0, 0.0], vec![1.0, 2.0]]);

        let bad = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(matches!(cholesky(&bad), Err(Error::NotPositiveDefinite { .. })));
    }

    #[test]
    fn eigenvalue_examples() {
        assert_eq!(sym_eigenvalues(&SymMatrix::identity(3)), vec![1.0, 1.0, 1.0]);
        assert_eq!(
            sym_eigenvalues(&SymMatrix::from_diag(&[3.0, 1.0, 2.0])),
            vec![1.0, 2.0, 3.0]
        );
        let m = SymMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let e = sym_eigenvalues(&m);
        assert!((e[0] - 1.0).abs() < 1e-14 && (e[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn from_rows_rejects_asymmetry() {
        assert!(SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.5, 1.0]]).is_err());
    }

    #[test]
    fn spd_inverse_round_trip() {
        let m = SymMatrix::from_rows(&[
            vec![4.0, 1.0, 0.5],
            vec![1.0, 3.0, 0.2],
            vec![0.5, 0.2, 2.0],
        ])
        .unwrap();
        let inv = spd_inverse(&m).unwrap();
        for j in 0..3 {
            let col: Vec<f64> = (0..3).map(|i| inv.get(i, j)).collect();
            let e = m.matvec(&col);
            for (i, v) in e.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((v - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn triangular_solves() {
        let l = LowerTriangular::from_fn(3, |i, j| 1.0 + (i + 2 * j) as f64);
        let x = [0.3, -1.2, 2.0];
        let b = l.matvec(&x);
        let y = l.solve(&b);
        let bt = l.transpose_matvec(&x);
        let yt = l.solve_transpose(&bt);
        for i in 0..3 {
            assert!((y[i] - x[i]).abs() < 1e-14);
            assert!((yt[i] - x[i]).abs() < 1e-14);
        }
    }

    fn sym_strategy() -> impl Strategy<Value = SymMatrix> {
        (1usize..=20).prop_flat_map(|n| {
            proptest::collection::vec(-5.0f64..5.0, n * n).prop_map(move |v| {
                SymMatrix::from_fn(n, |i, j| v[i * n + j])
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn eigenvalues_preserve_trace_and_frobenius(m in sym_strategy()) {
            let e = sym_eigenvalues(&m);
            let tol = 1e-9 * m.dim() as f64 * (1.0 + m.max_abs());
            prop_assert!((e.iter().sum::<f64>() - m.trace()).abs() <= tol);
            let fro: f64 = e.iter().map(|v| v * v).sum();
            prop_assert!((fro - m.frobenius_sq()).abs() <= tol * (1.0 + m.max_abs()));
            prop_assert!(e.windows(2).all(|w| w[0] <= w[1]));
        }

        #[test]
        fn cholesky_recovers_factor(
            n in 1usize..=12,
            seed in proptest::collection::vec(-1.0f64..1.0, 144),
        ) {
            let l = LowerTriangular::from_fn(n, |i, j| {
                if i == j { 1.0 + seed[i * 12 + j].abs() } else { 0.5 * seed[i * 12 + j] }
            });
            let m = l.gram();
            let back = cholesky(&m).unwrap();
            let tol = 1e-10 * (1.0 + m.max_abs());
            for i in 0..n {
                for j in 0..=i {
                    prop_assert!((back.get(i, j) - l.get(i, j)).abs() <= tol);
                }
            }
            let recon = back.gram();
            for i in 0..n {
                for j in 0..n {
                    prop_assert!((recon.get(i, j) - m.get(i, j)).abs() <= tol);
                }
            }
        }
    }
}
