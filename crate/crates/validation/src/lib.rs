//! Oracles that recompute quantities from their defining formulas, sharing
//! no numerical code with the algorithms they check.

use qmcis::isampling::LogIntegrand;
use qmcis::lattice::{GeneratingVector, PodWeights};
use qmcis::models::{GlmmInstance, RbInstance};
use qmcis::rkhs::ThetaGrid;

/// Σ over nonempty u of γ_u [(1/N)Σ_i ∏_{j∈u} θ({iz_j/N}) − θ̄^{|u|}], by
/// enumerating all 2^d − 1 subsets.
pub fn subset_wce_sq(gen: &GeneratingVector, w: &PodWeights, grid: &ThetaGrid) -> f64 {
    let d = gen.dim();
    let mut total = 0.0;
    for mask in 1u32..(1 << d) {
        let u: Vec<usize> = (0..d).filter(|j| mask & (1 << j) != 0).collect();
        let gamma = w.order[u.len() - 1] * u.iter().map(|&j| w.product[j]).product::<f64>();
        let mut mean = 0.0;
        for i in 1..=gen.n {
            mean += u.iter().map(|&j| grid.values[((i * gen.z[j]) % gen.n) as usize]).product::<f64>();
        }
        mean /= gen.n as f64;
        total += gamma * (mean - grid.theta_bar.powi(u.len() as i32));
    }
    total
}

fn sup(v: impl Iterator<Item = f64>) -> f64 {
    v.fold(0.0, |m, x| m.max(x.abs()))
}

/// Central differences with step 1e-5 (1 + |z_i|).
pub fn central_gradient(f: impl Fn(&[f64]) -> f64, z: &[f64]) -> Vec<f64> {
    let mut x = z.to_vec();
    (0..z.len())
        .map(|i| {
            let h = 1e-5 * (1.0 + z[i].abs());
            x[i] = z[i] + h;
            let up = f(&x);
            x[i] = z[i] - h;
            let down = f(&x);
            x[i] = z[i];
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// Worst normwise relative error (gradient, Hessian) of the analytic
/// derivatives against central differences over `points`.
pub fn derivative_errors(m: &dyn LogIntegrand, points: &[Vec<f64>]) -> (f64, f64) {
    let (mut eg, mut eh) = (0.0f64, 0.0f64);
    for z in points {
        let g = m.grad_g(z);
        let fg = central_gradient(|p| m.log_g(p), z);
        eg = eg.max(sup(g.iter().zip(&fg).map(|(a, b)| a - b)) / sup(g.iter().copied()));
        let h = m.hess_g(z);
        let d = z.len();
        let mut worst = 0.0f64;
        let mut scale = 0.0f64;
        for j in 0..d {
            let col = central_gradient(|p| m.grad_g(p)[j], z);
            for (i, c) in col.iter().enumerate() {
                worst = worst.max((h.get(i, j) - c).abs());
                scale = scale.max(h.get(i, j).abs());
            }
        }
        eh = eh.max(worst / scale);
    }
    (eg, eh)
}

/// Solves A x = b by Gaussian elimination with partial pivoting.
pub fn solve(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.iter().zip(b).map(|(row, &bi)| {
        let mut r = row.clone();
        r.push(bi);
        r
    }).collect();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs())).unwrap();
        m.swap(c, p);
        for r in c + 1..n {
            let f = m[r][c] / m[c][c];
            for k in c..=n {
                m[r][k] -= f * m[c][k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| m[r][k] * x[k]).sum();
        x[r] = (m[r][n] - s) / m[r][r];
    }
    x
}

pub fn inverse(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let cols: Vec<Vec<f64>> = (0..n)
        .map(|j| solve(a, &(0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect::<Vec<_>>()))
        .collect();
    (0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect()
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn jacobi_eigenvalues(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let mut m = a.to_vec();
    for _ in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j] * m[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q] == 0.0 {
                    continue;
                }
                let tau = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let t = if tau == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| m[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// GLMM quantities at the mode, from Σ = σ²κ^{|i−j|}/(1−κ²) and
/// H(ω) = Σ_j [y_j(ω_j+β) − e^{ω_j+β}] − ½ ωᵀΣ⁻¹ω.
#[derive(Debug, Clone)]
pub struct GlmmDirect {
    pub omega_star: Vec<f64>,
    /// max_j e^{ω⋆_j+β}, i.e. −min eig ∇²g(ω⋆)
    pub neg_h_min: f64,
    pub lambda_max: f64,
}

pub fn glmm_direct(inst: &GlmmInstance) -> GlmmDirect {
    let d = inst.y.len();
    let v = inst.sigma * inst.sigma / (1.0 - inst.kappa * inst.kappa);
    let sigma: Vec<Vec<f64>> = (0..d)
        .map(|i| (0..d).map(|j| v * inst.kappa.powi(i.abs_diff(j) as i32)).collect())
        .collect();
    let prec = inverse(&sigma);
    let h = |w: &[f64]| -> f64 {
        let quad: f64 = (0..d).map(|i| (0..d).map(|j| w[i] * prec[i][j] * w[j]).sum::<f64>()).sum();
        (0..d).map(|j| inst.y[j] as f64 * (w[j] + inst.beta) - (w[j] + inst.beta).exp()).sum::<f64>() - 0.5 * quad
    };
    let mut w = vec![0.0; d];
    for _ in 0..200 {
        let e: Vec<f64> = w.iter().map(|x| (x + inst.beta).exp()).collect();
        let grad: Vec<f64> = (0..d)
            .map(|i| inst.y[i] as f64 - e[i] - (0..d).map(|j| prec[i][j] * w[j]).sum::<f64>())
            .collect();
        let neg_hess: Vec<Vec<f64>> = (0..d)
            .map(|i| (0..d).map(|j| prec[i][j] + if i == j { e[i] } else { 0.0 }).collect())
            .collect();
        let step = solve(&neg_hess, &grad);
        if sup(step.iter().copied()) <= 1e-14 * (1.0 + sup(w.iter().copied())) {
            break;
        }
        let mut t = 1.0;
        let h0 = h(&w);
        loop {
            let trial: Vec<f64> = w.iter().zip(&step).map(|(a, b)| a + t * b).collect();
            if h(&trial) >= h0 || t < 1e-10 {
                w = trial;
                break;
            }
            t *= 0.5;
        }
    }
    let e: Vec<f64> = w.iter().map(|x| (x + inst.beta).exp()).collect();
    let m: Vec<Vec<f64>> = (0..d)
        .map(|i| (0..d).map(|j| prec[i][j] + if i == j { e[i] } else { 0.0 }).collect())
        .collect();
    let lambda_max = *jacobi_eigenvalues(&inverse(&m)).last().unwrap();
    GlmmDirect {
        neg_h_min: e.iter().copied().fold(0.0, f64::max),
        omega_star: w,
        lambda_max,
    }
}

/// ‖−∇²g(z)‖_F² for the bond model from r_k = r₀ exp(−kσ²/2 + σ Σ_{j≤k} z_j),
/// R_k = σ² r_k/(1+r_k)² and (−∇²g)_{ij} = Σ_{k≥max(i,j)} R_k.
pub fn rb_frobenius_sq(inst: &RbInstance, z: &[f64]) -> f64 {
    let d = inst.d;
    let mut b = 0.0;
    let big_r: Vec<f64> = (1..=d)
        .map(|k| {
            b += z[k - 1];
            let r = inst.r0 * (-(k as f64) * inst.sigma * inst.sigma / 2.0 + inst.sigma * b).exp();
            inst.sigma * inst.sigma * r / ((1.0 + r) * (1.0 + r))
        })
        .collect();
    let mut total = 0.0;
    for i in 0..d {
        for j in 0..d {
            let t: f64 = big_r[i.max(j)..].iter().sum();
            total += t * t;
        }
    }
    total
}

pub fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}
