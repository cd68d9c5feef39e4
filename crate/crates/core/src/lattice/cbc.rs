use rayon::prelude::*;

use super::{check_n, CbcProvenance, GeneratingVector, PodWeights};
use crate::error::{Error, Result};
use crate::rkhs::ThetaGrid;

/// Σ_{ℓ=1}^{d} Γ_ℓ e_ℓ(x_1..x_d), with the elementary symmetric polynomials
/// built by the usual one-variable-at-a-time recursion.
fn pod_sum(xs: impl Iterator<Item = f64>, w: &PodWeights, e: &mut [f64]) -> f64 {
    e.fill(0.0);
    e[0] = 1.0;
    let mut used = 0;
    for x in xs {
        used += 1;
        for l in (1..=used).rev() {
            e[l] += x * e[l - 1];
        }
    }
    (1..=used).map(|l| w.order_weight(l) * e[l]).sum()
}

/// Shift-averaged squared worst-case error of the lattice rule.
///
/// (1/N) Σ_i Σ_ℓ Γ_ℓ e_ℓ(β_j θ({i z_j/N})) − Σ_ℓ Γ_ℓ e_ℓ(β_j θ̄); values in
/// [−1e−10, 0) are rounding and are returned as 0.
pub fn worst_case_error_sq(gen: &GeneratingVector, w: &PodWeights, grid: &ThetaGrid) -> Result<f64> {
    let d = gen.dim();
    if w.dim() < d {
        return Err(Error::InvalidInput(format!(
            "weights cover {} dimensions, vector has {d}",
            w.dim()
        )));
    }
    if grid.n as u64 != gen.n {
        return Err(Error::InvalidInput(format!(
            "theta grid built for N = {}, vector has N = {}",
            grid.n, gen.n
        )));
    }
    let mut e = vec![0.0; d + 1];
    let mut acc = 0.0;
    for i in 1..=gen.n {
        acc += pod_sum(
            gen.z.iter().zip(&w.product).map(|(&zj, &bj)| bj * grid.at(i * zj)),
            w,
            &mut e,
        );
    }
    let constant = pod_sum(w.product[..d].iter().map(|&bj| bj * grid.theta_bar), w, &mut e);
    clamp(acc / gen.n as f64 - constant)
}

fn clamp(v: f64) -> Result<f64> {
    if v >= 0.0 {
        Ok(v)
    } else if v >= -1e-10 {
        Ok(0.0)
    } else {
        Err(Error::Domain {
            what: "squared worst-case error",
            value: v,
        })
    }
}

/// Greedy component-by-component construction.
///
/// z_1 = 1 (every odd z gives the same one-dimensional point set). For
/// s ≥ 2 the candidates are odd z < N/2: z and N−z yield identical errors
/// because θ({x}) = θ({−x}), so the smallest-z tie-break never selects the
/// upper half. Per-point states e_ℓ(x_1..x_{s−1}) reduce each candidate to
/// one pass over the N points.
pub fn cbc_construct(
    n: u64,
    d: usize,
    w: &PodWeights,
    grid: &ThetaGrid,
) -> Result<GeneratingVector> {
    check_n(n)?;
    if d == 0 || w.dim() < d {
        return Err(Error::InvalidInput(format!(
            "cannot build {d} components from weights of dimension {}",
            w.dim()
        )));
    }
    if grid.n as u64 != n {
        return Err(Error::InvalidInput(format!(
            "theta grid built for N = {}, requested N = {n}",
            grid.n
        )));
    }
    let np = n as usize;
    // state[i*(d+1) + ℓ] = e_ℓ for point i+1
    let stride = d + 1;
    let mut state = vec![0.0; np * stride];
    for i in 0..np {
        state[i * stride] = 1.0;
    }
    let mut z = Vec::with_capacity(d);
    for s in 1..=d {
        let beta = w.product[s - 1];
        // B_i = Σ_{ℓ=1}^{s} Γ_ℓ e_{ℓ−1}
        let b: Vec<f64> = (0..np)
            .map(|i| (1..=s).map(|l| w.order_weight(l) * state[i * stride + l - 1]).sum())
            .collect();
        let zs = if s == 1 {
            1
        } else {
            let candidates: Vec<u64> = (1..n / 2).step_by(2).collect();
            let scored: Vec<(f64, u64)> = candidates
                .par_iter()
                .map(|&c| {
                    let score: f64 = (0..np)
                        .map(|i| grid.at((i as u64 + 1) * c) * b[i])
                        .sum();
                    (score, c)
                })
                .collect();
            scored
                .into_iter()
                .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
                .map(|(_, c)| c)
                .expect("at least one candidate for N >= 8")
        };
        for i in 0..np {
            let x = beta * grid.at((i as u64 + 1) * zs);
            let row = &mut state[i * stride..(i + 1) * stride];
            for l in (1..=s).rev() {
                row[l] += x * row[l - 1];
            }
        }
        z.push(zs);
    }
    let mut gen = GeneratingVector::new(n, z)?;
    gen.provenance = Some(CbcProvenance {
        kappa: w.kappa,
        eta: w.eta,
        lambda_w: w.lambda_w,
        scheme: grid.scheme,
    });
    Ok(gen)
}
