//! Damped Newton ascent with Armijo backtracking.

use super::linalg::{cholesky, dot, SymMatrix};
use crate::error::{Error, Result};

/// A scalar field with analytic (or otherwise supplied) first and second derivatives.
pub trait TwiceDifferentiable {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64]) -> Vec<f64>;
    fn hessian(&self, x: &[f64]) -> SymMatrix;
}

#[derive(Debug, Clone, Copy)]
pub struct NewtonOptions {
    /// Stop when the gradient sup-norm is at most this.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub converged: bool,
    /// Number of accepted steps.
    pub iterations: usize,
    pub grad_norm: f64,
}

const STEP_FLOOR: f64 = 1e-12;

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Maximizes `h` starting from `x0`.
///
/// Newton directions come from the Cholesky factor of `-∇²h`; when that
/// fails (indefinite or singular) the step falls back to steepest ascent.
/// Hitting `max_iter` is reported through `converged = false`.
pub fn newton_maximize(
    h: &impl TwiceDifferentiable,
    x0: &[f64],
    opts: &NewtonOptions,
) -> Result<NewtonResult> {
    if x0.len() != h.dim() {
        return Err(Error::InvalidInput(format!(
            "start point has length {}, field has dimension {}",
            x0.len(),
            h.dim()
        )));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::Domain {
            what: "newton tolerance",
            value: opts.tol,
        });
    }
    let mut x = x0.to_vec();
    let mut fx = h.value(&x);
    let mut iterations = 0;
    loop {
        let grad = h.gradient(&x);
        let gnorm = sup_norm(&grad);
        if gnorm <= opts.tol {
            return Ok(NewtonResult {
                x,
                value: fx,
                converged: true,
                iterations,
                grad_norm: gnorm,
            });
        }
        if iterations >= opts.max_iter || !fx.is_finite() {
            return Ok(NewtonResult {
                x,
                value: fx,
                converged: false,
                iterations,
                grad_norm: gnorm,
            });
        }

        let neg_hess = h.hessian(&x).scaled(-1.0);
        let (dir, newton_step) = match cholesky(&neg_hess) {
            Ok(l) => (l.solve_transpose(&l.solve(&grad)), true),
            Err(_) => (grad.clone(), false),
        };
        let slope = dot(&grad, &dir);
        let (dir, slope, newton_step) = if slope > 0.0 && slope.is_finite() {
            (dir, slope, newton_step)
        } else {
            let s = dot(&grad, &grad);
            (grad.clone(), s, false)
        };
        // A Newton step this short means x is already at the optimum to
        // working precision; with stiff curvature the gradient can sit at its
        // rounding floor above `tol`.
        if newton_step && sup_norm(&dir) <= STEP_FLOOR * (1.0 + sup_norm(&x)) {
            return Ok(NewtonResult {
                x,
                value: fx,
                converged: true,
                iterations,
                grad_norm: gnorm,
            });
        }

        // Predicted increase below the rounding of h: Armijo only sees noise,
        // so judge the full Newton step by the gradient instead.
        if newton_step && slope <= 64.0 * f64::EPSILON * (1.0 + fx.abs()) {
            let trial: Vec<f64> = x.iter().zip(&dir).map(|(xi, di)| xi + di).collect();
            let gt = sup_norm(&h.gradient(&trial));
            let ft = h.value(&trial);
            if gt < gnorm && ft.is_finite() {
                x = trial;
                fx = ft;
                iterations += 1;
                continue;
            }
            return Ok(NewtonResult {
                x,
                value: fx,
                converged: false,
                iterations,
                grad_norm: gnorm,
            });
        }

        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = x.iter().zip(&dir).map(|(xi, di)| xi + t * di).collect();
            if trial == x {
                // the step rounds away; Armijo would accept a non-move
                break;
            }
            let ft = h.value(&trial);
            if ft.is_finite() && ft >= fx + 1e-4 * t * slope {
                accepted = Some((trial, ft));
                break;
            }
            t *= 0.5;
        }
        let (next, fnext) = match accepted {
            Some(step) => step,
            None if newton_step => {
                // Near the optimum h is flat to rounding; take the full Newton
                // step when it shrinks the gradient without losing value.
                let trial: Vec<f64> = x.iter().zip(&dir).map(|(xi, di)| xi + di).collect();
                let ft = h.value(&trial);
                let flat = ft >= fx - 64.0 * f64::EPSILON * (1.0 + fx.abs());
                if flat && sup_norm(&h.gradient(&trial)) < gnorm {
                    (trial, ft)
                } else {
                    return Ok(NewtonResult {
                        x,
                        value: fx,
                        converged: false,
                        iterations,
                        grad_norm: gnorm,
                    });
                }
            }
            None => return Err(Error::SingularHessian),
        };
        x = next;
        fx = fnext;
        iterations += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    struct Quadratic {
        // h(x) = bᵀx − ½ xᵀ A x
        a: SymMatrix,
        b: Vec<f64>,
    }

    impl TwiceDifferentiable for Quadratic {
        fn dim(&self) -> usize {
            self.b.len()
        }
        fn value(&self, x: &[f64]) -> f64 {
            dot(&self.b, x) - 0.5 * self.a.quad_form(x)
        }
        fn gradient(&self, x: &[f64]) -> Vec<f64> {
            let ax = self.a.matvec(x);
            self.b.iter().zip(ax).map(|(b, a)| b - a).collect()
        }
        fn hessian(&self, _x: &[f64]) -> SymMatrix {
            self.a.scaled(-1.0)
        }
    }

    struct Quartic;

    impl TwiceDifferentiable for Quartic {
        fn dim(&self) -> usize {
            1
        }
        fn value(&self, x: &[f64]) -> f64 {
            -(x[0] - 3.0).powi(4)
        }
        fn gradient(&self, x: &[f64]) -> Vec<f64> {
            vec![-4.0 * (x[0] - 3.0).powi(3)]
        }
        fn hessian(&self, x: &[f64]) -> SymMatrix {
            SymMatrix::from_diag(&[-12.0 * (x[0] - 3.0).powi(2)])
        }
    }

    #[test]
    fn isotropic_quadratic_one_step() {
        let q = Quadratic {
            a: SymMatrix::identity(4),
            b: vec![0.0; 4],
        };
        let r = newton_maximize(&q, &[5.0; 4], &NewtonOptions::default()).unwrap();
        assert!(r.converged);
        assert_eq!(r.iterations, 1);
        assert_eq!(r.x, vec![0.0; 4]);
    }

    #[test]
    fn quartic_matches_grid_search() {
        // dense grid oracle for the maximizer
        let (mut best, mut best_x) = (f64::NEG_INFINITY, 0.0);
        for i in 0..=600_000 {
            let x = i as f64 * 1e-5;
            let v = -(x - 3.0f64).powi(4);
            if v > best {
                best = v;
                best_x = x;
            }
        }
        let r = newton_maximize(&Quartic, &[0.0], &NewtonOptions::default()).unwrap();
        assert!(r.converged);
        assert!(r.grad_norm <= 1e-10);
        // |∇h| ≤ 1e-10 pins |x − 3| below (2.5e-11)^{1/3}
        assert!((r.x[0] - best_x).abs() < 1e-3);
    }

    #[test]
    fn stiff_quadratic_converges_on_step_size() {
        // gradient rounding floor ~ eps · 1e8 is far above tol
        let q = Quadratic {
            a: SymMatrix::from_diag(&[1e8, 1.0]),
            b: vec![3.3e7, 0.7],
        };
        let opts = NewtonOptions { tol: 1e-12, max_iter: 20 };
        let r = newton_maximize(&q, &[0.0, 0.0], &opts).unwrap();
        assert!(r.converged);
        assert!((r.x[0] - 0.33).abs() < 1e-14 && (r.x[1] - 0.7).abs() < 1e-14);
    }

    #[test]
    fn non_convergence_is_reported() {
        let opts = NewtonOptions { tol: 1e-12, max_iter: 3 };
        let r = newton_maximize(&Quartic, &[0.0], &opts).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations, 3);
    }

    #[test]
    fn indefinite_start_falls_back_to_ascent() {
        // sin is convex at x = -1, so the first direction is steepest ascent
        struct Sine;
        impl TwiceDifferentiable for Sine {
            fn dim(&self) -> usize {
                1
            }
            fn value(&self, x: &[f64]) -> f64 {
                x[0].sin()
            }
            fn gradient(&self, x: &[f64]) -> Vec<f64> {
                vec![x[0].cos()]
            }
            fn hessian(&self, x: &[f64]) -> SymMatrix {
                SymMatrix::from_diag(&[-x[0].sin()])
            }
        }
        let r = newton_maximize(&Sine, &[-1.0], &NewtonOptions::default()).unwrap();
        assert!(r.converged);
        assert!((r.value - 1.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn negative_definite_quadratics_take_one_step(
            n in 1usize..=8,
            entries in proptest::collection::vec(-1.0f64..1.0, 64),
            b in proptest::collection::vec(-3.0f64..3.0, 8),
        ) {
            let l = crate::numkit::linalg::LowerTriangular::from_fn(n, |i, j| {
                if i == j { 1.0 + entries[i * 8 + j].abs() } else { 0.3 * entries[i * 8 + j] }
            });
            let q = Quadratic { a: l.gram(), b: b[..n].to_vec() };
            let r = newton_maximize(&q, &vec![0.0; n], &NewtonOptions { tol: 1e-8, max_iter: 100 }).unwrap();
            prop_assert!(r.converged);
            prop_assert_eq!(r.iterations, 1);
        }
    }
}
