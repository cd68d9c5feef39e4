//! Numerical substrate shared by the rest of the crate.

pub mod linalg;
pub mod newton;
pub mod quad;
pub mod regression;
pub mod rng;
pub mod special;

pub use linalg::{cholesky, spd_inverse, sym_eigenvalues, LowerTriangular, SymMatrix};
pub use newton::{newton_maximize, NewtonOptions, NewtonResult, TwiceDifferentiable};
pub use quad::{adaptive_quad, integrate, QuadOptions, QuadResult};
pub use regression::{fit_loglog_slope, LogLogFit};
pub use rng::RngStream;
pub use special::{normal_cdf, normal_inv_cdf, student_t_inv_cdf};
