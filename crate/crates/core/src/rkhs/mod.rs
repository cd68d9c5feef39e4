//! Weighted Sobolev space machinery behind the lattice error criterion.

mod bounds;
mod kernel;
mod scheme;

pub use bounds::{rate_certificate, rational_cdf, rational_inv_cdf, sandwich_constants, RateCertificate};
pub use kernel::{c1_constant, theta, theta_bar, theta_hat, ThetaGrid};
pub use scheme::WeightScheme;
