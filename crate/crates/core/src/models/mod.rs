//! Integrands used by the experiments.

pub mod glmm;
pub mod rb;
pub mod synthetic;

pub use glmm::{glmm_condition, GlmmConditionReport, GlmmInstance};
pub use rb::{rb_alpha_bound, rb_price_closed_form_sigma0, standard_construction, RbAlphaBound, RbInstance};
pub use synthetic::{ConstantOne, GaussianMgf, SinQuadratic, Synthetic};
