pub mod error;
pub mod numkit;
pub mod isampling;
pub mod lattice;
pub mod models;
pub mod rkhs;

pub use error::{Error, Result};
