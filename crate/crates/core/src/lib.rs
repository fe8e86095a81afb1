extern crate openblas_src;

pub mod dynamics;
pub mod error;
pub mod hamiltonian;
pub mod irrep;
pub mod linalg;
pub mod oracle;
pub mod spin_model;
pub mod state_prep;

pub use error::{Error, Result};
