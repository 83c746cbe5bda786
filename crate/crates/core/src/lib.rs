//! Error-mitigated Hamiltonian simulation on dense density matrices.

pub mod channels;
pub mod circuit;
pub mod cost;
pub mod error;
pub mod hamiltonian;
pub mod lab;
pub mod linalg;
pub mod mitigation;
pub mod pauli;
pub mod rlcu;
pub mod stats;
pub mod trotter;

pub use error::{Error, Result};
