//! Exact counting for restricted-movement permutations of Z^2.
//!
//! The fast paths (Kasteleyn counting, T-gadget cover counting, transfer
//! matrices) each have a brute-force twin in [`oracle`].

pub mod admissibility;
mod bipartite;
pub mod cli;
pub mod correspond;
pub mod entropy;
pub mod error;
pub mod graphkit;
pub mod lattice;
pub mod linalg;
pub mod oracle;
pub mod planarcount;

pub use error::{Error, Result};
