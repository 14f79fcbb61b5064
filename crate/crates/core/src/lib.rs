//! Symbolic Hamiltonian corpora, their vector fields, rasterized views and
//! token-level metrics.

pub mod cloud;
pub mod corpus;
pub mod datakit;
pub mod expr;
pub mod hamfield;
pub mod raster;
pub mod rational;
pub mod tokens;
