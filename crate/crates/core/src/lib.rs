//! Signed network embedding: balance structure plus sparse anomaly effect,
//! fitted by constrained maximum likelihood, with community and anomaly
//! detection on top.

pub mod cli;
pub mod detection;
pub mod error;
pub mod io;
pub mod likelihood;
pub mod model;
pub mod optimizer;
pub mod select;
pub mod synthgen;

pub use error::{Error, Result};
