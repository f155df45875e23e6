//! Alignment-agnostic canonical correlation analysis.
//!
//! Learns per-view projection matrices from imperfectly paired two-view data
//! by iterating a context-regularized generalized eigenproblem to a fixed
//! point. Provides the solver, cross-affinity (pairing) and neighborhood
//! (context) builders, synthetic benchmark generators and change-detection
//! evaluation metrics.

pub mod datasets;
pub mod error;
pub mod eval;
pub mod experiments;
pub mod linalg;
pub mod cca;
pub mod context;
pub mod pairing;

pub use error::{AaccaError, Result};
