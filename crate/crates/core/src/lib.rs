//! Semidefinite (lifted LMI) representations of convex sets
//! `S = {x ∈ D : G(x) ⪰ 0}` where `G` is a symmetric polynomial or rational
//! matrix function.

pub mod certify;
pub mod cli;
pub mod error;
pub mod harness;
pub mod momlift;
pub mod polyalg;
pub mod problem;
pub mod ratlift;
pub mod sdpcore;

pub use error::{Error, Result};
