//! Proof-of-consistency commitments over a simulated MPC, and the committed
//! training, inference and audit pipeline built on them.

pub mod algebra;
pub mod arcproto;
pub mod audit;
pub mod commit;
pub mod error;
pub mod ml;
pub mod mpc;
pub mod poc;

pub use error::{ArcError, Result};
