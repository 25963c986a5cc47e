//! Simulated secret-sharing MPC: additive shares, a trusted dealer for
//! correlated randomness, bit circuits, share conversion and fixed point.

pub mod binary;
pub mod convert;
pub mod domain;
pub mod ec;
pub mod fixed;
pub mod sim;

pub use convert::{field_to_ring, ring_to_field, ring_to_field_traced, ConvertParams};
pub use domain::{Domain, ShareValue};
pub use fixed::{Engine, MpcEngine, PlainEngine, FRAC_BITS};
pub use sim::{Mpc, SecurityMode, Shared, Stats, Tamper};
