//! Field, ring, polynomial and pairing-group arithmetic.

pub mod field;
pub mod group;
pub mod poly;
pub mod ring;

pub use field::{Fr377, F1009, F101};
pub use group::{Bls377, G1Curve, G2Curve, GroupElem, MockBackend, MockElem, PairingBackend};
pub use poly::Polynomial;
pub use ring::{Bit, Z2k, Z64};
