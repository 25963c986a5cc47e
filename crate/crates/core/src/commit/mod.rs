//! Commitment schemes and signatures.

pub mod hash;
pub mod kzg;
pub mod pedersen;
pub mod sig;

pub use hash::{hash_commit, MimcParams};
pub use kzg::{kzg_check, kzg_commit, kzg_prove, kzg_setup, KzgCommitment, KzgOpening, KzgParams};
pub use pedersen::{pedersen_commit, pedersen_commit_at, pedersen_setup, pedersen_verify, PedersenParams};
pub use sig::{KeyPair, PublicKey, Signature};
