//! The receipt pipeline: committed training, signed inference, and audits
//! that check every input against the receipt before computing on it.

mod keys;
pub mod parties;
mod pipeline;
pub mod plain;
mod receipt;

pub use keys::{derive_seed, KeyRing, PartyCounts, Pki};
pub use parties::{PartyId, Role};
pub use pipeline::{
    AuditOutcome, AuditRequest, Audited, ClientState, Fault, HolderState, Inferred, OwnerState, PhaseReport, Session, Trained, CONVERT,
};
pub use receipt::{
    commitments_message, inference_message, owner_message, receipt_size, verify_client, verify_receipt, verify_training, ClientOpenings,
    InferenceReceipt, Receipt, ReceiptFault, TrainingReceipt, MAGIC, VERSION,
};
