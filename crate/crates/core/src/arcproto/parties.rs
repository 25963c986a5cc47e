use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    DataHolder,
    ModelOwner,
    Client,
    TrainComputer,
    InferComputer,
    AuditComputer,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PartyId {
    pub role: Role,
    pub index: usize,
}

impl fmt::Display for PartyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.role {
            Role::DataHolder => write!(f, "DH_{}", self.index),
            Role::ModelOwner => write!(f, "M"),
            Role::Client => write!(f, "C"),
            Role::TrainComputer => write!(f, "TC_{}", self.index),
            Role::InferComputer => write!(f, "IC_{}", self.index),
            Role::AuditComputer => write!(f, "AC_{}", self.index),
        }
    }
}

impl PartyId {
    pub fn dh(index: usize) -> Self {
        PartyId { role: Role::DataHolder, index }
    }
    pub fn owner() -> Self {
        PartyId { role: Role::ModelOwner, index: 0 }
    }
    pub fn client() -> Self {
        PartyId { role: Role::Client, index: 0 }
    }
    pub fn computer(role: Role, index: usize) -> Self {
        PartyId { role, index }
    }
}

impl std::str::FromStr for Role {
    type Err = crate::error::ArcError;
    fn from_str(s: &str) -> crate::error::Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "dh" => Role::DataHolder,
            "m" => Role::ModelOwner,
            "c" => Role::Client,
            "tc" => Role::TrainComputer,
            "ic" => Role::InferComputer,
            "ac" => Role::AuditComputer,
            _ => return Err(crate::error::ArcError::InvalidParam(format!("unknown role `{s}`"))),
        })
    }
}
