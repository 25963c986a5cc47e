//! Post-hoc audit functions over the fixed-point [`Engine`], so that one
//! implementation runs on shares and in the clear.

mod camel;
mod knn;
mod shap;
mod smoothing;

use serde::{Deserialize, Serialize};

use crate::error::{ArcError, Result};
use crate::mpc::fixed::{fx_decode, Engine};

pub use camel::{camel, camel_scores, mad_outliers, neg_log, CamelParams};
pub use knn::{distance_order, knn_shapley, knn_shapley_exact, knn_shapley_sorted};
pub use shap::{all_coalitions, coalitions, kernel_shap, kernel_shap_f64, shapley_kernel, solver_matrix, ShapParams};
pub use smoothing::{
    binomial_upper_tail, certify_fair, certify_rs, certifying_count, isotropic_noise, metric_noise, smoothing_decision, standard_noise, FairnessParams,
    RobustnessParams,
};

/// Allow-listed audit function ids.
pub const REGISTRY: [&str; 5] = ["certify-rs", "fairness", "knn-shapley", "camel", "kernel-shap"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnnParams {
    pub k: usize,
}

/// A registered function with its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "fn", content = "aux", rename_all = "kebab-case")]
pub enum AuditSpec {
    CertifyRs(RobustnessParams),
    Fairness(FairnessParams),
    KnnShapley(KnnParams),
    Camel(CamelParams),
    KernelShap(ShapParams),
}

impl AuditSpec {
    /// Parses `aux` for the function `id`; unknown ids are an error.
    pub fn parse(id: &str, aux: &serde_json::Value) -> Result<Self> {
        if !REGISTRY.contains(&id) {
            return Err(ArcError::InvalidParam(format!("audit function '{id}' is not registered")));
        }
        let v = serde_json::json!({ "fn": id, "aux": aux });
        serde_json::from_value(v).map_err(|e| ArcError::InvalidParam(format!("aux for {id}: {e}")))
    }

    pub fn id(&self) -> &'static str {
        match self {
            AuditSpec::CertifyRs(_) => "certify-rs",
            AuditSpec::Fairness(_) => "fairness",
            AuditSpec::KnnShapley(_) => "knn-shapley",
            AuditSpec::Camel(_) => "camel",
            AuditSpec::KernelShap(_) => "kernel-shap",
        }
    }

    pub fn aux(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("serializable")["aux"].clone()
    }
}

/// Everything an audit function may read, as engine values.
#[derive(Clone, Debug)]
pub struct AuditInputs<V> {
    pub x: Vec<V>,
    pub y: V,
    /// Model weights, bias last.
    pub model: Vec<V>,
    /// Per data holder: feature rows and fixed-point labels.
    pub parties: Vec<(Vec<Vec<V>>, Vec<V>)>,
}

/// The opened result. Fixed-point values are raw.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "fn", rename_all = "kebab-case")]
pub enum AuditOutput {
    CertifyRs { certified: bool },
    Fairness { certified: bool },
    KnnShapley { values: Vec<i64> },
    Camel { flagged: Vec<usize> },
    KernelShap { phi: Vec<i64> },
}

impl AuditOutput {
    pub fn decoded(&self) -> Vec<f64> {
        match self {
            AuditOutput::CertifyRs { certified } | AuditOutput::Fairness { certified } => vec![*certified as u8 as f64],
            AuditOutput::KnnShapley { values: v } | AuditOutput::KernelShap { phi: v } => v.iter().map(|r| fx_decode(*r)).collect(),
            AuditOutput::Camel { flagged } => flagged.iter().map(|i| *i as f64).collect(),
        }
    }
}

/// Label of the opening that releases an audit result.
pub const RESULT_LABEL: &str = "audit/result";

/// Runs `spec` and opens only its result. `seed` is public randomness for
/// noise and coalition sampling.
pub fn evaluate<E: Engine>(e: &mut E, spec: &AuditSpec, inp: &AuditInputs<E::V>, seed: u64) -> Result<AuditOutput> {
    if inp.model.len() != inp.x.len() + 1 {
        return Err(ArcError::LengthMismatch { expected: inp.x.len() + 1, got: inp.model.len() });
    }
    let rows: Vec<Vec<E::V>> = inp.parties.iter().flat_map(|(r, _)| r.iter().cloned()).collect();
    let labels: Vec<E::V> = inp.parties.iter().flat_map(|(_, l)| l.iter().cloned()).collect();
    Ok(match spec {
        AuditSpec::CertifyRs(p) => {
            let d = certify_rs(e, &inp.model, &inp.x, &inp.y, p, seed)?;
            AuditOutput::CertifyRs { certified: e.reveal(RESULT_LABEL, &[d])?[0] == 1 }
        }
        AuditSpec::Fairness(p) => {
            let d = certify_fair(e, &inp.model, &inp.x, &inp.y, p, seed)?;
            AuditOutput::Fairness { certified: e.reveal(RESULT_LABEL, &[d])?[0] == 1 }
        }
        AuditSpec::KnnShapley(p) => {
            let s = knn_shapley(e, &inp.x, &inp.y, &rows, &labels, p.k)?;
            AuditOutput::KnnShapley { values: e.reveal(RESULT_LABEL, &s)? }
        }
        AuditSpec::Camel(p) => {
            let f = camel(e, &inp.model, &inp.x, &inp.y, &inp.parties, p)?;
            let f = e.reveal(RESULT_LABEL, &f)?;
            AuditOutput::Camel { flagged: f.iter().enumerate().filter(|(_, v)| **v == 1).map(|(i, _)| i).collect() }
        }
        AuditSpec::KernelShap(p) => {
            let zs = coalitions(inp.x.len(), p, seed)?;
            let phi = kernel_shap(e, &inp.model, &inp.x, &rows, &zs, p.ridge)?;
            AuditOutput::KernelShap { phi: e.reveal(RESULT_LABEL, &phi)? }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_round_trip() {
        let s = AuditSpec::parse("knn-shapley", &serde_json::json!({"k": 3})).unwrap();
        assert_eq!(s, AuditSpec::KnnShapley(KnnParams { k: 3 }));
        assert_eq!(AuditSpec::parse(s.id(), &s.aux()).unwrap(), s);
        assert!(AuditSpec::parse("influence", &serde_json::json!({})).is_err());
        assert!(AuditSpec::parse("camel", &serde_json::json!({"epochs": 1})).is_err());
        for id in REGISTRY {
            assert!(AuditSpec::parse(id, &serde_json::json!(null)).is_err());
        }
    }
}
