use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use arc_core::arcproto::PartyCounts;
use arc_core::audit::{AuditSpec, REGISTRY};
use arc_core::ml::{Dataset, TrainConfig};
use arc_core::poc::PocVariant;

use crate::Failure;

pub const BUNDLED: &[(&str, &str)] = &[("adult-toy", include_str!("../scenarios/adult-toy.toml"))];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldBackend {
    Mock,
    Curve,
}

impl FromStr for FieldBackend {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "mock" => Ok(FieldBackend::Mock),
            "curve" => Ok(FieldBackend::Curve),
            _ => Err(format!("unknown field backend `{s}` (expected mock or curve)")),
        }
    }
}

fn default_name() -> String {
    "scenario".into()
}
fn default_seed() -> u64 {
    1
}
fn default_dataset() -> String {
    "adult-toy".into()
}

#[derive(Clone, Debug, Deserialize)]
pub struct AuditCfg {
    #[serde(rename = "fn")]
    pub function: String,
    #[serde(default = "empty_aux")]
    pub aux: serde_json::Value,
}

fn empty_aux() -> serde_json::Value {
    serde_json::json!({})
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(default = "default_seed")]
    pub seed: u64,
    pub backend: String,
    pub field: Option<String>,
    #[serde(default = "default_dataset")]
    pub dataset: String,
    /// Leading rows used for training; all rows when absent.
    pub rows: Option<usize>,
    /// Row of the full dataset whose features form the client's query.
    #[serde(default)]
    pub query: usize,
    #[serde(default)]
    pub parties: PartyCounts,
    #[serde(default)]
    pub train: TrainConfig,
    pub audit: AuditCfg,
    /// Directory of a config file, for resolving relative dataset paths.
    #[serde(skip)]
    pub base: PathBuf,
}

impl Scenario {
    /// A bundled scenario name or a path to a TOML file.
    pub fn load(spec: &str) -> Result<Self, Failure> {
        if let Some((_, text)) = BUNDLED.iter().find(|(n, _)| *n == spec) {
            return Self::parse(text, PathBuf::from("."));
        }
        let path = Path::new(spec);
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read config {spec}: {e}")))?;
        Self::parse(&text, path.parent().map(Path::to_path_buf).unwrap_or_default())
    }

    pub fn parse(text: &str, base: PathBuf) -> Result<Self, Failure> {
        let mut s: Scenario = toml::from_str(text).map_err(|e| Failure::Usage(format!("config: {e}")))?;
        s.base = base;
        s.variant()?;
        s.parties.validate().map_err(|e| Failure::Usage(e.to_string()))?;
        if !REGISTRY.contains(&s.audit.function.as_str()) {
            return Err(Failure::Usage(format!("audit function `{}` is not registered (known: {})", s.audit.function, REGISTRY.join(", "))));
        }
        AuditSpec::parse(&s.audit.function, &s.audit.aux).map_err(|e| Failure::Usage(e.to_string()))?;
        if let Some(f) = &s.field {
            FieldBackend::from_str(f).map_err(Failure::Usage)?;
        }
        Ok(s)
    }

    pub fn variant(&self) -> Result<PocVariant, Failure> {
        PocVariant::from_str(&self.backend).map_err(|e| Failure::Usage(e.to_string()))
    }

    /// ARC_FIELD_BACKEND wins over the config's `field` key.
    pub fn field_backend(&self) -> Result<FieldBackend, Failure> {
        field_backend(self.field.as_deref())
    }

    pub fn dataset(&self) -> Result<Dataset, Failure> {
        if self.dataset == "adult-toy" {
            return Ok(Dataset::adult_toy());
        }
        let p = self.base.join(&self.dataset);
        Dataset::from_path(&p).map_err(|e| Failure::Usage(format!("dataset {}: {e}", p.display())))
    }
}

pub fn field_backend(fallback: Option<&str>) -> Result<FieldBackend, Failure> {
    match std::env::var("ARC_FIELD_BACKEND") {
        Ok(v) if !v.is_empty() => FieldBackend::from_str(&v).map_err(|e| Failure::Usage(format!("ARC_FIELD_BACKEND: {e}"))),
        _ => fallback.map_or(Ok(FieldBackend::Mock), |f| FieldBackend::from_str(f).map_err(Failure::Usage)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_scenario_parses() {
        let s = Scenario::load("adult-toy").unwrap();
        assert_eq!(s.variant().unwrap(), PocVariant::Poly);
        assert_eq!(s.parties, PartyCounts::default());
        assert_eq!(s.audit.aux["k"], 3);
    }

    #[test]
    fn rejects_unknown_backend_and_function() {
        let base = BUNDLED[0].1;
        assert!(matches!(Scenario::parse(&base.replace("\"poly\"", "\"sha3\""), PathBuf::new()), Err(Failure::Usage(_))));
        assert!(matches!(Scenario::parse(&base.replace("knn-shapley", "gradient-leak"), PathBuf::new()), Err(Failure::Usage(_))));
    }
}
