//! Logistic regression over the fixed-point [`Engine`](crate::mpc::Engine),
//! so that one implementation serves as both the MPC trainer and its
//! plaintext oracle.

mod logreg;

use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{ArcError, Result};
use crate::mpc::fixed::{fx_decode, fx_encode};

pub use logreg::{fine_tune, gradient, predict, shuffle_key_bits, surrogate_loss, train, train_plain, Model, TrainConfig, J_BITS};

const ADULT_TOY: &str = include_str!("../../data/adult_toy.csv");

/// Float features with 0/1 labels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<u8>,
}

/// Fixed-point encoding of a dataset (raw ring values, `FRAC_BITS` fraction).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedDataset {
    pub x: Vec<Vec<i64>>,
    pub y: Vec<i64>,
}

impl Dataset {
    /// CSV with a header row; the last column is the integer label.
    pub fn from_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let mut features = Vec::new();
        let mut labels = Vec::new();
        for (i, rec) in rd.records().enumerate() {
            let rec = rec.map_err(|e| ArcError::Malformed(format!("csv row {}: {e}", i + 1)))?;
            if rec.len() < 2 {
                return Err(ArcError::Malformed(format!("csv row {}: need features and a label", i + 1)));
            }
            let parse = |s: &str| s.trim().parse::<f64>().map_err(|e| ArcError::Malformed(format!("csv row {}: {e}", i + 1)));
            let row = rec.iter().take(rec.len() - 1).map(parse).collect::<Result<Vec<_>>>()?;
            let label: u8 = rec[rec.len() - 1]
                .trim()
                .parse()
                .map_err(|e| ArcError::Malformed(format!("csv row {}: label: {e}", i + 1)))?;
            if label > 1 {
                return Err(ArcError::Malformed(format!("csv row {}: label must be 0 or 1", i + 1)));
            }
            if let Some(first) = features.first().map(|f: &Vec<f64>| f.len()) {
                if row.len() != first {
                    return Err(ArcError::LengthMismatch { expected: first, got: row.len() });
                }
            }
            features.push(row);
            labels.push(label);
        }
        Ok(Dataset { features, labels })
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        Self::from_csv(std::fs::File::open(path)?)
    }

    /// Bundled 64-row synthetic table shaped like the Adult census data.
    pub fn adult_toy() -> Self {
        Self::from_csv(ADULT_TOY.as_bytes()).expect("bundled dataset parses")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn width(&self) -> usize {
        self.features.first().map_or(0, |r| r.len())
    }

    pub fn take(&self, n: usize) -> Self {
        Dataset { features: self.features[..n.min(self.len())].to_vec(), labels: self.labels[..n.min(self.len())].to_vec() }
    }

    /// Contiguous split into `parts` nearly equal pieces.
    pub fn split(&self, parts: usize) -> Vec<Dataset> {
        let n = self.len();
        (0..parts)
            .map(|p| {
                let (a, b) = (p * n / parts, (p + 1) * n / parts);
                Dataset { features: self.features[a..b].to_vec(), labels: self.labels[a..b].to_vec() }
            })
            .collect()
    }

    pub fn concat(parts: &[Dataset]) -> Dataset {
        Dataset {
            features: parts.iter().flat_map(|d| d.features.iter().cloned()).collect(),
            labels: parts.iter().flat_map(|d| d.labels.iter().copied()).collect(),
        }
    }

    pub fn encode(&self) -> FixedDataset {
        FixedDataset {
            x: self.features.iter().map(|r| r.iter().map(|v| fx_encode(*v)).collect()).collect(),
            y: self.labels.iter().map(|l| fx_encode(*l as f64)).collect(),
        }
    }
}

impl FixedDataset {
    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn width(&self) -> usize {
        self.x.first().map_or(0, |r| r.len())
    }

    /// Row-major values followed by the labels: the committed vector.
    pub fn flatten(&self) -> Vec<i64> {
        let mut v: Vec<i64> = self.x.iter().flatten().copied().collect();
        v.extend_from_slice(&self.y);
        v
    }

    pub fn unflatten(v: &[i64], rows: usize, width: usize) -> Result<Self> {
        if v.len() != rows * (width + 1) {
            return Err(ArcError::LengthMismatch { expected: rows * (width + 1), got: v.len() });
        }
        let x = v[..rows * width].chunks(width.max(1)).take(rows).map(|r| r.to_vec()).collect();
        let x = if width == 0 { vec![Vec::new(); rows] } else { x };
        Ok(FixedDataset { x, y: v[rows * width..].to_vec() })
    }

    pub fn decode(&self) -> Dataset {
        Dataset {
            features: self.x.iter().map(|r| r.iter().map(|v| fx_decode(*v)).collect()).collect(),
            labels: self.y.iter().map(|v| (fx_decode(*v) >= 0.5) as u8).collect(),
        }
    }
}
