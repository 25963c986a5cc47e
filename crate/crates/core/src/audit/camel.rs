//! Party-level attribution by approximate unlearning: each party's labels
//! are replaced with the uniform 0.5, the model is fine-tuned, and parties
//! whose removal moves the loss on the query far from the others (in MAD
//! units) are reported.

use serde::{Deserialize, Serialize};

use crate::error::{ArcError, Result};
use crate::ml::{fine_tune, TrainConfig};
use crate::mpc::fixed::{abs, dot_rows, fx_encode, fx_mul, fx_mul_const, median, pwl, sigmoid, Engine, FRAC_BITS};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CamelParams {
    pub epochs: usize,
    pub tau: f64,
    pub lr: f64,
    pub batch_size: usize,
}

impl Default for CamelParams {
    fn default() -> Self {
        CamelParams { epochs: 3, tau: 3.5, lr: 0.5, batch_size: 8 }
    }
}

/// Knots of the interpolated -ln(p): p = 2^-10, 2^-9, ..., 1.
const LOG_KNOTS: u32 = 10;

/// -ln(p) interpolated linearly between dyadic knots, clamped to its value
/// at 2^-10 below and to 0 above 1.
pub fn neg_log<E: Engine>(e: &mut E, ps: &[E::V]) -> Result<Vec<E::V>> {
    let pts: Vec<f64> = (0..=LOG_KNOTS).map(|k| 2f64.powi(k as i32 - LOG_KNOTS as i32)).collect();
    let knots: Vec<i64> = pts.iter().map(|p| fx_encode(*p)).collect();
    let slopes: Vec<i64> = pts.windows(2).map(|w| fx_encode((w[0].ln() - w[1].ln()) / (w[1] - w[0]))).collect();
    pwl(e, ps, &knots, fx_encode(LOG_KNOTS as f64 * std::f64::consts::LN_2), &slopes, FRAC_BITS)
}

/// Cross-entropy of the model's score on (x, y), y in fixed-point {0, 1}.
fn query_loss<E: Engine>(e: &mut E, w: &[E::V], xb: &[E::V], y: &E::V) -> Result<E::V> {
    let z = dot_rows(e, &[xb.to_vec()], w, FRAC_BITS)?;
    let s = sigmoid(e, &z)?.remove(0);
    // p(y) = (1 - s) + y (2s - 1)
    let two_s_minus_one = e.add_const(&e.mul_const(&s, 2), -fx_encode(1.0));
    let t = fx_mul(e, std::slice::from_ref(y), &[two_s_minus_one], FRAC_BITS)?.remove(0);
    let p = e.add(&e.add_const(&e.mul_const(&s, -1), fx_encode(1.0)), &t);
    Ok(neg_log(e, &[p])?.remove(0))
}

/// Per-party losses after unlearning that party.
pub fn camel_scores<E: Engine>(
    e: &mut E,
    w: &[E::V],
    x: &[E::V],
    y: &E::V,
    parties: &[(Vec<Vec<E::V>>, Vec<E::V>)],
    p: &CamelParams,
) -> Result<Vec<E::V>> {
    let cfg = TrainConfig { epochs: p.epochs, lr: p.lr, batch_size: p.batch_size };
    let mut xb = x.to_vec();
    xb.push(e.constant(fx_encode(1.0)));
    let rows: Vec<Vec<E::V>> = parties.iter().flat_map(|(r, _)| r.iter().cloned()).collect();
    let mut scores = Vec::with_capacity(parties.len());
    for i in 0..parties.len() {
        let labels: Vec<E::V> = parties
            .iter()
            .enumerate()
            .flat_map(|(j, (r, l))| if i == j { vec![e.constant(fx_encode(0.5)); r.len()] } else { l.clone() })
            .collect();
        let wi = fine_tune(e, w, &rows, &labels, &cfg)?;
        scores.push(query_loss(e, &wi, &xb, y)?);
    }
    Ok(scores)
}

/// Shared flags: 1 where |score - median| > tau * (MAD + eps), eps one
/// fixed-point unit.
pub fn mad_outliers<E: Engine>(e: &mut E, scores: &[E::V], tau: f64) -> Result<Vec<E::V>> {
    let med = median(e, scores)?;
    let dev: Vec<E::V> = scores.iter().map(|s| e.sub(s, &med)).collect();
    let dev = abs(e, &dev)?;
    let mad = median(e, &dev)?;
    let thr = fx_mul_const(e, &[e.add_const(&mad, 1)], fx_encode(tau), FRAC_BITS)?.remove(0);
    let gaps: Vec<E::V> = dev.iter().map(|d| e.sub(&thr, d)).collect();
    e.ltz(&gaps)
}

pub fn camel<E: Engine>(
    e: &mut E,
    w: &[E::V],
    x: &[E::V],
    y: &E::V,
    parties: &[(Vec<Vec<E::V>>, Vec<E::V>)],
    p: &CamelParams,
) -> Result<Vec<E::V>> {
    if parties.is_empty() {
        return Err(ArcError::InvalidParam("no parties to attribute".into()));
    }
    if !(p.tau > 0.0) {
        return Err(ArcError::InvalidParam("tau must be positive".into()));
    }
    let scores = camel_scores(e, w, x, y, parties, p)?;
    mad_outliers(e, &scores, p.tau)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mpc::fixed::fx_decode;
    use crate::mpc::PlainEngine;

    #[test]
    fn neg_log_matches_at_knots() {
        let mut e = PlainEngine::default();
        let ps = [fx_encode(1.0), fx_encode(0.5), fx_encode(0.25), 0, fx_encode(2.0)];
        let v = neg_log(&mut e, &ps).unwrap();
        assert!(fx_decode(v[0]).abs() < 1e-3);
        assert!((fx_decode(v[1]) - 0.5f64.ln().abs()).abs() < 1e-3);
        assert!((fx_decode(v[2]) - 0.25f64.ln().abs()).abs() < 1e-3);
        assert!((fx_decode(v[3]) - 10.0 * std::f64::consts::LN_2).abs() < 1e-3);
        assert!(fx_decode(v[4]).abs() < 1e-3);
    }

    #[test]
    fn ties_flag_nobody() {
        let mut e = PlainEngine::default();
        let s = vec![fx_encode(0.7); 3];
        assert_eq!(mad_outliers(&mut e, &s, 3.5).unwrap(), vec![0, 0, 0]);
        let s = vec![fx_encode(0.7), fx_encode(0.7), fx_encode(2.0)];
        assert_eq!(mad_outliers(&mut e, &s, 3.5).unwrap(), vec![0, 0, 1]);
        let s = vec![fx_encode(1.0), fx_encode(1.1), fx_encode(1.2), fx_encode(0.9), fx_encode(1.05)];
        assert_eq!(mad_outliers(&mut e, &s, 3.5).unwrap(), vec![0; 5]);
    }
}
