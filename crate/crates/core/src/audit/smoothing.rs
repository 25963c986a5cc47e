//! Certification by a one-sided binomial test on predictions under Gaussian
//! noise, for robustness (isotropic noise) and individual fairness (noise
//! with covariance Theta^-1).

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{ArcError, Result};
use crate::ml::predict;
use crate::mpc::fixed::{fx_encode, sum, Engine};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobustnessParams {
    pub radius: f64,
    pub sigma: f64,
    pub n: usize,
    pub alpha: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FairnessParams {
    pub lipschitz: f64,
    /// Symmetric positive definite metric, one row per feature.
    pub theta: Vec<Vec<f64>>,
    pub n: usize,
    pub alpha: f64,
}

impl RobustnessParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0) || !(self.alpha > 0.0 && self.alpha < 1.0) || self.radius < 0.0 {
            return Err(ArcError::InvalidParam("need sigma > 0, radius >= 0 and 0 < alpha < 1".into()));
        }
        Ok(())
    }

    pub fn tau(&self) -> f64 {
        std_normal_cdf(self.radius / self.sigma)
    }
}

impl FairnessParams {
    pub fn tau(&self) -> f64 {
        std_normal_cdf((1.0 / self.lipschitz).sqrt())
    }
}

fn std_normal_cdf(x: f64) -> f64 {
    Normal::new(0.0, 1.0).expect("unit normal").cdf(x)
}

/// Exact binomial coefficient while it fits, else through log-gamma.
fn binomial(n: u64, k: u64) -> f64 {
    if n <= 120 {
        let k = k.min(n - k);
        let mut c: u128 = 1;
        for i in 0..k {
            c = c * (n - i) as u128 / (i + 1) as u128;
        }
        c as f64
    } else {
        statrs::function::factorial::ln_binomial(n, k).exp()
    }
}

/// P[X >= count] for X ~ Bin(n, tau), summed term by term with Kahan
/// compensation.
pub fn binomial_upper_tail(n: u64, count: u64, tau: f64) -> f64 {
    if count == 0 {
        return 1.0;
    }
    if count > n {
        return 0.0;
    }
    let (mut s, mut comp) = (0.0f64, 0.0f64);
    for i in count..=n {
        let term = binomial(n, i) * tau.powi(i as i32) * (1.0 - tau).powi((n - i) as i32);
        let y = term - comp;
        let t = s + y;
        comp = (t - s) - y;
        s = t;
    }
    s.min(1.0)
}

/// Smallest count whose tail probability is at most `alpha` (n + 1 if none).
pub fn certifying_count(n: u64, tau: f64, alpha: f64) -> u64 {
    (0..=n).find(|&k| binomial_upper_tail(n, k, tau) <= alpha).unwrap_or(n + 1)
}

/// Standard normal draws, `n` rows of `width`, from a public seed.
pub fn standard_noise(seed: u64, n: usize, width: usize) -> Vec<Vec<f64>> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    (0..n).map(|_| (0..width).map(|_| StandardNormal.sample(&mut rng)).collect()).collect()
}

pub fn isotropic_noise(seed: u64, n: usize, width: usize, sigma: f64) -> Vec<Vec<f64>> {
    standard_noise(seed, n, width).into_iter().map(|z| z.into_iter().map(|v| sigma * v).collect()).collect()
}

/// Draws with covariance Theta^-1, through the Cholesky factor of Theta^-1.
pub fn metric_noise(seed: u64, n: usize, theta: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let d = theta.len();
    if theta.iter().any(|r| r.len() != d) {
        return Err(ArcError::NotSpd);
    }
    let m = DMatrix::from_fn(d, d, |i, j| theta[i][j]);
    if (0..d).any(|i| (0..i).any(|j| (m[(i, j)] - m[(j, i)]).abs() > 1e-12 * (1.0 + m[(i, j)].abs()))) {
        return Err(ArcError::NotSpd);
    }
    let inv = m.cholesky().ok_or(ArcError::NotSpd)?.inverse();
    let l = inv.cholesky().ok_or(ArcError::NotSpd)?.l();
    Ok(standard_noise(seed, n, d)
        .into_iter()
        .map(|z| (0..d).map(|i| (0..=i).map(|j| l[(i, j)] * z[j]).sum()).collect())
        .collect())
}

/// Count of noisy copies of `x` that the model labels `y`, scaled by 2^32.
/// Labels are fixed-point 0 or 1, so (label - y)^2 is 0 or 2^32 exactly.
fn scaled_matches<E: Engine>(e: &mut E, w: &[E::V], x: &[E::V], y: &E::V, noise: &[Vec<f64>]) -> Result<E::V> {
    let rows: Vec<Vec<E::V>> = noise
        .iter()
        .map(|d| x.iter().zip(d).map(|(xi, di)| e.add_const(xi, fx_encode(*di))).collect())
        .collect();
    let (_, labels) = predict(e, w, &rows)?;
    let diff: Vec<E::V> = labels.iter().map(|l| e.sub(l, y)).collect();
    let sq = e.mul(&diff, &diff)?;
    let miss = sum(e, &sq);
    Ok(e.add_const(&e.mul_const(&miss, -1), (noise.len() as i64) << 32))
}

/// Shared decision bit: 1 iff the match count reaches `threshold`.
pub fn smoothing_decision<E: Engine>(e: &mut E, w: &[E::V], x: &[E::V], y: &E::V, noise: &[Vec<f64>], threshold: u64) -> Result<E::V> {
    if let Some(d) = noise.iter().find(|d| d.len() != x.len()) {
        return Err(ArcError::LengthMismatch { expected: x.len(), got: d.len() });
    }
    if threshold > noise.len() as u64 {
        return Ok(e.constant(0));
    }
    let m = scaled_matches(e, w, x, y, noise)?;
    let short = e.ltz(&[e.add_const(&m, -((threshold as i64) << 32))])?;
    Ok(e.add_const(&e.mul_const(&short[0], -1), 1))
}

pub fn certify_rs<E: Engine>(e: &mut E, w: &[E::V], x: &[E::V], y: &E::V, p: &RobustnessParams, seed: u64) -> Result<E::V> {
    p.validate()?;
    let noise = isotropic_noise(seed, p.n, x.len(), p.sigma);
    smoothing_decision(e, w, x, y, &noise, certifying_count(p.n as u64, p.tau(), p.alpha))
}

pub fn certify_fair<E: Engine>(e: &mut E, w: &[E::V], x: &[E::V], y: &E::V, p: &FairnessParams, seed: u64) -> Result<E::V> {
    if !(p.lipschitz > 0.0) || !(p.alpha > 0.0 && p.alpha < 1.0) {
        return Err(ArcError::InvalidParam("need L > 0 and 0 < alpha < 1".into()));
    }
    if p.theta.len() != x.len() {
        return Err(ArcError::LengthMismatch { expected: x.len(), got: p.theta.len() });
    }
    let noise = metric_noise(seed, p.n, &p.theta)?;
    smoothing_decision(e, w, x, y, &noise, certifying_count(p.n as u64, p.tau(), p.alpha))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mpc::PlainEngine;

    #[test]
    fn constant_classifier_certifies() {
        let p = binomial_upper_tail(10, 10, 0.7);
        assert!((p - 0.7f64.powi(10)).abs() < 1e-15);
        assert!((p - 0.0282).abs() < 1e-4);
        assert_eq!(certifying_count(10, 0.7, 0.05), 10);

        let mut e = PlainEngine::default();
        // bias 5 saturates the sigmoid, so the label is always 1
        let w = vec![0, 0, fx_encode(5.0)];
        let x = vec![fx_encode(0.3), fx_encode(-1.0)];
        let y = fx_encode(1.0);
        let noise = vec![vec![0.1, -0.2]; 10];
        assert_eq!(smoothing_decision(&mut e, &w, &x, &y, &noise, 10).unwrap(), 1);
        assert_eq!(smoothing_decision(&mut e, &w, &x, &0, &noise, 10).unwrap(), 0);
    }

    #[test]
    fn tail_edges() {
        assert_eq!(binomial_upper_tail(10, 0, 0.7), 1.0);
        assert_eq!(binomial_upper_tail(10, 11, 0.7), 0.0);
        // tau near one: nothing short of all n can certify, and even that fails
        let tau = std_normal_cdf(40.0);
        for c in 0..=20 {
            assert!(binomial_upper_tail(20, c, tau) > 0.05);
        }
        assert!((binomial_upper_tail(300, 150, 0.5) - 0.5230).abs() < 1e-3);
    }

    #[test]
    fn non_spd_theta_rejected() {
        assert_eq!(metric_noise(1, 3, &[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap_err(), ArcError::NotSpd);
        assert_eq!(metric_noise(1, 3, &[vec![1.0, 0.5], vec![0.0, 1.0]]).unwrap_err(), ArcError::NotSpd);
        let z = metric_noise(1, 3, &[vec![4.0, 0.0], vec![0.0, 0.25]]).unwrap();
        let s = standard_noise(1, 3, 2);
        assert!((z[0][0] - 0.5 * s[0][0]).abs() < 1e-12);
        assert!((z[0][1] - 2.0 * s[0][1]).abs() < 1e-12);
    }
}
