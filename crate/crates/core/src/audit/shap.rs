//! KernelSHAP: a Shapley-weighted linear fit over feature coalitions, with
//! phi_0 pinned to v(empty) and the sum of phi pinned to v(full) - v(empty).
//! Coalitions are public, so the fit reduces to a public matrix applied to
//! the vector of marginal values; only the marginals are computed on shares.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ArcError, Result};
use crate::mpc::fixed::{dot_rows, fx_encode, sigmoid, sum, Engine, FRAC_BITS};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapParams {
    /// Coalitions to fit on; all proper non-empty subsets when this is at
    /// least 2^n - 2.
    pub samples: usize,
    pub ridge: f64,
}

impl Default for ShapParams {
    fn default() -> Self {
        ShapParams { samples: 64, ridge: 1e-10 }
    }
}

pub fn shapley_kernel(n: usize, size: usize) -> f64 {
    let c = statrs::function::factorial::binomial(n as u64, size as u64);
    (n - 1) as f64 / (c * size as f64 * (n - size) as f64)
}

pub fn all_coalitions(n: usize) -> Vec<Vec<bool>> {
    (1..(1u64 << n) - 1).map(|m| (0..n).map(|i| m >> i & 1 == 1).collect()).collect()
}

/// Coalitions of size 1..n-1: exhaustive when affordable, else drawn
/// uniformly from a public seed.
pub fn coalitions(n: usize, p: &ShapParams, seed: u64) -> Result<Vec<Vec<bool>>> {
    if n < 2 {
        return Err(ArcError::InvalidParam("need at least two features".into()));
    }
    if p.samples < n + 1 {
        return Err(ArcError::InvalidParam(format!("need at least {} coalitions", n + 1)));
    }
    if n < 63 && p.samples as u64 >= (1u64 << n) - 2 {
        return Ok(all_coalitions(n));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(p.samples);
    while out.len() < p.samples {
        let z: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
        let k = z.iter().filter(|b| **b).count();
        if k > 0 && k < n {
            out.push(z);
        }
    }
    Ok(out)
}

/// Matrix T with phi = T v, where v = (v(empty), v(z_1), .., v(z_K), v(full)).
pub fn solver_matrix(n: usize, zs: &[Vec<bool>], ridge: f64) -> Result<Vec<Vec<f64>>> {
    let k = zs.len();
    let b = |v: bool| v as u8 as f64;
    // eliminate phi_n through the sum constraint
    let x = DMatrix::from_fn(k, n - 1, |r, c| b(zs[r][c]) - b(zs[r][n - 1]));
    let wts = DVector::from_iterator(k, zs.iter().map(|z| shapley_kernel(n, z.iter().filter(|v| **v).count())));
    let xtw = DMatrix::from_fn(n - 1, k, |r, c| x[(c, r)] * wts[c]);
    let m = &xtw * &x + DMatrix::identity(n - 1, n - 1) * ridge;
    let a = m.cholesky().ok_or(ArcError::Singular)?.solve(&xtw);
    if a.iter().any(|v| !v.is_finite()) {
        return Err(ArcError::Singular);
    }

    // phi_i = sum_k a_ik (y_k - v0 - z_kn (v1 - v0)) for i < n
    let mut t = vec![vec![0.0; k + 2]; n + 1];
    t[0][0] = 1.0;
    for i in 0..n - 1 {
        for c in 0..k {
            let zn = b(zs[c][n - 1]);
            t[i + 1][c + 1] += a[(i, c)];
            t[i + 1][0] += a[(i, c)] * (zn - 1.0);
            t[i + 1][k + 1] -= a[(i, c)] * zn;
        }
    }
    let mut last = vec![0.0; k + 2];
    last[0] = -1.0;
    last[k + 1] = 1.0;
    for row in &t[1..n] {
        for (l, v) in last.iter_mut().zip(row) {
            *l -= v;
        }
    }
    t[n] = last;
    Ok(t)
}

fn mix<T: Clone>(z: &[bool], x: &[T], row: &[T]) -> Vec<T> {
    z.iter().zip(x.iter().zip(row)).map(|(&on, (a, b))| if on { a.clone() } else { b.clone() }).collect()
}

/// Float reference: v(z) averages the model over the data with the
/// coalition's features taken from `x`.
pub fn kernel_shap_f64<M: Fn(&[f64]) -> f64>(model: M, x: &[f64], data: &[Vec<f64>], zs: &[Vec<bool>], ridge: f64) -> Result<Vec<f64>> {
    let n = x.len();
    if n < 2 || data.is_empty() {
        return Err(ArcError::InvalidParam("need two features and some data".into()));
    }
    let t = solver_matrix(n, zs, ridge)?;
    let value = |z: &[bool]| data.iter().map(|r| model(&mix(z, x, r))).sum::<f64>() / data.len() as f64;
    let mut v = vec![value(&vec![false; n])];
    v.extend(zs.iter().map(|z| value(z)));
    v.push(model(x));
    Ok(t.iter().map(|row| row.iter().zip(&v).map(|(a, b)| a * b).sum()).collect())
}

fn scores<E: Engine>(e: &mut E, w: &[E::V], rows: Vec<Vec<E::V>>) -> Result<Vec<E::V>> {
    let one = e.constant(fx_encode(1.0));
    let rows: Vec<Vec<E::V>> = rows
        .into_iter()
        .map(|mut r| {
            r.push(one.clone());
            r
        })
        .collect();
    let z = dot_rows(e, &rows, w, FRAC_BITS)?;
    sigmoid(e, &z)
}

/// phi_0..phi_n in fixed point for the logistic model `w`.
pub fn kernel_shap<E: Engine>(e: &mut E, w: &[E::V], x: &[E::V], rows: &[Vec<E::V>], zs: &[Vec<bool>], ridge: f64) -> Result<Vec<E::V>> {
    let n = x.len();
    if n < 2 || rows.is_empty() {
        return Err(ArcError::InvalidParam("need two features and some data".into()));
    }
    if w.len() != n + 1 {
        return Err(ArcError::LengthMismatch { expected: n + 1, got: w.len() });
    }
    let t = solver_matrix(n, zs, ridge)?;
    let empty = vec![false; n];
    let mut mixed = Vec::with_capacity((zs.len() + 1) * rows.len() + 1);
    for z in std::iter::once(&empty).chain(zs) {
        for r in rows {
            mixed.push(mix(z, x, r));
        }
    }
    mixed.push(x.to_vec());
    let s = scores(e, w, mixed)?;
    let inv = fx_encode(1.0 / rows.len() as f64);
    let mut v: Vec<E::V> = s[..s.len() - 1].chunks(rows.len()).map(|c| e.mul_const(&sum(e, c), inv)).collect();
    v = e.trunc(&v, FRAC_BITS)?;
    v.push(s[s.len() - 1].clone());

    let phi: Vec<E::V> = t
        .iter()
        .map(|row| {
            let terms: Vec<E::V> = row.iter().zip(&v).map(|(a, b)| e.mul_const(b, fx_encode(*a))).collect();
            sum(e, &terms)
        })
        .collect();
    e.trunc(&phi, FRAC_BITS)
}
