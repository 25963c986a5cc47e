//! Closed-form Shapley values of the K-nearest-neighbour utility
//! u(S) = (1/K) * #{label = y among the min(K, |S|) points of S nearest x},
//! computed in one pass from the farthest point inwards.

use num_rational::Rational64;

use crate::error::{ArcError, Result};
use crate::ml::shuffle_key_bits;
use crate::mpc::fixed::{bitonic_sort, fx_encode, sum, Engine, FRAC_BITS};

fn coeff(k: usize, i: usize) -> Rational64 {
    Rational64::new(k.min(i) as i64, (k * i) as i64)
}

/// Values for points already sorted by distance, nearest first; `z[i]`
/// says whether point i carries the queried label.
pub fn knn_shapley_sorted(z: &[bool], k: usize) -> Result<Vec<Rational64>> {
    let n = z.len();
    if n == 0 {
        return Err(ArcError::InvalidParam("empty dataset".into()));
    }
    if k == 0 {
        return Err(ArcError::InvalidParam("K must be at least 1".into()));
    }
    let zi = |i: usize| Rational64::from_integer(z[i - 1] as i64);
    let mut s = vec![Rational64::from_integer(0); n];
    // Z_n / n once |D| >= K; the general form keeps small sets exact
    s[n - 1] = zi(n) * coeff(k, n);
    for i in (1..n).rev() {
        s[i - 1] = s[i] + (zi(i) - zi(i + 1)) * coeff(k, i);
    }
    Ok(s)
}

/// Order of rows by squared distance to `x`, ties by index.
pub fn distance_order(x: &[f64], rows: &[Vec<f64>]) -> Vec<usize> {
    let d: Vec<f64> = rows.iter().map(|r| r.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum()).collect();
    let mut idx: Vec<usize> = (0..rows.len()).collect();
    idx.sort_by(|&a, &b| d[a].total_cmp(&d[b]).then(a.cmp(&b)));
    idx
}

/// Exact values aligned to the original row order.
pub fn knn_shapley_exact(x: &[f64], y: u8, rows: &[Vec<f64>], labels: &[u8], k: usize) -> Result<Vec<Rational64>> {
    let order = distance_order(x, rows);
    let z: Vec<bool> = order.iter().map(|&i| labels[i] == y).collect();
    let s = knn_shapley_sorted(&z, k)?;
    let mut out = vec![Rational64::from_integer(0); rows.len()];
    for (pos, &i) in order.iter().enumerate() {
        out[i] = s[pos];
    }
    Ok(out)
}

/// Fixed-point values aligned to the original rows. Distances, the sort and
/// the label matches stay secret; only the result is revealed by the caller.
pub fn knn_shapley<E: Engine>(e: &mut E, x: &[E::V], y: &E::V, rows: &[Vec<E::V>], labels: &[E::V], k: usize) -> Result<Vec<E::V>> {
    let n = rows.len();
    if n == 0 {
        return Err(ArcError::InvalidParam("empty dataset".into()));
    }
    if k == 0 {
        return Err(ArcError::InvalidParam("K must be at least 1".into()));
    }
    if labels.len() != n {
        return Err(ArcError::LengthMismatch { expected: n, got: labels.len() });
    }
    let mut diffs = Vec::with_capacity(n * x.len());
    for r in rows {
        if r.len() != x.len() {
            return Err(ArcError::LengthMismatch { expected: x.len(), got: r.len() });
        }
        diffs.extend(r.iter().zip(x).map(|(a, b)| e.sub(a, b)));
    }
    let sq = e.mul(&diffs, &diffs)?;
    let dist: Vec<E::V> = sq.chunks(x.len().max(1)).map(|c| sum(e, c)).collect();
    let dist = if x.is_empty() { vec![e.constant(0); n] } else { e.trunc(&dist, FRAC_BITS)? };

    // (label - y)^2 is 0 or 2^32, so the match bit in fixed point is exact
    let ld: Vec<E::V> = labels.iter().map(|l| e.sub(l, y)).collect();
    let ld2 = e.mul(&ld, &ld)?;
    let z_scaled: Vec<E::V> = ld2.iter().map(|v| e.add_const(&e.mul_const(v, -1), 1i64 << (2 * FRAC_BITS))).collect();
    let z = e.trunc(&z_scaled, FRAC_BITS)?;

    let b = shuffle_key_bits(n);
    let keys: Vec<E::V> = dist.iter().enumerate().map(|(i, d)| e.add_const(&e.mul_const(d, 1i64 << b), i as i64)).collect();
    let payload: Vec<Vec<E::V>> = z.iter().enumerate().map(|(i, zi)| vec![zi.clone(), e.constant(i as i64)]).collect();
    let (_, sorted) = bitonic_sort(e, &keys, &payload)?;

    // terms[i-1] = (Z_i - Z_{i+1}) * c_i and terms[n-1] = Z_n * c_n,
    // with c_i = min(K, i) / (K i)
    let mut terms = Vec::with_capacity(n);
    for i in 1..n {
        let d = e.sub(&sorted[i - 1][0], &sorted[i][0]);
        let c = coeff(k, i);
        terms.push(e.mul_const(&d, fx_encode(*c.numer() as f64 / *c.denom() as f64)));
    }
    let c = coeff(k, n);
    terms.push(e.mul_const(&sorted[n - 1][0], fx_encode(*c.numer() as f64 / *c.denom() as f64)));
    let terms = e.trunc(&terms, FRAC_BITS)?;
    let mut s = vec![e.constant(0); n];
    let mut acc = e.constant(0);
    for i in (0..n).rev() {
        acc = e.add(&acc, &terms[i]);
        s[i] = acc.clone();
    }

    let back_keys: Vec<E::V> = sorted.iter().map(|r| r[1].clone()).collect();
    let back: Vec<Vec<E::V>> = s.into_iter().map(|v| vec![v]).collect();
    let (_, aligned) = bitonic_sort(e, &back_keys, &back)?;
    Ok(aligned.into_iter().map(|mut r| r.remove(0)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn hand_recursion() {
        assert_eq!(knn_shapley_sorted(&[true, false, true], 1).unwrap(), vec![r(5, 6), r(-1, 6), r(1, 3)]);
        assert_eq!(knn_shapley_sorted(&[true], 1).unwrap(), vec![r(1, 1)]);
        assert_eq!(knn_shapley_sorted(&[true], 3).unwrap(), vec![r(1, 3)]);
        assert_eq!(knn_shapley_sorted(&[true; 4], 4).unwrap(), vec![r(1, 4); 4]);
        assert!(knn_shapley_sorted(&[], 1).is_err());
    }

    #[test]
    fn ties_break_by_index() {
        let rows = vec![vec![1.0], vec![-1.0], vec![0.5]];
        assert_eq!(distance_order(&[0.0], &rows), vec![2, 0, 1]);
    }
}
