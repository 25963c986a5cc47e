use serde::{Deserialize, Serialize};

use super::{Dataset, FixedDataset};
use crate::error::{ArcError, Result};
use crate::mpc::fixed::{bitonic_sort, dot_rows, fx_decode, fx_encode, fx_mul_const, sigmoid, Engine, PlainEngine, FRAC_BITS};

/// Bits of each shuffle key drawn from the training randomness J.
pub const J_BITS: u32 = 40;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub lr: f64,
    pub batch_size: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig { epochs: 3, lr: 0.5, batch_size: 8 }
    }
}

/// Weights in raw fixed point, bias last.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Model {
    pub weights: Vec<i64>,
}

impl Model {
    pub fn zeros(width: usize) -> Self {
        Model { weights: vec![0; width + 1] }
    }

    pub fn width(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn weights_f64(&self) -> Vec<f64> {
        self.weights.iter().map(|w| fx_decode(*w)).collect()
    }

    /// Plaintext fixed-point prediction: (score, label) as floats.
    pub fn predict_one(&self, x: &[f64]) -> Result<(f64, u8)> {
        let mut e = PlainEngine::default();
        let row: Vec<i64> = x.iter().map(|v| fx_encode(*v)).collect();
        let (s, l) = predict(&mut e, &self.weights, &[row])?;
        Ok((fx_decode(s[0]), (l[0] != 0) as u8))
    }

    pub fn accuracy(&self, d: &Dataset) -> Result<f64> {
        let mut hits = 0;
        for (x, y) in d.features.iter().zip(&d.labels) {
            hits += (self.predict_one(x)?.1 == *y) as usize;
        }
        Ok(hits as f64 / d.len().max(1) as f64)
    }
}

/// Index bits appended to each shuffle key so that keys are distinct.
pub fn shuffle_key_bits(n: usize) -> u32 {
    (usize::BITS - n.saturating_sub(1).leading_zeros()).max(1)
}

fn with_bias<E: Engine>(e: &E, rows: &[Vec<E::V>]) -> Vec<Vec<E::V>> {
    rows.iter()
        .map(|r| {
            let mut r = r.clone();
            r.push(e.constant(fx_encode(1.0)));
            r
        })
        .collect()
}

/// X^T (sigmoid(Xw) - y) over rows that already carry the bias column.
fn gradient_biased<E: Engine>(e: &mut E, w: &[E::V], xb: &[Vec<E::V>], y: &[E::V]) -> Result<Vec<E::V>> {
    let z = dot_rows(e, xb, w, FRAC_BITS)?;
    let s = sigmoid(e, &z)?;
    let err: Vec<E::V> = s.iter().zip(y).map(|(s, y)| e.sub(s, y)).collect();
    let cols: Vec<Vec<E::V>> = (0..w.len()).map(|j| xb.iter().map(|r| r[j].clone()).collect()).collect();
    dot_rows(e, &cols, &err, FRAC_BITS)
}

/// Gradient of the surrogate loss at `w` (bias last) over raw rows.
pub fn gradient<E: Engine>(e: &mut E, w: &[E::V], x: &[Vec<E::V>], y: &[E::V]) -> Result<Vec<E::V>> {
    let xb = with_bias(e, x);
    gradient_biased(e, w, &xb, y)
}

/// The loss whose gradient the trainer follows: sum of S(z) - y z, where S
/// integrates the piecewise-linear sigmoid.
pub fn surrogate_loss(w: &[f64], d: &Dataset) -> f64 {
    let s = |z: f64| {
        if z < -2.0 {
            0.0
        } else if z <= 2.0 {
            0.125 * (z + 2.0) * (z + 2.0)
        } else {
            z
        }
    };
    d.features
        .iter()
        .zip(&d.labels)
        .map(|(x, y)| {
            let z: f64 = x.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() + w[w.len() - 1];
            s(z) - *y as f64 * z
        })
        .sum()
}

/// Minibatch gradient descent. Each epoch shuffles the rows obliviously by
/// sorting on keys J[e*n + i] * 2^b + i, where b = [`shuffle_key_bits`]`(n)`.
pub fn train<E: Engine>(e: &mut E, x: &[Vec<E::V>], y: &[E::V], j: &[E::V], cfg: &TrainConfig) -> Result<Vec<E::V>> {
    let n = x.len();
    if n == 0 {
        return Err(ArcError::InvalidParam("training needs data".into()));
    }
    if y.len() != n {
        return Err(ArcError::LengthMismatch { expected: n, got: y.len() });
    }
    if j.len() != cfg.epochs * n {
        return Err(ArcError::LengthMismatch { expected: cfg.epochs * n, got: j.len() });
    }
    if cfg.batch_size == 0 {
        return Err(ArcError::InvalidParam("batch size must be positive".into()));
    }
    let width = x[0].len();
    let mut w = vec![e.constant(0); width + 1];
    let ib = shuffle_key_bits(n);
    let rows: Vec<Vec<E::V>> = with_bias(e, x)
        .into_iter()
        .zip(y)
        .map(|(mut r, y)| {
            r.push(y.clone());
            r
        })
        .collect();
    for ep in 0..cfg.epochs {
        let keys: Vec<E::V> = (0..n).map(|i| e.add_const(&e.mul_const(&j[ep * n + i], 1i64 << ib), i as i64)).collect();
        let (_, order) = bitonic_sort(e, &keys, &rows)?;
        w = epoch(e, w, &order, cfg)?;
    }
    Ok(w)
}

/// One pass of minibatch steps over rows laid out as features, bias, label.
fn epoch<E: Engine>(e: &mut E, mut w: Vec<E::V>, rows: &[Vec<E::V>], cfg: &TrainConfig) -> Result<Vec<E::V>> {
    let width = w.len() - 1;
    for batch in rows.chunks(cfg.batch_size) {
        let xb: Vec<Vec<E::V>> = batch.iter().map(|r| r[..=width].to_vec()).collect();
        let yb: Vec<E::V> = batch.iter().map(|r| r[width + 1].clone()).collect();
        let g = gradient_biased(e, &w, &xb, &yb)?;
        let step = fx_mul_const(e, &g, fx_encode(cfg.lr / batch.len() as f64), FRAC_BITS)?;
        w = w.iter().zip(&step).map(|(w, s)| e.sub(w, s)).collect();
    }
    Ok(w)
}

/// Continues from `w` for `cfg.epochs` passes in the given row order.
pub fn fine_tune<E: Engine>(e: &mut E, w: &[E::V], x: &[Vec<E::V>], y: &[E::V], cfg: &TrainConfig) -> Result<Vec<E::V>> {
    if y.len() != x.len() {
        return Err(ArcError::LengthMismatch { expected: x.len(), got: y.len() });
    }
    if cfg.batch_size == 0 {
        return Err(ArcError::InvalidParam("batch size must be positive".into()));
    }
    if let Some(r) = x.iter().find(|r| r.len() + 1 != w.len()) {
        return Err(ArcError::LengthMismatch { expected: w.len() - 1, got: r.len() });
    }
    let rows: Vec<Vec<E::V>> = with_bias(e, x)
        .into_iter()
        .zip(y)
        .map(|(mut r, y)| {
            r.push(y.clone());
            r
        })
        .collect();
    let mut w = w.to_vec();
    for _ in 0..cfg.epochs {
        w = epoch(e, w, &rows, cfg)?;
    }
    Ok(w)
}

/// Scores sigmoid(w.x + b) and labels [score >= 0.5], both in fixed point.
pub fn predict<E: Engine>(e: &mut E, w: &[E::V], x: &[Vec<E::V>]) -> Result<(Vec<E::V>, Vec<E::V>)> {
    if let Some(r) = x.iter().find(|r| r.len() + 1 != w.len()) {
        return Err(ArcError::LengthMismatch { expected: w.len() - 1, got: r.len() });
    }
    let xb = with_bias(e, x);
    let z = dot_rows(e, &xb, w, FRAC_BITS)?;
    let s = sigmoid(e, &z)?;
    let shifted: Vec<E::V> = s.iter().map(|v| e.add_const(v, -fx_encode(0.5))).collect();
    let below = e.ltz(&shifted)?;
    let labels = below.iter().map(|b| e.add_const(&e.mul_const(b, -fx_encode(1.0)), fx_encode(1.0))).collect();
    Ok((s, labels))
}

/// Plaintext trainer on a fixed-point dataset.
pub fn train_plain(d: &FixedDataset, j: &[i64], cfg: &TrainConfig) -> Result<Model> {
    let mut e = PlainEngine::default();
    Ok(Model { weights: train(&mut e, &d.x, &d.y, j, cfg)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mpc::{Mpc, MpcEngine, SecurityMode};
    use rand::{Rng, SeedableRng};

    fn random_j(seed: u64, len: usize) -> Vec<i64> {
        let mut r = rand_chacha::ChaCha20Rng::seed_from_u64(seed);
        (0..len).map(|_| r.gen_range(0..1i64 << J_BITS)).collect()
    }

    fn separable() -> Dataset {
        let pts = [(-2.0, -1.0), (-1.5, -2.0), (-1.0, -1.0), (-2.0, 0.5), (1.0, 2.0), (2.0, 1.0), (1.5, 1.5), (0.5, 2.0)];
        Dataset { features: pts.iter().map(|p| vec![p.0, p.1]).collect(), labels: vec![0, 0, 0, 0, 1, 1, 1, 1] }
    }

    #[test]
    fn separable_set_is_learned() {
        let d = separable();
        let cfg = TrainConfig { epochs: 50, lr: 0.5, batch_size: 4 };
        let m = train_plain(&d.encode(), &random_j(1, 50 * 8), &cfg).unwrap();
        assert_eq!(m.accuracy(&d).unwrap(), 1.0);
    }

    #[test]
    fn zero_epochs_gives_zero_model() {
        let d = separable();
        let cfg = TrainConfig { epochs: 0, ..TrainConfig::default() };
        let m = train_plain(&d.encode(), &[], &cfg).unwrap();
        assert_eq!(m, Model::zeros(2));
        assert_eq!(m.predict_one(&[3.0, -1.0]).unwrap(), (0.5, 1));
    }

    #[test]
    fn labels_flip_across_boundary() {
        let m = Model { weights: vec![fx_encode(1.0), 0, 0] };
        assert_eq!(m.predict_one(&[-0.5, 0.0]).unwrap().1, 0);
        assert_eq!(m.predict_one(&[0.5, 0.0]).unwrap().1, 1);
        assert!(m.predict_one(&[1.0]).is_err());
    }

    #[test]
    fn mpc_training_matches_plaintext() {
        let d = Dataset::adult_toy().take(12).encode();
        let cfg = TrainConfig { epochs: 2, lr: 0.5, batch_size: 4 };
        let j = random_j(9, 24);
        let plain = train_plain(&d, &j, &cfg).unwrap();

        let mut m = Mpc::new(3, 9, SecurityMode::SemiHonest);
        let mut e = MpcEngine::new(&mut m);
        let xs: Vec<_> = d.x.iter().map(|r| e.input(r)).collect();
        let ys = e.input(&d.y);
        let js = e.input(&j);
        let w = train(&mut e, &xs, &ys, &js, &cfg).unwrap();
        assert_eq!(e.reveal("w", &w).unwrap(), plain.weights);

        let q = e.input(&d.x[3]);
        let (s, l) = predict(&mut e, &w, &[q]).unwrap();
        let mut p = PlainEngine::default();
        let (ps, pl) = predict(&mut p, &plain.weights, &[d.x[3].clone()]).unwrap();
        assert_eq!(e.reveal("s", &s).unwrap(), ps);
        assert_eq!(e.reveal("l", &l).unwrap(), pl);
    }

    #[test]
    fn gradient_matches_finite_difference() {
        let d = Dataset::adult_toy().take(16);
        let f = d.encode();
        let w = [0.3, -0.2, 0.1, 0.4, -0.1];
        let wr: Vec<i64> = w.iter().map(|v| fx_encode(*v)).collect();
        let mut e = PlainEngine::default();
        let g = gradient(&mut e, &wr, &f.x, &f.y).unwrap();
        // the float loss sees the encoded data, as the fixed-point path does
        let dq = f.decode();
        let wq: Vec<f64> = wr.iter().map(|v| fx_decode(*v)).collect();
        let h = 1e-4;
        for k in 0..w.len() {
            let (mut a, mut b) = (wq.clone(), wq.clone());
            a[k] += h;
            b[k] -= h;
            let fd = (surrogate_loss(&a, &dq) - surrogate_loss(&b, &dq)) / (2.0 * h);
            let tol = 2f64.powi(-(FRAC_BITS as i32) + 4) * d.len() as f64;
            assert!((fx_decode(g[k]) - fd).abs() <= tol, "coord {k}: {} vs {fd}", fx_decode(g[k]));
        }
    }
}
