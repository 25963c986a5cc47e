//! Fixed-point arithmetic in Z_{2^64} with `f` fractional bits, behind an
//! [`Engine`] that runs either in the clear or on shares. Both engines
//! perform exactly the same ring operations, and the MPC truncation is exact,
//! so the two paths agree bit for bit.

use super::binary::{b2a, bitdec_ring, or_reduce, SharedBits};
use super::sim::{Mpc, Shared};
use crate::algebra::Z64;
use crate::error::{ArcError, Result};

pub const FRAC_BITS: u32 = 16;

pub fn fx_encode(x: f64) -> i64 {
    (x * (1u64 << FRAC_BITS) as f64).round() as i64
}

pub fn fx_decode(raw: i64) -> f64 {
    raw as f64 / (1u64 << FRAC_BITS) as f64
}

/// Division by 2^f rounding toward zero, on the two's-complement reading.
pub fn trunc_toward_zero(v: i64, f: u32) -> i64 {
    if f == 0 {
        return v;
    }
    let floor = v >> f;
    if v < 0 && v & ((1i64 << f) - 1) != 0 {
        floor.wrapping_add(1)
    } else {
        floor
    }
}

pub fn fx_mul_trunc(a: i64, b: i64) -> i64 {
    trunc_toward_zero(a.wrapping_mul(b), FRAC_BITS)
}

/// Value abstraction shared by the plaintext and MPC paths. Values are raw
/// ring elements; fixed-point meaning is up to the caller.
pub trait Engine {
    type V: Clone + std::fmt::Debug;

    fn constant(&self, raw: i64) -> Self::V;
    /// Values contributed by a party outside the computation.
    fn input(&mut self, raw: &[i64]) -> Vec<Self::V>;
    fn add(&self, a: &Self::V, b: &Self::V) -> Self::V;
    fn sub(&self, a: &Self::V, b: &Self::V) -> Self::V;
    fn add_const(&self, a: &Self::V, c: i64) -> Self::V;
    fn mul_const(&self, a: &Self::V, c: i64) -> Self::V;
    /// Element-wise ring product, no truncation.
    fn mul(&mut self, a: &[Self::V], b: &[Self::V]) -> Result<Vec<Self::V>>;
    fn trunc(&mut self, a: &[Self::V], f: u32) -> Result<Vec<Self::V>>;
    /// 1 if negative, else 0.
    fn ltz(&mut self, a: &[Self::V]) -> Result<Vec<Self::V>>;
    fn reveal(&mut self, label: &str, a: &[Self::V]) -> Result<Vec<i64>>;
}

#[derive(Clone, Copy, Debug, Default)]
pub struct PlainEngine {
    /// Report products that do not fit in 64 bits.
    pub check_overflow: bool,
}

impl Engine for PlainEngine {
    type V = i64;

    fn constant(&self, raw: i64) -> i64 {
        raw
    }
    fn input(&mut self, raw: &[i64]) -> Vec<i64> {
        raw.to_vec()
    }
    fn add(&self, a: &i64, b: &i64) -> i64 {
        a.wrapping_add(*b)
    }
    fn sub(&self, a: &i64, b: &i64) -> i64 {
        a.wrapping_sub(*b)
    }
    fn add_const(&self, a: &i64, c: i64) -> i64 {
        a.wrapping_add(c)
    }
    fn mul_const(&self, a: &i64, c: i64) -> i64 {
        a.wrapping_mul(c)
    }
    fn mul(&mut self, a: &[i64], b: &[i64]) -> Result<Vec<i64>> {
        if a.len() != b.len() {
            return Err(ArcError::LengthMismatch { expected: a.len(), got: b.len() });
        }
        a.iter()
            .zip(b)
            .map(|(x, y)| {
                if self.check_overflow && i64::try_from(*x as i128 * *y as i128).is_err() {
                    return Err(ArcError::Overflow);
                }
                Ok(x.wrapping_mul(*y))
            })
            .collect()
    }
    fn trunc(&mut self, a: &[i64], f: u32) -> Result<Vec<i64>> {
        Ok(a.iter().map(|v| trunc_toward_zero(*v, f)).collect())
    }
    fn ltz(&mut self, a: &[i64]) -> Result<Vec<i64>> {
        Ok(a.iter().map(|v| (*v < 0) as i64).collect())
    }
    fn reveal(&mut self, _label: &str, a: &[i64]) -> Result<Vec<i64>> {
        Ok(a.to_vec())
    }
}

/// Ring arithmetic on shares held by the simulator's parties.
pub struct MpcEngine<'a> {
    pub mpc: &'a mut Mpc,
}

impl<'a> MpcEngine<'a> {
    pub fn new(mpc: &'a mut Mpc) -> Self {
        MpcEngine { mpc }
    }
}

impl Engine for MpcEngine<'_> {
    type V = Shared<Z64>;

    fn constant(&self, raw: i64) -> Shared<Z64> {
        Shared::public(self.mpc.parties(), Z64::from_i64(raw))
    }
    fn input(&mut self, raw: &[i64]) -> Vec<Shared<Z64>> {
        let v: Vec<Z64> = raw.iter().map(|r| Z64::from_i64(*r)).collect();
        self.mpc.input(&v)
    }
    fn add(&self, a: &Shared<Z64>, b: &Shared<Z64>) -> Shared<Z64> {
        a + b
    }
    fn sub(&self, a: &Shared<Z64>, b: &Shared<Z64>) -> Shared<Z64> {
        a - b
    }
    fn add_const(&self, a: &Shared<Z64>, c: i64) -> Shared<Z64> {
        a.add_public(Z64::from_i64(c))
    }
    fn mul_const(&self, a: &Shared<Z64>, c: i64) -> Shared<Z64> {
        a.scale(Z64::from_i64(c))
    }
    fn mul(&mut self, a: &[Shared<Z64>], b: &[Shared<Z64>]) -> Result<Vec<Shared<Z64>>> {
        self.mpc.mul(a, b)
    }

    /// floor(x / 2^f) from the bits, plus one when x is negative with a
    /// non-zero remainder.
    fn trunc(&mut self, a: &[Shared<Z64>], f: u32) -> Result<Vec<Shared<Z64>>> {
        if f == 0 || a.is_empty() {
            return Ok(a.to_vec());
        }
        let f = f as usize;
        let bits = bitdec_ring(self.mpc, a, 64)?;
        let low: Vec<SharedBits> = bits.iter().map(|b| b[..f].to_vec()).collect();
        let nz = or_reduce(self.mpc, &low)?;
        let sign: Vec<_> = bits.iter().map(|b| b[63].clone()).collect();
        let adj = self.mpc.mul(&sign, &nz)?;
        let mut flat = Vec::with_capacity(a.len() * (65 - f));
        for (b, j) in bits.iter().zip(&adj) {
            flat.extend(b[f..].iter().cloned());
            flat.push(j.clone());
        }
        let ar = b2a::<Z64>(self.mpc, &flat)?;
        let w = 65 - f;
        Ok((0..a.len())
            .map(|k| {
                let chunk = &ar[k * w..(k + 1) * w];
                let mut acc = chunk[w - 1].clone();
                for (j, s) in chunk[..w - 1].iter().enumerate() {
                    let i = j + f;
                    let coef = if i == 63 { -Z64::new(1u64 << (63 - f)) } else { Z64::new(1u64 << (i - f)) };
                    acc = &acc + &s.scale(coef);
                }
                acc
            })
            .collect())
    }

    fn ltz(&mut self, a: &[Shared<Z64>]) -> Result<Vec<Shared<Z64>>> {
        if a.is_empty() {
            return Ok(Vec::new());
        }
        let bits = bitdec_ring(self.mpc, a, 64)?;
        let msb: Vec<_> = bits.iter().map(|b| b[63].clone()).collect();
        b2a::<Z64>(self.mpc, &msb)
    }

    fn reveal(&mut self, label: &str, a: &[Shared<Z64>]) -> Result<Vec<i64>> {
        Ok(self.mpc.open(label, a)?.iter().map(|v| v.signed()).collect())
    }
}

/// Element-wise fixed-point product.
pub fn fx_mul<E: Engine>(e: &mut E, a: &[E::V], b: &[E::V], f: u32) -> Result<Vec<E::V>> {
    let p = e.mul(a, b)?;
    e.trunc(&p, f)
}

/// Product with a public fixed-point constant.
pub fn fx_mul_const<E: Engine>(e: &mut E, a: &[E::V], c: i64, f: u32) -> Result<Vec<E::V>> {
    let p: Vec<_> = a.iter().map(|v| e.mul_const(v, c)).collect();
    e.trunc(&p, f)
}

pub fn sum<E: Engine>(e: &E, vs: &[E::V]) -> E::V {
    vs.iter().fold(e.constant(0), |acc, v| e.add(&acc, v))
}

/// Fixed-point dot product of each row with `w`, one truncation per row.
pub fn dot_rows<E: Engine>(e: &mut E, rows: &[Vec<E::V>], w: &[E::V], f: u32) -> Result<Vec<E::V>> {
    let mut a = Vec::new();
    let mut b = Vec::new();
    for r in rows {
        if r.len() != w.len() {
            return Err(ArcError::LengthMismatch { expected: w.len(), got: r.len() });
        }
        a.extend(r.iter().cloned());
        b.extend(w.iter().cloned());
    }
    let p = e.mul(&a, &b)?;
    let sums: Vec<_> = p.chunks(w.len().max(1)).map(|c| sum(e, c)).collect();
    let sums = if w.is_empty() { vec![e.constant(0); rows.len()] } else { sums };
    e.trunc(&sums, f)
}

/// c ? a : b for c in {0, 1}.
pub fn mux<E: Engine>(e: &mut E, c: &[E::V], a: &[E::V], b: &[E::V]) -> Result<Vec<E::V>> {
    let d: Vec<_> = a.iter().zip(b).map(|(x, y)| e.sub(x, y)).collect();
    let t = e.mul(c, &d)?;
    Ok(t.iter().zip(b).map(|(t, y)| e.add(y, t)).collect())
}

pub fn abs<E: Engine>(e: &mut E, xs: &[E::V]) -> Result<Vec<E::V>> {
    let c = e.ltz(xs)?;
    let t = e.mul(&c, xs)?;
    Ok(xs.iter().zip(&t).map(|(x, t)| e.sub(x, &e.mul_const(t, 2))).collect())
}

/// Continuous piecewise-linear function: constant `v0` below `knots[0]`,
/// slope `slopes[i]` on [knots[i], knots[i+1]], flat after the last knot.
pub fn pwl<E: Engine>(e: &mut E, xs: &[E::V], knots: &[i64], v0: i64, slopes: &[i64], f: u32) -> Result<Vec<E::V>> {
    assert_eq!(slopes.len() + 1, knots.len());
    let m = knots.len();
    let mut shifted = Vec::with_capacity(xs.len() * m);
    for x in xs {
        for k in knots {
            shifted.push(e.add_const(x, k.wrapping_neg()));
        }
    }
    let below = e.ltz(&shifted)?;
    let above: Vec<_> = below.iter().map(|b| e.add_const(&e.mul_const(b, -1), 1)).collect();
    let d = e.mul(&above, &shifted)?;
    let mut acc = Vec::with_capacity(xs.len());
    for j in 0..xs.len() {
        let dj = &d[j * m..(j + 1) * m];
        let mut s = e.constant(0);
        for i in 0..m - 1 {
            let seg = e.sub(&dj[i], &dj[i + 1]);
            s = e.add(&s, &e.mul_const(&seg, slopes[i]));
        }
        acc.push(s);
    }
    let t = e.trunc(&acc, f)?;
    Ok(t.iter().map(|v| e.add_const(v, v0)).collect())
}

/// 0.5 + 0.25 * clamp(z, -2, 2).
pub fn sigmoid<E: Engine>(e: &mut E, zs: &[E::V]) -> Result<Vec<E::V>> {
    pwl(e, zs, &[fx_encode(-2.0), fx_encode(2.0)], 0, &[fx_encode(0.25)], FRAC_BITS)
}

/// Sorts ascending by key with a bitonic network, carrying payload columns.
/// Keys must be distinct and below 2^61 in magnitude.
pub fn bitonic_sort<E: Engine>(e: &mut E, keys: &[E::V], payload: &[Vec<E::V>]) -> Result<(Vec<E::V>, Vec<Vec<E::V>>)> {
    let n = keys.len();
    if n <= 1 {
        return Ok((keys.to_vec(), payload.to_vec()));
    }
    let size = n.next_power_of_two();
    let width = payload.first().map_or(0, |p| p.len());
    let mut k: Vec<E::V> = keys.to_vec();
    let mut p: Vec<Vec<E::V>> = payload.to_vec();
    for i in n..size {
        k.push(e.constant((1i64 << 61) + i as i64));
        p.push(vec![e.constant(0); width]);
    }
    let mut stage = 2;
    while stage <= size {
        let mut j = stage / 2;
        while j >= 1 {
            let mut pairs = Vec::new();
            let mut diffs = Vec::new();
            for i in 0..size {
                let l = i ^ j;
                if l > i {
                    let asc = i & stage == 0;
                    pairs.push((i, l));
                    diffs.push(if asc { e.sub(&k[l], &k[i]) } else { e.sub(&k[i], &k[l]) });
                }
            }
            let swap = e.ltz(&diffs)?;
            let mut cs = Vec::new();
            let mut ds = Vec::new();
            for (c, &(i, l)) in swap.iter().zip(&pairs) {
                cs.push(c.clone());
                ds.push(e.sub(&k[l], &k[i]));
                for col in 0..width {
                    cs.push(c.clone());
                    ds.push(e.sub(&p[l][col], &p[i][col]));
                }
            }
            let t = e.mul(&cs, &ds)?;
            let mut it = t.into_iter();
            for &(i, l) in &pairs {
                let tk = it.next().expect("key delta");
                k[i] = e.add(&k[i], &tk);
                k[l] = e.sub(&k[l], &tk);
                for col in 0..width {
                    let tp = it.next().expect("payload delta");
                    p[i][col] = e.add(&p[i][col], &tp);
                    p[l][col] = e.sub(&p[l][col], &tp);
                }
            }
            j /= 2;
        }
        stage *= 2;
    }
    k.truncate(n);
    p.truncate(n);
    Ok((k, p))
}

/// Median; for even counts the mean of the two middle values, truncated.
pub fn median<E: Engine>(e: &mut E, xs: &[E::V]) -> Result<E::V> {
    if xs.is_empty() {
        return Err(ArcError::InvalidParam("median of nothing".into()));
    }
    // ties are broken by position so the network sees distinct keys
    let n = xs.len();
    let bits = usize::BITS - (n - 1).leading_zeros();
    let keyed: Vec<_> = xs.iter().enumerate().map(|(i, x)| e.add_const(&e.mul_const(x, 1i64 << bits), i as i64)).collect();
    let payload: Vec<Vec<E::V>> = xs.iter().map(|x| vec![x.clone()]).collect();
    let (_, sorted) = bitonic_sort(e, &keyed, &payload)?;
    if n % 2 == 1 {
        Ok(sorted[n / 2][0].clone())
    } else {
        let s = e.add(&sorted[n / 2 - 1][0], &sorted[n / 2][0]);
        Ok(e.trunc(&[s], 1)?.pop().expect("one value"))
    }
}
