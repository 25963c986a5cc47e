//! Circuits over shared bits: ripple-carry adders, bit decomposition, bit
//! composition and bit-to-arithmetic conversion. Every routine works on a
//! batch of values at once so that one adder position costs one round no
//! matter how many values are in flight.

use super::domain::Domain;
use super::sim::{Mpc, Shared};
use crate::algebra::{Bit, Z2k};
use crate::error::{ArcError, Result};

/// Bits of one value, least significant first.
pub type SharedBits = Vec<Shared<Bit>>;

fn bit_of(n: usize, b: bool) -> Shared<Bit> {
    Shared::public(n, if b { Bit::ONE } else { Bit::ZERO })
}

pub fn not(b: &Shared<Bit>) -> Shared<Bit> {
    b.add_public(Bit::ONE)
}

/// Lifts public bits (lsb first) to trivial sharings.
pub fn public_bits(n: usize, v: u128, width: usize) -> SharedBits {
    (0..width).map(|i| bit_of(n, i < 128 && (v >> i) & 1 == 1)).collect()
}

/// Batched ripple-carry addition a + b + carry_in, keeping `out_width` bits.
/// Carries use the majority trick maj(a, b, c) = c ^ ((a ^ c) & (b ^ c)),
/// so every position costs one AND.
pub fn add_bits(mpc: &mut Mpc, a: &[SharedBits], b: &[SharedBits], carry_in: bool, out_width: usize) -> Result<Vec<SharedBits>> {
    if a.len() != b.len() {
        return Err(ArcError::LengthMismatch { expected: a.len(), got: b.len() });
    }
    let n = mpc.parties();
    let zero = Shared::<Bit>::zero(n);
    let get = |v: &SharedBits, i: usize| v.get(i).cloned().unwrap_or_else(|| zero.clone());
    let mut carry: Vec<Shared<Bit>> = vec![bit_of(n, carry_in); a.len()];
    let mut out: Vec<SharedBits> = vec![Vec::with_capacity(out_width); a.len()];
    for i in 0..out_width {
        let ai: Vec<_> = a.iter().map(|v| get(v, i)).collect();
        let bi: Vec<_> = b.iter().map(|v| get(v, i)).collect();
        for k in 0..a.len() {
            out[k].push(&(&ai[k] + &bi[k]) + &carry[k]);
        }
        if i + 1 < out_width {
            let x: Vec<_> = ai.iter().zip(&carry).map(|(p, c)| p + c).collect();
            let y: Vec<_> = bi.iter().zip(&carry).map(|(p, c)| p + c).collect();
            let g = mpc.mul(&x, &y)?;
            carry = g.iter().zip(&carry).map(|(g, c)| g + c).collect();
        }
    }
    Ok(out)
}

/// Batched bit-to-arithmetic conversion with daBits (one round).
pub fn b2a<T: Domain>(mpc: &mut Mpc, bits: &[Shared<Bit>]) -> Result<Vec<Shared<T>>> {
    let da = mpc.dabits::<T>(bits.len());
    let masked: Vec<_> = bits.iter().zip(&da).map(|(b, (r2, _))| b + r2).collect();
    let v = mpc.open("b2a", &masked)?;
    Ok(v.iter()
        .zip(&da)
        .map(|(v, (_, rt))| if *v == Bit::ONE { (-rt).add_public(T::one()) } else { rt.clone() })
        .collect())
}

/// Low `width` bits of ring values: open x - r for an edaBit r, then add the
/// bits of r back with a width-bit adder.
pub fn bitdec_ring<const K: u32>(mpc: &mut Mpc, xs: &[Shared<Z2k<K>>], width: usize) -> Result<Vec<SharedBits>> {
    assert!(width <= K as usize);
    let n = mpc.parties();
    let eda = mpc.edabits::<Z2k<K>>(xs.len(), K);
    let masked: Vec<_> = xs.iter().zip(&eda).map(|(x, e)| x - &e.arith).collect();
    let eps = mpc.open("bitdec", &masked)?;
    let pub_bits: Vec<SharedBits> = eps.iter().map(|e| public_bits(n, e.value() as u128, width)).collect();
    let r_bits: Vec<SharedBits> = eda.into_iter().map(|e| e.bits).collect();
    add_bits(mpc, &pub_bits, &r_bits, false, width)
}

/// Low `ell` bits of field values known to lie in [0, 2^ell): open
/// y + r for an (ell + kappa)-bit edaBit r, then subtract r bitwise.
pub fn bitdec_field<F: Domain>(mpc: &mut Mpc, ys: &[Shared<F>], ell: u32, kappa: u32) -> Result<(Vec<SharedBits>, Vec<F>)> {
    let n = mpc.parties();
    let eda = mpc.edabits::<F>(ys.len(), ell + kappa);
    let masked: Vec<_> = ys.iter().zip(&eda).map(|(y, e)| y + &e.arith).collect();
    let eps = mpc.open("bitdec", &masked)?;
    let pub_bits: Vec<SharedBits> = eps.iter().map(|e| field_low_bits(n, *e, ell as usize)).collect();
    let not_r: Vec<SharedBits> = eda.iter().map(|e| e.bits[..ell as usize].iter().map(not).collect()).collect();
    let bits = add_bits(mpc, &pub_bits, &not_r, true, ell as usize)?;
    Ok((bits, eps))
}

fn field_low_bits<F: Domain>(n: usize, v: F, width: usize) -> SharedBits {
    let bytes = v.to_le_bytes();
    (0..width).map(|i| bit_of(n, bytes.get(i / 8).is_some_and(|b| (b >> (i % 8)) & 1 == 1))).collect()
}

/// Composes bits into `T` using an edaBit mask of `mask_bits` bits: the
/// masked sum is opened bitwise and the mask subtracted arithmetically.
/// Returns the sharings and the opened masked sums.
pub fn bitcom<T: Domain>(mpc: &mut Mpc, bits: &[SharedBits], mask_bits: u32, out_width: usize) -> Result<(Vec<Shared<T>>, Vec<T>)> {
    let eda = mpc.edabits::<T>(bits.len(), mask_bits);
    let r_bits: Vec<SharedBits> = eda.iter().map(|e| e.bits.clone()).collect();
    let sums = add_bits(mpc, bits, &r_bits, false, out_width)?;
    let flat: Vec<Shared<Bit>> = sums.iter().flatten().cloned().collect();
    let opened = mpc.open("bitcom", &flat)?;
    let mut out = Vec::with_capacity(bits.len());
    let mut eps_all = Vec::with_capacity(bits.len());
    for (k, e) in eda.iter().enumerate() {
        let bs: Vec<bool> = opened[k * out_width..(k + 1) * out_width].iter().map(|b| *b == Bit::ONE).collect();
        let eps = T::from_bits_le(&bs);
        eps_all.push(eps);
        out.push((-&e.arith).add_public(eps));
    }
    Ok((out, eps_all))
}

/// Batched AND of many bits.
pub fn and(mpc: &mut Mpc, a: &[Shared<Bit>], b: &[Shared<Bit>]) -> Result<Vec<Shared<Bit>>> {
    mpc.mul(a, b)
}

/// OR over each group with a balanced tree of ANDs on negations.
pub fn or_reduce(mpc: &mut Mpc, groups: &[SharedBits]) -> Result<Vec<Shared<Bit>>> {
    let n = mpc.parties();
    let mut cur: Vec<SharedBits> = groups.iter().map(|g| g.iter().map(not).collect()).collect();
    while cur.iter().any(|g| g.len() > 1) {
        let mut lhs = Vec::new();
        let mut rhs = Vec::new();
        for g in &cur {
            for pair in g.chunks(2) {
                if pair.len() == 2 {
                    lhs.push(pair[0].clone());
                    rhs.push(pair[1].clone());
                }
            }
        }
        let prod = and(mpc, &lhs, &rhs)?;
        let mut it = prod.into_iter();
        cur = cur
            .into_iter()
            .map(|g| {
                g.chunks(2)
                    .map(|pair| if pair.len() == 2 { it.next().expect("paired") } else { pair[0].clone() })
                    .collect()
            })
            .collect();
    }
    Ok(cur.into_iter().map(|g| g.first().map(not).unwrap_or_else(|| bit_of(n, false))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Fr377, Z64};
    use crate::mpc::sim::SecurityMode;

    fn reveal_bits(bits: &SharedBits) -> u128 {
        bits.iter().enumerate().map(|(i, b)| (b.reveal_unchecked().value() as u128) << i).sum()
    }

    #[test]
    fn adder_matches_integers() {
        let mut m = Mpc::new(3, 1, SecurityMode::SemiHonest);
        let n = m.parties();
        let pairs = [(5u128, 9u128), (255, 1), (0, 0), (1000, 24)];
        let a: Vec<_> = pairs.iter().map(|p| public_bits(n, p.0, 10)).collect();
        let b: Vec<_> = pairs.iter().map(|p| public_bits(n, p.1, 10)).collect();
        let s = add_bits(&mut m, &a, &b, false, 11).unwrap();
        for (k, p) in pairs.iter().enumerate() {
            assert_eq!(reveal_bits(&s[k]), p.0 + p.1);
        }
        assert_eq!(m.stats.and_count, 4 * 10);
    }

    #[test]
    fn ring_decomposition() {
        let mut m = Mpc::new(3, 2, SecurityMode::SemiHonest);
        let xs = m.input(&[Z64::new(12345), Z64::from_i64(-2)]);
        let bits = bitdec_ring(&mut m, &xs, 64).unwrap();
        assert_eq!(reveal_bits(&bits[0]), 12345);
        assert_eq!(reveal_bits(&bits[1]), (-2i64) as u64 as u128);
    }

    #[test]
    fn field_decomposition_and_composition() {
        let mut m = Mpc::new(3, 3, SecurityMode::SemiHonest);
        let ys = m.input(&[Fr377::from(77u64), Fr377::from(0u64)]);
        let (bits, _) = bitdec_field(&mut m, &ys, 10, 40).unwrap();
        assert_eq!(reveal_bits(&bits[0]), 77);
        assert_eq!(reveal_bits(&bits[1]), 0);
        let (back, _) = bitcom::<Z64>(&mut m, &bits, 64, 64).unwrap();
        assert_eq!(back[0].reveal_unchecked(), Z64::new(77));
    }

    #[test]
    fn or_tree() {
        let mut m = Mpc::new(3, 4, SecurityMode::SemiHonest);
        let n = m.parties();
        let g = vec![public_bits(n, 0, 5), public_bits(n, 8, 5), public_bits(n, 1, 1)];
        let r = or_reduce(&mut m, &g).unwrap();
        let v: Vec<_> = r.iter().map(|b| b.reveal_unchecked()).collect();
        assert_eq!(v, vec![Bit::ZERO, Bit::ONE, Bit::ONE]);
    }

    #[test]
    fn bit_to_arith() {
        let mut m = Mpc::new(3, 5, SecurityMode::SemiHonest);
        let n = m.parties();
        let bits = vec![bit_of(n, true), bit_of(n, false)];
        let a = b2a::<Fr377>(&mut m, &bits).unwrap();
        assert_eq!(a[0].reveal_unchecked(), Fr377::from(1u64));
        assert_eq!(a[1].reveal_unchecked(), Fr377::from(0u64));
    }
}
