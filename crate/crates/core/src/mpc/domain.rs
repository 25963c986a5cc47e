//! Values that can be additively secret-shared.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use ark_ff::{BigInteger, PrimeField};
use rand::RngCore;

use crate::algebra::group::{G1Curve, GroupElem, MockElem};
use crate::algebra::{field, Z2k};

/// Anything with an additive sharing: ring and field elements, group points.
pub trait ShareValue:
    Copy + Debug + PartialEq + Send + Sync + 'static + Add<Output = Self> + Sub<Output = Self>
{
    fn zero() -> Self;
    /// Wire size of one element in bits.
    fn bit_len() -> usize;
    /// Adds `delta` copies of the unit; used by tamper hooks.
    fn perturb(&self, delta: u64) -> Self;
}

/// Scalar domains: F_p and Z_{2^k}.
pub trait Domain: ShareValue + Eq + Mul<Output = Self> + Neg<Output = Self> {
    fn one() -> Self;
    fn from_u64(v: u64) -> Self;
    fn from_i64(v: i64) -> Self;
    fn random<R: RngCore + ?Sized>(rng: &mut R) -> Self;
    /// Human readable tag, e.g. `Z_2^64` or `F_p(253)`.
    fn tag() -> String;
    /// Canonical integer representative, little-endian.
    fn to_le_bytes(&self) -> Vec<u8>;

    /// sum b_i 2^i, least significant first.
    fn from_bits_le(bits: &[bool]) -> Self {
        bits.iter().rev().fold(Self::zero(), |acc, &b| {
            let d = acc + acc;
            if b {
                d + Self::one()
            } else {
                d
            }
        })
    }

    fn pow2(i: u32) -> Self {
        let mut v = Self::one();
        for _ in 0..i {
            v = v + v;
        }
        v
    }
}

impl<F: PrimeField> ShareValue for F {
    fn zero() -> Self {
        F::zero()
    }
    fn bit_len() -> usize {
        8 * field::byte_len::<F>()
    }
    fn perturb(&self, delta: u64) -> Self {
        *self + F::from(delta)
    }
}

impl<F: PrimeField> Domain for F {
    fn one() -> Self {
        F::one()
    }
    fn from_u64(v: u64) -> Self {
        F::from(v)
    }
    fn from_i64(v: i64) -> Self {
        field::from_i64(v)
    }
    fn random<R: RngCore + ?Sized>(rng: &mut R) -> Self {
        let mut buf = vec![0u8; field::byte_len::<F>() + 16];
        rng.fill_bytes(&mut buf);
        F::from_le_bytes_mod_order(&buf)
    }
    fn tag() -> String {
        format!("F_p({})", F::MODULUS_BIT_SIZE)
    }
    fn to_le_bytes(&self) -> Vec<u8> {
        self.into_bigint().to_bytes_le()
    }
}

impl<const K: u32> ShareValue for Z2k<K> {
    fn zero() -> Self {
        Z2k::ZERO
    }
    fn bit_len() -> usize {
        K as usize
    }
    fn perturb(&self, delta: u64) -> Self {
        *self + Z2k::new(delta)
    }
}

impl<const K: u32> Domain for Z2k<K> {
    fn one() -> Self {
        Z2k::ONE
    }
    fn from_u64(v: u64) -> Self {
        Z2k::new(v)
    }
    fn from_i64(v: i64) -> Self {
        Z2k::from_i64(v)
    }
    fn random<R: RngCore + ?Sized>(rng: &mut R) -> Self {
        Z2k::new(rng.next_u64())
    }
    fn tag() -> String {
        format!("Z_2^{K}")
    }
    fn to_le_bytes(&self) -> Vec<u8> {
        self.value().to_le_bytes().to_vec()
    }
}

impl<F: PrimeField> ShareValue for MockElem<F> {
    fn zero() -> Self {
        MockElem::identity()
    }
    fn bit_len() -> usize {
        8 * <MockElem<F> as GroupElem<F>>::byte_len()
    }
    fn perturb(&self, delta: u64) -> Self {
        *self + MockElem::generator().scale(&F::from(delta))
    }
}

impl ShareValue for G1Curve {
    fn zero() -> Self {
        G1Curve::identity()
    }
    fn bit_len() -> usize {
        8 * <G1Curve as GroupElem<ark_bls12_377::Fr>>::byte_len()
    }
    fn perturb(&self, delta: u64) -> Self {
        *self + G1Curve::generator().scale(&ark_bls12_377::Fr::from(delta))
    }
}
