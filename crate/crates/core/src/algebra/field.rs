//! Prime fields. Any `ark_ff::PrimeField` works; two small test primes are
//! defined here so soundness bounds like d/p become observable.

use ark_ff::{BigInteger, Field, Fp64, MontBackend, MontConfig, PrimeField};

use crate::error::{ArcError, Result};

#[derive(MontConfig)]
#[modulus = "101"]
#[generator = "2"]
pub struct F101Config;
/// Integers mod 101.
pub type F101 = Fp64<MontBackend<F101Config, 1>>;

#[derive(MontConfig)]
#[modulus = "1009"]
#[generator = "11"]
pub struct F1009Config;
/// Integers mod 1009.
pub type F1009 = Fp64<MontBackend<F1009Config, 1>>;

/// Scalar field of BLS12-377.
pub type Fr377 = ark_bls12_377::Fr;

/// Checked inverse.
pub fn inv<F: Field>(a: F) -> Result<F> {
    a.inverse().ok_or(ArcError::ZeroInverse)
}

/// Embeds a signed integer.
pub fn from_i64<F: PrimeField>(v: i64) -> F {
    if v < 0 {
        -F::from(v.unsigned_abs())
    } else {
        F::from(v as u64)
    }
}

/// Embeds an unsigned 128-bit integer.
pub fn from_u128<F: PrimeField>(v: u128) -> F {
    F::from(v)
}

/// Low 64 bits of the canonical representative.
pub fn low_u64<F: PrimeField>(a: F) -> u64 {
    a.into_bigint().as_ref()[0]
}

/// Signed representative in (-p/2, p/2]. Only meaningful when the value is
/// known to fit in 127 bits.
pub fn to_i128<F: PrimeField>(a: F) -> i128 {
    fn low(b: &[u64]) -> i128 {
        (b[0] as i128) | (((b.get(1).copied().unwrap_or(0) & (u64::MAX >> 1)) as i128) << 64)
    }
    let pos = a.into_bigint();
    let neg = (-a).into_bigint();
    if pos > neg {
        -low(neg.as_ref())
    } else {
        low(pos.as_ref())
    }
}

/// Byte width of the canonical encoding.
pub fn byte_len<F: PrimeField>() -> usize {
    (F::MODULUS_BIT_SIZE as usize).div_ceil(8)
}

/// Big-endian fixed-width encoding.
pub fn to_bytes<F: PrimeField>(a: &F) -> Vec<u8> {
    let full = a.into_bigint().to_bytes_be();
    full[full.len() - byte_len::<F>()..].to_vec()
}

/// Inverse of [`to_bytes`]; rejects non-canonical encodings.
pub fn from_bytes<F: PrimeField>(b: &[u8]) -> Result<F> {
    if b.len() != byte_len::<F>() {
        return Err(ArcError::Malformed(format!("field element needs {} bytes", byte_len::<F>())));
    }
    let f = F::from_be_bytes_mod_order(b);
    if to_bytes(&f) != b {
        return Err(ArcError::Malformed("non-canonical field element".into()));
    }
    Ok(f)
}

/// (p - 1) mod m.
pub fn modulus_minus_one_mod<F: PrimeField>(m: u64) -> u64 {
    let bytes = F::MODULUS.to_bytes_be();
    let mut r: u128 = 0;
    for b in bytes {
        r = ((r << 8) | b as u128) % m as u128;
    }
    ((r + m as u128 - 1) % m as u128) as u64
}

/// True when 2^bits < p.
pub fn fits_bits<F: PrimeField>(bits: u32) -> bool {
    // p is odd, so 2^(bitsize-1) < p < 2^bitsize
    bits < F::MODULUS_BIT_SIZE
}
