//! MiMC-Feistel sponge over F_p (rate 1, capacity 1). The exponent is the
//! smallest prime e >= 3 with gcd(e, p - 1) = 1, so x -> x^e permutes F_p.

use ark_ff::PrimeField;
use sha2::{Digest, Sha256};

use crate::algebra::field;

pub const MIMC_ROUNDS: usize = 73;
const MIMC_TAG: &[u8] = b"arc/mimc/v1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MimcParams<F: PrimeField> {
    pub constants: Vec<F>,
    pub exponent: u64,
}

impl<F: PrimeField> MimcParams<F> {
    pub fn new() -> Self {
        let constants = (0..MIMC_ROUNDS as u64)
            .map(|i| {
                if i == 0 {
                    return F::zero();
                }
                let mut h = Sha256::new();
                h.update(MIMC_TAG);
                h.update(i.to_be_bytes());
                F::from_be_bytes_mod_order(&h.finalize())
            })
            .collect();
        MimcParams { constants, exponent: mimc_exponent::<F>() }
    }

    /// Square-and-multiply schedule for x^e: one entry per bit after the
    /// leading one, `true` meaning "multiply by x after squaring".
    pub fn pow_schedule(&self) -> Vec<bool> {
        let e = self.exponent;
        let top = 63 - e.leading_zeros();
        (0..top).rev().map(|i| (e >> i) & 1 == 1).collect()
    }

    /// Multiplications per round (squarings plus extra products).
    pub fn muls_per_round(&self) -> usize {
        self.pow_schedule().iter().map(|&b| 1 + b as usize).sum()
    }

    pub fn permute(&self, mut l: F, mut r: F) -> (F, F) {
        for k in &self.constants {
            let t = (l + k).pow([self.exponent]);
            (l, r) = (r + t, l);
        }
        (l, r)
    }
}

impl<F: PrimeField> Default for MimcParams<F> {
    fn default() -> Self {
        Self::new()
    }
}

pub fn mimc_exponent<F: PrimeField>() -> u64 {
    let mut e = 3u64;
    loop {
        let prime = (2..e).take_while(|k| k * k <= e).all(|k| !e.is_multiple_of(k));
        if prime && field::modulus_minus_one_mod::<F>(e) != 0 {
            return e;
        }
        e += 2;
    }
}

/// Absorbs r and then m, returns the first state word.
pub fn hash_commit<F: PrimeField>(pp: &MimcParams<F>, m: &[F], r: F) -> F {
    let mut s = (F::zero(), F::zero());
    for v in std::iter::once(&r).chain(m) {
        s = pp.permute(s.0 + v, s.1);
    }
    s.0
}
