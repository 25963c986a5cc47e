//! The ring Z_{2^K} for K in 1..=64, with wrapping arithmetic.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{ArcError, Result};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Z2k<const K: u32>(u64);

/// The default computation ring.
pub type Z64 = Z2k<64>;
/// Boolean shares live in Z_2.
pub type Bit = Z2k<1>;

impl<const K: u32> Z2k<K> {
    pub const MASK: u64 = if K >= 64 { u64::MAX } else { (1u64 << K) - 1 };
    pub const ZERO: Self = Z2k(0);
    pub const ONE: Self = Z2k(1 & Self::MASK);

    pub fn new(v: u64) -> Self {
        assert!(K >= 1 && K <= 64);
        Z2k(v & Self::MASK)
    }

    pub fn from_i64(v: i64) -> Self {
        Self::new(v as u64)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    /// Two's-complement reading of the residue.
    pub fn signed(self) -> i64 {
        if K == 64 {
            self.0 as i64
        } else {
            let shift = 64 - K;
            ((self.0 << shift) as i64) >> shift
        }
    }

    pub fn bit(self, i: u32) -> bool {
        (self.0 >> i) & 1 == 1
    }

    pub fn byte_len() -> usize {
        (K as usize).div_ceil(8)
    }

    pub fn to_bytes(self) -> Vec<u8> {
        self.0.to_be_bytes()[8 - Self::byte_len()..].to_vec()
    }

    pub fn from_bytes(b: &[u8]) -> Result<Self> {
        if b.len() != Self::byte_len() {
            return Err(ArcError::Malformed(format!("ring element needs {} bytes", Self::byte_len())));
        }
        let mut buf = [0u8; 8];
        buf[8 - b.len()..].copy_from_slice(b);
        let v = u64::from_be_bytes(buf);
        if v & !Self::MASK != 0 {
            return Err(ArcError::Malformed("ring element out of range".into()));
        }
        Ok(Z2k(v))
    }
}

impl<const K: u32> fmt::Debug for Z2k<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const K: u32> Add for Z2k<K> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Z2k(self.0.wrapping_add(o.0) & Self::MASK)
    }
}

impl<const K: u32> Sub for Z2k<K> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Z2k(self.0.wrapping_sub(o.0) & Self::MASK)
    }
}

impl<const K: u32> Mul for Z2k<K> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Z2k(self.0.wrapping_mul(o.0) & Self::MASK)
    }
}

impl<const K: u32> Neg for Z2k<K> {
    type Output = Self;
    fn neg(self) -> Self {
        Z2k(self.0.wrapping_neg() & Self::MASK)
    }
}

impl<const K: u32> AddAssign for Z2k<K> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<const K: u32> SubAssign for Z2k<K> {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<const K: u32> MulAssign for Z2k<K> {
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}
