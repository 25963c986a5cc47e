//! Share conversion between Z_{2^K} and F_p through bit decomposition and
//! recomposition. Signed values are shifted up by 2^(ell-1) first so that the
//! bit-level steps only ever see values in [0, 2^ell).

use ark_ff::PrimeField;
use serde::{Deserialize, Serialize};

use super::binary::{bitcom, bitdec_field, bitdec_ring};
use super::domain::Domain;
use super::sim::{Mpc, Shared};
use crate::algebra::{field, Z2k};
use crate::error::{ArcError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvertParams {
    /// Bit width of the signed values being moved.
    pub ell: u32,
    /// Statistical masking parameter.
    pub kappa: u32,
}

impl Default for ConvertParams {
    fn default() -> Self {
        ConvertParams { ell: 64, kappa: 40 }
    }
}

impl ConvertParams {
    fn check<F: PrimeField>(&self, k: u32) -> Result<()> {
        if self.ell == 0 || self.ell > k {
            return Err(ArcError::InvalidParam(format!("ell must be in 1..={k}")));
        }
        if !field::fits_bits::<F>(self.ell + self.kappa + 1) {
            return Err(ArcError::FieldTooSmall { needed: self.ell + self.kappa + 1 });
        }
        Ok(())
    }

    fn in_range(&self, v: i128) -> bool {
        let half = 1i128 << (self.ell - 1);
        (-half..half).contains(&v)
    }
}

/// Range precondition. Secret values cannot be inspected by the parties, so
/// this is a simulator-side assertion rather than part of the protocol.
fn check_range_ring<const K: u32>(p: &ConvertParams, xs: &[Shared<Z2k<K>>]) -> Result<()> {
    for x in xs {
        if !p.in_range(x.reveal_unchecked().signed() as i128) {
            return Err(ArcError::Range { bits: p.ell });
        }
    }
    Ok(())
}

/// Ring to field, also returning the opened masked sums of the
/// recomposition step.
pub fn ring_to_field_traced<F: PrimeField, const K: u32>(
    mpc: &mut Mpc,
    xs: &[Shared<Z2k<K>>],
    p: ConvertParams,
) -> Result<(Vec<Shared<F>>, Vec<F>)> {
    p.check::<F>(K)?;
    check_range_ring(&p, xs)?;
    let shift = <Z2k<K> as Domain>::pow2(p.ell - 1);
    let shifted: Vec<_> = xs.iter().map(|x| x.add_public(shift)).collect();
    let bits = bitdec_ring(mpc, &shifted, p.ell as usize)?;
    let (ys, eps) = bitcom::<F>(mpc, &bits, p.ell + p.kappa, (p.ell + p.kappa + 1) as usize)?;
    let back = <F as Domain>::pow2(p.ell - 1);
    Ok((ys.into_iter().map(|y| y.add_public(-back)).collect(), eps))
}

pub fn ring_to_field<F: PrimeField, const K: u32>(mpc: &mut Mpc, xs: &[Shared<Z2k<K>>], p: ConvertParams) -> Result<Vec<Shared<F>>> {
    ring_to_field_traced(mpc, xs, p).map(|r| r.0)
}

/// Field to ring; the field values are read as signed integers.
pub fn field_to_ring<F: PrimeField, const K: u32>(mpc: &mut Mpc, ys: &[Shared<F>], p: ConvertParams) -> Result<Vec<Shared<Z2k<K>>>> {
    p.check::<F>(K)?;
    for y in ys {
        if !p.in_range(field::to_i128(y.reveal_unchecked())) {
            return Err(ArcError::Range { bits: p.ell });
        }
    }
    let shift = <F as Domain>::pow2(p.ell - 1);
    let shifted: Vec<_> = ys.iter().map(|y| y.add_public(shift)).collect();
    let (bits, _) = bitdec_field(mpc, &shifted, p.ell, p.kappa)?;
    let (xs, _) = bitcom::<Z2k<K>>(mpc, &bits, K, K as usize)?;
    let back = <Z2k<K> as Domain>::pow2(p.ell - 1);
    Ok(xs.into_iter().map(|x| x.add_public(-back)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Fr377, F101, Z64};
    use crate::mpc::sim::SecurityMode;

    #[test]
    fn negative_maps_to_p_minus() {
        let mut m = Mpc::new(3, 1, SecurityMode::SemiHonest);
        let xs = m.input(&[Z64::from_i64(-3), Z64::new(0)]);
        let ys = ring_to_field::<Fr377, 64>(&mut m, &xs, ConvertParams { ell: 8, kappa: 40 }).unwrap();
        assert_eq!(ys[0].reveal_unchecked(), -Fr377::from(3u64));
        assert_eq!(ys[1].reveal_unchecked(), Fr377::from(0u64));
    }

    #[test]
    fn boundary_is_range_error() {
        let mut m = Mpc::new(3, 2, SecurityMode::SemiHonest);
        let xs = m.input(&[Z64::new(128)]);
        let r = ring_to_field::<Fr377, 64>(&mut m, &xs, ConvertParams { ell: 8, kappa: 40 });
        assert_eq!(r.unwrap_err(), ArcError::Range { bits: 8 });
        let ok = m.input(&[Z64::from_i64(-128)]);
        assert!(ring_to_field::<Fr377, 64>(&mut m, &ok, ConvertParams { ell: 8, kappa: 40 }).is_ok());
    }

    #[test]
    fn tiny_field_rejected() {
        let mut m = Mpc::new(3, 3, SecurityMode::SemiHonest);
        let xs = m.input(&[Z64::new(1)]);
        let r = ring_to_field::<F101, 64>(&mut m, &xs, ConvertParams { ell: 8, kappa: 40 });
        assert!(matches!(r, Err(ArcError::FieldTooSmall { .. })));
    }

    #[test]
    fn full_width_round_trip() {
        let mut m = Mpc::new(3, 4, SecurityMode::SemiHonest);
        let vals = [i64::MIN, -1, 0, 1, i64::MAX, 123456789];
        let xs = m.input(&vals.map(Z64::from_i64));
        let p = ConvertParams::default();
        let ys = ring_to_field::<Fr377, 64>(&mut m, &xs, p).unwrap();
        for (y, v) in ys.iter().zip(vals) {
            assert_eq!(y.reveal_unchecked(), field::from_i64::<Fr377>(v));
        }
        let back = field_to_ring::<Fr377, 64>(&mut m, &ys, p).unwrap();
        for (x, v) in back.iter().zip(vals) {
            assert_eq!(x.reveal_unchecked().signed(), v);
        }
    }
}
