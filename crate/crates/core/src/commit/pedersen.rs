//! Pedersen vector commitments c = r*h0 + sum m_i*h_i.

use std::collections::HashSet;

use crate::algebra::{GroupElem, PairingBackend};
use crate::error::{ArcError, Result};

pub const PEDERSEN_TAG: &[u8] = b"arc/pedersen/v1";

#[derive(Clone, Debug)]
pub struct PedersenParams<B: PairingBackend> {
    /// h[0] is the blinding generator, h[1..=d] the message generators.
    pub h: Vec<B::G1>,
}

impl<B: PairingBackend> PedersenParams<B> {
    pub fn capacity(&self) -> usize {
        self.h.len() - 1
    }
}

pub fn pedersen_setup<B: PairingBackend>(d: usize) -> Result<PedersenParams<B>> {
    let h: Vec<B::G1> = (0..=d as u64).map(|i| B::hash_to_g1(PEDERSEN_TAG, i)).collect();
    let mut seen = HashSet::with_capacity(h.len());
    for p in &h {
        if p.is_identity() || !seen.insert(p.to_bytes()) {
            return Err(ArcError::InvalidParam(format!("cannot derive {} distinct generators", d + 1)));
        }
    }
    Ok(PedersenParams { h })
}

pub fn pedersen_commit<B: PairingBackend>(pp: &PedersenParams<B>, m: &[B::Fr], r: B::Fr) -> Result<B::G1> {
    if m.len() > pp.capacity() {
        return Err(ArcError::DegreeOverflow { got: m.len(), limit: pp.capacity() });
    }
    Ok(pp.h[0].scale(&r) + B::msm(m, &pp.h[1..=m.len()])?)
}

pub fn pedersen_verify<B: PairingBackend>(pp: &PedersenParams<B>, c: &B::G1, m: &[B::Fr], r: B::Fr) -> bool {
    pedersen_commit(pp, m, r).is_ok_and(|c2| c2 == *c)
}

/// Commitment to the single element `x` at message slot `i` (1-based).
pub fn pedersen_commit_at<B: PairingBackend>(pp: &PedersenParams<B>, i: usize, x: B::Fr, r: B::Fr) -> Result<B::G1> {
    if i == 0 || i > pp.capacity() {
        return Err(ArcError::DegreeOverflow { got: i, limit: pp.capacity() });
    }
    Ok(pp.h[i].scale(&x) + pp.h[0].scale(&r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{MockBackend, MockElem, F101};

    type M = MockBackend<F101>;

    #[test]
    fn mock_generators() {
        let pp = pedersen_setup::<M>(2).unwrap();
        let f = |v| F101::from(v as u64);
        assert_eq!(pp.h, vec![MockElem(f(2)), MockElem(f(3)), MockElem(f(4))]);
        let c = pedersen_commit(&pp, &[f(1), f(1)], f(0)).unwrap();
        assert_eq!(c, MockElem(f(7)));
        assert!(pedersen_verify(&pp, &c, &[f(1), f(1)], f(0)));
        assert!(!pedersen_verify(&pp, &c, &[f(1), f(2)], f(0)));
        assert!(!pedersen_verify(&pp, &c, &[f(1), f(1)], f(1)));
        assert_eq!(pedersen_commit(&pp, &[], f(0)).unwrap(), MockElem(f(0)));
        assert!(pedersen_commit(&pp, &[f(1); 3], f(0)).is_err());
    }

    #[test]
    fn too_many_generators_for_tiny_field() {
        assert!(pedersen_setup::<M>(99).is_err());
        assert!(pedersen_setup::<M>(98).is_ok());
    }
}
