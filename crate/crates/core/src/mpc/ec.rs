//! Elliptic-curve extension of the black box: shares of G1 points, obtained
//! by each party applying a public linear map to its own scalar shares.

use super::sim::{Mpc, Shared};
use crate::algebra::PairingBackend;
use crate::commit::{KzgCommitment, KzgParams, PedersenParams};
use crate::error::{ArcError, Result};

/// Local: party i holds sum_j s_{j,i} * P_j.
pub fn shared_msm<B: PairingBackend>(scalars: &[Shared<B::Fr>], points: &[B::G1]) -> Result<Shared<B::G1>> {
    if scalars.len() != points.len() {
        return Err(ArcError::LengthMismatch { expected: points.len(), got: scalars.len() });
    }
    let n = scalars.first().map_or(1, |s| s.parties());
    let shares = (0..n)
        .map(|i| {
            let s: Vec<B::Fr> = scalars.iter().map(|v| v.shares[i]).collect();
            B::msm(&s, points)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Shared { shares })
}

/// Shares of r*h0 + sum x_j*h_j, without opening.
pub fn dist_commit_pedersen_shared<B: PairingBackend>(
    pp: &PedersenParams<B>,
    xs: &[Shared<B::Fr>],
    r: &Shared<B::Fr>,
) -> Result<Shared<B::G1>> {
    if xs.len() > pp.capacity() {
        return Err(ArcError::DegreeOverflow { got: xs.len(), limit: pp.capacity() });
    }
    let mut scalars = vec![r.clone()];
    scalars.extend(xs.iter().cloned());
    shared_msm::<B>(&scalars, &pp.h[..=xs.len()])
}

pub fn dist_commit_pedersen<B: PairingBackend>(
    mpc: &mut Mpc,
    pp: &PedersenParams<B>,
    xs: &[Shared<B::Fr>],
    r: &Shared<B::Fr>,
) -> Result<B::G1> {
    let c = dist_commit_pedersen_shared(pp, xs, r)?;
    Ok(mpc.open("ec/pedersen", &[c])?[0])
}

/// Shares of the hiding KZG commitment to the polynomial with coefficients
/// `coeffs` (constant term first) and randomness `r`.
pub fn dist_commit_kzg_shared<B: PairingBackend>(
    pp: &KzgParams<B>,
    coeffs: &[Shared<B::Fr>],
    r: &Shared<B::Fr>,
) -> Result<Shared<B::G1>> {
    if coeffs.len() > pp.max_degree {
        return Err(ArcError::DegreeOverflow { got: coeffs.len().saturating_sub(1), limit: pp.max_degree - 1 });
    }
    let mut scalars: Vec<Shared<B::Fr>> = coeffs.to_vec();
    scalars.push(r.clone());
    let mut points: Vec<B::G1> = pp.powers_g1[..coeffs.len()].to_vec();
    points.push(pp.powers_g1[pp.max_degree]);
    shared_msm::<B>(&scalars, &points)
}

pub fn dist_commit_kzg<B: PairingBackend>(
    mpc: &mut Mpc,
    pp: &KzgParams<B>,
    coeffs: &[Shared<B::Fr>],
    r: &Shared<B::Fr>,
) -> Result<KzgCommitment<B>> {
    let c = dist_commit_kzg_shared(pp, coeffs, r)?;
    Ok(KzgCommitment(mpc.open("ec/kzg", &[c])?[0]))
}
