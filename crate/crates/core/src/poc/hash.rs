//! CC1: the prover shares its commitment randomness and the parties
//! recompute the MiMC sponge inside the MPC, then open the digest.

use super::{hex_fr, open_checked, verdict, CheckTranscript, PocCommitment, PocVariant, Witness};
use crate::algebra::PairingBackend;
use crate::commit::MimcParams;
use crate::error::{ArcError, Result};
use crate::mpc::{Mpc, Shared};
use ark_ff::{PrimeField, Zero};

fn mpc_pow<F: PrimeField>(mpc: &mut Mpc, b: &Shared<F>, schedule: &[bool]) -> Result<Shared<F>> {
    let mut acc = b.clone();
    for &bit in schedule {
        acc = mpc.mul1(&acc, &acc)?;
        if bit {
            acc = mpc.mul1(&acc, b)?;
        }
    }
    Ok(acc)
}

fn mpc_permute<F: PrimeField>(
    mpc: &mut Mpc,
    pp: &MimcParams<F>,
    schedule: &[bool],
    mut l: Shared<F>,
    mut r: Shared<F>,
) -> Result<(Shared<F>, Shared<F>)> {
    for k in &pp.constants {
        let t = mpc_pow(mpc, &l.add_public(*k), schedule)?;
        (l, r) = (&r + &t, l);
    }
    Ok((l, r))
}

/// Shared digest of the sponge over (r, x_1, ..., x_d), unopened.
pub fn mpc_hash_commit<F: PrimeField>(mpc: &mut Mpc, pp: &MimcParams<F>, xs: &[Shared<F>], r: &Shared<F>) -> Result<Shared<F>> {
    let n = mpc.parties();
    let schedule = pp.pow_schedule();
    let mut s = (Shared::zero(n), Shared::zero(n));
    for v in std::iter::once(r).chain(xs) {
        s = mpc_permute(mpc, pp, &schedule, &s.0 + v, s.1)?;
    }
    Ok(s.0)
}

pub(crate) fn check_hash<B: PairingBackend>(
    mpc: &mut Mpc,
    pp: &MimcParams<B::Fr>,
    c: &PocCommitment<B>,
    xs: &[Shared<B::Fr>],
    w: Witness<'_, B::Fr>,
) -> Result<CheckTranscript> {
    let c = match c {
        PocCommitment::Hash(h) => *h,
        _ => return Err(ArcError::DomainMismatch("hash check on a non-hash commitment".into())),
    };
    let r = mpc.input(&[w.r.first().copied().unwrap_or_else(B::Fr::zero)]).pop().expect("one input");
    let d = mpc_hash_commit(mpc, pp, xs, &r)?;
    let (digest, flagged) = open_checked(mpc, "poc/digest", &[d])?;
    let (accept, blame) = verdict(mpc, digest[0] == c, &flagged);
    Ok(CheckTranscript {
        variant: PocVariant::Hash,
        backend: B::name().into(),
        beta: None,
        opened: vec![hex_fr(&digest[0])],
        c_omega: Vec::new(),
        proofs: Vec::new(),
        accept,
        blame,
    })
}
