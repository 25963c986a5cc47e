//! CC2: per-element Pedersen commitments c_i = x_i h_i + r_i h0. The parties
//! fold the shared values with powers of a challenge, commit once inside the
//! MPC and open; verifiers fold the public commitments the same way.

use super::{hex_fr, hex_g, open_checked, verdict, CheckTranscript, PocCommitment, PocVariant, Witness};
use crate::algebra::PairingBackend;
use crate::commit::PedersenParams;
use crate::error::{ArcError, Result};
use crate::mpc::ec::dist_commit_pedersen_shared;
use crate::mpc::{Mpc, Shared};
use ark_ff::{One, Zero};

pub(crate) fn check_pedersen<B: PairingBackend>(
    mpc: &mut Mpc,
    pp: &PedersenParams<B>,
    c: &PocCommitment<B>,
    xs: &[Shared<B::Fr>],
    w: Witness<'_, B::Fr>,
) -> Result<CheckTranscript> {
    let cs = match c {
        PocCommitment::Pedersen(cs) => cs,
        _ => return Err(ArcError::DomainMismatch("pedersen check on a non-pedersen commitment".into())),
    };
    let d = xs.len();
    let r_in: Vec<B::Fr> = (0..d).map(|i| w.r.get(i).copied().unwrap_or_else(B::Fr::zero)).collect();
    let rs = mpc.input(&r_in);
    let beta: B::Fr = mpc.coin();
    let mut powers = Vec::with_capacity(d);
    let mut b = B::Fr::one();
    for _ in 0..d {
        powers.push(b);
        b *= beta;
    }
    let folded: Vec<Shared<B::Fr>> = xs.iter().zip(&powers).map(|(x, p)| x.scale(*p)).collect();
    let r_tilde = Shared::lincomb(&powers, &rs)?;
    let shared = dist_commit_pedersen_shared(pp, &folded, &r_tilde)?;
    let (opened, flagged) = open_checked(mpc, "poc/pedersen", &[shared])?;
    let ok = cs.len() == d && B::msm(&powers, cs)? == opened[0];
    let (accept, blame) = verdict(mpc, ok, &flagged);
    Ok(CheckTranscript {
        variant: PocVariant::Pedersen,
        backend: B::name().into(),
        beta: Some(hex_fr(&beta)),
        opened: vec![hex_g::<B>(&opened[0])],
        c_omega: Vec::new(),
        proofs: Vec::new(),
        accept,
        blame,
    })
}
