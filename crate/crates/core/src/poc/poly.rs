//! Consistency check with KZG commitments.
//!
//! Per chunk the prover samples a mask w and randomness r_w, and broadcasts
//! c_w (a commitment to the constant w) together with s = r + r_w. Both go
//! out before the challenge: the verifier needs s to strip the hiding slot,
//! and a prover free to pick s after seeing beta could open anything.

use ark_ff::{UniformRand, Zero};
use rand::RngCore;

use super::{chunk_poly, chunks_of, hex_fr, hex_g, open_checked, verdict, CheckTranscript, PocCommitment, PocVariant, Witness};
use crate::algebra::{GroupElem, PairingBackend, Polynomial};
use crate::commit::{kzg_check, kzg_commit, kzg_prove, KzgCommitment, KzgOpening, KzgParams};
use crate::error::{ArcError, Result};
use crate::mpc::{Mpc, Shared};

/// One prover's part in a joint check.
#[derive(Clone, Copy, Debug)]
pub struct PolyItem<'a, B: PairingBackend> {
    pub commitment: &'a PocCommitment<B>,
    pub shares: &'a [Shared<B::Fr>],
    pub witness: Witness<'a, B::Fr>,
}

/// Evaluation claim: `commitment` opens to `rho` at the common challenge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Claim<B: PairingBackend> {
    pub commitment: KzgCommitment<B>,
    pub rho: B::Fr,
    pub opening: KzgOpening<B>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BatchVerdict {
    pub accept: bool,
    /// Pairing equations evaluated: 1 when the aggregate passes, 1 + N otherwise.
    pub pairing_checks: usize,
    /// Claims failing their individual check.
    pub failing: Vec<usize>,
}

/// Aggregates claims with powers of `gamma` and checks once; on failure,
/// checks every claim on its own.
pub fn batch_verify<B: PairingBackend>(pp: &KzgParams<B>, claims: &[Claim<B>], beta: B::Fr, gamma: B::Fr) -> BatchVerdict {
    if claims.is_empty() {
        return BatchVerdict { accept: true, pairing_checks: 0, failing: Vec::new() };
    }
    let mut g = gamma;
    let mut c = B::G1::identity();
    let mut rho = B::Fr::zero();
    let mut proof = B::G1::identity();
    let mut blind = B::Fr::zero();
    for cl in claims {
        c = c + scale::<B>(&cl.commitment.0, g);
        rho += g * cl.rho;
        proof = proof + scale::<B>(&cl.opening.proof, g);
        blind += g * cl.opening.blind;
        g *= gamma;
    }
    if kzg_check(pp, &KzgCommitment(c), beta, rho, &KzgOpening { proof, blind }) {
        return BatchVerdict { accept: true, pairing_checks: 1, failing: Vec::new() };
    }
    let failing: Vec<usize> = claims
        .iter()
        .enumerate()
        .filter(|(_, cl)| !kzg_check(pp, &cl.commitment, beta, cl.rho, &cl.opening))
        .map(|(i, _)| i)
        .collect();
    BatchVerdict { accept: failing.is_empty(), pairing_checks: 1 + claims.len(), failing }
}

fn scale<B: PairingBackend>(p: &B::G1, s: B::Fr) -> B::G1 {
    GroupElem::scale(p, &s)
}

struct ProverChunk<B: PairingBackend> {
    x: Vec<B::Fr>,
    r: B::Fr,
    omega: B::Fr,
    r_omega: B::Fr,
    c_omega: KzgCommitment<B>,
    s: B::Fr,
}

/// Joint check of several provers under one challenge. Returns one
/// transcript per prover and the number of pairing equations evaluated.
pub(crate) fn check_poly_many<B: PairingBackend, R: RngCore>(
    mpc: &mut Mpc,
    pp: &KzgParams<B>,
    chunk: usize,
    items: &[PolyItem<'_, B>],
    rng: &mut R,
    batch: bool,
) -> Result<(Vec<CheckTranscript>, usize)> {
    // Step 1: masks, committed and broadcast with s; masks enter the MPC.
    let mut provers: Vec<Vec<ProverChunk<B>>> = Vec::with_capacity(items.len());
    for it in items {
        let n_chunks = chunks_of(it.shares, chunk).len();
        let wx = chunks_of(it.witness.x, chunk);
        let mut v = Vec::with_capacity(n_chunks);
        for j in 0..n_chunks {
            let x = wx.get(j).map(|c| c.to_vec()).unwrap_or_default();
            let r = it.witness.r.get(j).copied().unwrap_or_else(B::Fr::zero);
            let omega = B::Fr::rand(rng);
            let r_omega = B::Fr::rand(rng);
            let c_omega = kzg_commit(pp, &Polynomial::constant(omega), r_omega)?;
            v.push(ProverChunk { x, r, omega, r_omega, c_omega, s: r + r_omega });
        }
        provers.push(v);
    }
    let omegas: Vec<B::Fr> = provers.iter().flatten().map(|p| p.omega).collect();
    let omega_sh = mpc.input(&omegas);

    // Step 2: challenge.
    let beta: B::Fr = mpc.coin();
    let mut powers = Vec::with_capacity(chunk);
    let mut b = beta;
    for _ in 0..chunk {
        powers.push(b);
        b *= beta;
    }

    // Step 3: rho = w + sum x_i beta^i, local, then one opening.
    let mut rhos_sh = Vec::with_capacity(omega_sh.len());
    let mut k = 0;
    for it in items {
        for part in chunks_of(it.shares, chunk) {
            let lc = Shared::lincomb(&powers[..part.len()], part)?;
            rhos_sh.push(&lc + &omega_sh[k]);
            k += 1;
        }
    }
    let (rhos, flagged) = open_checked(mpc, "poc/rho", &rhos_sh)?;

    // Step 4: each prover opens c + c_w at beta to the value it believes in.
    let mut claims = Vec::with_capacity(rhos.len());
    let mut owner = Vec::with_capacity(rhos.len());
    let mut misshapen = vec![false; items.len()];
    let mut k = 0;
    for (i, (it, ps)) in items.iter().zip(&provers).enumerate() {
        let cs: &[KzgCommitment<B>] = match it.commitment {
            PocCommitment::Poly(cs) => cs,
            _ => return Err(ArcError::DomainMismatch("poly check on a non-poly commitment".into())),
        };
        // A commitment with the wrong number of chunks cannot match.
        misshapen[i] = cs.len() != ps.len();
        for (j, p) in ps.iter().enumerate() {
            let g = &chunk_poly(&p.x) + &Polynomial::constant(p.omega);
            let y = g.eval(beta);
            let proof = kzg_prove(pp, &g, p.r + p.r_omega, beta, y).map(|op| op.proof).unwrap_or(B::G1::identity());
            if !misshapen[i] {
                claims.push(Claim { commitment: cs[j] + p.c_omega, rho: rhos[k], opening: KzgOpening { proof, blind: p.s } });
                owner.push(i);
            }
            k += 1;
        }
    }

    // Step 5: verification.
    let (failing, pairing_checks) = if batch {
        let gamma: B::Fr = mpc.coin();
        let v = batch_verify(pp, &claims, beta, gamma);
        (v.failing, v.pairing_checks)
    } else {
        let f: Vec<usize> = (0..claims.len())
            .filter(|&i| !kzg_check(pp, &claims[i].commitment, beta, claims[i].rho, &claims[i].opening))
            .collect();
        (f, claims.len())
    };

    let mut out = Vec::with_capacity(items.len());
    for (i, ps) in provers.iter().enumerate() {
        let mine: Vec<usize> = (0..claims.len()).filter(|&k| owner[k] == i).collect();
        let ok = !misshapen[i] && mine.iter().all(|k| !failing.contains(k));
        let (accept, blame) = verdict(mpc, ok, &flagged);
        out.push(CheckTranscript {
            variant: PocVariant::Poly,
            backend: B::name().into(),
            beta: Some(hex_fr(&beta)),
            opened: mine.iter().map(|&k| hex_fr(&claims[k].rho)).collect(),
            c_omega: ps.iter().map(|p| hex_g::<B>(&p.c_omega.0)).collect(),
            proofs: mine.iter().map(|&k| hex_g::<B>(&claims[k].opening.proof)).collect(),
            accept,
            blame,
        });
    }
    Ok((out, pairing_checks))
}
