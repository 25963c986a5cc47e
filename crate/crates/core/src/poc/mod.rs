//! Proof-of-consistency: a prover shows that values it secret-shared into
//! the MPC are the ones it committed to earlier. Three backends share the
//! Setup/Commit/Check shape: polynomial commitments (`Poly`), a hash
//! commitment recomputed inside the MPC (`Hash`), and per-element Pedersen
//! commitments folded with a random challenge (`Pedersen`).

mod hash;
mod pedersen;
mod poly;

use std::fmt;
use std::str::FromStr;

use ark_ff::UniformRand;
use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::algebra::{field, GroupElem, PairingBackend, Polynomial};
use crate::commit::{hash_commit, kzg_commit, kzg_setup, pedersen_commit_at, pedersen_setup, KzgCommitment, KzgParams, MimcParams, PedersenParams};
use crate::error::{ArcError, Result};
use crate::mpc::{Mpc, SecurityMode, Shared};

pub use hash::mpc_hash_commit;
pub use poly::{batch_verify, BatchVerdict, Claim, PolyItem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PocVariant {
    Poly,
    Hash,
    Pedersen,
}

impl PocVariant {
    pub const ALL: [PocVariant; 3] = [PocVariant::Poly, PocVariant::Hash, PocVariant::Pedersen];

    pub fn name(&self) -> &'static str {
        match self {
            PocVariant::Poly => "poly",
            PocVariant::Hash => "hash",
            PocVariant::Pedersen => "pedersen",
        }
    }
}

impl fmt::Display for PocVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PocVariant {
    type Err = ArcError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "poly" => Ok(PocVariant::Poly),
            "hash" => Ok(PocVariant::Hash),
            "pedersen" => Ok(PocVariant::Pedersen),
            _ => Err(ArcError::InvalidParam(format!("unknown poc backend `{s}`"))),
        }
    }
}

#[derive(Clone, Debug)]
pub enum PocParams<B: PairingBackend> {
    /// `chunk` values per commitment at degrees 1..=chunk; the top slot
    /// chunk+1 holds the hiding randomness.
    Poly { kzg: KzgParams<B>, chunk: usize },
    Hash(MimcParams<B::Fr>),
    Pedersen(PedersenParams<B>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PocCommitment<B: PairingBackend> {
    Poly(Vec<KzgCommitment<B>>),
    Hash(B::Fr),
    Pedersen(Vec<B::G1>),
}

/// What the prover claims to have committed to.
#[derive(Clone, Copy, Debug)]
pub struct Witness<'a, F> {
    pub x: &'a [F],
    pub r: &'a [F],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "party")]
pub enum Blame {
    Prover,
    ComputingParty(usize),
}

/// Public record of one check. Field and group elements are hex encoded.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckTranscript {
    pub variant: PocVariant,
    pub backend: String,
    pub beta: Option<String>,
    /// Opened values: rho per chunk, the digest, or the folded commitment.
    pub opened: Vec<String>,
    pub c_omega: Vec<String>,
    pub proofs: Vec<String>,
    pub accept: bool,
    pub blame: Option<Blame>,
}

impl CheckTranscript {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("transcript serializes")
    }
}

pub(crate) fn hex_fr<F: ark_ff::PrimeField>(v: &F) -> String {
    hex::encode(field::to_bytes(v))
}

pub(crate) fn hex_g<B: PairingBackend>(v: &B::G1) -> String {
    hex::encode(v.to_bytes())
}

pub fn poc_setup<B: PairingBackend>(variant: PocVariant, seed: u64, d: usize) -> Result<PocParams<B>> {
    if d < 1 {
        return Err(ArcError::InvalidParam("poc size must be at least 1".into()));
    }
    Ok(match variant {
        PocVariant::Poly => PocParams::Poly { kzg: kzg_setup(seed, d + 1)?, chunk: d },
        PocVariant::Hash => PocParams::Hash(MimcParams::new()),
        PocVariant::Pedersen => PocParams::Pedersen(pedersen_setup(d)?),
    })
}

impl<B: PairingBackend> PocParams<B> {
    pub fn variant(&self) -> PocVariant {
        match self {
            PocParams::Poly { .. } => PocVariant::Poly,
            PocParams::Hash(_) => PocVariant::Hash,
            PocParams::Pedersen(_) => PocVariant::Pedersen,
        }
    }

    /// Number of randomness elements a commitment to `len` values takes.
    pub fn rand_len(&self, len: usize) -> usize {
        match self {
            PocParams::Poly { chunk, .. } => len.div_ceil(*chunk).max(1),
            PocParams::Hash(_) => 1,
            PocParams::Pedersen(_) => len,
        }
    }

    pub fn sample_randomness<R: RngCore>(&self, len: usize, rng: &mut R) -> Vec<B::Fr> {
        (0..self.rand_len(len)).map(|_| B::Fr::rand(rng)).collect()
    }
}

/// Coefficients of one chunk: zero constant term, x_i at degree i.
pub(crate) fn chunk_poly<F: ark_ff::PrimeField>(x: &[F]) -> Polynomial<F> {
    let mut c = Vec::with_capacity(x.len() + 1);
    c.push(F::zero());
    c.extend_from_slice(x);
    Polynomial::new(c)
}

pub(crate) fn chunks_of<T>(x: &[T], chunk: usize) -> Vec<&[T]> {
    if x.is_empty() {
        vec![&x[..0]]
    } else {
        x.chunks(chunk).collect()
    }
}

pub fn poc_commit<B: PairingBackend>(pp: &PocParams<B>, x: &[B::Fr], r: &[B::Fr]) -> Result<PocCommitment<B>> {
    let need = pp.rand_len(x.len());
    if r.len() != need {
        return Err(ArcError::LengthMismatch { expected: need, got: r.len() });
    }
    match pp {
        PocParams::Poly { kzg, chunk } => chunks_of(x, *chunk)
            .into_iter()
            .zip(r)
            .map(|(c, r)| kzg_commit(kzg, &chunk_poly(c), *r))
            .collect::<Result<Vec<_>>>()
            .map(PocCommitment::Poly),
        PocParams::Hash(h) => Ok(PocCommitment::Hash(hash_commit(h, x, r[0]))),
        PocParams::Pedersen(p) => x
            .iter()
            .zip(r)
            .enumerate()
            .map(|(i, (x, r))| pedersen_commit_at(p, i + 1, *x, *r))
            .collect::<Result<Vec<_>>>()
            .map(PocCommitment::Pedersen),
    }
}

impl<B: PairingBackend> PocCommitment<B> {
    pub fn variant(&self) -> PocVariant {
        match self {
            PocCommitment::Poly(_) => PocVariant::Poly,
            PocCommitment::Hash(_) => PocVariant::Hash,
            PocCommitment::Pedersen(_) => PocVariant::Pedersen,
        }
    }

    /// Concatenated fixed-width element encodings.
    pub fn to_bytes(&self) -> Vec<u8> {
        match self {
            PocCommitment::Poly(cs) => cs.iter().flat_map(|c| c.to_bytes()).collect(),
            PocCommitment::Hash(h) => field::to_bytes(h),
            PocCommitment::Pedersen(cs) => cs.iter().flat_map(|c| c.to_bytes()).collect(),
        }
    }

    pub fn from_bytes(variant: PocVariant, b: &[u8]) -> Result<Self> {
        let g = B::G1::byte_len();
        let points = |b: &[u8]| -> Result<Vec<B::G1>> {
            if !b.len().is_multiple_of(g) {
                return Err(ArcError::Malformed(format!("{} bytes is not a whole number of points", b.len())));
            }
            b.chunks(g).map(B::G1::from_bytes).collect()
        };
        match variant {
            PocVariant::Poly => Ok(PocCommitment::Poly(points(b)?.into_iter().map(KzgCommitment).collect())),
            PocVariant::Hash => Ok(PocCommitment::Hash(field::from_bytes(b)?)),
            PocVariant::Pedersen => Ok(PocCommitment::Pedersen(points(b)?)),
        }
    }
}

/// Runs the check for one prover. In identifiable-abort mode a reject names
/// the party at fault; otherwise a corrupted opening surfaces as an
/// [`ArcError::MpcAbort`] or, in semi-honest mode, as a plain reject.
pub fn poc_check<B: PairingBackend, R: RngCore>(
    mpc: &mut Mpc,
    pp: &PocParams<B>,
    c: &PocCommitment<B>,
    xs: &[Shared<B::Fr>],
    w: Witness<'_, B::Fr>,
    rng: &mut R,
) -> Result<CheckTranscript> {
    match pp {
        PocParams::Poly { kzg, chunk } => {
            let item = PolyItem { commitment: c, shares: xs, witness: w };
            Ok(poly::check_poly_many(mpc, kzg, *chunk, &[item], rng, false)?.0.remove(0))
        }
        PocParams::Hash(h) => hash::check_hash(mpc, h, c, xs, w),
        PocParams::Pedersen(p) => pedersen::check_pedersen(mpc, p, c, xs, w),
    }
}

/// Checks several provers at once. Poly checks share one challenge and, with
/// `batch`, one aggregated pairing check; the other backends run in turn.
pub fn poc_check_many<B: PairingBackend, R: RngCore>(
    mpc: &mut Mpc,
    pp: &PocParams<B>,
    items: &[PolyItem<'_, B>],
    rng: &mut R,
    batch: bool,
) -> Result<(Vec<CheckTranscript>, usize)> {
    match pp {
        PocParams::Poly { kzg, chunk } => poly::check_poly_many(mpc, kzg, *chunk, items, rng, batch),
        _ => Ok((
            items
                .iter()
                .map(|it| poc_check(mpc, pp, it.commitment, it.shares, it.witness, rng))
                .collect::<Result<Vec<_>>>()?,
            0,
        )),
    }
}

/// The same check under identifiable abort.
pub fn poc_check_id<B: PairingBackend, R: RngCore>(
    mpc: &mut Mpc,
    pp: &PocParams<B>,
    c: &PocCommitment<B>,
    xs: &[Shared<B::Fr>],
    w: Witness<'_, B::Fr>,
    rng: &mut R,
) -> Result<CheckTranscript> {
    let prev = mpc.mode();
    mpc.set_mode(SecurityMode::IdentifiableAbort);
    let out = poc_check(mpc, pp, c, xs, w, rng);
    mpc.set_mode(prev);
    out
}

/// Commitment to values that only exist inside the MPC (a trained model,
/// shared randomness). The randomness is shared too; the result is opened.
pub fn poc_dist_commit<B: PairingBackend>(
    mpc: &mut Mpc,
    pp: &PocParams<B>,
    xs: &[Shared<B::Fr>],
    rs: &[Shared<B::Fr>],
) -> Result<PocCommitment<B>> {
    let need = pp.rand_len(xs.len());
    if rs.len() != need {
        return Err(ArcError::LengthMismatch { expected: need, got: rs.len() });
    }
    let n = mpc.parties();
    match pp {
        PocParams::Poly { kzg, chunk } => {
            let shared = chunks_of(xs, *chunk)
                .into_iter()
                .zip(rs)
                .map(|(c, r)| {
                    let mut coeffs = vec![Shared::zero(n)];
                    coeffs.extend_from_slice(c);
                    crate::mpc::ec::dist_commit_kzg_shared(kzg, &coeffs, r)
                })
                .collect::<Result<Vec<_>>>()?;
            let open = mpc.open("poc/commit", &shared)?;
            Ok(PocCommitment::Poly(open.into_iter().map(KzgCommitment).collect()))
        }
        PocParams::Hash(h) => {
            let d = mpc_hash_commit(mpc, h, xs, &rs[0])?;
            Ok(PocCommitment::Hash(mpc.open("poc/commit", &[d])?[0]))
        }
        PocParams::Pedersen(p) => {
            if xs.len() > p.capacity() {
                return Err(ArcError::DegreeOverflow { got: xs.len(), limit: p.capacity() });
            }
            let shared = xs
                .iter()
                .zip(rs)
                .enumerate()
                .map(|(i, (x, r))| crate::mpc::ec::shared_msm::<B>(&[x.clone(), r.clone()], &[p.h[i + 1], p.h[0]]))
                .collect::<Result<Vec<_>>>()?;
            Ok(PocCommitment::Pedersen(mpc.open("poc/commit", &shared)?))
        }
    }
}

/// Opens in the mode-appropriate way: identifiable openings recover the
/// correct values and report the parties that sent bad shares.
pub(crate) fn open_checked<T: crate::mpc::ShareValue>(mpc: &mut Mpc, label: &str, vals: &[Shared<T>]) -> Result<(Vec<T>, Vec<usize>)> {
    if mpc.mode() == SecurityMode::IdentifiableAbort {
        Ok(mpc.open_tagged(label, vals))
    } else {
        Ok((mpc.open(label, vals)?, Vec::new()))
    }
}

/// Verdict bookkeeping shared by the backends: a failed check blames the
/// prover first, a clean check with flagged openings blames the computing
/// party. Blame is only assigned under identifiable abort.
pub(crate) fn verdict(mpc: &Mpc, ok: bool, flagged: &[usize]) -> (bool, Option<Blame>) {
    let id = mpc.mode() == SecurityMode::IdentifiableAbort;
    if !ok {
        (false, id.then_some(Blame::Prover))
    } else if let Some(p) = flagged.first() {
        (false, id.then_some(Blame::ComputingParty(*p)))
    } else {
        (true, None)
    }
}
