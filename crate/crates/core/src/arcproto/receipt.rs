//! Receipts, the byte strings their signatures cover, and the file codec.
//!
//! Every commitment is encoded as `tag | u32 len | bytes` and every
//! signature list as `u32 count | 64-byte signatures`, big endian. The
//! training message is `u32 N | c_D1 | .. | c_DN | c_M | c_J`.

use std::fmt;

use crate::algebra::PairingBackend;
use crate::commit::sig::{verify, verify_all, Signature, SIG_LEN};
use crate::error::{ArcError, Result};
use crate::poc::{poc_commit, PocCommitment, PocParams, PocVariant};

use super::keys::Pki;

pub const MAGIC: [u8; 3] = *b"ARC";
pub const VERSION: u8 = 1;
const KIND_TRAINING: u8 = b'T';
const KIND_INFERENCE: u8 = b'I';

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrainingReceipt<B: PairingBackend> {
    pub c_d: Vec<PocCommitment<B>>,
    pub c_m: PocCommitment<B>,
    pub c_j: PocCommitment<B>,
    /// One per data holder.
    pub sig_t: Vec<Signature>,
    /// One per training party.
    pub sig_tc: Vec<Signature>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InferenceReceipt<B: PairingBackend> {
    pub training: TrainingReceipt<B>,
    pub c_x: PocCommitment<B>,
    pub c_y: PocCommitment<B>,
    pub sig_ic: Vec<Signature>,
    /// The model owner's signature over everything above.
    pub sig_i: Signature,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Receipt<B: PairingBackend> {
    Training(TrainingReceipt<B>),
    Inference(InferenceReceipt<B>),
}

/// First failing item of a receipt check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReceiptFault {
    Decode(String),
    /// Wrong number of signatures or mixed commitment backends.
    Shape(String),
    TrainComputer(usize),
    DataHolder(usize),
    InferComputer(usize),
    Owner,
    CommitX,
    CommitY,
}

impl fmt::Display for ReceiptFault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReceiptFault::Decode(e) => write!(f, "decode: {e}"),
            ReceiptFault::Shape(e) => write!(f, "shape: {e}"),
            ReceiptFault::TrainComputer(j) => write!(f, "sigma_TC signature of TC_{j}"),
            ReceiptFault::DataHolder(i) => write!(f, "sigma_T signature of DH_{i}"),
            ReceiptFault::InferComputer(j) => write!(f, "sigma_IC signature of IC_{j}"),
            ReceiptFault::Owner => write!(f, "sigma_I signature of M"),
            ReceiptFault::CommitX => write!(f, "c_x does not open to the held x"),
            ReceiptFault::CommitY => write!(f, "c_y does not open to the held y"),
        }
    }
}

fn tag(v: PocVariant) -> u8 {
    match v {
        PocVariant::Poly => 0,
        PocVariant::Hash => 1,
        PocVariant::Pedersen => 2,
    }
}

fn put_commitment<B: PairingBackend>(out: &mut Vec<u8>, c: &PocCommitment<B>) {
    let b = c.to_bytes();
    out.push(tag(c.variant()));
    out.extend_from_slice(&(b.len() as u32).to_be_bytes());
    out.extend_from_slice(&b);
}

fn put_sigs(out: &mut Vec<u8>, sigs: &[Signature]) {
    out.extend_from_slice(&(sigs.len() as u32).to_be_bytes());
    for s in sigs {
        out.extend_from_slice(&s.0);
    }
}

struct Reader<'a> {
    b: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.b.len() - self.pos < n {
            return Err(ArcError::Malformed(format!("truncated at byte {}", self.pos)));
        }
        self.pos += n;
        Ok(&self.b[self.pos - n..self.pos])
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<usize> {
        Ok(u32::from_be_bytes(self.take(4)?.try_into().expect("4 bytes")) as usize)
    }

    fn commitment<B: PairingBackend>(&mut self) -> Result<PocCommitment<B>> {
        let variant = match self.u8()? {
            0 => PocVariant::Poly,
            1 => PocVariant::Hash,
            2 => PocVariant::Pedersen,
            t => return Err(ArcError::Malformed(format!("unknown commitment tag {t}"))),
        };
        let len = self.u32()?;
        let raw = self.take(len)?;
        let c = PocCommitment::from_bytes(variant, raw)?;
        // reject non-canonical encodings so that bytes and values agree
        if c.to_bytes() != raw {
            return Err(ArcError::Malformed("non-canonical commitment".into()));
        }
        Ok(c)
    }

    fn sig(&mut self) -> Result<Signature> {
        Ok(Signature(self.take(SIG_LEN)?.try_into().expect("signature length")))
    }

    fn sigs(&mut self) -> Result<Vec<Signature>> {
        let n = self.u32()?;
        if n > (self.b.len() - self.pos) / SIG_LEN {
            return Err(ArcError::Malformed(format!("{n} signatures do not fit")));
        }
        (0..n).map(|_| self.sig()).collect()
    }

    fn finish(&self) -> Result<()> {
        if self.pos != self.b.len() {
            return Err(ArcError::Malformed(format!("{} trailing bytes", self.b.len() - self.pos)));
        }
        Ok(())
    }
}

impl<B: PairingBackend> TrainingReceipt<B> {
    /// c = c_D1 | .. | c_DN | c_M | c_J, signed by the data holders and the
    /// training parties.
    pub fn message(&self) -> Vec<u8> {
        commitments_message(&self.c_d, &self.c_m, &self.c_j)
    }

    fn put(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.message());
        put_sigs(out, &self.sig_t);
        put_sigs(out, &self.sig_tc);
    }

    fn read(r: &mut Reader<'_>) -> Result<Self> {
        let n = r.u32()?;
        if n > r.b.len() {
            return Err(ArcError::Malformed(format!("{n} data holders do not fit")));
        }
        let c_d = (0..n).map(|_| r.commitment()).collect::<Result<Vec<_>>>()?;
        let c_m = r.commitment()?;
        let c_j = r.commitment()?;
        Ok(TrainingReceipt { c_d, c_m, c_j, sig_t: r.sigs()?, sig_tc: r.sigs()? })
    }

    fn variant(&self) -> std::result::Result<PocVariant, ReceiptFault> {
        let v = self.c_m.variant();
        if self.c_d.iter().chain([&self.c_j]).any(|c| c.variant() != v) {
            return Err(ReceiptFault::Shape("commitments from different backends".into()));
        }
        Ok(v)
    }
}

pub fn commitments_message<B: PairingBackend>(c_d: &[PocCommitment<B>], c_m: &PocCommitment<B>, c_j: &PocCommitment<B>) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(&(c_d.len() as u32).to_be_bytes());
    for c in c_d.iter().chain([c_m, c_j]) {
        put_commitment(&mut out, c);
    }
    out
}

/// c | c_x | c_y, signed by the inference parties.
pub fn inference_message<B: PairingBackend>(t: &TrainingReceipt<B>, c_x: &PocCommitment<B>, c_y: &PocCommitment<B>) -> Vec<u8> {
    let mut out = t.message();
    put_commitment(&mut out, c_x);
    put_commitment(&mut out, c_y);
    out
}

/// c | c_x | c_y | sigma_T | sigma_TC | sigma_IC, signed by the model owner.
pub fn owner_message<B: PairingBackend>(t: &TrainingReceipt<B>, c_x: &PocCommitment<B>, c_y: &PocCommitment<B>, sig_ic: &[Signature]) -> Vec<u8> {
    let mut out = inference_message(t, c_x, c_y);
    put_sigs(&mut out, &t.sig_t);
    put_sigs(&mut out, &t.sig_tc);
    put_sigs(&mut out, sig_ic);
    out
}

impl<B: PairingBackend> InferenceReceipt<B> {
    pub fn inference_message(&self) -> Vec<u8> {
        inference_message(&self.training, &self.c_x, &self.c_y)
    }

    pub fn owner_message(&self) -> Vec<u8> {
        owner_message(&self.training, &self.c_x, &self.c_y, &self.sig_ic)
    }

    fn put(&self, out: &mut Vec<u8>) {
        self.training.put(out);
        put_commitment(out, &self.c_x);
        put_commitment(out, &self.c_y);
        put_sigs(out, &self.sig_ic);
        out.extend_from_slice(&self.sig_i.0);
    }

    fn read(r: &mut Reader<'_>) -> Result<Self> {
        let training = TrainingReceipt::read(r)?;
        let c_x = r.commitment()?;
        let c_y = r.commitment()?;
        Ok(InferenceReceipt { training, c_x, c_y, sig_ic: r.sigs()?, sig_i: r.sig()? })
    }
}

impl<B: PairingBackend> Receipt<B> {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = MAGIC.to_vec();
        out.push(VERSION);
        match self {
            Receipt::Training(t) => {
                out.push(KIND_TRAINING);
                t.put(&mut out);
            }
            Receipt::Inference(i) => {
                out.push(KIND_INFERENCE);
                i.put(&mut out);
            }
        }
        out
    }

    pub fn from_bytes(b: &[u8]) -> Result<Self> {
        let mut r = Reader { b, pos: 0 };
        if r.take(3)? != MAGIC {
            return Err(ArcError::Malformed("not a receipt".into()));
        }
        let v = r.u8()?;
        if v != VERSION {
            return Err(ArcError::Malformed(format!("unsupported receipt version {v}")));
        }
        let out = match r.u8()? {
            KIND_TRAINING => Receipt::Training(TrainingReceipt::read(&mut r)?),
            KIND_INFERENCE => Receipt::Inference(InferenceReceipt::read(&mut r)?),
            k => return Err(ArcError::Malformed(format!("unknown receipt kind {k}"))),
        };
        r.finish()?;
        Ok(out)
    }

    /// Hex text with a trailing newline.
    pub fn to_armor(&self) -> String {
        let mut s = hex::encode(self.to_bytes());
        s.push('\n');
        s
    }

    pub fn from_armor(s: &str) -> Result<Self> {
        let b = hex::decode(s.trim()).map_err(|e| ArcError::Malformed(format!("hex: {e}")))?;
        Self::from_bytes(&b)
    }

    pub fn training(&self) -> &TrainingReceipt<B> {
        match self {
            Receipt::Training(t) => t,
            Receipt::Inference(i) => &i.training,
        }
    }
}

/// Exact serialized length in bytes, header included.
pub fn receipt_size<B: PairingBackend>(r: &Receipt<B>) -> usize {
    r.to_bytes().len()
}

fn sig_fault(e: ArcError, f: impl Fn(usize) -> ReceiptFault) -> ReceiptFault {
    match e {
        ArcError::BadSignature(i) => f(i),
        e => ReceiptFault::Shape(e.to_string()),
    }
}

/// Training-side checklist: sigma_TC, then every sigma_T^i.
pub fn verify_training<B: PairingBackend>(pki: &Pki, t: &TrainingReceipt<B>) -> std::result::Result<(), ReceiptFault> {
    t.variant()?;
    if t.c_d.len() != pki.dh.len() {
        return Err(ReceiptFault::Shape(format!("{} dataset commitments for {} data holders", t.c_d.len(), pki.dh.len())));
    }
    if t.sig_tc.len() != pki.tc.len() {
        return Err(ReceiptFault::Shape(format!("{} training signatures for {} parties", t.sig_tc.len(), pki.tc.len())));
    }
    if t.sig_t.len() != pki.dh.len() {
        return Err(ReceiptFault::Shape(format!("{} data holder signatures for {} data holders", t.sig_t.len(), pki.dh.len())));
    }
    let m = t.message();
    verify_all(&pki.tc, &m, &t.sig_tc).map_err(|e| sig_fault(e, ReceiptFault::TrainComputer))?;
    verify_all(&pki.dh, &m, &t.sig_t).map_err(|e| sig_fault(e, ReceiptFault::DataHolder))
}

/// Everything a third party can check without openings: the training
/// checklist, sigma_IC and the owner's sigma_I.
pub fn verify_receipt<B: PairingBackend>(pki: &Pki, r: &Receipt<B>) -> std::result::Result<(), ReceiptFault> {
    match r {
        Receipt::Training(t) => verify_training(pki, t),
        Receipt::Inference(i) => {
            verify_training(pki, &i.training)?;
            if i.c_x.variant() != i.training.c_m.variant() || i.c_y.variant() != i.training.c_m.variant() {
                return Err(ReceiptFault::Shape("commitments from different backends".into()));
            }
            if i.sig_ic.len() != pki.ic.len() {
                return Err(ReceiptFault::Shape(format!("{} inference signatures for {} parties", i.sig_ic.len(), pki.ic.len())));
            }
            verify_all(&pki.ic, &i.inference_message(), &i.sig_ic).map_err(|e| sig_fault(e, ReceiptFault::InferComputer))?;
            if !verify(&pki.owner, &i.owner_message(), &i.sig_i) {
                return Err(ReceiptFault::Owner);
            }
            Ok(())
        }
    }
}

/// What the client holds next to its receipt.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClientOpenings<F> {
    /// Fixed-point query.
    pub x: Vec<i64>,
    /// Fixed-point score and label.
    pub y: Vec<i64>,
    pub r_x: Vec<F>,
    pub r_y: Vec<F>,
}

/// The client's checklist: the receipt, then c_x and c_y recomputed from
/// the held openings.
pub fn verify_client<B: PairingBackend>(
    pp: &PocParams<B>,
    pki: &Pki,
    r: &InferenceReceipt<B>,
    o: &ClientOpenings<B::Fr>,
) -> std::result::Result<(), ReceiptFault> {
    verify_receipt(pki, &Receipt::Inference(r.clone()))?;
    let enc = |v: &[i64]| v.iter().map(|x| crate::algebra::field::from_i64::<B::Fr>(*x)).collect::<Vec<_>>();
    if poc_commit(pp, &enc(&o.x), &o.r_x).ok().as_ref() != Some(&r.c_x) {
        return Err(ReceiptFault::CommitX);
    }
    if poc_commit(pp, &enc(&o.y), &o.r_y).ok().as_ref() != Some(&r.c_y) {
        return Err(ReceiptFault::CommitY);
    }
    Ok(())
}

/// Owner-side check during inference: sigma_IC over c | c_x | c_y.
pub(crate) fn verify_ic(pki: &Pki, msg: &[u8], sigs: &[Signature]) -> std::result::Result<(), ReceiptFault> {
    if sigs.len() != pki.ic.len() {
        return Err(ReceiptFault::Shape("inference signature count".into()));
    }
    verify_all(&pki.ic, msg, sigs).map_err(|e| sig_fault(e, ReceiptFault::InferComputer))
}
