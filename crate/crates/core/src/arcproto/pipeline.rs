//! Training, inference and auditing. Each phase runs on a fresh simulator
//! instance, first with abort; if that aborts without a culprit, the phase
//! is rerun with identifiable abort to name one.
//!
//! The machine learning runs in Z_2^64 and the consistency checks in the
//! commitment field, so every committed vector crosses over with a share
//! conversion before it is checked or committed.

use std::time::Instant;

use ark_ff::PrimeField;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{field, PairingBackend, Z64};
use crate::audit::{evaluate, AuditInputs, AuditOutput, AuditSpec};
use crate::commit::sig::{dist_sign_emulated, sign, verify, verify_all, PublicKey};
use crate::error::{ArcError, Result};
use crate::ml::{predict, train, FixedDataset, TrainConfig, J_BITS};
use crate::mpc::fixed::fx_encode;
use crate::mpc::{ring_to_field, ConvertParams, Mpc, MpcEngine, SecurityMode, Shared, Stats, Tamper};
use crate::poc::{poc_check, poc_commit, poc_dist_commit, poc_setup, Blame, PocCommitment, PocParams, PocVariant, Witness};

use super::keys::{derive_seed, KeyRing, PartyCounts, Pki};
use super::parties::{PartyId, Role};
use super::receipt::{commitments_message, inference_message, owner_message, verify_client, verify_ic, verify_training, ClientOpenings, InferenceReceipt, ReceiptFault, TrainingReceipt};

/// Ring values moved into the field are signed and below 2^47.
pub const CONVERT: ConvertParams = ConvertParams { ell: 48, kappa: 40 };

/// Injected misbehaviour, for the tamper matrix and the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Fault {
    /// DH_i commits to its dataset but inputs a different one at training.
    TrainDataset(usize),
    /// The owner inputs a different model at inference.
    InferModel,
    /// DH_i inputs a different dataset at audit time.
    AuditDataset(usize),
    /// The owner inputs a different model at audit time.
    AuditModel,
    /// The client inputs a label it never received.
    ClientInput,
    /// The client asks for a model that was never trained.
    UnknownModel,
    /// The client presents a receipt with a corrupted owner signature.
    ForgedReceipt,
    /// A computing party adds one to its share in the first PoC opening of
    /// its phase.
    Share(Role, usize),
}

impl Fault {
    /// `role:index:field`, e.g. `dh:0:dataset` or `ac:1:share`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [role, idx, what] = parts[..] else {
            return Err(ArcError::InvalidParam(format!("tamper spec `{s}` is not role:index:field")));
        };
        let role: Role = role.parse()?;
        let i: usize = idx.parse().map_err(|_| ArcError::InvalidParam(format!("bad index `{idx}`")))?;
        Ok(match (role, what) {
            (Role::DataHolder, "dataset") => Fault::TrainDataset(i),
            (Role::DataHolder, "audit-dataset") => Fault::AuditDataset(i),
            (Role::ModelOwner, "model") => Fault::InferModel,
            (Role::ModelOwner, "audit-model") => Fault::AuditModel,
            (Role::Client, "input") => Fault::ClientInput,
            (Role::Client, "model-id") => Fault::UnknownModel,
            (Role::Client, "receipt") => Fault::ForgedReceipt,
            (Role::TrainComputer | Role::InferComputer | Role::AuditComputer, "share") => Fault::Share(role, i),
            _ => return Err(ArcError::InvalidParam(format!("no fault `{what}` for role in `{s}`"))),
        })
    }

    /// The party the protocol should blame.
    pub fn culprit(&self) -> Option<PartyId> {
        match *self {
            Fault::TrainDataset(i) | Fault::AuditDataset(i) => Some(PartyId::dh(i)),
            Fault::InferModel | Fault::AuditModel => Some(PartyId::owner()),
            Fault::ClientInput | Fault::ForgedReceipt => Some(PartyId::client()),
            Fault::UnknownModel => None,
            Fault::Share(r, j) => Some(PartyId::computer(r, j)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HolderState<F> {
    pub data: FixedDataset,
    pub r: Vec<F>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OwnerState<F> {
    pub model: Vec<i64>,
    pub r_m: Vec<F>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClientState<B: PairingBackend> {
    pub receipt: InferenceReceipt<B>,
    pub openings: ClientOpenings<B::Fr>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseReport {
    pub phase: String,
    pub stats: Stats,
    pub ms: f64,
    /// Whether the phase had to be rerun with identifiable abort.
    pub rerun: bool,
}

#[derive(Clone, Debug)]
pub struct Trained<B: PairingBackend> {
    pub receipt: TrainingReceipt<B>,
    pub owner: OwnerState<B::Fr>,
    pub holders: Vec<HolderState<B::Fr>>,
    pub report: PhaseReport,
    /// Simulator view of the secret shuffle keys, for oracle tests only.
    pub sim_j: Vec<i64>,
}

#[derive(Clone, Debug)]
pub struct Inferred<B: PairingBackend> {
    pub client: ClientState<B>,
    pub report: PhaseReport,
}

/// Broadcast by the client at the start of an audit.
#[derive(Clone, Debug)]
pub struct AuditRequest<B: PairingBackend> {
    pub receipt: InferenceReceipt<B>,
    pub owner_pk: PublicKey,
    pub f_audit: String,
    pub aux: serde_json::Value,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuditOutcome {
    Result(AuditOutput),
    Malicious(PartyId),
}

#[derive(Clone, Debug)]
pub struct Audited {
    pub outcome: AuditOutcome,
    pub report: PhaseReport,
    /// Public randomness handed to the audit function.
    pub public_seed: Option<u64>,
}

fn abort(phase: &str, reason: impl Into<String>, culprit: Option<PartyId>) -> ArcError {
    ArcError::Abort { phase: phase.into(), reason: reason.into(), culprit }
}

/// Maps simulator aborts onto the computing parties of the phase.
fn lift(phase: &'static str, role: Role) -> impl Fn(ArcError) -> ArcError {
    move |e| match e {
        ArcError::MpcAbort { label, culprit } => abort(phase, format!("opening '{label}' was inconsistent"), culprit.map(|j| PartyId::computer(role, j))),
        e => e,
    }
}

fn enc<F: PrimeField>(v: &[i64]) -> Vec<F> {
    v.iter().map(|x| field::from_i64(*x)).collect()
}

fn ring_input(mpc: &mut Mpc, v: &[i64]) -> Vec<Shared<Z64>> {
    let z: Vec<Z64> = v.iter().map(|x| Z64::from_i64(*x)).collect();
    mpc.input(&z)
}

/// A substitute input: the first value moved by one.
fn perturb(v: &[i64]) -> Vec<i64> {
    let mut out = v.to_vec();
    if let Some(x) = out.first_mut() {
        *x += fx_encode(1.0);
    }
    out
}

fn signed(v: &[Z64]) -> Vec<i64> {
    v.iter().map(|z| z.signed()).collect()
}

/// Rows and labels from shares laid out as in [`FixedDataset::flatten`].
fn unflatten_shares<T: Clone>(v: &[T], rows: usize, width: usize) -> (Vec<Vec<T>>, Vec<T>) {
    let x = (0..rows).map(|k| v[k * width..(k + 1) * width].to_vec()).collect();
    (x, v[rows * width..].to_vec())
}

pub struct Session<B: PairingBackend> {
    pub pp: PocParams<B>,
    pub counts: PartyCounts,
    pub keys: KeyRing,
    pub pki: Pki,
    pub seed: u64,
    pub faults: Vec<Fault>,
}

impl<B: PairingBackend> Session<B> {
    /// `capacity` bounds the length of every committed vector.
    pub fn new(variant: PocVariant, counts: PartyCounts, seed: u64, capacity: usize) -> Result<Self> {
        counts.validate()?;
        let pp = poc_setup(variant, derive_seed(seed, "pp", 0), capacity)?;
        let keys = KeyRing::derive(seed, &counts);
        let pki = keys.pki();
        Ok(Session { pp, counts, keys, pki, seed, faults: Vec::new() })
    }

    /// Longest vector the pipeline commits to for these inputs.
    pub fn capacity_for(holders: &[FixedDataset], cfg: &TrainConfig) -> usize {
        let rows: usize = holders.iter().map(|d| d.len()).sum();
        let width = holders.first().map_or(0, |d| d.width());
        holders.iter().map(|d| d.flatten().len()).chain([cfg.epochs * rows, width + 1, 2]).max().unwrap_or(2)
    }

    pub fn with_faults(mut self, faults: Vec<Fault>) -> Result<Self> {
        for f in &faults {
            let ok = match *f {
                Fault::TrainDataset(i) | Fault::AuditDataset(i) => i < self.counts.data_holders,
                Fault::Share(Role::TrainComputer, j) => j < self.counts.train,
                Fault::Share(Role::InferComputer, j) => j < self.counts.infer,
                Fault::Share(Role::AuditComputer, j) => j < self.counts.audit,
                Fault::Share(..) => false,
                _ => true,
            };
            if !ok {
                return Err(ArcError::InvalidParam(format!("fault {f:?} names a party that does not exist")));
            }
        }
        self.faults = faults;
        Ok(self)
    }

    pub fn variant(&self) -> PocVariant {
        self.pp.variant()
    }

    fn has(&self, f: Fault) -> bool {
        self.faults.contains(&f)
    }

    fn mpc(&self, role: Role, mode: SecurityMode) -> Mpc {
        let (n, tag) = match role {
            Role::TrainComputer => (self.counts.train, "train"),
            Role::InferComputer => (self.counts.infer, "infer"),
            _ => (self.counts.audit, "audit"),
        };
        let mut mpc = Mpc::new(n, derive_seed(self.seed, tag, 0), mode);
        for f in &self.faults {
            if let Fault::Share(r, j) = *f {
                if r == role {
                    mpc.add_tamper(Tamper { party: j, label: Some("poc/".into()), nth: 0, delta: 1 });
                }
            }
        }
        mpc
    }

    fn rng(&self, tag: &str, i: usize) -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(derive_seed(self.seed, tag, i as u64))
    }

    /// PoC check that `shares` (ring) hold the vector committed in `c`.
    #[allow(clippy::too_many_arguments)]
    fn check_input(
        &self,
        mpc: &mut Mpc,
        phase: &'static str,
        role: Role,
        prover: PartyId,
        c: &PocCommitment<B>,
        shares: &[Shared<Z64>],
        committed: &[i64],
        r: &[B::Fr],
        rng: &mut ChaCha20Rng,
    ) -> Result<()> {
        let xs = ring_to_field::<B::Fr, 64>(mpc, shares, CONVERT).map_err(lift(phase, role))?;
        let x = enc::<B::Fr>(committed);
        let t = poc_check(mpc, &self.pp, c, &xs, Witness { x: &x, r }, rng).map_err(lift(phase, role))?;
        if t.accept {
            return Ok(());
        }
        let culprit = match t.blame {
            Some(Blame::Prover) => Some(prover),
            Some(Blame::ComputingParty(j)) => Some(PartyId::computer(role, j)),
            None => None,
        };
        Err(abort(phase, format!("consistency check of {prover}'s input failed"), culprit))
    }

    fn optimistic<T>(&self, mut f: impl FnMut(SecurityMode) -> Result<T>) -> Result<(T, bool)> {
        match f(SecurityMode::WithAbort) {
            Err(ArcError::Abort { culprit: None, .. }) => f(SecurityMode::IdentifiableAbort).map(|t| (t, true)),
            r => r.map(|t| (t, false)),
        }
    }

    pub fn run_training(&self, holders: &[FixedDataset], cfg: &TrainConfig) -> Result<Trained<B>> {
        if holders.len() != self.counts.data_holders {
            return Err(ArcError::LengthMismatch { expected: self.counts.data_holders, got: holders.len() });
        }
        let width = holders[0].width();
        if let Some(d) = holders.iter().find(|d| d.width() != width || d.is_empty()) {
            return Err(ArcError::InvalidParam(format!("every dataset needs rows of width {width}, got {} rows of width {}", d.len(), d.width())));
        }
        let start = Instant::now();
        let ((mut out, stats), rerun) = self.optimistic(|mode| self.training_pass(holders, cfg, mode))?;
        out.report = PhaseReport { phase: "train".into(), stats, ms: start.elapsed().as_secs_f64() * 1e3, rerun };
        Ok(out)
    }

    fn training_pass(&self, holders: &[FixedDataset], cfg: &TrainConfig, mode: SecurityMode) -> Result<(Trained<B>, Stats)> {
        const T1: &str = "T.1";
        let role = Role::TrainComputer;
        let mut mpc = self.mpc(role, mode);
        let width = holders[0].width();

        // T.1: commit, input, prove consistency
        let mut c_d = Vec::new();
        let mut states = Vec::new();
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for (i, d) in holders.iter().enumerate() {
            let mut rng = self.rng("dh", i);
            let flat = d.flatten();
            let r = self.pp.sample_randomness(flat.len(), &mut rng);
            let c = poc_commit(&self.pp, &enc::<B::Fr>(&flat), &r)?;
            let supplied = if self.has(Fault::TrainDataset(i)) { perturb(&flat) } else { flat.clone() };
            let shares = ring_input(&mut mpc, &supplied);
            self.check_input(&mut mpc, T1, role, PartyId::dh(i), &c, &shares, &flat, &r, &mut rng)?;
            let (x, y) = unflatten_shares(&shares, d.len(), width);
            xs.extend(x);
            ys.extend(y);
            c_d.push(c);
            states.push(HolderState { data: d.clone(), r });
        }

        // T.2: train on shares, commit to model and shuffle keys
        const T2: &str = "T.2";
        let j: Vec<Shared<Z64>> = (0..cfg.epochs * xs.len()).map(|_| mpc.rand_shared_bits::<Z64>(J_BITS)).collect();
        let sim_j = j.iter().map(|s| s.reveal_unchecked().signed()).collect();
        let w = train(&mut MpcEngine::new(&mut mpc), &xs, &ys, &j, cfg).map_err(lift(T2, role))?;
        let wf = ring_to_field::<B::Fr, 64>(&mut mpc, &w, CONVERT).map_err(lift(T2, role))?;
        let jf = ring_to_field::<B::Fr, 64>(&mut mpc, &j, CONVERT).map_err(lift(T2, role))?;
        let r_m: Vec<Shared<B::Fr>> = (0..self.pp.rand_len(wf.len())).map(|_| mpc.rand_shared()).collect();
        let r_j: Vec<Shared<B::Fr>> = (0..self.pp.rand_len(jf.len())).map(|_| mpc.rand_shared()).collect();
        let c_m = poc_dist_commit(&mut mpc, &self.pp, &wf, &r_m).map_err(lift(T2, role))?;
        let c_j = poc_dist_commit(&mut mpc, &self.pp, &jf, &r_j).map_err(lift(T2, role))?;
        let msg = commitments_message(&c_d, &c_m, &c_j);
        let sig_tc = dist_sign_emulated(&self.keys.tc, &msg);
        let model = signed(&mpc.open_to_external("train/model", &w).map_err(lift(T2, role))?);
        let r_m = mpc.open_to_external("train/r_m", &r_m).map_err(lift(T2, role))?;

        // T.3: every data holder checks sigma_TC and countersigns
        for i in 0..holders.len() {
            if let Err(ArcError::BadSignature(j)) = verify_all(&self.pki.tc, &msg, &sig_tc) {
                return Err(abort("T.3", format!("DH_{i} rejects sigma_TC"), Some(PartyId::computer(role, j))));
            }
        }
        let sig_t = self.keys.dh.iter().map(|k| sign(k, &msg)).collect();
        let receipt = TrainingReceipt { c_d, c_m, c_j, sig_t, sig_tc };

        // T.4: the model owner's checklist
        verify_training(&self.pki, &receipt).map_err(|f| {
            let culprit = match f {
                ReceiptFault::DataHolder(i) => Some(PartyId::dh(i)),
                ReceiptFault::TrainComputer(j) => Some(PartyId::computer(role, j)),
                _ => None,
            };
            abort("T.4", f.to_string(), culprit)
        })?;

        let stats = mpc.stats.clone();
        let report = PhaseReport { phase: "train".into(), stats: Stats::default(), ms: 0.0, rerun: false };
        Ok((Trained { receipt, owner: OwnerState { model, r_m }, holders: states, report, sim_j }, stats))
    }

    /// `requested` is the client's c_M'. `x` is the fixed-point query.
    pub fn run_inference(&self, receipt: &TrainingReceipt<B>, owner: &OwnerState<B::Fr>, requested: &PocCommitment<B>, x: &[i64]) -> Result<Inferred<B>> {
        if x.len() + 1 != owner.model.len() {
            return Err(ArcError::LengthMismatch { expected: owner.model.len() - 1, got: x.len() });
        }
        let start = Instant::now();
        let ((client, stats), rerun) = self.optimistic(|mode| self.inference_pass(receipt, owner, requested, x, mode))?;
        let report = PhaseReport { phase: "infer".into(), stats, ms: start.elapsed().as_secs_f64() * 1e3, rerun };
        Ok(Inferred { client, report })
    }

    fn inference_pass(
        &self,
        receipt: &TrainingReceipt<B>,
        owner: &OwnerState<B::Fr>,
        requested: &PocCommitment<B>,
        x: &[i64],
        mode: SecurityMode,
    ) -> Result<(ClientState<B>, Stats)> {
        const I1: &str = "I.1";
        let role = Role::InferComputer;
        let requested = if self.has(Fault::UnknownModel) { &receipt.c_j } else { requested };
        if requested != &receipt.c_m {
            return Err(abort(I1, "requested model identifier does not match c_M", None));
        }
        let mut mpc = self.mpc(role, mode);
        let mut rng = self.rng("owner", 1);
        let supplied = if self.has(Fault::InferModel) { perturb(&owner.model) } else { owner.model.clone() };
        let wm = ring_input(&mut mpc, &supplied);
        self.check_input(&mut mpc, I1, role, PartyId::owner(), &receipt.c_m, &wm, &owner.model, &owner.r_m, &mut rng)?;
        let xs = ring_input(&mut mpc, x);

        // I.2: predict, commit to query and answer, sign
        const I2: &str = "I.2";
        let (s, l) = predict(&mut MpcEngine::new(&mut mpc), &wm, std::slice::from_ref(&xs)).map_err(lift(I2, role))?;
        let y = vec![s[0].clone(), l[0].clone()];
        let xf = ring_to_field::<B::Fr, 64>(&mut mpc, &xs, CONVERT).map_err(lift(I2, role))?;
        let yf = ring_to_field::<B::Fr, 64>(&mut mpc, &y, CONVERT).map_err(lift(I2, role))?;
        let r_x: Vec<Shared<B::Fr>> = (0..self.pp.rand_len(xf.len())).map(|_| mpc.rand_shared()).collect();
        let r_y: Vec<Shared<B::Fr>> = (0..self.pp.rand_len(yf.len())).map(|_| mpc.rand_shared()).collect();
        let c_x = poc_dist_commit(&mut mpc, &self.pp, &xf, &r_x).map_err(lift(I2, role))?;
        let c_y = poc_dist_commit(&mut mpc, &self.pp, &yf, &r_y).map_err(lift(I2, role))?;
        let msg_ic = inference_message(receipt, &c_x, &c_y);
        let sig_ic = dist_sign_emulated(&self.keys.ic, &msg_ic);
        let y = signed(&mpc.open_to_external("infer/y", &y).map_err(lift(I2, role))?);
        let r_x = mpc.open_to_external("infer/r_x", &r_x).map_err(lift(I2, role))?;
        let r_y = mpc.open_to_external("infer/r_y", &r_y).map_err(lift(I2, role))?;

        // I.3: the owner checks sigma_IC and signs the whole chain
        verify_ic(&self.pki, &msg_ic, &sig_ic).map_err(|f| {
            let culprit = if let ReceiptFault::InferComputer(j) = f { Some(PartyId::computer(role, j)) } else { None };
            abort("I.3", f.to_string(), culprit)
        })?;
        let sig_i = sign(&self.keys.owner, &owner_message(receipt, &c_x, &c_y, &sig_ic));
        let ir = InferenceReceipt { training: receipt.clone(), c_x, c_y, sig_ic, sig_i };

        // I.4: the client's checklist
        let openings = ClientOpenings { x: x.to_vec(), y, r_x, r_y };
        verify_client(&self.pp, &self.pki, &ir, &openings).map_err(|f| {
            let culprit = match f {
                ReceiptFault::Owner => Some(PartyId::owner()),
                ReceiptFault::InferComputer(j) => Some(PartyId::computer(role, j)),
                ReceiptFault::DataHolder(i) => Some(PartyId::dh(i)),
                ReceiptFault::TrainComputer(j) => Some(PartyId::computer(Role::TrainComputer, j)),
                _ => None,
            };
            abort("I.4", f.to_string(), culprit)
        })?;
        Ok((ClientState { receipt: ir, openings }, mpc.stats.clone()))
    }

    /// The client's request for `f_audit` over its receipt.
    pub fn request(&self, client: &ClientState<B>, f_audit: &str, aux: serde_json::Value) -> AuditRequest<B> {
        AuditRequest { receipt: client.receipt.clone(), owner_pk: self.pki.owner.clone(), f_audit: f_audit.into(), aux }
    }

    pub fn run_audit(&self, req: &AuditRequest<B>, client: &ClientState<B>, owner: &OwnerState<B::Fr>, holders: &[HolderState<B::Fr>]) -> Result<Audited> {
        if holders.len() != self.counts.data_holders {
            return Err(ArcError::LengthMismatch { expected: self.counts.data_holders, got: holders.len() });
        }
        let start = Instant::now();
        let pass = self.optimistic(|mode| self.audit_pass(req, client, owner, holders, mode));
        let ((outcome, stats, public_seed), rerun) = match pass {
            Err(ArcError::Abort { culprit: Some(p), .. }) => ((AuditOutcome::Malicious(p), Stats::default(), None), true),
            r => r?,
        };
        let report = PhaseReport { phase: "audit".into(), stats, ms: start.elapsed().as_secs_f64() * 1e3, rerun };
        Ok(Audited { outcome, report, public_seed })
    }

    fn audit_pass(
        &self,
        req: &AuditRequest<B>,
        client: &ClientState<B>,
        owner: &OwnerState<B::Fr>,
        holders: &[HolderState<B::Fr>],
        mode: SecurityMode,
    ) -> Result<(AuditOutcome, Stats, Option<u64>)> {
        let role = Role::AuditComputer;
        let mut mpc = self.mpc(role, mode);
        let mut receipt = req.receipt.clone();
        if self.has(Fault::ForgedReceipt) {
            receipt.sig_i.0[0] ^= 1;
        }
        let t = &receipt.training;

        // A.1: the client inputs its query and answer
        let o = &client.openings;
        let y_in = if self.has(Fault::ClientInput) {
            let mut y = o.y.clone();
            y[1] = fx_encode(1.0) - y[1];
            y
        } else {
            o.y.clone()
        };
        let xs = ring_input(&mut mpc, &o.x);
        let ys = ring_input(&mut mpc, &y_in);

        // A.2: identity, owner signature, allow-list
        let client_at = |why: &str| abort("A.2", why.to_string(), Some(PartyId::client()));
        if !self.pki.is_owner(&req.owner_pk) {
            return Err(client_at("unregistered model owner key"));
        }
        if !verify(&req.owner_pk, &receipt.owner_message(), &receipt.sig_i) {
            return Err(client_at("sigma_I does not verify"));
        }
        if t.c_d.len() != holders.len() || t.sig_t.len() != holders.len() {
            return Err(client_at("receipt does not match the data holders"));
        }
        let spec = AuditSpec::parse(&req.f_audit, &req.aux).map_err(|e| client_at(&e.to_string()))?;

        // A.3: the client proves x and y match c_x and c_y
        let mut rng = self.rng("client", 3);
        self.check_input(&mut mpc, "A.3", role, PartyId::client(), &receipt.c_x, &xs, &o.x, &o.r_x, &mut rng)?;
        self.check_input(&mut mpc, "A.3", role, PartyId::client(), &receipt.c_y, &ys, &o.y, &o.r_y, &mut rng)?;

        // A.4: the owner proves its model matches c_M; sigma_IC
        let mut rng = self.rng("owner", 4);
        let supplied = if self.has(Fault::AuditModel) { perturb(&owner.model) } else { owner.model.clone() };
        let wm = ring_input(&mut mpc, &supplied);
        self.check_input(&mut mpc, "A.4", role, PartyId::owner(), &t.c_m, &wm, &owner.model, &owner.r_m, &mut rng)?;
        if verify_all(&self.pki.ic, &receipt.inference_message(), &receipt.sig_ic).is_err() {
            return Err(abort("A.4", "sigma_IC does not verify", Some(PartyId::owner())));
        }

        // A.5: every data holder proves its dataset matches c_Di; sigma_T, sigma_TC
        let mut parties = Vec::new();
        let msg = t.message();
        for (i, h) in holders.iter().enumerate() {
            let mut rng = self.rng("dh", 100 + i);
            let flat = h.data.flatten();
            let supplied = if self.has(Fault::AuditDataset(i)) { perturb(&flat) } else { flat.clone() };
            let shares = ring_input(&mut mpc, &supplied);
            self.check_input(&mut mpc, "A.5", role, PartyId::dh(i), &t.c_d[i], &shares, &flat, &h.r, &mut rng)?;
            if !verify(&self.pki.dh[i], &msg, &t.sig_t[i]) {
                return Err(abort("A.5", format!("sigma_T of DH_{i} does not verify"), Some(PartyId::owner())));
            }
            parties.push(unflatten_shares(&shares, h.data.len(), h.data.width()));
        }
        if verify_all(&self.pki.tc, &msg, &t.sig_tc).is_err() {
            return Err(abort("A.5", "sigma_TC does not verify", Some(PartyId::owner())));
        }

        // A.6: evaluate and open the result
        let seed = mpc.coin_seed();
        let inputs = AuditInputs { x: xs, y: ys[1].clone(), model: wm, parties };
        let out = evaluate(&mut MpcEngine::new(&mut mpc), &spec, &inputs, seed).map_err(lift("A.6", role))?;
        Ok((AuditOutcome::Result(out), mpc.stats.clone(), Some(seed)))
    }
}
