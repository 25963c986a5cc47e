//! Lockstep simulator of the arithmetic black box over `n` parties.
//!
//! Correlated randomness (triples, edaBits, daBits) comes from a trusted
//! dealer. Every exchange between parties goes through [`Mpc::exchange`],
//! which does the round and byte accounting and applies tamper hooks.

use std::collections::HashMap;
use std::ops::{Add, Neg, Sub};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use super::domain::{Domain, ShareValue};
use crate::algebra::Bit;
use crate::error::{ArcError, Result};

/// Additive sharing: one share per party.
#[derive(Clone, Debug, PartialEq)]
pub struct Shared<T: ShareValue> {
    pub shares: Vec<T>,
}

impl<T: ShareValue> Shared<T> {
    pub fn zero(n: usize) -> Self {
        Shared { shares: vec![T::zero(); n] }
    }

    /// Sharing of a public value: party 0 holds it.
    pub fn public(n: usize, v: T) -> Self {
        let mut s = Self::zero(n);
        s.shares[0] = v;
        s
    }

    pub fn parties(&self) -> usize {
        self.shares.len()
    }

    /// Sum of shares. Only the simulator (and tests) can do this.
    pub fn reveal_unchecked(&self) -> T {
        self.shares.iter().fold(T::zero(), |a, s| a + *s)
    }

    pub fn add_public(&self, v: T) -> Self {
        let mut s = self.clone();
        s.shares[0] = s.shares[0] + v;
        s
    }
}

impl<T: Domain> Shared<T> {
    pub fn scale(&self, c: T) -> Self {
        Shared { shares: self.shares.iter().map(|s| *s * c).collect() }
    }

    /// sum c_i v_i, computed locally.
    pub fn lincomb(coeffs: &[T], vs: &[Shared<T>]) -> Result<Self> {
        if coeffs.len() != vs.len() {
            return Err(ArcError::LengthMismatch { expected: vs.len(), got: coeffs.len() });
        }
        let n = vs.first().map_or(0, |v| v.parties());
        let mut acc = vec![T::zero(); n];
        for (c, v) in coeffs.iter().zip(vs) {
            for (a, s) in acc.iter_mut().zip(&v.shares) {
                *a = *a + *c * *s;
            }
        }
        Ok(Shared { shares: acc })
    }
}

impl<T: ShareValue> Add for &Shared<T> {
    type Output = Shared<T>;
    fn add(self, o: Self) -> Shared<T> {
        Shared { shares: self.shares.iter().zip(&o.shares).map(|(a, b)| *a + *b).collect() }
    }
}

impl<T: ShareValue> Sub for &Shared<T> {
    type Output = Shared<T>;
    fn sub(self, o: Self) -> Shared<T> {
        Shared { shares: self.shares.iter().zip(&o.shares).map(|(a, b)| *a - *b).collect() }
    }
}

impl<T: Domain> Neg for &Shared<T> {
    type Output = Shared<T>;
    fn neg(self) -> Shared<T> {
        Shared { shares: self.shares.iter().map(|a| -*a).collect() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SecurityMode {
    /// Corrupted openings go unnoticed.
    SemiHonest,
    /// Corrupted openings abort without naming anyone.
    WithAbort,
    /// Corrupted openings abort and name the party whose share was bad.
    IdentifiableAbort,
}

/// Test hook: party `party` adds `delta` to its share of the first value of
/// the `nth` exchange whose label starts with `label` (any label if `None`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tamper {
    pub party: usize,
    pub label: Option<String>,
    pub nth: usize,
    pub delta: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    /// Communication rounds among computing parties.
    pub rounds: u64,
    /// Values revealed by explicit openings (Beaver openings excluded).
    pub opened_values: u64,
    /// Multiplications in any arithmetic domain (excluding Z_2).
    pub mul_count: u64,
    /// Multiplications in Z_2.
    pub and_count: u64,
    /// Elements shared in by input owners.
    pub input_values: u64,
    pub coins: u64,
    /// Bytes sent by each computing party.
    pub bytes_sent: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: u64,
    pub label: String,
    pub bytes: Vec<u64>,
}

/// Triple (a, b, ab).
#[derive(Clone, Debug)]
pub struct BeaverTriple<T: Domain> {
    pub a: Shared<T>,
    pub b: Shared<T>,
    pub c: Shared<T>,
}

/// r shared in an arithmetic domain together with its bits in Z_2.
#[derive(Clone, Debug)]
pub struct EdaBit<T: Domain> {
    pub arith: Shared<T>,
    /// Least significant bit first.
    pub bits: Vec<Shared<Bit>>,
}

pub struct Mpc {
    n: usize,
    mode: SecurityMode,
    dealer: ChaCha20Rng,
    coin_streams: Vec<ChaCha20Rng>,
    tampers: Vec<(Tamper, bool)>,
    label_counts: HashMap<String, usize>,
    exchanges: usize,
    pub stats: Stats,
    transcript: Option<Vec<RoundRecord>>,
}

impl Mpc {
    pub fn new(n: usize, seed: u64, mode: SecurityMode) -> Self {
        assert!(n >= 2, "need at least two computing parties");
        let mut root = ChaCha20Rng::seed_from_u64(seed);
        let dealer = ChaCha20Rng::seed_from_u64(root.next_u64());
        let coin_seed = root.next_u64();
        Mpc {
            n,
            mode,
            dealer,
            coin_streams: (0..n).map(|_| ChaCha20Rng::seed_from_u64(coin_seed)).collect(),
            tampers: Vec::new(),
            label_counts: HashMap::new(),
            exchanges: 0,
            stats: Stats { bytes_sent: vec![0; n], ..Stats::default() },
            transcript: None,
        }
    }

    pub fn parties(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> SecurityMode {
        self.mode
    }

    pub fn set_mode(&mut self, mode: SecurityMode) {
        self.mode = mode;
    }

    pub fn add_tamper(&mut self, t: Tamper) {
        assert!(t.party < self.n);
        self.tampers.push((t, false));
    }

    pub fn record_transcript(&mut self) {
        self.transcript.get_or_insert_with(Vec::new);
    }

    pub fn transcript(&self) -> Option<&[RoundRecord]> {
        self.transcript.as_deref()
    }

    /// Test hook: desynchronizes one party's coin stream.
    pub fn desync_coin(&mut self, party: usize) {
        self.coin_streams[party].next_u64();
    }

    /// Fresh additive sharing of `v` by the dealer or an input owner.
    fn share_with<T: Domain>(rng: &mut ChaCha20Rng, n: usize, v: T) -> Shared<T> {
        let mut shares: Vec<T> = (0..n - 1).map(|_| T::random(rng)).collect();
        let sum = shares.iter().fold(T::zero(), |a, s| a + *s);
        shares.push(v - sum);
        Shared { shares }
    }

    pub fn deal<T: Domain>(&mut self, v: T) -> Shared<T> {
        Self::share_with(&mut self.dealer, self.n, v)
    }

    /// An input owner outside the computing set shares `xs` in.
    pub fn input<T: Domain>(&mut self, xs: &[T]) -> Vec<Shared<T>> {
        self.stats.input_values += xs.len() as u64;
        xs.iter().map(|x| self.deal(*x)).collect()
    }

    /// Public coin. Each party draws from its own copy of the seeded stream;
    /// disagreement is a simulator bug and panics.
    pub fn coin<T: Domain>(&mut self) -> T {
        self.stats.coins += 1;
        let draws: Vec<T> = self.coin_streams.iter_mut().map(|r| T::random(r)).collect();
        assert!(draws.windows(2).all(|w| w[0] == w[1]), "parties disagree on the public coin");
        draws[0]
    }

    /// Raw public-coin bytes (for seeding public samplers).
    pub fn coin_seed(&mut self) -> u64 {
        self.stats.coins += 1;
        let draws: Vec<u64> = self.coin_streams.iter_mut().map(|r| r.next_u64()).collect();
        assert!(draws.windows(2).all(|w| w[0] == w[1]), "parties disagree on the public coin");
        draws[0]
    }

    /// Shared uniform value unknown to everyone.
    pub fn rand_shared<T: Domain>(&mut self) -> Shared<T> {
        let v = T::random(&mut self.dealer);
        self.deal(v)
    }

    /// Shared uniform value in [0, 2^bits).
    pub fn rand_shared_bits<T: Domain>(&mut self, bits: u32) -> Shared<T> {
        let b = self.random_bits(bits as usize);
        let v = T::from_bits_le(&b);
        self.deal(v)
    }

    fn random_bits(&mut self, m: usize) -> Vec<bool> {
        let mut out = Vec::with_capacity(m);
        while out.len() < m {
            let w = self.dealer.next_u64();
            for i in 0..64.min(m - out.len()) {
                out.push((w >> i) & 1 == 1);
            }
        }
        out
    }

    pub fn triple<T: Domain>(&mut self) -> BeaverTriple<T> {
        let a = T::random(&mut self.dealer);
        let b = T::random(&mut self.dealer);
        BeaverTriple { a: self.deal(a), b: self.deal(b), c: self.deal(a * b) }
    }

    pub fn edabits<T: Domain>(&mut self, count: usize, bits: u32) -> Vec<EdaBit<T>> {
        (0..count)
            .map(|_| {
                let b = self.random_bits(bits as usize);
                let arith = self.deal(T::from_bits_le(&b));
                let bits = b.iter().map(|&x| self.deal(if x { Bit::ONE } else { Bit::ZERO })).collect();
                EdaBit { arith, bits }
            })
            .collect()
    }

    /// Random bits shared both in Z_2 and in `T`.
    pub fn dabits<T: Domain>(&mut self, count: usize) -> Vec<(Shared<Bit>, Shared<T>)> {
        let b = self.random_bits(count);
        b.into_iter()
            .map(|x| {
                let z2 = self.deal(if x { Bit::ONE } else { Bit::ZERO });
                let t = self.deal(if x { T::one() } else { T::zero() });
                (z2, t)
            })
            .collect()
    }

    /// One round in which every party broadcasts its shares of `vals`.
    /// Returns the (possibly corrupted) sums and the parties whose shares
    /// were corrupted.
    fn exchange<T: ShareValue>(&mut self, label: &str, vals: &[Shared<T>], recipients: usize) -> (Vec<T>, Vec<T>, Vec<usize>) {
        let cnt = self.label_counts.entry(label.to_string()).or_insert(0);
        let this_label = *cnt;
        *cnt += 1;
        let this_global = self.exchanges;
        self.exchanges += 1;

        let honest: Vec<T> = vals.iter().map(|v| v.reveal_unchecked()).collect();
        let mut seen = honest.clone();
        let mut flagged = Vec::new();
        if !vals.is_empty() {
            for (t, used) in self.tampers.iter_mut() {
                if *used {
                    continue;
                }
                let hit = match &t.label {
                    Some(l) => label.starts_with(l.as_str()) && this_label == t.nth,
                    None => this_global == t.nth,
                };
                if hit {
                    *used = true;
                    seen[0] = seen[0] + (vals[0].shares[t.party].perturb(t.delta) - vals[0].shares[t.party]);
                    flagged.push(t.party);
                }
            }
        }

        let bytes = (vals.len() * T::bit_len()).div_ceil(8) as u64 * recipients as u64;
        self.stats.rounds += 1;
        for b in self.stats.bytes_sent.iter_mut() {
            *b += bytes;
        }
        if let Some(tr) = self.transcript.as_mut() {
            tr.push(RoundRecord { round: self.stats.rounds, label: label.to_string(), bytes: vec![bytes; self.n] });
        }
        (honest, seen, flagged)
    }

    fn resolve<T: ShareValue>(&self, label: &str, seen: Vec<T>, flagged: Vec<usize>) -> Result<Vec<T>> {
        if flagged.is_empty() {
            return Ok(seen);
        }
        match self.mode {
            SecurityMode::SemiHonest => Ok(seen),
            SecurityMode::WithAbort => Err(ArcError::MpcAbort { label: label.into(), culprit: None }),
            SecurityMode::IdentifiableAbort => Err(ArcError::MpcAbort { label: label.into(), culprit: Some(flagged[0]) }),
        }
    }

    /// Opens to all computing parties.
    pub fn open<T: ShareValue>(&mut self, label: &str, vals: &[Shared<T>]) -> Result<Vec<T>> {
        let (_, seen, flagged) = self.exchange(label, vals, self.n - 1);
        self.stats.opened_values += vals.len() as u64;
        self.resolve(label, seen, flagged)
    }

    /// Opens towards a single party outside the computing set.
    pub fn open_to_external<T: ShareValue>(&mut self, label: &str, vals: &[Shared<T>]) -> Result<Vec<T>> {
        let (_, seen, flagged) = self.exchange(label, vals, 1);
        self.stats.opened_values += vals.len() as u64;
        self.resolve(label, seen, flagged)
    }

    /// Identifiable opening: the per-party tags let honest parties recover
    /// the correct values and learn which parties sent bad shares.
    pub fn open_tagged<T: ShareValue>(&mut self, label: &str, vals: &[Shared<T>]) -> (Vec<T>, Vec<usize>) {
        let (honest, _, flagged) = self.exchange(label, vals, self.n - 1);
        self.stats.opened_values += vals.len() as u64;
        (honest, flagged)
    }

    /// Beaver multiplication of two equal-length vectors in one round.
    pub fn mul<T: Domain>(&mut self, a: &[Shared<T>], b: &[Shared<T>]) -> Result<Vec<Shared<T>>> {
        if a.len() != b.len() {
            return Err(ArcError::LengthMismatch { expected: a.len(), got: b.len() });
        }
        if a.is_empty() {
            return Ok(Vec::new());
        }
        let triples: Vec<BeaverTriple<T>> = (0..a.len()).map(|_| self.triple()).collect();
        let mut masked = Vec::with_capacity(2 * a.len());
        for ((x, y), t) in a.iter().zip(b).zip(&triples) {
            masked.push(x - &t.a);
            masked.push(y - &t.b);
        }
        let (_, seen, flagged) = self.exchange("beaver", &masked, self.n - 1);
        if T::bit_len() == 1 {
            self.stats.and_count += a.len() as u64;
        } else {
            self.stats.mul_count += a.len() as u64;
        }
        let opened = self.resolve("beaver", seen, flagged)?;
        Ok(triples
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let (e, d) = (opened[2 * i], opened[2 * i + 1]);
                let mut z = &(&t.c + &t.b.scale(e)) + &t.a.scale(d);
                z.shares[0] = z.shares[0] + e * d;
                z
            })
            .collect())
    }

    pub fn mul1<T: Domain>(&mut self, a: &Shared<T>, b: &Shared<T>) -> Result<Shared<T>> {
        Ok(self.mul(std::slice::from_ref(a), std::slice::from_ref(b))?.pop().expect("one product"))
    }
}
