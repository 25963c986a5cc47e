use std::io::Write;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use arc_core::algebra::{field, PairingBackend};
use arc_core::arcproto::derive_seed;
use arc_core::mpc::{Mpc, SecurityMode};
use arc_core::poc::{poc_check, poc_commit, poc_setup, PocVariant, Witness};

use crate::Failure;

/// Computing parties in every bench cell.
pub const PARTIES: usize = 3;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRecord {
    pub backend: String,
    pub phase: &'static str,
    pub d: usize,
    pub ms_total: f64,
    pub ms_mpc: f64,
    pub rounds: u64,
    pub bytes_per_party: u64,
    pub receipt_bytes: usize,
    pub seed: u64,
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// One commit row and one check row for a (backend, d, seed) cell.
pub fn cell<B: PairingBackend>(v: PocVariant, d: usize, seed: u64, timing: bool) -> Result<[BenchRecord; 2], Failure> {
    let pp = poc_setup::<B>(v, derive_seed(seed, "bench/pp", d as u64), d).map_err(Failure::core)?;
    let mut rng = ChaCha20Rng::seed_from_u64(derive_seed(seed, "bench/x", d as u64));
    let x: Vec<B::Fr> = (0..d).map(|_| field::from_u128(rng.gen::<u64>() as u128)).collect();
    let r = pp.sample_randomness(d, &mut rng);

    let t0 = Instant::now();
    let c = poc_commit(&pp, &x, &r).map_err(Failure::core)?;
    let commit_ms = ms(t0);
    let size = c.to_bytes().len();

    let mut mpc = Mpc::new(PARTIES, derive_seed(seed, "bench/mpc", d as u64), SecurityMode::WithAbort);
    let xs = mpc.input(&x);
    let before = mpc.stats.clone();
    let t1 = Instant::now();
    let t = poc_check(&mut mpc, &pp, &c, &xs, Witness { x: &x, r: &r }, &mut rng).map_err(Failure::core)?;
    let check_ms = ms(t1);
    if !t.accept {
        return Err(Failure::Other(format!("{v} check rejected an honest input at d={d}")));
    }
    let rounds = mpc.stats.rounds - before.rounds;
    let bytes = mpc.stats.bytes_sent.iter().zip(before.bytes_sent.iter().chain(std::iter::repeat(&0))).map(|(a, b)| a - b).max().unwrap_or(0);

    let keep = |m: f64| if timing { m } else { 0.0 };
    let backend = v.name().to_string();
    Ok([
        BenchRecord { backend: backend.clone(), phase: "commit", d, ms_total: keep(commit_ms), ms_mpc: 0.0, rounds: 0, bytes_per_party: 0, receipt_bytes: size, seed },
        BenchRecord {
            backend,
            phase: "check",
            d,
            ms_total: keep(commit_ms + check_ms),
            ms_mpc: keep(check_ms),
            rounds,
            bytes_per_party: bytes,
            receipt_bytes: size,
            seed,
        },
    ])
}

pub fn write_csv<W: Write>(w: W, rows: &[BenchRecord]) -> Result<(), Failure> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r).map_err(|e| Failure::Other(format!("csv: {e}")))?;
    }
    out.flush().map_err(|e| Failure::Other(format!("csv: {e}")))
}
