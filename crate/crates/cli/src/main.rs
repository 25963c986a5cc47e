//! `arc`: scenario runner, PoC benchmark harness and receipt verifier.

mod bench;
mod scenario;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use arc_core::algebra::{Bls377, Fr377, MockBackend, PairingBackend};
use arc_core::arcproto::{verify_receipt, AuditOutcome, Fault, KeyRing, PartyId, Receipt, Session};
use arc_core::mpc::fixed::fx_decode;
use arc_core::poc::PocVariant;
use arc_core::ArcError;

use scenario::{FieldBackend, Scenario};

type Mock = MockBackend<Fr377>;

/// Exit codes: 0 ok, 1 verification failure or other error, 2 protocol
/// abort or malicious verdict, 3 unparseable receipt, 64 usage.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Abort { phase: String, reason: String, culprit: Option<PartyId> },
    Malicious(PartyId),
    Parse(String),
    Verify(String),
    Other(String),
}

impl Failure {
    fn core(e: ArcError) -> Failure {
        match e {
            ArcError::Abort { phase, reason, culprit } => Failure::Abort { phase, reason, culprit },
            ArcError::InvalidParam(m) => Failure::Usage(m),
            e => Failure::Other(e.to_string()),
        }
    }

    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 64,
            Failure::Abort { .. } | Failure::Malicious(_) => 2,
            Failure::Parse(_) => 3,
            Failure::Verify(_) | Failure::Other(_) => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage error: {m}"),
            Failure::Abort { phase, reason, culprit: Some(p) } => write!(f, "abort at {phase}: {reason}; blamed party: {p}"),
            Failure::Abort { phase, reason, culprit: None } => write!(f, "abort at {phase}: {reason}; no party blamed"),
            Failure::Malicious(p) => write!(f, "audit verdict: Malicious; blamed party: {p}"),
            Failure::Parse(m) => write!(f, "parse error: {m}"),
            Failure::Verify(m) => write!(f, "verification failed: {m}"),
            Failure::Other(m) => write!(f, "error: {m}"),
        }
    }
}

#[derive(Parser)]
#[command(name = "arc", version, about = "Committed training, inference and audit receipts over a simulated MPC")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Train, infer and audit one scenario end to end.
    Run {
        /// Scenario TOML file, or the name of a bundled scenario.
        #[arg(long, default_value = "adult-toy")]
        config: String,
        /// Inject a fault, as role:index:field (repeatable).
        #[arg(long)]
        tamper: Vec<String>,
        /// Overrides the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Directory for receipts, outcome and transcript.
        #[arg(long, default_value = "arc-out")]
        out: PathBuf,
    },
    /// Time and count PoC commit and check over a grid of vector lengths.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "poly,hash,pedersen")]
        backends: Vec<String>,
        #[arg(long, value_delimiter = ',', default_value = "64,1024,16384")]
        d: Vec<usize>,
        /// Number of seeds, 0..seeds.
        #[arg(long, default_value_t = 3)]
        seeds: u64,
        /// CSV output path; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write 0 in the timing columns so output is reproducible.
        #[arg(long)]
        no_timing: bool,
    },
    /// Check the signatures of a receipt file.
    Verify {
        receipt: PathBuf,
        /// Scenario that produced the receipt; its seed and party counts fix the keys.
        #[arg(long, default_value = "adult-toy")]
        config: String,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(64) } else { ExitCode::SUCCESS };
        }
    };
    let r = match cli.cmd {
        Cmd::Run { config, tamper, seed, out } => cmd_run(&config, &tamper, seed, &out),
        Cmd::Bench { backends, d, seeds, out, no_timing } => cmd_bench(&backends, &d, seeds, out.as_deref(), !no_timing),
        Cmd::Verify { receipt, config, seed } => cmd_verify(&receipt, &config, seed),
    };
    match r {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{f}");
            ExitCode::from(f.code())
        }
    }
}

fn cmd_run(config: &str, tamper: &[String], seed: Option<u64>, out: &Path) -> Result<(), Failure> {
    let sc = Scenario::load(config)?;
    let faults = tamper.iter().map(|t| Fault::parse(t).map_err(|e| Failure::Usage(e.to_string()))).collect::<Result<Vec<_>, _>>()?;
    let seed = seed.unwrap_or(sc.seed);
    match sc.field_backend()? {
        FieldBackend::Mock => run::<Mock>(&sc, faults, seed, out),
        FieldBackend::Curve => run::<Bls377>(&sc, faults, seed, out),
    }
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Other(format!("{}: {e}", path.display())))
}

fn run<B: PairingBackend>(sc: &Scenario, faults: Vec<Fault>, seed: u64, out: &Path) -> Result<(), Failure> {
    let data = sc.dataset()?;
    let rows = sc.rows.unwrap_or(data.len()).min(data.len());
    let n = sc.parties.data_holders;
    if rows < n {
        return Err(Failure::Usage(format!("{rows} rows cannot be split among {n} data holders")));
    }
    let Some(x) = data.encode().x.get(sc.query).cloned() else {
        return Err(Failure::Usage(format!("query row {} is outside the dataset ({} rows)", sc.query, data.len())));
    };
    let holders: Vec<_> = data.take(rows).split(n).iter().map(|d| d.encode()).collect();
    let s = Session::<B>::new(sc.variant()?, sc.parties, seed, Session::<B>::capacity_for(&holders, &sc.train))
        .and_then(|s| s.with_faults(faults))
        .map_err(Failure::core)?;
    std::fs::create_dir_all(out).map_err(|e| Failure::Other(format!("{}: {e}", out.display())))?;

    let t = s.run_training(&holders, &sc.train).map_err(Failure::core)?;
    write(&out.join("training.receipt.hex"), &Receipt::Training(t.receipt.clone()).to_armor())?;
    let i = s.run_inference(&t.receipt, &t.owner, &t.receipt.c_m, &x).map_err(Failure::core)?;
    write(&out.join("inference.receipt.hex"), &Receipt::Inference(i.client.receipt.clone()).to_armor())?;
    let req = s.request(&i.client, &sc.audit.function, sc.audit.aux.clone());
    let a = s.run_audit(&req, &i.client, &t.owner, &t.holders).map_err(Failure::core)?;

    let y = &i.client.openings.y;
    let outcome = serde_json::json!({
        "scenario": sc.name,
        "backend": s.variant().name(),
        "seed": seed,
        "prediction": { "score": fx_decode(y[0]), "label": y[1] },
        "audit": { "fn": sc.audit.function, "aux": sc.audit.aux },
        "outcome": a.outcome,
        "decoded": match &a.outcome { AuditOutcome::Result(o) => Some(o.decoded()), AuditOutcome::Malicious(_) => None },
        "public_seed": a.public_seed,
    });
    write(&out.join("outcome.json"), &serde_json::to_string_pretty(&outcome).expect("json"))?;
    let transcript = serde_json::json!([t.report, i.report, a.report]);
    write(&out.join("transcript.json"), &serde_json::to_string_pretty(&transcript).expect("json"))?;

    if let AuditOutcome::Malicious(p) = a.outcome {
        return Err(Failure::Malicious(p));
    }
    println!("{}: {} backend, prediction label {} (score {:.4})", sc.name, s.variant(), y[1], fx_decode(y[0]));
    println!("audit {}: {}", sc.audit.function, serde_json::to_string(&outcome["decoded"]).expect("json"));
    println!("artifacts in {}", out.display());
    Ok(())
}

fn cmd_bench(backends: &[String], ds: &[usize], seeds: u64, out: Option<&Path>, timing: bool) -> Result<(), Failure> {
    let variants = backends.iter().map(|b| b.parse::<PocVariant>().map_err(|e| Failure::Usage(e.to_string()))).collect::<Result<Vec<_>, _>>()?;
    if ds.contains(&0) {
        return Err(Failure::Usage("vector length d must be positive".into()));
    }
    let field = scenario::field_backend(None)?;
    let mut rows = Vec::new();
    for &v in &variants {
        for &d in ds {
            for seed in 0..seeds {
                let cell = match field {
                    FieldBackend::Mock => bench::cell::<Mock>(v, d, seed, timing)?,
                    FieldBackend::Curve => bench::cell::<Bls377>(v, d, seed, timing)?,
                };
                rows.extend(cell);
            }
        }
    }
    match out {
        Some(p) => {
            let f = std::fs::File::create(p).map_err(|e| Failure::Other(format!("{}: {e}", p.display())))?;
            bench::write_csv(f, &rows)
        }
        None => bench::write_csv(std::io::stdout().lock(), &rows),
    }
}

fn cmd_verify(path: &Path, config: &str, seed: Option<u64>) -> Result<(), Failure> {
    let sc = Scenario::load(config)?;
    match sc.field_backend()? {
        FieldBackend::Mock => verify::<Mock>(path, &sc, seed.unwrap_or(sc.seed)),
        FieldBackend::Curve => verify::<Bls377>(path, &sc, seed.unwrap_or(sc.seed)),
    }
}

fn verify<B: PairingBackend>(path: &Path, sc: &Scenario, seed: u64) -> Result<(), Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Other(format!("{}: {e}", path.display())))?;
    let r = Receipt::<B>::from_armor(&text).map_err(|e| Failure::Parse(e.to_string()))?;
    let pki = KeyRing::derive(seed, &sc.parties).pki();
    verify_receipt(&pki, &r).map_err(|f| Failure::Verify(f.to_string()))?;
    let kind = match r {
        Receipt::Training(_) => "training",
        Receipt::Inference(_) => "inference",
    };
    println!("ok: {kind} receipt, {} data holders, {} commitment", r.training().c_d.len(), r.training().c_m.variant());
    Ok(())
}
