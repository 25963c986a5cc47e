use std::path::Path;
use std::process::{Command, Output};

fn arc(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arc")).args(args).current_dir(dir).env_remove("ARC_FIELD_BACKEND").output().expect("spawn arc")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn run_honest(dir: &Path) {
    let o = arc(&["run", "--config", "adult-toy", "--out", "out"], dir);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

const BUNDLED: &str = include_str!("../scenarios/adult-toy.toml");

#[test]
fn honest_run_exits_zero_and_writes_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    run_honest(tmp.path());
    for f in ["training.receipt.hex", "inference.receipt.hex", "outcome.json", "transcript.json"] {
        assert!(tmp.path().join("out").join(f).is_file(), "{f}");
    }
    let outcome: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(tmp.path().join("out/outcome.json")).unwrap()).unwrap();
    assert!(outcome["outcome"]["result"].is_object(), "{outcome}");
    let transcript: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(tmp.path().join("out/transcript.json")).unwrap()).unwrap();
    assert_eq!(transcript.as_array().unwrap().len(), 3);
}

#[test]
fn dataset_tamper_exits_two_naming_the_holder() {
    let tmp = tempfile::tempdir().unwrap();
    let o = arc(&["run", "--tamper", "dh:0:dataset", "--out", "out"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    assert!(e.contains("DH_0") && e.contains("T.1"), "{e}");
}

#[test]
fn audit_share_tamper_names_the_computing_party() {
    let tmp = tempfile::tempdir().unwrap();
    let o = arc(&["run", "--tamper", "ac:2:share", "--out", "out"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("AC_2"), "{}", stderr(&o));
    let outcome = std::fs::read_to_string(tmp.path().join("out/outcome.json")).unwrap();
    assert!(outcome.contains("malicious"), "{outcome}");
}

#[test]
fn unknown_backend_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("s.toml"), BUNDLED.replace("backend = \"poly\"", "backend = \"sha3\"")).unwrap();
    let o = arc(&["run", "--config", "s.toml"], tmp.path());
    assert_eq!(o.status.code(), Some(64));
    assert!(stderr(&o).contains("usage error"), "{}", stderr(&o));

    let o = arc(&["bench", "--backends", "poly,sha3", "--d", "64", "--seeds", "1"], tmp.path());
    assert_eq!(o.status.code(), Some(64));

    let o = Command::new(env!("CARGO_BIN_EXE_arc")).args(["run"]).current_dir(tmp.path()).env("ARC_FIELD_BACKEND", "bn254").output().unwrap();
    assert_eq!(o.status.code(), Some(64));

    let o = arc(&["run", "--tamper", "dh:0:nothing"], tmp.path());
    assert_eq!(o.status.code(), Some(64));
}

#[test]
fn verify_accepts_honest_and_locates_damage() {
    let tmp = tempfile::tempdir().unwrap();
    run_honest(tmp.path());
    for f in ["out/training.receipt.hex", "out/inference.receipt.hex"] {
        let o = arc(&["verify", f], tmp.path());
        assert_eq!(o.status.code(), Some(0), "{f}: {}", stderr(&o));
    }

    let hex = std::fs::read_to_string(tmp.path().join("out/inference.receipt.hex")).unwrap();
    let hex = hex.trim();

    std::fs::write(tmp.path().join("short.hex"), &hex[..hex.len() / 2]).unwrap();
    let o = arc(&["verify", "short.hex"], tmp.path());
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("parse error"), "{}", stderr(&o));

    // The owner's signature is the last 64 bytes.
    let mut bytes: Vec<u8> = (0..hex.len()).step_by(2).map(|i| u8::from_str_radix(&hex[i..i + 2], 16).unwrap()).collect();
    let n = bytes.len();
    bytes[n - 10] ^= 0x04;
    let flipped: String = bytes.iter().map(|b| format!("{b:02x}")).collect();
    std::fs::write(tmp.path().join("flip.hex"), flipped).unwrap();
    let o = arc(&["verify", "flip.hex"], tmp.path());
    assert_eq!(o.status.code(), Some(1));
    let e = stderr(&o);
    assert!(e.contains("verification failed") && e.contains("of M"), "{e}");

    // Keys derived from another seed reject every signature.
    let o = arc(&["verify", "out/training.receipt.hex", "--seed", "8"], tmp.path());
    assert_eq!(o.status.code(), Some(1));
}

fn bench_csv(dir: &Path, args: &[&str]) -> String {
    let o = arc(&[&["bench", "--no-timing"][..], args].concat(), dir);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    String::from_utf8(o.stdout).unwrap()
}

#[test]
fn bench_csv_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let args = ["--backends", "poly,hash,pedersen", "--d", "16,64", "--seeds", "2"];
    let a = bench_csv(tmp.path(), &args);
    let b = bench_csv(tmp.path(), &args);
    assert_eq!(a, b);
    assert!(a.starts_with("backend,phase,d,ms_total,ms_mpc,rounds,bytes_per_party,receipt_bytes,seed\n"));
    assert_eq!(a.lines().count(), 1 + 3 * 2 * 2 * 2);

    let o = arc(&[&["bench", "--no-timing", "--out", "b.csv"][..], &args[..]].concat(), tmp.path());
    assert!(o.status.success());
    assert_eq!(std::fs::read_to_string(tmp.path().join("b.csv")).unwrap(), a);
}

/// Least-squares slope of log(y) against log(x).
fn loglog_slope(pts: &[(f64, f64)]) -> f64 {
    let l: Vec<(f64, f64)> = pts.iter().map(|(x, y)| (x.ln(), y.ln())).collect();
    let n = l.len() as f64;
    let (mx, my) = (l.iter().map(|p| p.0).sum::<f64>() / n, l.iter().map(|p| p.1).sum::<f64>() / n);
    let sxy: f64 = l.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = l.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn column(csv_text: &str, backend: &str, phase: &str, col: &str) -> Vec<(f64, f64)> {
    let mut r = csv::Reader::from_reader(csv_text.as_bytes());
    let h = r.headers().unwrap().clone();
    let (ib, ip, id, ic) = (0, 1, 2, h.iter().position(|c| c == col).unwrap());
    r.records()
        .map(|x| x.unwrap())
        .filter(|x| &x[ib] == backend && &x[ip] == phase)
        .map(|x| (x[id].parse().unwrap(), x[ic].parse().unwrap()))
        .collect()
}

#[test]
fn bench_storage_slopes() {
    let tmp = tempfile::tempdir().unwrap();
    let grid = "64,128,256,512,1024,2048,4096,8192,16384";
    let csv_text = bench_csv(tmp.path(), &["--backends", "poly,pedersen", "--d", grid, "--seeds", "1"]);

    let poly = column(&csv_text, "poly", "commit", "receipt_bytes");
    let ped = column(&csv_text, "pedersen", "commit", "receipt_bytes");
    assert_eq!(poly.len(), 9);
    let (sp, se) = (loglog_slope(&poly), loglog_slope(&ped));
    assert!((-0.05..=0.05).contains(&sp), "poly slope {sp}");
    assert!((0.9..=1.1).contains(&se), "pedersen slope {se}");

    // Both checks open a constant number of values in one round.
    for b in ["poly", "pedersen"] {
        assert!(column(&csv_text, b, "check", "rounds").iter().all(|&(_, r)| r == 1.0), "{b}");
    }
}

#[test]
fn bench_hash_rounds_grow_linearly() {
    let tmp = tempfile::tempdir().unwrap();
    let csv_text = bench_csv(tmp.path(), &["--backends", "hash", "--d", "16,32,64,128", "--seeds", "1"]);
    let s = loglog_slope(&column(&csv_text, "hash", "check", "rounds"));
    assert!((0.9..=1.1).contains(&s), "hash round slope {s}");
}

#[test]
fn curve_backend_runs_end_to_end() {
    let tmp = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_arc")).args(["run", "--out", "out"]).current_dir(tmp.path()).env("ARC_FIELD_BACKEND", "curve").output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = Command::new(env!("CARGO_BIN_EXE_arc"))
        .args(["verify", "out/inference.receipt.hex"])
        .current_dir(tmp.path())
        .env("ARC_FIELD_BACKEND", "curve")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}
