use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn dataset() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/curves.jsonl")
}

fn mtcheck(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mtcheck"))
        .args(args)
        .env("MTCHECK_DATASET", dataset())
        .env_remove("MTCHECK_CACHE_DIR")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn verify_reports_a_failure_with_exit_zero() {
    let out = stdout(&mtcheck(&["verify", "--curve", "4123.b1", "--prime", "7", "--conjecture", "c4mul"]));
    let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["verdicts"][0]["status"], "fail");
    assert_eq!(v["verdicts"][0]["failing_primes"], serde_json::json!([3]));

    let out = stdout(&mtcheck(&[
        "verify", "--curve", "4123.b1", "--prime", "7", "--conjecture", "c4mul", "--torsion-inverted",
    ]));
    let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["verdicts"][0]["status"], "vacuous");

    let out = stdout(&mtcheck(&[
        "verify", "--curve", "4123.b1", "--prime", "7", "--conjecture", "c4mul", "--invert-primes", "3",
    ]));
    let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["verdicts"][0]["status"], "vacuous");
}

#[test]
fn operational_errors_exit_nonzero() {
    let o = mtcheck(&["verify", "--curve", "no.such1", "--prime", "7", "--conjecture", "c11"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
    let o = mtcheck(&["verify", "--curve", "4123.b1", "--prime", "5", "--conjecture", "c11"]);
    assert!(!o.status.success());
    let o = mtcheck(&["verify", "--curve", "4123.b1", "--prime", "7", "--conjecture", "c99"]);
    assert!(!o.status.success());
}

#[test]
fn modsym_and_tate_q() {
    let out = stdout(&mtcheck(&["modsym", "--curve", "4123.b1", "--layer", "7"]));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(&lines[1..4], &["1\t0", "2\t-1", "3\t1"]);

    let out = stdout(&mtcheck(&["tate-q", "--curve", "680.c1", "--prime", "5", "--digits", "9"]));
    assert_eq!(out.trim(), "2*5^4 + 3*5^5 + 2*5^6 + 4*5^7 + 3*5^8 + O(5^9)");
}

#[test]
fn sweep_writes_and_resumes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.jsonl");
    let out_s = out.to_str().unwrap();
    let cache = dir.path().join("cache");
    let run = |extra: &[&str]| {
        let mut args = vec!["sweep", "--max-conductor", "60", "--out", out_s, "--quiet", "--jobs", "2"];
        args.extend_from_slice(extra);
        let o = Command::new(env!("CARGO_BIN_EXE_mtcheck"))
            .args(&args)
            .arg("--dataset")
            .arg(dataset())
            .env("MTCHECK_CACHE_DIR", &cache)
            .output()
            .unwrap();
        stdout(&o)
    };
    let summary: serde_json::Value = serde_json::from_str(run(&[]).trim()).unwrap();
    assert_eq!(summary["errors"], 0);
    assert!(cache.join("symbols").read_dir().unwrap().count() > 0);
    let full = fs::read_to_string(&out).unwrap();
    let header: serde_json::Value = serde_json::from_str(full.lines().next().unwrap()).unwrap();
    let token = header["token"].as_str().unwrap().to_string();

    let lines: Vec<&str> = full.lines().collect();
    fs::write(&out, lines[..lines.len() / 2].join("\n") + "\n").unwrap();
    run(&["--resume", &token]);
    assert_eq!(fs::read_to_string(&out).unwrap(), full);
}
