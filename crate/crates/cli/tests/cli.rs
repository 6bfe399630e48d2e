use std::path::Path;
use std::process::{Command, Output};

use halving_core::tucker::StrongTuckerInstance;
use serde_json::Value;

fn halving(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_halving"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write_lambda(path: &Path, f: impl Fn(&[usize]) -> u64) {
    let inst = StrongTuckerInstance::from_fn(vec![8, 8], f).unwrap();
    std::fs::write(path, serde_json::to_string(&inst).unwrap()).unwrap();
}

fn threshold(p: &[usize]) -> u64 {
    u64::from(p[0] >= 5) | (u64::from(p[1] >= 5) << 1)
}

#[test]
fn tucker_gen_is_deterministic_and_checks_m() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    assert_eq!(
        code(&halving(&[
            "tucker",
            "gen",
            "--m",
            "16",
            "--seed",
            "1",
            "--out",
            p(&a)
        ])),
        0
    );
    assert_eq!(
        code(&halving(&[
            "tucker",
            "gen",
            "--m",
            "16",
            "--seed",
            "1",
            "--out",
            p(&b)
        ])),
        0
    );
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let report = halving(&["report", "--in", p(&a), "--json"]);
    let v: Value = serde_json::from_slice(&report.stdout).unwrap();
    assert_eq!(v["kind"], "tucker2d");
    assert_eq!(v["summary"]["antipodal"], true);
    let odd = halving(&["tucker", "gen", "--m", "15", "--out", p(&a)]);
    assert_eq!(code(&odd), 4);
}

#[test]
fn fold_reaches_width_eight() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("t.json");
    let fin = dir.path().join("final.json");
    let pipe = dir.path().join("pipeline.json");
    assert_eq!(
        code(&halving(&[
            "tucker",
            "gen",
            "--m",
            "16",
            "--seed",
            "3",
            "--out",
            p(&t)
        ])),
        0
    );
    let out = halving(&[
        "fold",
        "--in",
        p(&t),
        "--out",
        p(&fin),
        "--pipeline",
        p(&pipe),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let inst: StrongTuckerInstance = serde_json::from_slice(&std::fs::read(&fin).unwrap()).unwrap();
    assert!(inst.dims().iter().all(|&m| m == 8));
    let v: Value =
        serde_json::from_slice(&halving(&["report", "--in", p(&pipe), "--json"]).stdout).unwrap();
    assert_eq!(v["kind"], "pipeline");
}

#[test]
fn roundtrip_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let lam = dir.path().join("lambda.json");
    write_lambda(&lam, threshold);
    let ok = halving(&[
        "ch",
        "roundtrip",
        "--lambda",
        p(&lam),
        "--epsilon",
        "199/1000",
        "--variant",
        "standard",
    ]);
    assert_eq!(code(&ok), 0, "{}", String::from_utf8_lossy(&ok.stderr));

    let eps = halving(&["ch", "roundtrip", "--lambda", p(&lam), "--epsilon", "1/5"]);
    assert_eq!(code(&eps), 4);
    assert!(String::from_utf8_lossy(&eps.stderr).contains("epsilon out of range"));

    let flat = dir.path().join("flat.json");
    write_lambda(&flat, |_| 0b01);
    let none = halving(&["ch", "roundtrip", "--lambda", p(&flat)]);
    assert_eq!(code(&none), 2);
    assert!(String::from_utf8_lossy(&none.stderr).contains("plan not found"));

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{not json").unwrap();
    assert_eq!(code(&halving(&["ch", "roundtrip", "--lambda", p(&bad)])), 3);
}

#[test]
fn build_synth_verify_decode() {
    let dir = tempfile::tempdir().unwrap();
    let lam = dir.path().join("lambda.json");
    let inst = dir.path().join("inst.json");
    let cuts = dir.path().join("cuts.json");
    write_lambda(&lam, threshold);
    assert_eq!(
        code(&halving(&[
            "ch",
            "build",
            "--lambda",
            p(&lam),
            "--out",
            p(&inst)
        ])),
        0
    );
    let synth = halving(&[
        "ch",
        "synth",
        "--inst",
        p(&inst),
        "--lambda",
        p(&lam),
        "--out",
        p(&cuts),
    ]);
    assert_eq!(
        code(&synth),
        0,
        "{}",
        String::from_utf8_lossy(&synth.stderr)
    );

    let verify = halving(&[
        "ch",
        "verify",
        "--inst",
        p(&inst),
        "--cuts",
        p(&cuts),
        "--json",
    ]);
    assert_eq!(code(&verify), 0);
    let v: Value = serde_json::from_slice(&verify.stdout).unwrap();
    assert_eq!(v["max_discrepancy"], "0");

    let decode = halving(&[
        "ch",
        "decode",
        "--inst",
        p(&inst),
        "--cuts",
        p(&cuts),
        "--json",
    ]);
    assert_eq!(code(&decode), 0);
    let d: Value = serde_json::from_slice(&decode.stdout).unwrap();
    assert_eq!(d["good"].as_array().unwrap().len(), 6);

    let mut sol: Value = serde_json::from_slice(&std::fs::read(&cuts).unwrap()).unwrap();
    sol["cuts"].as_array_mut().unwrap().pop();
    let tampered = dir.path().join("tampered.json");
    std::fs::write(&tampered, sol.to_string()).unwrap();
    let fail = halving(&["ch", "verify", "--inst", p(&inst), "--cuts", p(&tampered)]);
    assert_eq!(code(&fail), 2);
    assert!(String::from_utf8_lossy(&fail.stdout).contains("FAIL"));
}
