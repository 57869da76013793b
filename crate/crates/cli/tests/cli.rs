use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_coset-qldpc");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    let stdout = String::from_utf8_lossy(&out.stdout).into_owned();
    assert!(
        out.status.success(),
        "{args:?} failed\nstdout:\n{stdout}\nstderr:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    stdout
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/reference").join(name)
}

#[test]
fn base_search_build_and_certify() {
    let dir = tempfile::tempdir().unwrap();
    let cands = dir.path().join("cands");
    let out = ok(&["search-base", "--field", "7", "--m", "3", "--J", "3", "--out", s(&cands)]);
    assert!(out.starts_with("1 candidate"), "{out}");
    let coeffs = cands.join("cand-0000.coeffs");

    let rep = ok(&["certify-base", "--coeffs", s(&coeffs), "--distance", "4"]);
    assert!(!rep.contains("FAIL"), "{rep}");
    assert!(rep.contains("params [[42,10]]"), "{rep}");
    assert!(rep.contains("D 4 verdict accepted"), "{rep}");
    assert!(rep.contains("D 5 verdict rejected"), "{rep}");

    let built = dir.path().join("base");
    ok(&["build-base", "--coeffs", s(&coeffs), "--out", s(&built)]);
    for f in ["hx.alist", "hz.alist", "sidecar.txt", "code.txt", "base.coeffs"] {
        assert!(built.join(f).exists(), "{f} missing");
    }
    let code = built.join("code.txt");
    let d = ok(&["distance", "--code", s(&code), "--target", "4"]);
    assert!(d.contains("accepted"), "{d}");
    let d = run(&["distance", "--code", s(&code), "--target", "5"]);
    assert!(!d.status.success());
}

#[test]
fn broken_base_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.coeffs");
    // two equal columns in branch 0 of a J=2 array
    std::fs::write(&f, "field 7 1 0 1\nm 3\nJ 2\na0 0 0\nb0 1 1\na1 0 1\nb1 2 3\n").unwrap();
    let out = run(&["certify-base", "--coeffs", s(&f)]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn fer_checkpoint_dumps_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    let coeffs = dir.path().join("f9.coeffs");
    let c = coset_qldpc::base::presets::find("(3,8) F9").unwrap().coefficients();
    std::fs::write(&coeffs, coset_qldpc::io::write_coefficients(&c)).unwrap();
    let built = dir.path().join("f9");
    ok(&["build-base", "--coeffs", s(&coeffs), "--out", s(&built)]);
    let code = built.join("code.txt");

    let one = ok(&["decode", "--code", s(&code), "--p", "0.02", "--seed", "5"]);
    assert!(one.starts_with("seed 5 status"), "{one}");

    let dumps = dir.path().join("dumps");
    let ck = dir.path().join("ck.json");
    let plot = dir.path().join("fer.dat");
    let json = dir.path().join("fer.json");
    let args = [
        "fer", "--code", s(&code), "--p-list", "0.04,0.08", "--trials", "400", "--seed", "3",
        "--checkpoint", s(&ck), "--checkpoint-every", "100", "--batch", "50", "--dump-dir", s(&dumps),
        "--out", s(&plot), "--json", s(&json),
    ];
    ok(&args);
    let recs: Vec<coset_qldpc::harness::FerRecord> = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(recs.len(), 2);
    assert!(recs.iter().all(|r| r.trials == 400 && r.accounting_holds()));
    let pd = coset_qldpc::harness::parse_plot_data(&std::fs::read_to_string(&plot).unwrap()).unwrap();
    assert_eq!(pd.rows.len(), 2);

    // finished checkpoint: rerunning returns the same records
    let fresh = dir.path().join("fer2.json");
    let mut again = args.to_vec();
    let j = again.len() - 1;
    again[j] = s(&fresh);
    ok(&again);
    let recs2: Vec<coset_qldpc::harness::FerRecord> =
        serde_json::from_str(&std::fs::read_to_string(&fresh).unwrap()).unwrap();
    assert_eq!(recs, recs2);

    let failures: usize = recs.iter().map(|r| r.failures as usize).sum();
    let lines = std::fs::read_to_string(dumps.join("failures.jsonl")).unwrap().lines().count();
    assert_eq!(lines, failures);
    let wdir = dir.path().join("witnesses");
    let rep = ok(&["replay", "--code", s(&code), "--dumps", s(&dumps.join("failures.jsonl")), "--out", s(&wdir)]);
    assert!(rep.lines().count() >= failures, "{rep}");
    if let Ok(entries) = std::fs::read_dir(&wdir) {
        for e in entries {
            let w = ok(&["witness", "--code", s(&code), "--witness", s(&e.unwrap().path())]);
            assert!(w.contains("valid"), "{w}");
        }
    }
}

#[test]
fn reference_lift_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("lift");
    let rep = ok(&[
        "lift", "--base", s(&data("base.coeffs")), "--P", "64", "--orbit", s(&data("orbit.txt")),
        "--pin-witness", s(&data("witness-X.txt")), "--pin-witness", s(&data("witness-Z.txt")), "--seed", "1",
        "--out", s(&out),
    ]);
    assert!(rep.contains("[[10240,4108]]"), "{rep}");
    assert!(!rep.contains("FAIL"), "{rep}");
    let code = out.join("code.txt");
    let cert = ok(&["certify-lift", "--code", s(&code), "--labels", s(&out.join("labels.txt"))]);
    assert!(cert.contains("PASS orbit-exclusion"), "{cert}");
    for side in ["X", "Z"] {
        let w = ok(&["witness", "--code", s(&code), "--witness", s(&data(&format!("witness-{side}.txt")))]);
        assert!(w.contains("weight 32") && w.contains("=> valid"), "{w}");
    }
}
