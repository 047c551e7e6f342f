use std::process::Command;

fn kgnf(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_kgnf"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn writes_outputs_under_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "preset = \"variable\"\n[grid]\npoints = 256\n").unwrap();
    let out = dir.path().join("runs");
    let o = kgnf(&[
        "resonance_classify",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--seed",
        "5",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("resonance_classify/resonance.csv")).unwrap();
    assert!(csv
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("whole,fourier_bump"));
    let m = std::fs::read_to_string(out.join("resonance_classify/manifest.json")).unwrap();
    assert!(m.contains("\"seed\": 5"));
}

#[test]
fn exit_codes() {
    assert_eq!(kgnf(&["nope"]).status.code(), Some(2));
    assert_eq!(
        kgnf(&["simulate", "--override", "grid.points=1000"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        kgnf(&["simulate", "--config", "/nonexistent.toml"])
            .status
            .code(),
        Some(2)
    );
    let dir = tempfile::tempdir().unwrap();
    let o = kgnf(&[
        "simulate",
        "--out",
        dir.path().to_str().unwrap(),
        "--override",
        "params.beta0=10.0",
        "--override",
        "solver.eps=3.0",
        "--override",
        "grid.points=256",
    ]);
    assert_eq!(
        o.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(String::from_utf8_lossy(&o.stderr).contains("blow-up"));
}
