use std::path::Path;
use std::process::Command;

fn chemolab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chemolab"))
}

fn config(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
        .display()
        .to_string()
}

#[test]
fn run_then_report() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("pair");
    let status = chemolab()
        .args(["run", "--config", &config("pair_no_reaction.cfg"), "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    for f in ["mass_timeseries.csv", "mass_timeseries_tilde.csv", "snapshot_1.csv", "config.echo"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let rep = chemolab().args(["report", "--in"]).arg(&out).output().unwrap();
    assert!(rep.status.success());
    assert!(String::from_utf8_lossy(&rep.stdout).contains("quarter-mass time"));
}

#[test]
fn sweep_takes_workers_from_the_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("sweep");
    let o = chemolab()
        .env("CHEMOLAB_WORKERS", "2")
        .args(["sweep", "--config", &config("gsystem.cfg"), "--axis", "eps=0.5,1,2", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert!(String::from_utf8_lossy(&o.stdout).contains("slope"));
}

#[test]
fn bad_input_is_rejected() {
    let o = chemolab().args(["verify", "--suite", "slow"]).output().unwrap();
    assert!(!o.status.success());
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.cfg");
    std::fs::write(&cfg, "[scenario]\nname = teleport\n").unwrap();
    let o = chemolab().args(["run", "--config"]).arg(&cfg).arg("--out").arg(tmp.path().join("o")).output().unwrap();
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("teleport"));
}

#[test]
fn fast_suite_passes() {
    let o = chemolab().args(["verify", "--suite", "fast"]).output().unwrap();
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(o.status.success(), "{text}");
    assert!(text.contains("PASS C1") && text.contains("PASS P42N"));
}
