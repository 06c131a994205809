use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use syndrome_fp::experiment::presets;
use syndrome_fp::experiment::{BatchRole, JobBatch, Scenario};
use syndrome_fp::farm::read_shot_log;

fn sfp(args: &[&str], out: &Path, scenario: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_sfp"));
    cmd.args(args).arg("--out").arg(out);
    if let Some(s) = scenario {
        cmd.arg("--scenario").arg(s);
    }
    cmd.output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn write_scenario(dir: &Path, name: &str, s: &Scenario) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, serde_json::to_string(s).unwrap()).unwrap();
    p
}

fn batch(at_hours: f64, role: BatchRole, jobs_per_backend: usize, shots: usize) -> JobBatch {
    JobBatch { at_hours, circuit: "surface-d3-r10".into(), role, jobs_per_backend, shots }
}

fn small() -> Scenario {
    let mut s = presets::curve(3);
    s.schedule = vec![batch(1.0, BatchRole::Train, 2, 64), batch(6.0, BatchRole::Test, 1, 64)];
    s
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    v.sort();
    v
}

#[test]
fn fleet_is_reproducible_and_refuses_to_clobber() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert_eq!(code(&sfp(&["fleet", "--seed", "11"], &a, None)), 0);
    assert_eq!(code(&sfp(&["fleet", "--seed", "11"], &b, None)), 0);
    let first = dir_bytes(&a.join("profiles"));
    assert_eq!(first.len(), 5);
    assert_eq!(first, dir_bytes(&b.join("profiles")));

    let again = sfp(&["fleet", "--seed", "11"], &a, None);
    assert_eq!(code(&again), 1);
    assert!(String::from_utf8_lossy(&again.stderr).contains("--force"));
    assert_eq!(code(&sfp(&["fleet", "--seed", "11", "--force"], &a, None)), 0);
    assert_eq!(first, dir_bytes(&a.join("profiles")));

    assert_eq!(code(&sfp(&["fleet", "--seed", "12"], &b, None)), 1);
    assert_eq!(code(&sfp(&["fleet", "--seed", "12", "--force"], &b, None)), 0);
    assert_ne!(first, dir_bytes(&b.join("profiles")));
}

#[test]
fn collect_writes_every_shot_and_reruns_identically() {
    let tmp = tempfile::tempdir().unwrap();
    let scenario = write_scenario(tmp.path(), "small.json", &small());
    let out = tmp.path().join("run");
    assert_eq!(code(&sfp(&["fleet"], &out, Some(&scenario))), 0);
    let o = sfp(&["collect"], &out, None);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let log = fs::read(out.join("shots.jsonl")).unwrap();
    assert_eq!(log.iter().filter(|&&c| c == b'\n').count(), 5 * 3 * 64);

    assert_eq!(code(&sfp(&["collect"], &out, None)), 1);
    assert_eq!(code(&sfp(&["collect", "--force"], &out, None)), 0);
    assert_eq!(fs::read(out.join("shots.jsonl")).unwrap(), log);
}

#[test]
fn missing_artifacts_and_bad_input_exit_one() {
    let tmp = tempfile::tempdir().unwrap();
    let scenario = write_scenario(tmp.path(), "small.json", &small());
    let empty = tmp.path().join("empty");
    let o = sfp(&["collect"], &empty, Some(&scenario));
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("fleet"));
    assert_eq!(code(&sfp(&["train"], &empty, Some(&scenario))), 1);
    assert_eq!(code(&sfp(&["verify"], &empty, Some(&scenario))), 1);

    let mut one = small();
    one.fleet.backends = 1;
    let lonely = write_scenario(tmp.path(), "one.json", &one);
    let o = sfp(&["fleet"], &tmp.path().join("one"), Some(&lonely));
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("at least 2 backends"));

    fs::write(tmp.path().join("junk.json"), "{ not json").unwrap();
    assert_eq!(code(&sfp(&["fleet"], &tmp.path().join("junk"), Some(&tmp.path().join("junk.json")))), 1);
    assert_eq!(code(&sfp(&["launch"], &empty, None)), 1);
    assert_eq!(code(&sfp(&["--help"], &empty, None)), 0);
}

#[test]
fn calibration_epoch_advances_daily() {
    let tmp = tempfile::tempdir().unwrap();
    let mut s = small();
    s.schedule = (0..10).map(|d| batch(1.0 + 24.0 * d as f64, BatchRole::Train, 1, 4)).collect();
    let scenario = write_scenario(tmp.path(), "days.json", &s);
    let out = tmp.path().join("days");
    assert_eq!(code(&sfp(&["fleet"], &out, Some(&scenario))), 0);
    assert_eq!(code(&sfp(&["collect"], &out, None)), 0);
    let records = read_shot_log(&out.join("shots.jsonl")).unwrap();
    for r in &records {
        assert_eq!(r.epoch, (r.timestamp / 3600.0 / 24.0).floor() as u64);
    }
    let mut epochs: Vec<u64> = records.iter().map(|r| r.epoch).collect();
    epochs.dedup();
    assert_eq!(epochs, (0..10).collect::<Vec<_>>());
}

fn verify_run(s: &Scenario, tmp: &Path, name: &str) -> (i32, String) {
    let scenario = write_scenario(tmp, &format!("{name}.json"), s);
    let out = tmp.join(name);
    for step in ["fleet", "collect", "train"] {
        let o = sfp(&[step], &out, Some(&scenario));
        assert_eq!(code(&o), 0, "{step}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let o = sfp(&["verify"], &out, None);
    assert!(out.join("verdicts.json").is_file());
    (code(&o), String::from_utf8_lossy(&o.stdout).into_owned())
}

#[test]
fn verify_flags_only_misrouted_jobs() {
    let tmp = tempfile::tempdir().unwrap();
    let mut honest = presets::curve(7);
    honest.schedule = vec![
        batch(1.0, BatchRole::Train, 20, 512),
        batch(6.0, BatchRole::Test, 2, 128),
        batch(8.0, BatchRole::Verify, 2, 1000),
    ];
    let mut routed = honest.clone();
    routed.routing = presets::verification(7).routing;

    let (c, stdout) = verify_run(&honest, tmp.path(), "honest");
    assert_eq!(c, 0, "{stdout}");
    let (c, stdout) = verify_run(&routed, tmp.path(), "routed");
    assert_eq!(c, 2, "{stdout}");
    let flagged: Vec<&str> = stdout.lines().filter(|l| l.contains("DISHONEST")).collect();
    assert_eq!(flagged.len(), 2, "{stdout}");
    assert!(flagged.iter().all(|l| l.contains("claimed backend-0") && l.contains("predicted backend-3")));
}
