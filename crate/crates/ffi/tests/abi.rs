use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use syndrome_fp::experiment::{BatchRole, JobBatch, Scenario};
use syndrome_fp_ffi::*;

fn small_scenario() -> CString {
    let mut s = Scenario::default();
    s.fleet.backends = 3;
    let c = s.circuits[0].name.clone();
    s.schedule = vec![
        JobBatch { at_hours: 1.0, circuit: c.clone(), role: BatchRole::Train, jobs_per_backend: 4, shots: 400 },
        JobBatch { at_hours: 8.0, circuit: c, role: BatchRole::Verify, jobs_per_backend: 1, shots: 600 },
    ];
    s.training.max_epochs = 40;
    CString::new(serde_json::to_string(&s).unwrap()).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(sfp_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn end_to_end_through_handles() {
    let dir = tempfile::tempdir().unwrap();
    let json = small_scenario();
    unsafe {
        let mut fleet = ptr::null_mut();
        assert_eq!(sfp_fleet_generate(json.as_ptr(), 0, 1, &mut fleet), SfpStatus::Ok);
        assert_eq!(sfp_fleet_len(fleet), 3);
        let pdir = CString::new(dir.path().join("profiles").to_str().unwrap()).unwrap();
        assert_eq!(sfp_fleet_save(fleet, pdir.as_ptr()), SfpStatus::Ok);
        assert_eq!(std::fs::read_dir(dir.path().join("profiles")).unwrap().count(), 3);

        let mut records = ptr::null_mut();
        assert_eq!(sfp_collect(fleet, &mut records), SfpStatus::Ok);
        assert_eq!(sfp_records_len(records), 3 * (4 * 400 + 600));
        let log = CString::new(dir.path().join("shots.jsonl.gz").to_str().unwrap()).unwrap();
        assert_eq!(sfp_records_save(records, log.as_ptr()), SfpStatus::Ok);
        let mut reloaded = ptr::null_mut();
        assert_eq!(sfp_records_load(log.as_ptr(), &mut reloaded), SfpStatus::Ok);
        assert_eq!(sfp_records_len(reloaded), sfp_records_len(records));

        let mut model = ptr::null_mut();
        assert_eq!(sfp_train(fleet, reloaded, &mut model), SfpStatus::Ok, "{}", last_error());
        assert_eq!(sfp_model_num_classes(model), 3);
        assert_eq!(CStr::from_ptr(sfp_model_class_name(model, 2)).to_str().unwrap(), "backend-2");
        assert!(sfp_model_class_name(model, 3).is_null());

        let dim = sfp_model_input_dim(model);
        let zeros = vec![0.0; dim];
        let mut class = usize::MAX;
        assert_eq!(sfp_model_predict(model, zeros.as_ptr(), dim, &mut class), SfpStatus::Ok);
        assert!(class < 3);
        assert_eq!(sfp_model_predict(model, zeros.as_ptr(), dim + 1, &mut class), SfpStatus::InvalidInput);

        let mpath = CString::new(dir.path().join("model.json").to_str().unwrap()).unwrap();
        assert_eq!(sfp_model_save(model, mpath.as_ptr()), SfpStatus::Ok);
        let mut model2 = ptr::null_mut();
        assert_eq!(sfp_model_load(mpath.as_ptr(), &mut model2), SfpStatus::Ok);

        let (mut jobs, mut flagged) = (0usize, 0usize);
        assert_eq!(sfp_verify(fleet, model2, records, &mut jobs, &mut flagged), SfpStatus::Ok, "{}", last_error());
        assert_eq!(jobs, 3);
        assert!(flagged <= jobs);

        sfp_model_free(model2);
        sfp_model_free(model);
        sfp_records_free(reloaded);
        sfp_records_free(records);
        sfp_fleet_free(fleet);
    }
}

#[test]
fn errors_set_status_and_message() {
    unsafe {
        let mut fleet = ptr::null_mut();
        assert_eq!(sfp_fleet_generate(ptr::null(), 1, 0, ptr::null_mut()), SfpStatus::NullPointer);
        assert!(last_error().contains("null"));

        let bad = CString::new("{\"seed\": 1, \"fleet\": {\"backends\": 1}}").unwrap();
        assert_eq!(sfp_fleet_generate(bad.as_ptr(), 0, 1, &mut fleet), SfpStatus::InvalidInput);
        assert!(last_error().contains("at least 2 backends"), "{}", last_error());
        assert!(fleet.is_null());

        let junk = CString::new("not json").unwrap();
        assert_eq!(sfp_fleet_generate(junk.as_ptr(), 0, 1, &mut fleet), SfpStatus::Io);

        let missing = CString::new("/nonexistent/shots.jsonl").unwrap();
        let mut records = ptr::null_mut();
        assert_eq!(sfp_records_load(missing.as_ptr(), &mut records), SfpStatus::MissingArtifact);
        assert!(last_error().contains("/nonexistent/shots.jsonl"));

        let mut model = ptr::null_mut();
        assert_eq!(sfp_model_load(missing.as_ptr(), &mut model), SfpStatus::MissingArtifact);
        assert_eq!(sfp_collect(ptr::null(), &mut records), SfpStatus::NullPointer);

        assert_eq!(sfp_fleet_len(ptr::null()), 0);
        assert_eq!(sfp_records_len(ptr::null()), 0);
        assert_eq!(sfp_model_num_classes(ptr::null()), 0);
        sfp_fleet_free(ptr::null_mut());
        sfp_records_free(ptr::null_mut());
        sfp_model_free(ptr::null_mut());
    }
}

#[test]
fn default_fleet_is_seeded() {
    unsafe {
        let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(sfp_fleet_generate(ptr::null(), 11, 0, &mut a), SfpStatus::Ok);
        assert_eq!(sfp_fleet_generate(ptr::null(), 11, 0, &mut b), SfpStatus::Ok);
        assert_eq!(sfp_fleet_len(a), 5);
        let dir = tempfile::tempdir().unwrap();
        for (h, sub) in [(a, "a"), (b, "b")] {
            let p = CString::new(dir.path().join(sub).to_str().unwrap()).unwrap();
            assert_eq!(sfp_fleet_save(h, p.as_ptr()), SfpStatus::Ok);
        }
        let read = |sub: &str| std::fs::read(dir.path().join(sub).join("backend-0.json")).unwrap();
        assert_eq!(read("a"), read("b"));
        sfp_fleet_free(a);
        sfp_fleet_free(b);
    }
    let v = unsafe { CStr::from_ptr(sfp_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

fn header() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/syndrome_fp.h")
}

#[test]
fn header_declares_every_export() {
    let h = std::fs::read_to_string(header()).unwrap();
    for f in [
        "sfp_last_error",
        "sfp_version",
        "sfp_fleet_generate",
        "sfp_fleet_len",
        "sfp_fleet_save",
        "sfp_fleet_free",
        "sfp_collect",
        "sfp_records_load",
        "sfp_records_save",
        "sfp_records_len",
        "sfp_records_free",
        "sfp_train",
        "sfp_model_load",
        "sfp_model_save",
        "sfp_model_num_classes",
        "sfp_model_input_dim",
        "sfp_model_class_name",
        "sfp_model_predict",
        "sfp_verify",
        "sfp_model_free",
    ] {
        assert!(h.contains(&format!("{f}(")), "{f} missing from header");
    }
    assert!(h.contains("typedef struct SfpFleet SfpFleet;"));
    assert!(h.contains("SFP_STATUS_MISSING_ARTIFACT = 3"));
}

/// Compiles and runs a C program against the header and the static library.
#[test]
fn c_program_links_and_runs() {
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("no C compiler; skipping");
        return;
    }
    // target/<profile>/deps/<test binary>
    let deps = std::env::current_exe().unwrap().parent().unwrap().to_path_buf();
    let lib = deps.parent().unwrap().join("libsyndrome_fp_ffi.a");
    if !lib.is_file() {
        eprintln!("static library not built at {}; skipping", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    std::fs::write(
        &src,
        r#"
#include <stdio.h>
#include <string.h>
#include "syndrome_fp.h"
int main(void) {
    SfpFleet *fleet = NULL;
    if (sfp_fleet_generate(NULL, 3, 0, &fleet) != SFP_STATUS_OK) return 10;
    if (sfp_fleet_len(fleet) != 5) return 11;
    SfpRecords *r = NULL;
    if (sfp_records_load("/nonexistent.jsonl", &r) != SFP_STATUS_MISSING_ARTIFACT) return 12;
    if (strstr(sfp_last_error(), "nonexistent") == NULL) return 13;
    sfp_fleet_free(fleet);
    printf("%s\n", sfp_version());
    return 0;
}
"#,
    )
    .unwrap();
    let exe = dir.path().join("smoke");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compile/link failed");
    let out = Command::new(&exe).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), env!("CARGO_PKG_VERSION"));
}
