//! C ABI over `syndrome-fp`.
//!
//! Objects cross the boundary as opaque handles created by `sfp_*_new`-style
//! constructors and released with the matching `sfp_*_free`. Every fallible
//! call returns an [`SfpStatus`]; on failure a description is available from
//! [`sfp_last_error`] on the same thread until the next failing call.
//! Strings are UTF-8 and NUL-terminated.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use syndrome_fp::experiment::{
    build_fleet, collect, encode_records, fit, prepare_circuits, select, verify_jobs, BatchRole, Scenario,
};
use syndrome_fp::farm::{read_shot_log, write_profiles, write_shot_log, NoiseProfile, SyndromeRecord};
use syndrome_fp::sup::{Aggregation, ClassifierModel, Specificity};
use syndrome_fp::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SfpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    MissingArtifact = 3,
    Io = 4,
    Simulation = 5,
    Panic = 6,
}

/// A generated fleet together with the scenario that produced it.
pub struct SfpFleet {
    scenario: Scenario,
    profiles: Vec<NoiseProfile>,
}

/// Syndrome records from a collection run or a shot log.
pub struct SfpRecords {
    records: Vec<SyndromeRecord>,
}

/// A trained backend classifier.
pub struct SfpModel {
    model: ClassifierModel,
    names: Vec<CString>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> SfpStatus {
    match e {
        Error::MissingArtifact(_) => SfpStatus::MissingArtifact,
        Error::Io(_) | Error::Json(_) | Error::Csv(_) => SfpStatus::Io,
        Error::QubitOutOfRange { .. }
        | Error::InvalidGate(_)
        | Error::NotExecutable(_)
        | Error::InsufficientQubits { .. }
        | Error::StaleEpoch { .. } => SfpStatus::Simulation,
        _ => SfpStatus::InvalidInput,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (SfpStatus, String)>) -> SfpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SfpStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            SfpStatus::Panic
        }
    }
}

fn lift<T>(r: syndrome_fp::Result<T>) -> Result<T, (SfpStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (SfpStatus, String) {
    (SfpStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (SfpStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (SfpStatus::InvalidInput, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, (SfpStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), (SfpStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Message of the last failing call on this thread, or an empty string.
/// The pointer stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn sfp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn sfp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds the fleet of a scenario. `scenario_json` may be null for the
/// default scenario; `seed` replaces the scenario seed unless `keep_seed`
/// is non-zero.
///
/// # Safety
/// `scenario_json` must be null or a valid C string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sfp_fleet_generate(
    scenario_json: *const c_char,
    seed: u64,
    keep_seed: i32,
    out: *mut *mut SfpFleet,
) -> SfpStatus {
    guard(|| {
        let mut scenario = if scenario_json.is_null() {
            Scenario::default()
        } else {
            let text = str_arg(scenario_json, "scenario_json")?;
            lift(serde_json::from_str::<Scenario>(text).map_err(Error::from))?
        };
        if keep_seed == 0 {
            scenario.seed = seed;
        }
        let profiles = lift(build_fleet(&scenario))?;
        put(out, SfpFleet { scenario, profiles })
    })
}

/// Number of backends in the fleet; 0 for a null handle.
///
/// # Safety
/// `fleet` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sfp_fleet_len(fleet: *const SfpFleet) -> usize {
    fleet.as_ref().map_or(0, |f| f.profiles.len())
}

/// Writes one profile JSON per backend into `dir`.
///
/// # Safety
/// `fleet` must be a live handle and `dir` a valid C string.
#[no_mangle]
pub unsafe extern "C" fn sfp_fleet_save(fleet: *const SfpFleet, dir: *const c_char) -> SfpStatus {
    guard(|| {
        let f = handle(fleet, "fleet")?;
        let dir = PathBuf::from(str_arg(dir, "dir")?);
        lift(write_profiles(&dir, &f.profiles)).map(|_| ())
    })
}

/// # Safety
/// `fleet` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sfp_fleet_free(fleet: *mut SfpFleet) {
    if !fleet.is_null() {
        drop(Box::from_raw(fleet));
    }
}

/// Runs the scenario's job schedule on the fleet.
///
/// # Safety
/// `fleet` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sfp_collect(fleet: *const SfpFleet, out: *mut *mut SfpRecords) -> SfpStatus {
    guard(|| {
        let f = handle(fleet, "fleet")?;
        let records = lift(collect(&f.scenario, &f.profiles))?;
        put(out, SfpRecords { records })
    })
}

/// Reads a JSON-Lines shot log (gzip if the name ends in `.gz`).
///
/// # Safety
/// `path` must be a valid C string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sfp_records_load(path: *const c_char, out: *mut *mut SfpRecords) -> SfpStatus {
    guard(|| {
        let p = PathBuf::from(str_arg(path, "path")?);
        if !p.is_file() {
            return Err((SfpStatus::MissingArtifact, format!("missing artifact: shot log {}", p.display())));
        }
        let records = lift(read_shot_log(&p))?;
        put(out, SfpRecords { records })
    })
}

/// # Safety
/// `records` must be a live handle and `path` a valid C string.
#[no_mangle]
pub unsafe extern "C" fn sfp_records_save(records: *const SfpRecords, path: *const c_char) -> SfpStatus {
    guard(|| {
        let r = handle(records, "records")?;
        lift(write_shot_log(&PathBuf::from(str_arg(path, "path")?), &r.records))
    })
}

/// Number of shots; 0 for a null handle.
///
/// # Safety
/// `records` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sfp_records_len(records: *const SfpRecords) -> usize {
    records.as_ref().map_or(0, |r| r.records.len())
}

/// # Safety
/// `records` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sfp_records_free(records: *mut SfpRecords) {
    if !records.is_null() {
        drop(Box::from_raw(records));
    }
}

fn model_handle(model: ClassifierModel) -> SfpModel {
    let names = model.labels.vocabulary.iter().map(|n| CString::new(n.as_str()).unwrap_or_default()).collect();
    SfpModel { model, names }
}

/// Trains a backend classifier on the training batches of `records`,
/// using the fleet's scenario for encoding and hyperparameters.
///
/// # Safety
/// `fleet` and `records` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sfp_train(
    fleet: *const SfpFleet,
    records: *const SfpRecords,
    out: *mut *mut SfpModel,
) -> SfpStatus {
    guard(|| {
        let f = handle(fleet, "fleet")?;
        let r = handle(records, "records")?;
        let enc = lift(prepare_circuits(&f.scenario).and_then(|c| encode_records(&r.records, &c)))?;
        let train = select(&f.scenario, &enc, BatchRole::Train, None);
        let trained = lift(fit(&f.scenario, &train, Specificity::Backend, Aggregation::SingleShot))?;
        put(out, model_handle(trained.model))
    })
}

/// # Safety
/// `path` must be a valid C string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sfp_model_load(path: *const c_char, out: *mut *mut SfpModel) -> SfpStatus {
    guard(|| {
        let p = PathBuf::from(str_arg(path, "path")?);
        if !p.is_file() {
            return Err((SfpStatus::MissingArtifact, format!("missing artifact: model {}", p.display())));
        }
        put(out, model_handle(lift(ClassifierModel::load(&p))?))
    })
}

/// # Safety
/// `model` must be a live handle and `path` a valid C string.
#[no_mangle]
pub unsafe extern "C" fn sfp_model_save(model: *const SfpModel, path: *const c_char) -> SfpStatus {
    guard(|| {
        let m = handle(model, "model")?;
        lift(m.model.save(&PathBuf::from(str_arg(path, "path")?)))
    })
}

/// Number of classes; 0 for a null handle.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sfp_model_num_classes(model: *const SfpModel) -> usize {
    model.as_ref().map_or(0, |m| m.names.len())
}

/// Feature length the model expects; 0 for a null handle.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sfp_model_input_dim(model: *const SfpModel) -> usize {
    model.as_ref().map_or(0, |m| m.model.input_dim)
}

/// Label of class `index`, owned by the model; null if out of range.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sfp_model_class_name(model: *const SfpModel, index: usize) -> *const c_char {
    model.as_ref().and_then(|m| m.names.get(index)).map_or(ptr::null(), |c| c.as_ptr())
}

/// Predicts the class of one encoded feature vector of length `len`.
///
/// # Safety
/// `model` must be a live handle, `features` must point to `len` doubles,
/// and `out_class` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sfp_model_predict(
    model: *const SfpModel,
    features: *const f64,
    len: usize,
    out_class: *mut usize,
) -> SfpStatus {
    guard(|| {
        let m = handle(model, "model")?;
        if features.is_null() {
            return Err(null("features"));
        }
        if out_class.is_null() {
            return Err(null("out_class"));
        }
        let x = std::slice::from_raw_parts(features, len);
        *out_class = lift(m.model.predict(x))?;
        Ok(())
    })
}

/// Checks each verify-batch job against its claimed backend. Writes the
/// number of jobs and the number flagged as not matching their claim.
///
/// # Safety
/// All handles must be live; the output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn sfp_verify(
    fleet: *const SfpFleet,
    model: *const SfpModel,
    records: *const SfpRecords,
    out_jobs: *mut usize,
    out_flagged: *mut usize,
) -> SfpStatus {
    guard(|| {
        let f = handle(fleet, "fleet")?;
        let m = handle(model, "model")?;
        let r = handle(records, "records")?;
        if out_jobs.is_null() || out_flagged.is_null() {
            return Err(null("output pointer"));
        }
        let enc = lift(prepare_circuits(&f.scenario).and_then(|c| encode_records(&r.records, &c)))?;
        let verify = select(&f.scenario, &enc, BatchRole::Verify, None);
        if verify.is_empty() {
            return Err((SfpStatus::InvalidInput, "no verify-batch records".into()));
        }
        let verdicts = lift(verify_jobs(&m.model, &verify))?;
        *out_jobs = verdicts.len();
        *out_flagged = verdicts.iter().filter(|v| !v.verified).count();
        Ok(())
    })
}

/// # Safety
/// `model` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sfp_model_free(model: *mut SfpModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}
