use ruinlab::exactnum::{parse_rational, BigRational};
use ruinlab::ruinrec::{iterate_step, StepFunction, DEFAULT_BREAKPOINT_BUDGET};
use ruinlab_cli::cache::{cache_load, cache_path, cache_store, CacheError};

fn f18() -> (BigRational, StepFunction<BigRational>) {
    let p = parse_rational("3/10").unwrap();
    let f = iterate_step(18, &p, DEFAULT_BREAKPOINT_BUDGET).unwrap();
    (p, f)
}

#[test]
fn store_then_load_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let (p, f) = f18();
    cache_store(dir.path(), &p, 18, &f).unwrap();
    let back = cache_load::<BigRational>(dir.path(), &p, 18).unwrap().unwrap();
    assert_eq!(back, f);
    assert!(cache_load::<BigRational>(dir.path(), &p, 17).unwrap().is_none());
    assert!(cache_load::<f64>(dir.path(), &p, 18).unwrap().is_none());
    // no temporary files are left behind
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn double_mode_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let p = parse_rational("3/10").unwrap();
    let f = iterate_step(12, &0.3f64, DEFAULT_BREAKPOINT_BUDGET).unwrap();
    cache_store(dir.path(), &p, 12, &f).unwrap();
    assert_eq!(cache_load::<f64>(dir.path(), &p, 12).unwrap().unwrap(), f);
}

fn tamper(edit: impl FnOnce(&mut serde_json::Value)) -> CacheError {
    let dir = tempfile::tempdir().unwrap();
    let p = parse_rational("3/10").unwrap();
    let f = iterate_step(4, &p, DEFAULT_BREAKPOINT_BUDGET).unwrap();
    let path = cache_store(dir.path(), &p, 4, &f).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    edit(&mut v);
    std::fs::write(&path, v.to_string()).unwrap();
    cache_load::<BigRational>(dir.path(), &p, 4).unwrap_err()
}

#[test]
fn wrong_version_is_rejected() {
    let err = tamper(|v| v["schema_version"] = 99.into());
    assert!(matches!(err, CacheError::Version { found: 99, .. }), "{err}");
}

#[test]
fn unsorted_breakpoints_are_rejected() {
    let err = tamper(|v| {
        let bps = v["record"]["breakpoints"].as_array_mut().unwrap();
        bps.swap(1, 2);
    });
    assert!(matches!(err, CacheError::Invalid { .. }), "{err}");
}

#[test]
fn key_mismatch_is_rejected() {
    let err = tamper(|v| v["record"]["n"] = 5.into());
    assert!(matches!(err, CacheError::KeyMismatch { .. }), "{err}");
}

#[test]
fn garbage_is_corrupt() {
    let dir = tempfile::tempdir().unwrap();
    let p = parse_rational("1/4").unwrap();
    std::fs::write(cache_path::<BigRational>(dir.path(), &p, 3), "{not json").unwrap();
    let err = cache_load::<BigRational>(dir.path(), &p, 3).unwrap_err();
    assert!(matches!(err, CacheError::Corrupt { .. }), "{err}");
}
