use affdual::algebra::builtin;
use affdual::oracles::run_battery;
use affdual::Limits;

#[test]
fn default_suite_passes_every_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let reports = run_battery(
        &builtin::default_suite(),
        &Limits::default(),
        Some(dir.path()),
    )
    .unwrap();
    let failed: Vec<_> = reports.iter().filter(|r| !r.pass).collect();
    assert!(failed.is_empty(), "{failed:#?}");
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
    for id in [
        "subgroup-count",
        "hom-count",
        "affine-subalgebra-count",
        "affine-hom-count",
        "generating-set",
        "term-function-count",
        "si-sizes",
        "free-module-formula",
    ] {
        assert!(reports.iter().any(|r| r.oracle == id), "{id}");
    }
}
