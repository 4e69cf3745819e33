use std::path::PathBuf;

use wildmckay::localfields::{crossvalidate_fixtures, load_fixtures, FieldFixture};

fn fixture_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/local_fields.json")
}

#[test]
fn bundled_fixtures_match_enumeration() {
    let fixtures = load_fixtures(&fixture_path()).unwrap();
    let report = crossvalidate_fixtures(&fixtures);
    assert!(report.passed(), "{:?}", report.mismatches);
    assert_eq!(report.uncheckable.len(), 6);
    assert_eq!(report.matched.len() + report.uncheckable.len(), fixtures.len());
}

#[test]
fn fixture_counts_per_degree() {
    let fixtures = load_fixtures(&fixture_path()).unwrap();
    let count = |p: u64, n: usize| fixtures.iter().filter(|f| f.p == p && f.n == n).count();
    assert_eq!(count(5, 2), 3);
    assert_eq!(count(5, 4), 7);
    assert_eq!(count(2, 2), 7);
}

fn fixture(p: u64, n: usize, e: u64, f: u64, c: u64, aut: u64, label: &str) -> FieldFixture {
    serde_json::from_value(serde_json::json!({
        "p": p, "n": n, "e": e, "f": f, "c": c, "aut": aut, "label": label
    }))
    .unwrap()
}

#[test]
fn impossible_automorphism_count_is_reported() {
    let report = crossvalidate_fixtures(&[fixture(5, 2, 2, 1, 1, 3, "bogus")]);
    assert!(!report.passed());
    assert_eq!(report.mismatches[0].label, "bogus");
}

#[test]
fn too_many_copies_of_a_class_are_reported() {
    let fx: Vec<_> = (1..=4).map(|i| fixture(5, 2, 2, 1, 1, 2, &format!("5.2.1.{i}"))).collect();
    let report = crossvalidate_fixtures(&fx);
    assert_eq!(report.matched.len(), 2);
    assert_eq!(report.mismatches.len(), 2);
}

#[test]
fn missing_file_is_an_error() {
    assert!(load_fixtures(&fixture_path().with_file_name("absent.json")).is_err());
}
