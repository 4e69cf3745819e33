use std::path::Path;
use std::process::{Command, Output};

fn wildmckay(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wildmckay"))
        .args(args)
        .env_remove("WILDMCKAY_BUDGET")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn fixtures() -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures/local_fields.json")
        .to_str()
        .unwrap()
        .to_string()
}

#[test]
fn expcheck_passes() {
    let out = wildmckay(&["mass", "expcheck", "--nmax", "8"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).ends_with("PASS\n"));
}

#[test]
fn trunc_sets_the_default_range() {
    let out = wildmckay(&["--format", "csv", "--trunc", "4", "mass", "bhargava"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).lines().count(), 5);
}

#[test]
fn invert_both_modes() {
    for mode in ["base-change", "consistency"] {
        let out = wildmckay(&["mass", "invert", "--nmax", "9", "--mode", mode]);
        assert_eq!(code(&out), 0, "{mode}");
    }
}

#[test]
fn mckay_verify_and_table() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("table.json");
    let out = wildmckay(&["--format", "json", "mckay", "verify", "--p", "7", "--n", "3", "--table", table.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["summary"]["mass_side"], "136857");
    let written: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(table).unwrap()).unwrap();
    assert_eq!(written["rows"].as_array().unwrap().len(), 8);
}

#[test]
fn incomplete_tame_enumeration_is_an_input_error() {
    let out = wildmckay(&["mckay", "verify", "--p", "3", "--n", "4"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("incomplete"));
    assert_eq!(code(&wildmckay(&["etale", "mass", "--p", "2", "--n", "2"])), 2);
}

#[test]
fn invalid_arguments_exit_2() {
    assert_eq!(code(&wildmckay(&["etale", "mass", "--p", "9", "--n", "2"])), 2);
    assert_eq!(code(&wildmckay(&["frobnicate"])), 2);
    assert_eq!(code(&wildmckay(&["--budget", "0", "selftest"])), 2);
    assert_eq!(code(&wildmckay(&["--trunc", "0", "mass", "serre"])), 2);
    assert_eq!(code(&wildmckay(&["stringy", "point", "--a", "x"])), 2);
    assert_eq!(code(&wildmckay(&["stringy", "eval", "--input", "/nonexistent.json"])), 2);
    assert_eq!(code(&wildmckay(&["--help"])), 0);
}

#[test]
fn fixtures_cross_validate() {
    let out = wildmckay(&["etale", "crossvalidate", "--fixtures", &fixtures()]);
    assert_eq!(code(&out), 0);
    let out = wildmckay(&["--format", "json", "etale", "enumerate", "--p", "5", "--n", "4", "--fixtures", &fixtures()]);
    assert_eq!(code(&out), 0);
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["summary"]["complete"], true);
    assert_eq!(report["summary"]["fixtures_matched"], 12);
    let out = wildmckay(&["--format", "json", "etale", "enumerate", "--p", "3", "--n", "3"]);
    assert_eq!(code(&out), 0);
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["summary"]["complete"], false);
}

#[test]
fn fixture_mismatch_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "bad.json",
        r#"[{"p":5,"n":2,"e":2,"f":1,"c":1,"aut":3,"label":"5.2.1.9"}]"#,
    );
    let out = wildmckay(&["etale", "crossvalidate", "--fixtures", &path]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("5.2.1.9"));
    let malformed = write(dir.path(), "malformed.json", "[{]");
    assert_eq!(code(&wildmckay(&["etale", "crossvalidate", "--fixtures", &malformed])), 2);
}

#[test]
fn stringy_commands() {
    let dir = tempfile::tempdir().unwrap();
    let pair = write(
        dir.path(),
        "pair.json",
        r#"{"horizontal":["1/2"],"vertical":[{"a":0,"strata":[{"subset":[],"count":20},{"subset":[1],"count":6}]}],"total":26}"#,
    );
    let out = wildmckay(&["--format", "json", "stringy", "eval", "--input", &pair, "--at-q", "5"]);
    assert_eq!(code(&out), 0);
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["summary"]["value"], "6*q^(1/2) + 26");

    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"horizontal":["1/2"],"vertical":[{"a":0,"strata":[{"subset":[2],"count":1}]}]}"#,
    );
    assert_eq!(code(&wildmckay(&["stringy", "eval", "--input", &bad])), 2);

    let out = wildmckay(&["--format", "json", "stringy", "point", "--a", "1", "--cs", "-1", "--at-q", "5"]);
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["summary"]["value"], "(q)/(q + 1)");
    assert_eq!(report["summary"]["value_at_q"], "5/6");

    let out = wildmckay(&["--format", "json", "stringy", "point", "--a", "0", "--cs", "1/2,1"]);
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["summary"]["value"], "infinite");
}

#[test]
fn padic_commands() {
    let dir = tempfile::tempdir().unwrap();
    let circle = write(dir.path(), "circle.json", r#"{"p":5,"n":2,"d":1,"polys":[[[[2,0],1],[[0,2],1],[[0,0],-1]]]}"#);
    let node = write(dir.path(), "node.json", r#"{"p":5,"n":2,"d":1,"polys":[[[[1,1],1]]]}"#);

    let out = wildmckay(&["--format", "json", "padic", "count", "--input", &circle, "--m", "2"]);
    assert_eq!(code(&out), 0);
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["summary"]["count"], "20");
    assert_eq!(report["summary"]["normalized"], "4/5");

    let brute = wildmckay(&["--format", "json", "padic", "count", "--input", &circle, "--m", "2", "--strategy", "brute-force"]);
    assert_eq!(stdout(&brute), stdout(&out));

    assert_eq!(code(&wildmckay(&["padic", "measure", "--input", &circle, "--m-max", "3"])), 0);
    assert_eq!(code(&wildmckay(&["padic", "measure", "--input", &node])), 1);

    let over = wildmckay(&["--budget", "100", "padic", "count", "--input", &circle, "--m", "2", "--strategy", "brute-force"]);
    assert_eq!(code(&over), 2);
    assert!(String::from_utf8_lossy(&over.stderr).contains("625"));

    let env_budget = Command::new(env!("CARGO_BIN_EXE_wildmckay"))
        .args(["padic", "count", "--input", &circle, "--m", "2", "--strategy", "brute-force"])
        .env("WILDMCKAY_BUDGET", "100")
        .output()
        .unwrap();
    assert_eq!(code(&env_budget), 2);

    let out = wildmckay(&["--format", "csv", "padic", "nullset", "--input", &node, "--m-max", "3"]);
    assert_eq!(stdout(&out), "m,fraction,approx\n1,9/25,3.600000e-1\n2,13/125,1.040000e-1\n3,17/625,2.720000e-2\n");

    let invalid = write(dir.path(), "invalid.json", r#"{"p":4,"n":1,"d":1,"polys":[]}"#);
    assert_eq!(code(&wildmckay(&["padic", "count", "--input", &invalid, "--m", "1"])), 2);

    let out = wildmckay(&["--format", "json", "padic", "integral", "--c", "1", "--p", "5"]);
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["summary"]["exact"], "infinite");
}

#[test]
fn json_and_csv_are_byte_identical_across_runs() {
    for args in [
        &["--format", "json", "selftest"][..],
        &["--format", "csv", "mass", "expcheck"][..],
        &["--format", "json", "etale", "enumerate", "--p", "11", "--n", "4"][..],
    ] {
        assert_eq!(wildmckay(args).stdout, wildmckay(args).stdout, "{args:?}");
    }
}
