use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ctrlapx"))
}

fn scratch(test: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(test);
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn run(cmd: &mut Command) -> (i32, String, String) {
    let Output { status, stdout, stderr } = cmd.output().unwrap();
    (
        status.code().unwrap(),
        String::from_utf8(stdout).unwrap(),
        String::from_utf8(stderr).unwrap(),
    )
}

fn json(s: &str) -> serde_json::Value {
    serde_json::from_str(s).unwrap()
}

const CCDC: &str = r#"{"schema_version":1,"kind":"election-control","body":{
  "rule":"plurality","action":"DC","goal":"constructive","budget":"unlimited",
  "candidates":["p","a","b"],"p":"p",
  "voters":[{"ballot":["a","p","b"]},{"ballot":["b","a","p"],"weight":2}]}}"#;

#[test]
fn voiced_ccdc_deletes_everyone_else() {
    let d = scratch("voiced");
    let inst = write(&d, "i.json", CCDC);
    let (code, out, _) = run(bin().arg("solve").arg(&inst).args(["--algo", "voiced-ccdc"]));
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["deleted"], json(r#"["a","b"]"#));
    assert_eq!(v["measure"], 3);
}

#[test]
fn infeasible_ccav_exits_two() {
    // p is approved by nobody, and so is every unregistered voter.
    let d = scratch("infeasible");
    let inst = write(
        &d,
        "i.json",
        r#"{"schema_version":1,"kind":"election-control","body":{
          "rule":"approval","action":"AV","goal":"constructive","budget":"unlimited",
          "candidates":["p","c"],"p":"p","voters":[{"approve":["c"]}],
          "W":[{"approve":["c"]},{"approve":[]}]}}"#,
    );
    let (code, out, err) = run(bin().arg("solve").arg(&inst).args(["--algo", "cip-greedy"]));
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("no solution"));
    let (code, out, _) = run(bin().arg("oracle").arg(&inst));
    assert_eq!(code, 2);
    assert_eq!(json(&out)["solution"], serde_json::Value::Null);
}

#[test]
fn ranking_instance_is_not_approval_ccav() {
    let d = scratch("ballot_kind");
    let inst = write(&d, "i.json", CCDC);
    let (code, _, err) = run(bin()
        .arg("solve")
        .arg(&inst)
        .args(["--algo", "cip-greedy", "--problem", "approval-ccav"]));
    assert_eq!(code, 1);
    assert!(err.contains("ballot kind"), "{err}");
}

#[test]
fn reduce_then_map_back_the_singleton_cover() {
    let d = scratch("msc");
    let src = write(&d, "msc.json", r#"{"schema_version":1,"kind":"msc","body":{"universe":["x"],"family":[["x"]]}}"#);
    let side = d.join("side.json");
    let (code, out, _) = run(bin()
        .args(["reduce", "--from", "msc", "--to", "approval-ccav"])
        .arg(&src)
        .arg("--sidecar")
        .arg(&side));
    assert_eq!(code, 0);
    assert_eq!(json(&out)["body"]["W"].as_array().unwrap().len(), 1);
    assert!(side.exists());
    let target = write(&d, "t.json", &out);
    let sol = write(&d, "y.json", r#"{"schema_version":1,"kind":"control-solution","action":"AV","added":["w1"]}"#);
    let (code, out, _) = run(bin()
        .arg("mapback")
        .arg("--source")
        .arg(&src)
        .arg("--instance")
        .arg(&target)
        .arg("--sidecar")
        .arg(&side)
        .arg(&sol));
    assert_eq!(code, 0);
    assert_eq!(json(&out)["sets"], json("[0]"));

    // An empty W' leaves x ahead of p: not feasible.
    let empty = write(&d, "e.json", r#"{"schema_version":1,"kind":"control-solution","action":"AV","added":[]}"#);
    let (code, _, err) = run(bin()
        .arg("mapback")
        .arg("--source")
        .arg(&src)
        .arg("--instance")
        .arg(&target)
        .arg("--sidecar")
        .arg(&side)
        .arg(&empty));
    assert_eq!(code, 1);
    assert!(err.contains("not feasible"));
}

#[test]
fn mku_gadget_and_its_precondition() {
    let d = scratch("mku");
    let src = write(
        &d,
        "mku.json",
        r#"{"schema_version":1,"kind":"mku","body":{"universe":["u1","u2"],"family":[["u1"],["u2"]],"k":2}}"#,
    );
    let (code, out, _) = run(bin().args(["reduce", "--from", "mku", "--to", "plurality-ccdc"]).arg(&src));
    assert_eq!(code, 0);
    assert!(d.join("mku.mku-ccdc.provenance.json").exists());
    let target = write(&d, "t.json", &out);
    let (code, out, _) = run(bin().arg("oracle").arg(&target));
    assert_eq!(code, 0);
    assert_eq!(json(&out)["measure"], 3);

    let one = write(&d, "k1.json", &fs::read_to_string(&src).unwrap().replace("\"k\":2", "\"k\":1"));
    let (code, _, err) = run(bin().args(["reduce", "--from", "mku", "--to", "plurality-ccdc"]).arg(&one));
    assert_eq!(code, 1);
    assert!(err.contains("use oracle"), "{err}");
}

#[test]
fn unsupported_pair_is_an_error() {
    let d = scratch("pair");
    let src = write(&d, "msc.json", r#"{"schema_version":1,"kind":"msc","body":{"universe":["x"],"family":[["x"]]}}"#);
    let (code, _, _) = run(bin().args(["reduce", "--from", "msc", "--to", "plurality-ccdc"]).arg(&src));
    assert_eq!(code, 1);
}

#[test]
fn verify_counts_trials() {
    let (code, out, _) = run(bin().args(["verify", "--reduction", "msc-ccav", "--trials", "50", "--seed", "7"]));
    assert_eq!(code, 0);
    assert!(out.contains("50/50 pass"));
    let (code, out, _) = run(bin().args(["verify", "--reduction", "hs-condorcet-ccudv", "--trials", "30"]));
    assert_eq!(code, 0);
    assert!(out.contains("30/30 pass"));
    let (code, out, _) = run(bin().args(["verify", "--reduction", "mku-ccdc", "--trials", "0"]));
    assert_eq!(code, 0);
    assert!(out.contains("0/0 pass"));
    let (code, _, _) = run(bin().args(["verify", "--reduction", "nope"]));
    assert_eq!(code, 1);
}

#[test]
fn gen_is_byte_identical_per_seed() {
    let args = ["gen", "--kind", "msc", "--universe", "4", "--sets", "4", "--seed", "1"];
    let (c1, a, _) = run(bin().args(args));
    let (c2, b, _) = run(bin().args(args));
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
    let (_, other, _) = run(bin().args(["gen", "--kind", "msc", "--universe", "4", "--sets", "4", "--seed", "2"]));
    assert_ne!(a, other);
    let (code, _, _) = run(bin().args(["gen", "--kind", "msc", "--universe", "0"]));
    assert_eq!(code, 1);
}

#[test]
fn generated_instances_parse_back() {
    let d = scratch("gen");
    for args in [
        vec!["--kind", "election-control", "--rule", "approval", "--action", "AV", "--weights", "1,2"],
        vec!["--kind", "election-control", "--rule", "plurality", "--action", "AC"],
        vec!["--kind", "x3c", "--k", "3", "--sets", "4", "--plant"],
        vec!["--kind", "hitting-set", "--k", "1"],
    ] {
        let (code, out, err) = run(bin().arg("gen").args(&args));
        assert_eq!(code, 0, "{err}");
        let p = write(&d, "g.json", &out);
        let (code, _, err) = run(bin().arg("oracle").arg(&p));
        assert!(code == 0 || code == 2, "{args:?}: {err}");
    }
}

#[test]
fn node_budget_flag_is_enforced() {
    let d = scratch("budget");
    let inst = write(&d, "i.json", CCDC);
    let (code, _, err) = run(bin().args(["oracle", "--node-budget", "1"]).arg(&inst));
    assert_eq!(code, 1);
    assert!(err.contains("budget"));
}

#[test]
fn unknown_fields_are_rejected() {
    let d = scratch("unknown");
    let inst = write(&d, "i.json", &CCDC.replace("\"p\":\"p\"", "\"p\":\"p\",\"extra\":1"));
    let (code, _, _) = run(bin().arg("oracle").arg(&inst));
    assert_eq!(code, 1);
    let inst = write(&d, "v.json", &CCDC.replace("\"weight\":2", "\"weight\":2,\"name\":\"x\""));
    let (code, _, _) = run(bin().arg("oracle").arg(&inst));
    assert_eq!(code, 1);
}

#[test]
fn eval_partition_reports_winners() {
    let d = scratch("partition");
    let inst = write(
        &d,
        "i.json",
        r#"{"schema_version":1,"kind":"election-control","body":{
          "rule":"plurality","action":"PC","goal":"constructive","budget":"unlimited","tie_rule":"TE",
          "candidates":["p","a","b"],"p":"p",
          "voters":[{"ballot":["a","p","b"]},{"ballot":["a","b","p"]},{"ballot":["p","b","a"]}]}}"#,
    );
    // b wins its one-candidate first round and meets p and a; a has two first places.
    let part = write(
        &d,
        "x.json",
        r#"{"schema_version":1,"kind":"control-solution","action":"PC","parts":[["b"],["p","a"]]}"#,
    );
    let (code, out, err) = run(bin().arg("eval-partition").arg(&inst).arg(&part));
    assert_eq!(code, 0, "{err}");
    let v = json(&out);
    assert_eq!(v["winners"], json(r#"["a"]"#));
    assert_eq!(v["p_wins"], false);
}
