use std::path::PathBuf;
use std::process::{Command, Output};

fn corpus(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(rel)
}

fn dsc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dsc")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dsc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

#[test]
fn check_fj_translation_program() {
    let o = dsc(&["check", corpus("ch3/sec3.2-translation.dsc").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "ok: main : Object");
}

#[test]
fn subtype_nothing() {
    let f = corpus("ch4/sec4.3.1-and-bind.dsc");
    let o = dsc(&["subtype", f.to_str().unwrap(), "Nothing", "C[Object]"]);
    assert_eq!(stdout(&o).trim(), "holds (AS-NOTHING)");
}

#[test]
fn subtype_algorithmic_versus_declarative() {
    let f = corpus("ch7/sec7.3-conv-id.dsc");
    let env = "S <: Object, T <: Object, this : A[S, T]";
    let o = dsc(&["subtype", f.to_str().unwrap(), "S", "T", "--env", env]);
    assert_eq!(stdout(&o).trim(), "does not hold");
    let o = dsc(&["subtype", f.to_str().unwrap(), "S", "T", "--env", env, "--declarative", "--fuel", "3"]);
    assert!(stdout(&o).starts_with("Yes"));
}

#[test]
fn erase_matches_the_bridge_golden() {
    let o = dsc(&["erase", corpus("appA/secA.3-bridges.dsc").to_str().unwrap(), "--policy", "scala3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for line in ["interface L {\n  Object fooL();\n}", "interface R {\n  X fooR();\n}", "  Y fooA() { return new Y(); }\n  Object fooL() { return this.fooA(); }\n  X fooR() { return this.fooA(); }"] {
        assert!(text.contains(line), "missing {line:?} in\n{text}");
    }
    let f = scratch("a3.fjd", &text);
    let run = dsc(&["run-fjd", f.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(0));
    assert!(stdout(&run).starts_with("value new Y()"));
}

#[test]
fn run_dot_reports_the_class() {
    let o = dsc(&["run-dot", corpus("ch5/sec5.3.2-linearization.dsc").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("(new Two)"), "{}", stdout(&o));
}

#[test]
fn json_output_is_valid_and_deterministic() {
    let f = corpus("ch4/sec4.3.1-and-bind.dsc");
    let a = dsc(&["translate", f.to_str().unwrap(), "--emit", "dot-json"]);
    let b = dsc(&["translate", f.to_str().unwrap(), "--emit", "dot-json"]);
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["kind"], "let");
}

#[test]
fn exit_codes() {
    assert_eq!(dsc(&["check", "/nonexistent/x.dsc"]).status.code(), Some(2));
    assert_eq!(dsc(&["frobnicate"]).status.code(), Some(2));
    let bad = scratch("bad.dsc", "//level: FJ\nclass A() < Object { def m(): A = new Object() }");
    let o = dsc(&["check", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.dsc:"));
    let cond = corpus("ch6/sec6.3-conditional.dsc");
    assert_eq!(dsc(&["erase", cond.to_str().unwrap()]).status.code(), Some(1));
    let cast = scratch("cast.fjd", "class X < Object {} class Y < Object {} main = (Y) new X();");
    assert_eq!(dsc(&["run-fjd", cast.to_str().unwrap()]).status.code(), Some(3));
    let level = dsc(&["--level", "fj", "check", cond.to_str().unwrap()]);
    assert_eq!(level.status.code(), Some(1));
}
