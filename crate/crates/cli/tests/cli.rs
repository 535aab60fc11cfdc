use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};
use std::sync::Arc;

use ontology_authoring::Triple;
use project_store::ProjectStore;
use sitcalc::{ActionInstance, Reasoner};
use tutor_app::load_app_config;

fn config() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../config/stpa-demo/app.toml")
}

fn tutorctl(data: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tutorctl"))
        .arg("--config")
        .arg(config())
        .arg("--data")
        .arg(data)
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn store(data: &Path) -> ProjectStore {
    let c = load_app_config(config()).unwrap();
    ProjectStore::open(data, Arc::new(Reasoner::new(Arc::new(c.registry().unwrap())))).unwrap()
}

fn project_with_events(data: &Path) -> String {
    let st = store(data);
    let id = st.create_project("stpa").unwrap();
    for s in ["l1", "l2", "l3"] {
        st.append(&id, ActionInstance::new("add_data", Triple::syms(s, "type", "loss").to_args()).by("ann")).unwrap();
    }
    id
}

#[test]
fn project_new_and_list() {
    let dir = tempfile::tempdir().unwrap();
    let a = tutorctl(dir.path(), &["project", "new", "--kb", "stpa"]);
    assert!(a.status.success(), "{}", stderr(&a));
    let b = tutorctl(dir.path(), &["project", "new", "--kb", "empty"]);
    let ids = [stdout(&a).trim().to_owned(), stdout(&b).trim().to_owned()];
    assert_eq!(stdout(&tutorctl(dir.path(), &["project", "list"])), format!("{}\n{}\n", ids[0], ids[1]));

    let bad = tutorctl(dir.path(), &["project", "new", "--kb", "nope"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(stderr(&bad).starts_with("error: unknown-kb"), "{}", stderr(&bad));
}

#[test]
fn replay_prints_digest_and_fluents() {
    let dir = tempfile::tempdir().unwrap();
    let id = project_with_events(dir.path());
    let st = store(dir.path());
    let s = st.replay(&id).unwrap();

    let out = tutorctl(dir.path(), &["log", "replay", &id]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(format!("project {id}").as_str()));
    assert_eq!(lines.next(), Some("kb stpa"));
    assert_eq!(lines.next(), Some("length 3"));
    assert_eq!(lines.next(), Some(format!("digest {}", s.digest()).as_str()));
    let fluents: Vec<String> = st.reasoner().holding_fluents(&s, None).unwrap().iter().map(|f| f.to_string()).collect();
    assert_eq!(lines.map(String::from).collect::<Vec<_>>(), fluents);
    assert!(text.contains("asserted(l2, type, loss)"));

    let json = tutorctl(dir.path(), &["log", "replay", &id, "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(v["digest"], s.digest().to_string());
    assert_eq!(v["length"], 3);
    assert_eq!(v["fluents"].as_array().unwrap().len(), fluents.len());
}

#[test]
fn validate_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let id = project_with_events(dir.path());
    let ok = tutorctl(dir.path(), &["log", "validate", &id]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(stdout(&ok), format!("ok {id} 3 events\n"));

    let missing = tutorctl(dir.path(), &["log", "validate", "p_77"]);
    assert_eq!(missing.status.code(), Some(4));
    assert!(stderr(&missing).starts_with("error: not-found"));

    let path = store(dir.path()).log_path(&id);
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    std::fs::write(&path, format!("{}\n{}\n", lines[0], lines[2])).unwrap();
    let bad = tutorctl(dir.path(), &["log", "validate", &id]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stderr(&bad).starts_with("error: corrupt-log (seq 2)"), "{}", stderr(&bad));
    let replay = tutorctl(dir.path(), &["log", "replay", &id]);
    assert_eq!(replay.status.code(), Some(5));
    assert!(replay.stdout.is_empty());
}

#[test]
fn config_and_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_tutorctl"))
        .args(["--config", "/nonexistent/app.toml", "--data"])
        .arg(dir.path())
        .args(["project", "list"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(7));
    assert!(stderr(&out).starts_with("error: config"));

    let usage = tutorctl(dir.path(), &["project", "frobnicate"]);
    assert_eq!(usage.status.code(), Some(2));
}

#[test]
fn todo_demo_session() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_tutorctl"))
        .args(["demo", "todo"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let input = "add call bob\nadd buy milk\ndone buy milk\ndone buy milk\nlist\nquit\n";
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    assert_eq!(
        stdout(&out),
        "added call bob\nadded buy milk\ncompleted buy milk\nerror: not-possible (not-open)\n[x] buy milk\n[ ] call bob\n"
    );
}

#[test]
fn oracle_check_runs_small() {
    let dir = tempfile::tempdir().unwrap();
    let out = tutorctl(
        dir.path(),
        &["check", "oracles", "--cases", "300", "--histories", "20", "--suffixes", "20", "--seed", "5"],
    );
    assert!(out.status.success(), "{}{}", stdout(&out), stderr(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS ")).count(), 4, "{text}");
    assert!(text.contains("INFO memo timing"));
}
