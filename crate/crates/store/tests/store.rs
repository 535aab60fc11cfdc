use std::io::Write;
use std::sync::Arc;

use ontology_authoring::{parse_triples, register, register_kb, InitialKnowledge, Triple, TripleSet};
use project_store::{ActionEvent, ProjectStore, StoreError};
use proptest::prelude::*;
use sitcalc::{ActionInstance, Reasoner, Registry, Situation, Term, Timestamp};

fn reasoner() -> Arc<Reasoner> {
    let mut b = Registry::builder();
    register(&mut b).unwrap();
    register_kb(&mut b, "empty", Arc::new(TripleSet::default()) as Arc<dyn InitialKnowledge>).unwrap();
    let seed = parse_triples("h0 type hazard\n").unwrap();
    register_kb(&mut b, "seed", Arc::new(seed) as Arc<dyn InitialKnowledge>).unwrap();
    Arc::new(Reasoner::new(Arc::new(b.build())))
}

fn add(n: u32) -> ActionInstance {
    ActionInstance::new("add_data", Triple::syms(&format!("s{n}"), "p", "o").to_args())
}

fn delete(n: u32) -> ActionInstance {
    ActionInstance::new("delete_data", Triple::syms(&format!("s{n}"), "p", "o").to_args())
}

fn store(dir: &tempfile::TempDir) -> ProjectStore {
    ProjectStore::open(dir.path(), reasoner()).unwrap()
}

fn log_lines(st: &ProjectStore, id: &str) -> usize {
    std::fs::read_to_string(st.log_path(id)).unwrap().lines().count()
}

#[test]
fn lifecycle() {
    let dir = tempfile::tempdir().unwrap();
    let st = store(&dir);
    let a = st.create_project("empty").unwrap();
    let b = st.create_project("seed").unwrap();
    let c = st.create_project("empty").unwrap();
    assert_ne!(a, b);
    let mut expected = vec![a.clone(), b.clone(), c];
    expected.sort();
    assert_eq!(st.list_projects().unwrap(), expected);
    assert!(matches!(st.create_project("nope"), Err(StoreError::UnknownKb(k)) if k == "nope"));
    assert_eq!(st.info(&b).unwrap().kb, "seed");
    assert_eq!(st.replay(&a).unwrap(), Situation::initial("empty"));
    for bad in ["missing", "../projects", "", "a/b"] {
        assert!(matches!(st.situation(bad), Err(StoreError::NotFound(_))), "{bad}");
    }
}

#[test]
fn append_checks_poss_and_numbers_events() {
    let dir = tempfile::tempdir().unwrap();
    let st = store(&dir);
    let p = st.create_project("empty").unwrap();
    assert_eq!(st.append(&p, add(1)).unwrap().seq, 1);
    let err = st.append(&p, add(1)).unwrap_err();
    assert!(matches!(err, StoreError::Kernel(sitcalc::Error::NotPossible { ref reason, .. }) if reason == "already-asserted"));
    assert_eq!(log_lines(&st, &p), 1);
    let out = st.append(&p, delete(1)).unwrap();
    assert_eq!(out.seq, 2);
    assert_eq!(out.situation, st.replay(&p).unwrap());
    let line = std::fs::read_to_string(st.log_path(&p)).unwrap().lines().next().unwrap().to_owned();
    assert_eq!(
        line,
        format!(r#"{{"seq":1,"project":"{p}","actor":"anon","at":"1970-01-01T00:00:00.000Z","kind":"add_data","args":["s1","p","o"]}}"#)
    );
}

#[test]
fn survives_reopen() {
    let dir = tempfile::tempdir().unwrap();
    let (p, before) = {
        let st = store(&dir);
        let p = st.create_project("seed").unwrap();
        for n in 0..20 {
            st.append(&p, add(n)).unwrap();
        }
        st.append(&p, delete(3)).unwrap();
        let s = st.situation(&p).unwrap();
        (p, st.reasoner().holding_fluents(&s, None).unwrap())
    };
    let st = store(&dir);
    let s = st.replay(&p).unwrap();
    assert_eq!(st.reasoner().holding_fluents(&s, None).unwrap(), before);
    assert_eq!(st.append(&p, add(100)).unwrap().seq, 22);
    let q = st.create_project("seed").unwrap();
    assert_ne!(p, q);
}

fn corrupt_with(edit: impl FnOnce(&mut Vec<String>)) -> StoreError {
    let dir = tempfile::tempdir().unwrap();
    let st = store(&dir);
    let p = st.create_project("empty").unwrap();
    for n in 0..5 {
        st.append(&p, add(n)).unwrap();
    }
    let path = st.log_path(&p);
    let mut lines: Vec<String> = std::fs::read_to_string(&path).unwrap().lines().map(String::from).collect();
    edit(&mut lines);
    std::fs::write(&path, lines.iter().map(|l| format!("{l}\n")).collect::<String>()).unwrap();
    store(&dir).replay(&p).unwrap_err()
}

fn corrupt_seq(e: StoreError) -> u64 {
    match e {
        StoreError::CorruptLog { seq, .. } => seq,
        other => panic!("expected CorruptLog, got {other}"),
    }
}

#[test]
fn corruption_is_reported_with_its_seq() {
    assert_eq!(corrupt_seq(corrupt_with(|l| { l.remove(2); })), 3);
    assert_eq!(corrupt_seq(corrupt_with(|l| l[1] = "{not json".into())), 2);
    assert_eq!(corrupt_seq(corrupt_with(|l| l[3] = l[3].replace("\"project\":\"p_1\"", "\"project\":\"other\""))), 4);
    // a duplicated add is not possible where it now occurs
    assert_eq!(
        corrupt_seq(corrupt_with(|l| l[4] = l[0].replace("\"seq\":1", "\"seq\":5"))),
        5
    );
    assert_eq!(corrupt_seq(corrupt_with(|l| l.swap(0, 1))), 1);
}

#[test]
fn torn_tail_is_dropped() {
    let dir = tempfile::tempdir().unwrap();
    let p = {
        let st = store(&dir);
        let p = st.create_project("empty").unwrap();
        st.append(&p, add(1)).unwrap();
        st.append(&p, add(2)).unwrap();
        p
    };
    let st = store(&dir);
    let mut f = std::fs::OpenOptions::new().append(true).open(st.log_path(&p)).unwrap();
    f.write_all(br#"{"seq":3,"project":"#).unwrap();
    drop(f);
    assert_eq!(st.replay(&p).unwrap().depth(), 2);
    assert_eq!(st.append(&p, add(3)).unwrap().seq, 3);
    assert_eq!(log_lines(&st, &p), 3);
    assert_eq!(st.replay(&p).unwrap().depth(), 3);
}

#[test]
fn metadata_does_not_change_the_digest() {
    let dir = tempfile::tempdir().unwrap();
    let st = store(&dir);
    let p = st.create_project("empty").unwrap();
    let q = st.create_project("empty").unwrap();
    st.append(&p, add(1).by("alice").at(Timestamp::from_millis(5))).unwrap();
    st.append(&q, add(1)).unwrap();
    assert_eq!(st.replay(&p).unwrap().digest(), st.replay(&q).unwrap().digest());
    let events = st.replay_events(&p).unwrap().1;
    assert_eq!(events[0].actor, "alice");
}

#[test]
fn concurrent_appends_are_serialized() {
    let dir = tempfile::tempdir().unwrap();
    let st = Arc::new(store(&dir));
    let p = st.create_project("empty").unwrap();
    let other = st.create_project("empty").unwrap();
    let handles: Vec<_> = (0..8u32)
        .map(|t| {
            let (st, p, other) = (st.clone(), p.clone(), other.clone());
            std::thread::spawn(move || {
                for i in 0..25 {
                    st.append(&p, add(t * 100 + i)).unwrap();
                    st.append(&other, add(t * 100 + i)).unwrap();
                }
            })
        })
        .collect();
    for h in handles {
        h.join().unwrap();
    }
    let (s, events) = st.replay_events(&p).unwrap();
    assert_eq!(events.len(), 200);
    assert!(events.iter().enumerate().all(|(i, e)| e.seq == i as u64 + 1));
    assert_eq!(s, st.situation(&p).unwrap());
    assert_eq!(st.replay(&other).unwrap().depth(), 200);
}

#[test]
fn event_round_trip_through_store() {
    let dir = tempfile::tempdir().unwrap();
    let st = store(&dir);
    let p = st.create_project("empty").unwrap();
    let odd = ActionInstance::new(
        "add_data",
        vec![Term::sym("Weird Name"), Term::sym("p"), Term::Str("quote \" and \n newline".into())],
    );
    st.append(&p, odd.clone()).unwrap();
    let (_, events) = st.replay_events(&p).unwrap();
    assert_eq!(events, vec![ActionEvent::new(1, p, &odd)]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    // In-memory state after 500 legal appends equals a fresh replay.
    #[test]
    fn replay_matches_in_memory(ops in prop::collection::vec((any::<bool>(), 0u32..30), 500)) {
        let dir = tempfile::tempdir().unwrap();
        let st = store(&dir);
        let p = st.create_project("seed").unwrap();
        let mut appended = 0usize;
        for (is_add, n) in ops {
            let a = if is_add { add(n) } else { delete(n) };
            if st.reasoner().poss(&a, &st.situation(&p).unwrap()).unwrap() {
                st.append(&p, a).unwrap();
                appended += 1;
            } else {
                prop_assert!(st.append(&p, a).is_err());
            }
        }
        let live = st.situation(&p).unwrap();
        let fresh = store(&dir).replay(&p).unwrap();
        prop_assert_eq!(live.digest(), fresh.digest());
        prop_assert_eq!(fresh.depth(), appended);
        prop_assert_eq!(log_lines(&st, &p), appended);
    }
}
