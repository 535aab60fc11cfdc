use todo_demo::{run_session, TodoList};

fn session(input: &str) -> String {
    let mut out = Vec::new();
    run_session(input.as_bytes(), &mut out).unwrap();
    String::from_utf8(out).unwrap()
}

#[test]
fn documented_table() {
    let out = session("list\nadd buy milk\nadd buy milk\nadd call bob\ndone buy milk\ndone buy milk\ndone nothing\nadd buy milk\nlist\nquit\nadd ignored\n");
    assert_eq!(
        out,
        "(no tasks)\n\
         added buy milk\n\
         error: not-possible (already-exists)\n\
         added call bob\n\
         completed buy milk\n\
         error: not-possible (not-open)\n\
         error: not-possible (not-open)\n\
         error: not-possible (already-exists)\n\
         [x] buy milk\n\
         [ ] call bob\n"
    );
}

#[test]
fn bad_commands() {
    assert_eq!(session("frobnicate\nadd\n\nhelp\n"), "error: unknown-command frobnicate\nerror: missing-task\ncommands: add TASK, done TASK, list, quit\n");
}

#[test]
fn history_is_the_list() {
    let mut l = TodoList::new();
    l.add("a").unwrap();
    l.add("b").unwrap();
    l.complete("a").unwrap();
    assert_eq!(l.situation().depth(), 3);
    assert_eq!(l.tasks(), vec![("a".to_string(), true), ("b".to_string(), false)]);
    assert_eq!(l.reasoner().progress(l.situation()).unwrap().len(), 2);
}
