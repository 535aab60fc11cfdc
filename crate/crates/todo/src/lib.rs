//! A to-do list as a situation-calculus domain. It uses nothing but the
//! kernel: two fluents, two actions and a line-oriented session loop.
//!
//! | command      | possible when                 | effect                     |
//! |--------------|-------------------------------|----------------------------|
//! | `add T`      | `T` is neither open nor done  | `open(T)`                  |
//! | `done T`     | `T` is open                   | `-open(T)`, `done(T)`      |
//! | `list`       | always                        | prints `[ ] T` / `[x] T`   |

use std::io::{self, BufRead, Write};
use std::sync::Arc;

use sitcalc::{
    ActionInstance, FluentInstance, FluentKind, Query, QueryAction, Reasoner, Registry, Situation, Term, Verdict,
};

pub const OPEN: &str = "open";
pub const DONE: &str = "done";
pub const ADD_TASK: &str = "add_task";
pub const COMPLETE_TASK: &str = "complete_task";

struct TaskFluent {
    name: &'static str,
}

impl FluentKind for TaskFluent {
    fn name(&self) -> &str {
        self.name
    }

    fn arity(&self) -> usize {
        1
    }

    fn initially(&self, _: &[Term], _: &str, _: &Registry) -> bool {
        false
    }

    fn successor(&self, args: &[Term], a: &ActionInstance, held: bool, _: &Registry) -> bool {
        if a.args != args {
            return held;
        }
        match (self.name, a.kind.as_str()) {
            (OPEN, ADD_TASK) | (DONE, COMPLETE_TASK) => true,
            (OPEN, COMPLETE_TASK) => false,
            _ => held,
        }
    }

    fn candidates(&self, s: &Situation, _: &Registry) -> Vec<Vec<Term>> {
        s.ancestry().filter_map(Situation::last_action).filter(|a| a.kind == ADD_TASK).map(|a| a.args.clone()).collect()
    }
}

pub fn registry() -> Registry {
    let mut b = Registry::builder();
    b.fluent(Arc::new(TaskFluent { name: OPEN }))
        .and_then(|b| b.fluent(Arc::new(TaskFluent { name: DONE })))
        .and_then(|b| {
            b.action(Arc::new(QueryAction::new(ADD_TASK, 1, "already-exists", |args| {
                Query::atom(OPEN, args.to_vec()).not().and(Query::atom(DONE, args.to_vec()).not())
            })))
        })
        .and_then(|b| {
            b.action(Arc::new(QueryAction::new(COMPLETE_TASK, 1, "not-open", |args| Query::atom(OPEN, args.to_vec()))))
        })
        .expect("todo kinds have distinct names");
    b.build()
}

/// A to-do list session: the reasoner and the current situation.
pub struct TodoList {
    reasoner: Reasoner,
    situation: Situation,
}

impl Default for TodoList {
    fn default() -> Self {
        Self::new()
    }
}

impl TodoList {
    pub fn new() -> Self {
        Self { reasoner: Reasoner::new(Arc::new(registry())), situation: Situation::initial("todo") }
    }

    pub fn situation(&self) -> &Situation {
        &self.situation
    }

    pub fn reasoner(&self) -> &Reasoner {
        &self.reasoner
    }

    fn perform(&mut self, kind: &str, task: &str) -> Result<(), String> {
        let a = ActionInstance::new(kind, vec![Term::Str(task.to_owned())]);
        match self.reasoner.verdict(&a, &self.situation).map_err(|e| e.to_string())? {
            Verdict::Possible => {
                self.situation = self.situation.extend_unchecked(a);
                Ok(())
            }
            Verdict::Impossible(reason) => Err(reason),
        }
    }

    pub fn add(&mut self, task: &str) -> Result<(), String> {
        self.perform(ADD_TASK, task)
    }

    pub fn complete(&mut self, task: &str) -> Result<(), String> {
        self.perform(COMPLETE_TASK, task)
    }

    /// Tasks in name order with their done flag.
    pub fn tasks(&self) -> Vec<(String, bool)> {
        let names = |kind: &str| -> Vec<String> {
            self.reasoner
                .holding_fluents(&self.situation, Some(kind))
                .unwrap_or_default()
                .into_iter()
                .filter_map(|f: FluentInstance| f.args[0].as_text().map(str::to_owned))
                .collect()
        };
        let mut out: Vec<(String, bool)> = names(OPEN).into_iter().map(|t| (t, false)).collect();
        out.extend(names(DONE).into_iter().map(|t| (t, true)));
        out.sort();
        out
    }
}

/// Runs commands from `input` until end of input or `quit`, writing one or
/// more lines per command.
pub fn run_session(input: impl BufRead, mut out: impl Write) -> io::Result<()> {
    let mut list = TodoList::new();
    for line in input.lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (cmd, rest) = line.split_once(char::is_whitespace).map_or((line, ""), |(c, r)| (c, r.trim()));
        match cmd {
            "add" | "done" if rest.is_empty() => writeln!(out, "error: missing-task")?,
            "add" => match list.add(rest) {
                Ok(()) => writeln!(out, "added {rest}")?,
                Err(reason) => writeln!(out, "error: not-possible ({reason})")?,
            },
            "done" => match list.complete(rest) {
                Ok(()) => writeln!(out, "completed {rest}")?,
                Err(reason) => writeln!(out, "error: not-possible ({reason})")?,
            },
            "list" => {
                let tasks = list.tasks();
                if tasks.is_empty() {
                    writeln!(out, "(no tasks)")?;
                }
                for (t, done) in tasks {
                    writeln!(out, "[{}] {t}", if done { 'x' } else { ' ' })?;
                }
            }
            "help" => writeln!(out, "commands: add TASK, done TASK, list, quit")?,
            "quit" => break,
            other => writeln!(out, "error: unknown-command {other}")?,
        }
    }
    Ok(())
}
