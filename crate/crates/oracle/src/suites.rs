use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sitcalc::{ActionInstance, FluentInstance, Query, Reasoner, Registry, Situation, Term, Verdict};
use tutor_app::AppConfig;

use crate::gen::propose;
use crate::model::{Model, OracleState};

/// Queries compared between the reasoner and the model, besides the bank
/// triggers.
pub const QUERIES: &[&str] = &[
    "true",
    "asserted(X, P, O)",
    "asserted(X, P, X)",
    "asserted(X, type, hazard) & -some(L, asserted(X, leads_to, L))",
    "some(X, asserted(X, type, Y))",
    "retracted(X, P, O) | asserted(X, P, O)",
    "initial_assertion(X, type, C) & -some(Y, asserted(Y, type, X))",
    "intervention_level(I, Q, L) & L > 1",
    "some(N, dismissed(Q, N) & N >= 2)",
    "live_intervention(I, Q, L) & -dismissed(Q, L)",
    "intervened(I, Q, L) & increase_requested(I, Q, L)",
    "current_focus(F)",
    "asserted(X, type, T) & asserted(Y, type, T) & X < Y",
    "asserted(X, P, O) & some(X, retracted(X, P, O))",
    "-some(X, asserted(X, type, loss))",
    "asserted(X, P, O) & O = loss",
    "intervention_level(I, Q, L) & -intervened(I, Q, L)",
    "dismissed(Q, N) & -(N = 1)",
];

/// Outcome of one suite.
#[derive(Clone, Debug)]
pub struct Report {
    pub name: &'static str,
    pub cases: u64,
    pub failures: u64,
    pub examples: Vec<String>,
    pub detail: String,
}

impl Report {
    fn new(name: &'static str) -> Self {
        Self { name, cases: 0, failures: 0, examples: Vec::new(), detail: String::new() }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    fn fail(&mut self, message: String) {
        self.failures += 1;
        if self.examples.len() < 10 {
            self.examples.push(message);
        }
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{status} {}: {} cases, {} violations", self.name, self.cases, self.failures)?;
        if !self.detail.is_empty() {
            write!(f, "; {}", self.detail)?;
        }
        for e in &self.examples {
            write!(f, "\n    {e}")?;
        }
        Ok(())
    }
}

/// A registry built from an app config together with its model.
pub struct Subject {
    pub registry: Arc<Registry>,
    pub model: Model,
    pub kb: String,
}

impl Subject {
    pub fn from_config(c: &AppConfig) -> Result<Self, tutor_app::ConfigError> {
        Ok(Self {
            registry: Arc::new(c.registry()?),
            model: Model::from_config(c),
            kb: c.kb_names().next().unwrap_or_default().to_owned(),
        })
    }

    pub fn reasoner(&self) -> Reasoner {
        Reasoner::new(self.registry.clone())
    }

    fn start(&self) -> (Situation, OracleState) {
        (Situation::initial(self.kb.clone()), self.model.initial())
    }
}

fn verdict_text(v: &Result<(), String>) -> String {
    match v {
        Ok(()) => "possible".into(),
        Err(r) => r.clone(),
    }
}

fn reasoner_verdict(r: &Reasoner, a: &ActionInstance, s: &Situation) -> Result<(), String> {
    match r.verdict(a, s) {
        Ok(Verdict::Possible) => Ok(()),
        Ok(Verdict::Impossible(reason)) => Err(reason),
        Err(e) => Err(format!("error: {e}")),
    }
}

/// Steps a random history, comparing every proposal's verdict and reason
/// with the model. Returns the new situation and state when the proposal was
/// accepted by the reasoner.
fn step(
    subject: &Subject,
    r: &Reasoner,
    rng: &mut ChaCha8Rng,
    s: &Situation,
    st: &OracleState,
    report: &mut Report,
) -> Option<(ActionInstance, Situation, OracleState)> {
    let a = propose(rng, &subject.model, st);
    let got = reasoner_verdict(r, &a, s);
    let want = subject.model.check(st, &a);
    if got != want {
        report.fail(format!("{a} after {} steps: reasoner {}, model {}", s.depth(), verdict_text(&got), verdict_text(&want)));
    }
    got.ok()?;
    let next = s.extend_unchecked(a.clone());
    let st = subject.model.apply(st, &a);
    Some((a, next, st))
}

/// Axiom conformance: the reasoner's verdict and reason on every proposed
/// action equals the model's, and the effects named by each action hold
/// afterwards.
pub fn conformance(subject: &Subject, cases: u64, seed: u64) -> Report {
    let mut report = Report::new("axiom conformance");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut per_kind: BTreeMap<String, (u64, u64)> = BTreeMap::new();
    let r = subject.reasoner();
    while report.cases < cases {
        let (mut s, mut st) = subject.start();
        for _ in 0..rng.gen_range(1..=60) {
            if report.cases >= cases {
                break;
            }
            report.cases += 1;
            let before = report.failures;
            let Some((a, next, next_st)) = step_counted(subject, &r, &mut rng, &s, &st, &mut report, &mut per_kind)
            else {
                continue;
            };
            if report.failures == before {
                check_effect(&r, &a, &next, &mut report);
            }
            s = next;
            st = next_st;
        }
    }
    report.detail = per_kind
        .iter()
        .map(|(k, (yes, no))| format!("{k} {yes}/{}", yes + no))
        .collect::<Vec<_>>()
        .join(", ");
    report
}

fn step_counted(
    subject: &Subject,
    r: &Reasoner,
    rng: &mut ChaCha8Rng,
    s: &Situation,
    st: &OracleState,
    report: &mut Report,
    per_kind: &mut BTreeMap<String, (u64, u64)>,
) -> Option<(ActionInstance, Situation, OracleState)> {
    let mut probe = rng.clone();
    let kind = propose(&mut probe, &subject.model, st).kind;
    let out = step(subject, r, rng, s, st, report);
    let counts = per_kind.entry(kind).or_default();
    if out.is_some() {
        counts.0 += 1;
    } else {
        counts.1 += 1;
    }
    out
}

fn check_effect(r: &Reasoner, a: &ActionInstance, s: &Situation, report: &mut Report) {
    let holds = |kind: &str, args: Vec<Term>| r.holds(&FluentInstance::new(kind, args), s).unwrap_or(false);
    let ok = match a.kind.as_str() {
        "add_data" => holds("asserted", a.args.clone()),
        "delete_data" => !holds("asserted", a.args.clone()),
        "intervene" => holds("live_intervention", a.args.clone()),
        "dismiss_intervention" => {
            holds("dismissed", a.args.clone())
                && r.solve(
                    &Query::atom("live_intervention", vec![Term::var("I"), a.args[0].clone(), a.args[1].clone()]),
                    s,
                )
                .map(|b| b.is_empty())
                .unwrap_or(false)
        }
        "request_intervention_increase" => !holds("live_intervention", a.args.clone()),
        "concept_focus" | "navigate_to_step" => holds("current_focus", a.args.clone()),
        _ => true,
    };
    if !ok {
        report.fail(format!("effect of {a} missing at depth {}", s.depth()));
    }
}

fn random_probe(rng: &mut ChaCha8Rng, model: &Model, st: &OracleState) -> FluentInstance {
    let entries: Vec<(&str, &str, i64)> = model.entries().collect();
    let a = propose(rng, model, st);
    match a.kind.as_str() {
        "add_data" | "delete_data" => FluentInstance::new(if rng.gen() { "asserted" } else { "retracted" }, a.args),
        "intervene" => FluentInstance::new(
            *["live_intervention", "intervened", "intervention_level", "increase_requested"]
                .get(rng.gen_range(0..4))
                .unwrap(),
            a.args,
        ),
        "dismiss_intervention" => FluentInstance::new("dismissed", a.args),
        "concept_focus" | "navigate_to_step" => FluentInstance::new("current_focus", a.args),
        _ => match entries.first() {
            Some((id, key, _)) => FluentInstance::new(
                "intervention_level",
                vec![Term::sym(*id), Term::Str((*key).into()), Term::Int(rng.gen_range(0..4))],
            ),
            None => FluentInstance::new("current_focus", vec![Term::sym("nothing")]),
        },
    }
}

fn compare_state(subject: &Subject, r: &Reasoner, s: &Situation, st: &OracleState, rng: &mut ChaCha8Rng, report: &mut Report) {
    let tag = format!("depth {} {}", s.depth(), s.digest());
    match r.holding_fluents(s, None) {
        Ok(got) if got == st.facts => {}
        Ok(got) => {
            let extra: Vec<String> = got.difference(&st.facts).map(|f| f.to_string()).collect();
            let missing: Vec<String> = st.facts.difference(&got).map(|f| f.to_string()).collect();
            report.fail(format!("holding_fluents at {tag}: extra {extra:?}, missing {missing:?}"));
        }
        Err(e) => report.fail(format!("holding_fluents at {tag}: {e}")),
    }
    let kinds: BTreeSet<&str> = subject.registry.fluent_kinds().map(|k| k.name()).collect();
    for kind in kinds {
        let want: BTreeSet<FluentInstance> = st.facts.iter().filter(|f| f.kind == kind).cloned().collect();
        if r.holding_fluents(s, Some(kind)).ok().as_ref() != Some(&want) {
            report.fail(format!("holding_fluents({kind}) at {tag}"));
        }
    }
    match r.progress(s) {
        Ok(snap) if *snap.fluents() == st.facts => {}
        Ok(_) => report.fail(format!("snapshot differs at {tag}")),
        Err(e) => report.fail(format!("snapshot at {tag}: {e}")),
    }
    for f in &st.facts {
        if r.holds(f, s).ok() != Some(true) {
            report.fail(format!("holds({f}) should be true at {tag}"));
        }
    }
    for _ in 0..10 {
        let f = random_probe(rng, &subject.model, st);
        if !f.is_ground() {
            continue;
        }
        if r.holds(&f, s).ok() != Some(st.facts.contains(&f)) {
            report.fail(format!("holds({f}) disagrees at {tag}"));
        }
    }
    let queries: Vec<Query> =
        QUERIES.iter().map(|q| q.parse().expect("built-in query parses")).chain(subject.model.triggers().cloned()).collect();
    for q in &queries {
        let got = r.solve(q, s).map_err(|e| e.to_string());
        let want = subject.model.eval(st, q);
        if got.is_ok() != want.is_ok() || (got.is_ok() && got.as_ref().ok() != want.as_ref().ok()) {
            report.fail(format!("solve({q}) at {tag}: reasoner {got:?}, model {want:?}"));
        }
    }
}

/// Builds a legal random history of exactly `len` actions where possible.
fn history(
    subject: &Subject,
    r: &Reasoner,
    rng: &mut ChaCha8Rng,
    len: usize,
    report: &mut Report,
) -> (Situation, OracleState) {
    let (mut s, mut st) = subject.start();
    let mut attempts = 0;
    while s.depth() < len && attempts < 50 * len.max(1) {
        attempts += 1;
        if let Some((_, next, next_st)) = step(subject, r, rng, &s, &st, report) {
            s = next;
            st = next_st;
        }
    }
    (s, st)
}

/// Oracle equivalence: on random legal histories, every holding-fluent set,
/// snapshot, `holds` probe and query answer equals the model's.
pub fn equivalence(subject: &Subject, histories: u64, max_len: usize, seed: u64) -> Report {
    let mut report = Report::new("oracle equivalence");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = subject.reasoner();
    let mut total_len = 0;
    for _ in 0..histories {
        report.cases += 1;
        let len = rng.gen_range(0..=max_len);
        let (s, st) = history(subject, &r, &mut rng, len, &mut report);
        total_len += s.depth();
        compare_state(subject, &r, &s, &st, &mut rng, &mut report);
    }
    report.detail = format!("mean history length {:.1}", total_len as f64 / histories.max(1) as f64);
    report
}

/// Memo transparency: cached and uncached reasoners answer identically.
pub fn memo_transparency(subject: &Subject, histories: u64, max_len: usize, seed: u64) -> Report {
    let mut report = Report::new("memo transparency");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cached = subject.reasoner();
    let plain = Reasoner::uncached(subject.registry.clone());
    let queries: Vec<Query> = QUERIES.iter().map(|q| q.parse().expect("built-in query parses")).collect();
    for _ in 0..histories {
        report.cases += 1;
        let len = rng.gen_range(0..=max_len);
        let (s, _) = history(subject, &cached, &mut rng, len, &mut report);
        for prefix in s.prefixes() {
            if cached.holding_fluents(&prefix, None).ok() != plain.holding_fluents(&prefix, None).ok() {
                report.fail(format!("holding_fluents differs at depth {}", prefix.depth()));
            }
        }
        for q in &queries {
            if cached.solve(q, &s).ok() != plain.solve(q, &s).ok() {
                report.fail(format!("solve({q}) differs at depth {}", s.depth()));
            }
        }
    }
    report
}

/// Dismissal monotonicity: after `dismiss_intervention(Q, N)`, no
/// `intervene(I, Q, L)` with `L <= N` is possible in any later situation.
pub fn dismissal_monotonicity(subject: &Subject, suffixes: u64, seed: u64) -> Report {
    let mut report = Report::new("dismissal monotonicity");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = subject.reasoner();
    let entries: Vec<(String, String, i64)> =
        subject.model.entries().map(|(i, q, m)| (i.to_owned(), q.to_owned(), m)).collect();
    let mut checks = 0u64;
    while report.cases < suffixes {
        let len = rng.gen_range(0..=30);
        let (mut s, mut st) = history(subject, &r, &mut rng, len, &mut report);
        // reach a dismissal: show something pending, maybe escalate, dismiss
        let Ok(pending) = scaffolding::pending_interventions(&r, &s) else { continue };
        let Some(p) = pending.get(rng.gen_range(0..pending.len().max(1))) else { continue };
        let mut shown = p.action();
        let mut script = vec![shown.clone()];
        for _ in 0..rng.gen_range(0..3) {
            let level = shown.args[2].as_int().unwrap_or(1);
            let max = entries.iter().find(|e| e.0 == p.intervention).map_or(1, |e| e.2);
            script.push(ActionInstance::new("request_intervention_increase", shown.args.clone()));
            shown = ActionInstance::new(
                "intervene",
                vec![shown.args[0].clone(), shown.args[1].clone(), Term::Int((level + 1).min(max))],
            );
            script.push(shown.clone());
        }
        script.push(ActionInstance::new("dismiss_intervention", shown.args[1..].to_vec()));
        let mut ok = true;
        for a in script {
            match r.do_action(a.clone(), &s) {
                Ok(next) => {
                    st = subject.model.apply(&st, &a);
                    s = next;
                }
                Err(_) => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        report.cases += 1;
        let dismissed: Vec<(Term, i64)> = st
            .facts
            .iter()
            .filter(|f| f.kind == "dismissed")
            .filter_map(|f| Some((f.args[0].clone(), f.args[1].as_int()?)))
            .collect();
        for _ in 0..rng.gen_range(1..=30) {
            for (q, n) in &dismissed {
                for (id, key, _) in entries.iter().filter(|e| Term::Str(e.1.clone()) == *q) {
                    for l in 1..=*n {
                        checks += 1;
                        let a = ActionInstance::new(
                            "intervene",
                            vec![Term::sym(id.as_str()), Term::Str(key.clone()), Term::Int(l)],
                        );
                        if r.poss(&a, &s).unwrap_or(false) {
                            report.fail(format!("{a} possible at depth {} after dismissed({q}, {n})", s.depth()));
                        }
                    }
                }
            }
            if let Some((_, next, next_st)) = step(subject, &r, &mut rng, &s, &st, &mut report) {
                s = next;
                st = next_st;
            }
        }
    }
    report.detail = format!("{checks} blocked-level checks");
    report
}

/// Timing of repeated context-dependent `holds` queries on a long history,
/// with and without the memo table.
#[derive(Clone, Debug)]
pub struct MemoTiming {
    pub history: usize,
    pub queries: usize,
    pub cached: Duration,
    pub uncached: Duration,
    pub identical: bool,
}

impl MemoTiming {
    pub fn speedup(&self) -> f64 {
        self.uncached.as_secs_f64() / self.cached.as_secs_f64().max(1e-9)
    }
}

/// Builds a legal history of `len` actions (adds, deletes and focus
/// changes) and asks `queries` holds questions cycling over a small set of
/// fluents at the final situation.
pub fn memo_timing(subject: &Subject, len: usize, queries: usize) -> MemoTiming {
    let triple = |i: usize| vec![Term::Sym(format!("t{}", i % 64)), Term::sym("type"), Term::sym("hazard")];
    let mut s = Situation::initial(subject.kb.clone());
    let mut live = [false; 64];
    for i in 0..len {
        let a = match i % 4 {
            3 => ActionInstance::new("concept_focus", vec![Term::Sym(format!("f{}", i % 7))]),
            _ => {
                let k = (i * 7 + i / 64) % 64;
                live[k] = !live[k];
                let kind = if live[k] { "add_data" } else { "delete_data" };
                ActionInstance::new(kind, triple(k))
            }
        };
        s = s.extend_unchecked(a);
    }
    let probes: Vec<FluentInstance> = (0..10)
        .map(|k| match k {
            0 => FluentInstance::new("current_focus", vec![Term::sym("f3")]),
            _ => FluentInstance::new("asserted", triple(k * 5)),
        })
        .collect();
    let run = |r: &Reasoner| -> (Duration, Vec<bool>) {
        let t = Instant::now();
        let answers = (0..queries).map(|i| r.holds(&probes[i % probes.len()], &s).unwrap_or(false)).collect();
        (t.elapsed(), answers)
    };
    let (uncached, a) = run(&Reasoner::uncached(subject.registry.clone()));
    let (cached, b) = run(&Reasoner::new(subject.registry.clone()));
    MemoTiming { history: s.depth(), queries, cached, uncached, identical: a == b }
}
