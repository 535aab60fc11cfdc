//! An explicit-state model of the tutor domain. Every rule is written out
//! by hand over a set of facts; nothing here calls into the kinds or the
//! reasoner. Escalation levels are computed from a count of increase
//! requests rather than from the level argument.

use std::collections::{BTreeMap, BTreeSet};

use ontology_authoring::Triple;
use scaffolding::Intervention;
use sitcalc::{ActionInstance, Bindings, CmpOp, FluentInstance, Query, Term};
use tutor_app::AppConfig;

#[derive(Clone, Debug)]
struct Entry {
    id: String,
    key: String,
    trigger: Query,
    max: i64,
}

#[derive(Clone, Debug)]
pub struct Model {
    seed: BTreeSet<Triple>,
    bank: Vec<Entry>,
}

/// The facts true in some situation, plus escalation counts.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OracleState {
    pub facts: BTreeSet<FluentInstance>,
    increases: BTreeMap<(String, String), i64>,
}

fn fact(kind: &str, args: Vec<Term>) -> FluentInstance {
    FluentInstance::new(kind, args)
}

fn valid_triple(args: &[Term]) -> bool {
    matches!(args, [Term::Sym(s), Term::Sym(p), o]
        if !s.is_empty() && !p.is_empty() && !matches!(o, Term::Var(_)) && *o != Term::Sym(String::new()))
}

impl Model {
    pub fn new(seed: impl IntoIterator<Item = Triple>, bank: impl IntoIterator<Item = Intervention>) -> Self {
        let mut entries: Vec<Entry> = Vec::new();
        for i in bank {
            if entries.iter().all(|e| e.id != i.id) {
                entries.push(Entry { key: i.trigger.to_string(), id: i.id, trigger: i.trigger, max: i.levels.len() as i64 });
            }
        }
        Self { seed: seed.into_iter().collect(), bank: entries }
    }

    pub fn from_config(c: &AppConfig) -> Self {
        Self::new(c.kbs.iter().flat_map(|(_, kb)| kb.iter().cloned()), c.bank.iter().cloned())
    }

    pub fn seed(&self) -> &BTreeSet<Triple> {
        &self.seed
    }

    /// `(id, query key, max level)` of each bank entry.
    pub fn entries(&self) -> impl Iterator<Item = (&str, &str, i64)> {
        self.bank.iter().map(|e| (e.id.as_str(), e.key.as_str(), e.max))
    }

    pub fn triggers(&self) -> impl Iterator<Item = &Query> {
        self.bank.iter().map(|e| &e.trigger)
    }

    fn level(&self, st: &OracleState, e: &Entry) -> i64 {
        let n = st.increases.get(&(e.id.clone(), e.key.clone())).copied().unwrap_or(0);
        (1 + n).min(e.max)
    }

    fn refresh_levels(&self, st: &mut OracleState) {
        st.facts.retain(|f| f.kind != "intervention_level");
        for e in &self.bank {
            let l = self.level(st, e);
            st.facts.insert(fact("intervention_level", vec![Term::Sym(e.id.clone()), Term::Str(e.key.clone()), Term::Int(l)]));
        }
    }

    pub fn initial(&self) -> OracleState {
        let mut st = OracleState::default();
        for t in &self.seed {
            st.facts.insert(fact("initial_assertion", t.to_args()));
        }
        self.refresh_levels(&mut st);
        st
    }

    fn entry(&self, i: &Term, q: &Term) -> Option<&Entry> {
        match (i, q) {
            (Term::Sym(i), Term::Str(q)) => self.bank.iter().find(|e| &e.id == i).filter(|e| &e.key == q),
            _ => None,
        }
    }

    /// `Ok(())` when the action is possible, otherwise its reason code.
    pub fn check(&self, st: &OracleState, a: &ActionInstance) -> Result<(), String> {
        let has = |kind: &str, args: &[Term]| st.facts.contains(&fact(kind, args.to_vec()));
        let no = |r: &str| Err(r.to_owned());
        let args = &a.args[..];
        match a.kind.as_str() {
            "add_data" => {
                if !valid_triple(args) {
                    no("invalid-triple")
                } else if has("asserted", args) {
                    no("already-asserted")
                } else {
                    Ok(())
                }
            }
            "delete_data" => {
                if !valid_triple(args) {
                    no("invalid-triple")
                } else if !has("asserted", args) {
                    no("not-asserted")
                } else {
                    Ok(())
                }
            }
            "update_data" => {
                let old = &args[..3];
                let new = [args[0].clone(), args[1].clone(), args[3].clone()];
                if !valid_triple(old) || !valid_triple(&new) {
                    no("invalid-triple")
                } else if !has("asserted", old) {
                    no("not-asserted")
                } else if has("asserted", &new) {
                    no("already-asserted")
                } else {
                    Ok(())
                }
            }
            "intervene" => {
                let Some(e) = self.entry(&args[0], &args[1]) else { return no("unknown-intervention") };
                let Term::Int(l) = args[2] else { return no("wrong-level") };
                let triggered = self.eval(st, &e.trigger).map_err(|m| format!("oracle: {m}"))?;
                if triggered.is_empty() {
                    no("not-triggered")
                } else if self.level(st, e) != l {
                    no("wrong-level")
                } else if has("live_intervention", args) {
                    no("already-live")
                } else if st.facts.iter().any(|f| {
                    f.kind == "dismissed" && f.args[0] == args[1] && matches!(f.args[1], Term::Int(n) if n >= l)
                }) {
                    no("dismissed-at-or-above")
                } else {
                    Ok(())
                }
            }
            "dismiss_intervention" => {
                if st.facts.iter().any(|f| f.kind == "live_intervention" && f.args[1..] == args[..]) {
                    Ok(())
                } else {
                    no("no-live-intervention")
                }
            }
            "request_intervention_increase" => {
                if has("live_intervention", args) {
                    Ok(())
                } else {
                    no("no-live-intervention")
                }
            }
            "navigate_to_step" | "concept_focus" | "glossary_lookup" | "nudge" => Ok(()),
            other => Err(format!("oracle: unknown action {other}")),
        }
    }

    /// The state after a possible action.
    pub fn apply(&self, st: &OracleState, a: &ActionInstance) -> OracleState {
        let mut next = st.clone();
        let f = &mut next.facts;
        let args = &a.args;
        match a.kind.as_str() {
            "add_data" => {
                f.insert(fact("asserted", args.clone()));
                f.remove(&fact("retracted", args.clone()));
            }
            "delete_data" => {
                f.remove(&fact("asserted", args.clone()));
                f.insert(fact("retracted", args.clone()));
            }
            "update_data" => {
                let old = args[..3].to_vec();
                let new = vec![args[0].clone(), args[1].clone(), args[3].clone()];
                f.remove(&fact("asserted", old.clone()));
                f.insert(fact("retracted", old));
                f.insert(fact("asserted", new.clone()));
                f.remove(&fact("retracted", new));
            }
            "intervene" => {
                f.insert(fact("live_intervention", args.clone()));
                f.insert(fact("intervened", args.clone()));
            }
            "dismiss_intervention" => {
                f.insert(fact("dismissed", args.clone()));
                f.retain(|x| !(x.kind == "live_intervention" && x.args[1..] == args[..]));
            }
            "request_intervention_increase" => {
                f.remove(&fact("live_intervention", args.clone()));
                f.insert(fact("increase_requested", args.clone()));
                if let (Term::Sym(i), Term::Str(q)) = (&args[0], &args[1]) {
                    *next.increases.entry((i.clone(), q.clone())).or_default() += 1;
                }
                self.refresh_levels(&mut next);
            }
            "navigate_to_step" | "concept_focus" => {
                f.retain(|x| x.kind != "current_focus");
                f.insert(fact("current_focus", args.clone()));
            }
            _ => {}
        }
        next
    }

    /// Every solution of `q` over the fact set, by generate-and-test.
    pub fn eval(&self, st: &OracleState, q: &Query) -> Result<Vec<Bindings>, String> {
        let mut out = solve(&st.facts, q, &Bindings::new())?;
        out.sort();
        out.dedup();
        Ok(out)
    }
}

fn resolve(t: &Term, b: &Bindings) -> Term {
    match t {
        Term::Var(v) => b.get(v).cloned().unwrap_or_else(|| t.clone()),
        _ => t.clone(),
    }
}

fn compare(op: CmpOp, l: &Term, r: &Term) -> bool {
    use std::cmp::Ordering::*;
    let ord = match (l, r) {
        (Term::Int(a), Term::Int(b)) => a.cmp(b),
        _ => l.cmp(r),
    };
    match op {
        CmpOp::Eq => ord == Equal,
        CmpOp::Ne => ord != Equal,
        CmpOp::Lt => ord == Less,
        CmpOp::Le => ord != Greater,
        CmpOp::Gt => ord == Greater,
        CmpOp::Ge => ord != Less,
    }
}

fn free(q: &Query, bound: &BTreeSet<String>, out: &mut BTreeSet<String>) {
    let mut term = |t: &Term| {
        if let Term::Var(v) = t {
            if !bound.contains(v) {
                out.insert(v.clone());
            }
        }
    };
    match q {
        Query::True => {}
        Query::Atom(f) => f.args.iter().for_each(term),
        Query::Cmp(l, _, r) => {
            term(l);
            term(r);
        }
        Query::And(l, r) | Query::Or(l, r) => {
            free(l, bound, out);
            free(r, bound, out);
        }
        Query::Not(e) => free(e, bound, out),
        Query::Some(v, e) => {
            let mut inner = bound.clone();
            inner.insert(v.clone());
            free(e, &inner, out);
        }
    }
}

fn solve(facts: &BTreeSet<FluentInstance>, q: &Query, b: &Bindings) -> Result<Vec<Bindings>, String> {
    Ok(match q {
        Query::True => vec![b.clone()],
        Query::Atom(pattern) => facts
            .iter()
            .filter(|f| f.kind == pattern.kind && f.args.len() == pattern.args.len())
            .filter_map(|f| {
                let mut nb = b.clone();
                for (p, v) in pattern.args.iter().zip(&f.args) {
                    match resolve(p, &nb) {
                        Term::Var(name) => {
                            nb.insert(name, v.clone());
                        }
                        ground if ground == *v => {}
                        _ => return None,
                    }
                }
                Some(nb)
            })
            .collect(),
        Query::And(l, r) => {
            let mut out = Vec::new();
            for lb in solve(facts, l, b)? {
                out.extend(solve(facts, r, &lb)?);
            }
            out
        }
        Query::Or(l, r) => {
            let mut out = solve(facts, l, b)?;
            out.extend(solve(facts, r, b)?);
            out
        }
        Query::Not(e) => {
            let mut vars = BTreeSet::new();
            free(e, &BTreeSet::new(), &mut vars);
            if let Some(v) = vars.iter().find(|v| !b.contains_key(*v)) {
                return Err(format!("negation over unbound {v}"));
            }
            if solve(facts, e, b)?.is_empty() {
                vec![b.clone()]
            } else {
                vec![]
            }
        }
        Query::Some(v, e) => {
            let mut inner = b.clone();
            inner.remove(v);
            solve(facts, e, &inner)?
                .into_iter()
                .map(|mut r| {
                    r.remove(v);
                    if let Some(outer) = b.get(v) {
                        r.insert(v.clone(), outer.clone());
                    }
                    r
                })
                .collect()
        }
        Query::Cmp(l, op, r) => {
            let (l, r) = (resolve(l, b), resolve(r, b));
            if matches!(l, Term::Var(_)) || matches!(r, Term::Var(_)) {
                return Err("comparison over unbound variable".into());
            }
            if compare(*op, &l, &r) {
                vec![b.clone()]
            } else {
                vec![]
            }
        }
    })
}
