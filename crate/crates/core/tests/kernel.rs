//! Kernel behaviour over a small switchboard domain defined here:
//!
//! - `on(X)`: flipped by `toggle(X)`, cleared by `reset(X)`; initially true
//!   for `a` when the kb is `lit`.
//! - `pressed(X)`: true forever after the first `toggle(X)`.
//! - `toggle(X)` is always possible; `reset(X)` needs `on(X)`.

use std::collections::BTreeSet;
use std::sync::Arc;

use proptest::prelude::*;
use sitcalc::{
    ActionInstance, Bindings, CmpOp, Error, FluentInstance, FluentKind, Query, QueryAction, Reasoner, Registry,
    Situation, Term,
};

struct On;
struct Pressed;

fn touched(s: &Situation, kind: &str) -> Vec<Vec<Term>> {
    s.actions().into_iter().filter(|a| a.kind == kind).map(|a| a.args.clone()).collect()
}

impl FluentKind for On {
    fn name(&self) -> &str {
        "on"
    }
    fn arity(&self) -> usize {
        1
    }
    fn initially(&self, args: &[Term], kb: &str, _: &Registry) -> bool {
        kb == "lit" && args[0] == Term::sym("a")
    }
    fn successor(&self, args: &[Term], a: &ActionInstance, held: bool, _: &Registry) -> bool {
        match a.kind.as_str() {
            "toggle" if a.args[0] == args[0] => !held,
            "reset" if a.args[0] == args[0] => false,
            _ => held,
        }
    }
    fn candidates(&self, s: &Situation, _: &Registry) -> Vec<Vec<Term>> {
        let mut c = touched(s, "toggle");
        if s.kb() == "lit" {
            c.push(vec![Term::sym("a")]);
        }
        c
    }
}

impl FluentKind for Pressed {
    fn name(&self) -> &str {
        "pressed"
    }
    fn arity(&self) -> usize {
        1
    }
    fn initially(&self, _: &[Term], _: &str, _: &Registry) -> bool {
        false
    }
    fn successor(&self, args: &[Term], a: &ActionInstance, held: bool, _: &Registry) -> bool {
        held || (a.kind == "toggle" && a.args[0] == args[0])
    }
    fn candidates(&self, s: &Situation, _: &Registry) -> Vec<Vec<Term>> {
        touched(s, "toggle")
    }
}

fn registry_in_order(order: &[usize]) -> Arc<Registry> {
    let mut b = Registry::builder();
    for i in order {
        match i {
            0 => b.fluent(Arc::new(On)).map(|_| ()),
            1 => b.fluent(Arc::new(Pressed)).map(|_| ()),
            2 => b.action(Arc::new(QueryAction::always("toggle", 1))).map(|_| ()),
            _ => b
                .action(Arc::new(QueryAction::new("reset", 1, "not-on", |args| {
                    Query::atom("on", vec![args[0].clone()])
                })))
                .map(|_| ()),
        }
        .unwrap();
    }
    Arc::new(b.build())
}

fn registry() -> Arc<Registry> {
    registry_in_order(&[0, 1, 2, 3])
}

fn on(x: &str) -> FluentInstance {
    FluentInstance::new("on", vec![Term::sym(x)])
}

fn toggle(x: &str) -> ActionInstance {
    ActionInstance::new("toggle", vec![Term::sym(x)])
}

fn reset(x: &str) -> ActionInstance {
    ActionInstance::new("reset", vec![Term::sym(x)])
}

fn q(s: &str) -> Query {
    s.parse().unwrap()
}

fn binding(pairs: &[(&str, Term)]) -> Bindings {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

#[test]
fn do_checks_preconditions() {
    let r = Reasoner::new(registry());
    let s0 = Situation::initial("dark");
    let err = r.do_action(reset("a"), &s0).unwrap_err();
    assert!(matches!(&err, Error::NotPossible { reason, situation, .. } if reason == "not-on" && *situation == s0.digest()));
    let s1 = r.do_action(toggle("a"), &s0).unwrap();
    assert_eq!(s0.depth(), 0, "input situation untouched");
    let s2 = r.do_action(reset("a"), &s1).unwrap();
    assert!(!r.holds(&on("a"), &s2).unwrap());
    assert!(r.holds(&on("a"), &s1).unwrap());
}

#[test]
fn errors_for_unknown_nonground_and_arity() {
    let r = Reasoner::new(registry());
    let s0 = Situation::initial("dark");
    assert!(matches!(
        r.do_action(ActionInstance::new("jump", vec![]), &s0),
        Err(Error::UnknownKind { family: "action", .. })
    ));
    assert!(matches!(r.poss(&ActionInstance::new("toggle", vec![]), &s0), Err(Error::Arity { .. })));
    assert!(matches!(
        r.do_action(ActionInstance::new("toggle", vec![Term::var("X")]), &s0),
        Err(Error::NonGround(_))
    ));
    assert!(matches!(r.holds(&FluentInstance::new("on", vec![Term::var("X")]), &s0), Err(Error::NonGround(_))));
    assert!(matches!(r.holds(&FluentInstance::new("off", vec![]), &s0), Err(Error::UnknownKind { .. })));
    assert!(matches!(r.solve(&q("off(X)"), &s0), Err(Error::UnknownKind { .. })));
}

#[test]
fn initial_knowledge_selects_initial_truth() {
    let r = Reasoner::new(registry());
    assert!(r.holds(&on("a"), &Situation::initial("lit")).unwrap());
    assert!(!r.holds(&on("a"), &Situation::initial("dark")).unwrap());
    let s = r.do_action(toggle("a"), &Situation::initial("lit")).unwrap();
    assert!(!r.holds(&on("a"), &s).unwrap());
}

#[test]
fn solve_enumerates_candidates_and_handles_connectives() {
    let r = Reasoner::new(registry());
    let mut s = Situation::initial("dark");
    for x in ["a", "b", "c", "b"] {
        s = r.do_action(toggle(x), &s).unwrap();
    }
    // on: a, c. pressed: a, b, c.
    assert_eq!(
        r.solve(&q("on(X)"), &s).unwrap(),
        vec![binding(&[("X", Term::sym("a"))]), binding(&[("X", Term::sym("c"))])]
    );
    assert_eq!(r.solve(&q("pressed(X) & -on(X)"), &s).unwrap(), vec![binding(&[("X", Term::sym("b"))])]);
    assert_eq!(r.solve(&q("on(X) | pressed(X)"), &s).unwrap().len(), 3);
    assert_eq!(r.solve(&q("some(X, on(X))"), &s).unwrap(), vec![Bindings::new()]);
    assert_eq!(r.solve(&q("on(X) & X != a"), &s).unwrap(), vec![binding(&[("X", Term::sym("c"))])]);
    assert!(r.solve(&q("-some(X, pressed(X))"), &s).unwrap().is_empty());
    assert_eq!(r.solve(&q("-some(X, pressed(X))"), &Situation::initial("dark")).unwrap(), vec![Bindings::new()]);
    assert_eq!(r.solve(&q("on(X) & pressed(Y) & X = Y"), &s).unwrap().len(), 2);
}

#[test]
fn negation_and_comparison_must_be_ground() {
    let r = Reasoner::new(registry());
    let s = Situation::initial("dark");
    assert!(matches!(r.solve(&q("-on(X)"), &s), Err(Error::UnboundNegation(_))));
    assert!(matches!(r.solve(&q("X > 1"), &s), Err(Error::UnboundNegation(_))));
    // ordering matters: binding first, then the filter
    assert!(r.solve(&q("on(X) & -pressed(X)"), &s).unwrap().is_empty());
    assert_eq!(r.solve(&q("-on(a)"), &s).unwrap(), vec![Bindings::new()]);
    assert_eq!(r.solve(&Query::cmp(Term::Int(3), CmpOp::Ge, Term::Int(2)), &s).unwrap().len(), 1);
}

#[test]
fn some_restores_shadowed_variable() {
    let r = Reasoner::new(registry());
    let s = r.do_action(toggle("a"), &Situation::initial("dark")).unwrap();
    let s = r.do_action(toggle("b"), &s).unwrap();
    let got = r.solve(&q("on(X) & some(X, pressed(X))"), &s).unwrap();
    assert_eq!(got, vec![binding(&[("X", Term::sym("a"))]), binding(&[("X", Term::sym("b"))])]);
}

#[test]
fn holding_fluents_and_snapshot() {
    let r = Reasoner::new(registry());
    let empty = Reasoner::new(Arc::new(Registry::builder().build()));
    let s0 = Situation::initial("dark");
    assert!(empty.holding_fluents(&s0, None).unwrap().is_empty());
    assert!(r.progress(&s0).unwrap().is_empty());
    let s = r.do_action(toggle("a"), &s0).unwrap();
    let s = r.do_action(toggle("b"), &s).unwrap();
    let s = r.do_action(reset("b"), &s).unwrap();
    let all = r.holding_fluents(&s, None).unwrap();
    let names: Vec<String> = all.iter().map(ToString::to_string).collect();
    assert_eq!(names, vec!["on(a)", "pressed(a)", "pressed(b)"]);
    assert_eq!(r.holding_fluents(&s, Some("on")).unwrap().len(), 1);
    assert!(r.holding_fluents(&s, Some("missing")).unwrap().is_empty());
    let snap = r.progress(&s).unwrap();
    assert_eq!(snap.fluents(), &all);
    assert!(snap.holds(&on("a")));
    assert!(!snap.holds(&on("b")));
}

#[test]
fn cache_is_tabled_per_situation_and_clearable() {
    let r = Reasoner::new(registry());
    let mut s = Situation::initial("dark");
    for _ in 0..100 {
        s = s.extend_unchecked(toggle("a"));
    }
    assert!(!r.holds(&on("a"), &s).unwrap());
    let stats = r.cache_stats();
    // the queried situation and depths 0, 16, .., 96
    assert_eq!(stats.entries, 8);
    assert!(!r.holds(&on("a"), &s).unwrap());
    assert_eq!(r.cache_stats().hits, stats.hits + 1);
    assert!(r.holds(&on("a"), s.prior().unwrap()).unwrap());
    assert_eq!(r.cache_stats().entries, 9);
    r.clear_cache();
    assert_eq!(r.cache_stats().entries, 0);
}

#[test]
fn concurrent_readers_agree() {
    let r = Arc::new(Reasoner::new(registry()));
    let mut s = Situation::initial("lit");
    for i in 0..500 {
        s = s.extend_unchecked(toggle(["a", "b", "c"][i % 3]));
    }
    let expected = Reasoner::uncached(registry()).holding_fluents(&s, None).unwrap();
    let handles: Vec<_> = (0..8)
        .map(|_| {
            let (r, s) = (Arc::clone(&r), s.clone());
            std::thread::spawn(move || r.holding_fluents(&s, None).unwrap())
        })
        .collect();
    for h in handles {
        assert_eq!(h.join().unwrap(), expected);
    }
}

fn arb_history() -> impl Strategy<Value = Vec<(bool, u8)>> {
    prop::collection::vec((any::<bool>(), 0u8..4), 0..40)
}

fn build(kb: &str, steps: &[(bool, u8)]) -> Situation {
    let names = ["a", "b", "c", "d"];
    steps.iter().fold(Situation::initial(kb), |s, (is_toggle, x)| {
        let x = names[*x as usize];
        s.extend_unchecked(if *is_toggle { toggle(x) } else { reset(x) })
    })
}

fn universe() -> Vec<FluentInstance> {
    ["a", "b", "c", "d"]
        .iter()
        .flat_map(|x| [on(x), FluentInstance::new("pressed", vec![Term::sym(*x)])])
        .collect()
}

proptest! {
    #[test]
    fn regression_identity(steps in arb_history(), last in (any::<bool>(), 0u8..4), lit in any::<bool>()) {
        let reg = registry();
        let r = Reasoner::new(reg.clone());
        let kb = if lit { "lit" } else { "dark" };
        let s = build(kb, &steps);
        let next = build(kb, &[steps.clone(), vec![last]].concat());
        let a = next.last_action().unwrap();
        for f in universe() {
            let kind = reg.fluent(&f.kind).unwrap();
            let before = r.holds(&f, &s).unwrap();
            prop_assert_eq!(r.holds(&f, &next).unwrap(), kind.successor(&f.args, a, before, &reg));
        }
    }

    #[test]
    fn memo_transparency(steps in arb_history()) {
        let cached = Reasoner::new(registry());
        let plain = Reasoner::uncached(registry());
        let s = build("lit", &steps);
        // prime the cache on prefixes, then compare at every prefix
        for p in s.prefixes() {
            cached.holding_fluents(&p, None).unwrap();
        }
        for p in s.prefixes() {
            prop_assert_eq!(cached.holding_fluents(&p, None).unwrap(), plain.holding_fluents(&p, None).unwrap());
            for f in universe() {
                prop_assert_eq!(cached.holds(&f, &p).unwrap(), plain.holds(&f, &p).unwrap());
            }
            let query = q("pressed(X) & -on(X)");
            prop_assert_eq!(cached.solve(&query, &p).unwrap(), plain.solve(&query, &p).unwrap());
        }
    }

    #[test]
    fn representations_agree(steps in arb_history(), lit in any::<bool>()) {
        let r = Reasoner::new(registry());
        let s = build(if lit { "lit" } else { "dark" }, &steps);
        let snap = r.progress(&s).unwrap();
        prop_assert_eq!(snap.fluents(), &r.holding_fluents(&s, None).unwrap());
        for f in universe() {
            prop_assert_eq!(snap.holds(&f), r.holds(&f, &s).unwrap());
        }
    }

    #[test]
    fn registration_order_is_irrelevant(steps in arb_history(), perm in Just(vec![0usize, 1, 2, 3]).prop_shuffle()) {
        let a = Reasoner::new(registry());
        let b = Reasoner::new(registry_in_order(&perm));
        let s = build("lit", &steps);
        prop_assert_eq!(a.holding_fluents(&s, None).unwrap(), b.holding_fluents(&s, None).unwrap());
        for query in ["on(X)", "pressed(X) | on(X)", "pressed(X) & -on(X)"] {
            prop_assert_eq!(a.solve(&q(query), &s).unwrap(), b.solve(&q(query), &s).unwrap());
        }
        prop_assert_eq!(b.registry().conformers("fluent"), vec!["on".to_string(), "pressed".to_string()]);
        prop_assert_eq!(b.registry().conformers("action"), vec!["reset".to_string(), "toggle".to_string()]);
    }

    #[test]
    fn digests_track_kind_and_args_only(steps in arb_history()) {
        let a = build("k", &steps);
        let b = steps.iter().enumerate().fold(Situation::initial("k"), |s, (i, _)| {
            let mut act = a.actions()[i].clone();
            act.actor = format!("user{i}");
            s.extend_unchecked(act)
        });
        prop_assert_eq!(a.digest(), b.digest());
        let distinct: BTreeSet<_> = a.prefixes().iter().map(|p| p.digest()).collect();
        prop_assert_eq!(distinct.len(), steps.len() + 1);
    }
}
