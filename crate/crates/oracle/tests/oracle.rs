use std::path::PathBuf;
use std::sync::Arc;

use ontology_authoring::{InitialKnowledge, Triple, TripleSet};
use scaffolding::Intervention;
use sitcalc::{Bindings, Term};
use sitcalc_oracle::{conformance, dismissal_monotonicity, equivalence, memo_timing, memo_transparency, Model, Subject};
use tutor_app::{load_app_config, AppConfig};

fn demo() -> AppConfig {
    load_app_config(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../config/stpa-demo/app.toml")).unwrap()
}

fn subject() -> Subject {
    Subject::from_config(&demo()).unwrap()
}

#[test]
fn conformance_small() {
    let r = conformance(&subject(), 2_000, 1);
    assert!(r.passed(), "{r}");
    assert_eq!(r.cases, 2_000);
}

#[test]
fn equivalence_small() {
    let r = equivalence(&subject(), 60, 50, 2);
    assert!(r.passed(), "{r}");
}

#[test]
fn memo_transparency_small() {
    let r = memo_transparency(&subject(), 15, 40, 3);
    assert!(r.passed(), "{r}");
}

#[test]
fn dismissal_small() {
    let r = dismissal_monotonicity(&subject(), 40, 4);
    assert!(r.passed(), "{r}");
    assert_eq!(r.cases, 40);
}

#[test]
fn memo_timing_answers_agree() {
    let t = memo_timing(&subject(), 2_000, 200);
    assert!(t.identical);
    assert_eq!(t.history, 2_000);
}

// The suites must notice a registry that disagrees with the model.
#[test]
fn extra_seed_knowledge_is_caught() {
    let config = demo();
    let mut b = sitcalc::Registry::builder();
    ontology_authoring::register(&mut b).unwrap();
    scaffolding::register(&mut b).unwrap();
    tutor_app::register(&mut b).unwrap();
    let mut kb: Vec<Triple> = config.kbs[0].1.iter().cloned().collect();
    kb.push(Triple::syms("stowaway", "type", "hazard"));
    ontology_authoring::register_kb(&mut b, "stpa", Arc::new(TripleSet::new(kb)) as Arc<dyn InitialKnowledge>).unwrap();
    scaffolding::register_bank(&mut b, "bank", Arc::new(config.bank.clone()) as Arc<dyn scaffolding::InterventionBank>)
        .unwrap();
    let wrong = Subject { registry: Arc::new(b.build()), model: Model::from_config(&config), kb: "stpa".into() };
    assert!(!equivalence(&wrong, 5, 5, 5).passed());
}

#[test]
fn wrong_level_cap_is_caught() {
    let config = demo();
    let truncated: Vec<Intervention> = config
        .bank
        .iter()
        .map(|e| Intervention::new(e.id.clone(), e.trigger.clone(), e.levels[..1].to_vec()).unwrap())
        .collect();
    let model = Model::new(config.kbs.iter().flat_map(|(_, k)| k.iter().cloned()), truncated);
    let wrong = Subject { registry: Arc::new(config.registry().unwrap()), model, kb: "stpa".into() };
    assert!(!conformance(&wrong, 3_000, 6).passed());
}

#[test]
fn model_evaluator_basics() {
    let config = demo();
    let model = Model::from_config(&config);
    let st = model.initial();
    let q = "initial_assertion(X, type, guideword) & X < stops_too_soon".parse().unwrap();
    let got = model.eval(&st, &q).unwrap();
    let names: Vec<&Term> = got.iter().map(|b: &Bindings| &b["X"]).collect();
    assert_eq!(names, vec![&Term::sym("not_provides"), &Term::sym("provides")]);
    assert!(model.eval(&st, &"-asserted(X, P, O)".parse().unwrap()).is_err());
    assert!(model.eval(&st, &"X > 1".parse().unwrap()).is_err());
    let shadow = "initial_assertion(X, label, L) & some(X, initial_assertion(X, type, class))".parse().unwrap();
    let got = model.eval(&st, &shadow).unwrap();
    assert_eq!(got.len(), 1);
    assert_eq!(got[0]["X"], Term::sym("train_doors"));
}

#[test]
fn conformance_reaches_every_action_kind() {
    let r = conformance(&subject(), 3_000, 7);
    println!("{r}");
    for kind in ["add_data", "delete_data", "update_data", "intervene", "dismiss_intervention", "request_intervention_increase"] {
        let part = r.detail.split(", ").find(|p| p.starts_with(&format!("{kind} "))).unwrap();
        let (yes, total) = part[kind.len() + 1..].split_once('/').unwrap();
        let (yes, total): (u64, u64) = (yes.parse().unwrap(), total.parse().unwrap());
        assert!(yes > 0 && yes < total, "{part}");
    }
}
