use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use sitcalc::{ActionInstance, Term};

use crate::model::{Model, OracleState};

const SUBJECTS: [&str; 5] = ["s1", "s2", "s3", "s4", "s5"];
const PREDICATES: [&str; 6] = ["type", "leads_to", "addresses", "issued_by", "of", "label"];
const CLASSES: [&str; 6] = ["loss", "hazard", "constraint", "controller", "control_action", "uca"];

fn pick<'a, T>(rng: &mut ChaCha8Rng, xs: &'a [T]) -> &'a T {
    xs.choose(rng).expect("non-empty choice")
}

fn random_object(rng: &mut ChaCha8Rng) -> Term {
    match rng.gen_range(0..10) {
        0..=4 => Term::sym(*pick(rng, &CLASSES)),
        5..=7 => Term::sym(*pick(rng, &SUBJECTS)),
        8 => Term::Str(format!("note {}", rng.gen_range(0..3))),
        _ => Term::Int(rng.gen_range(0..3)),
    }
}

fn random_triple(rng: &mut ChaCha8Rng) -> Vec<Term> {
    vec![Term::sym(*pick(rng, &SUBJECTS)), Term::sym(*pick(rng, &PREDICATES)), random_object(rng)]
}

fn facts_of<'a>(st: &'a OracleState, kind: &'a str) -> Vec<&'a [Term]> {
    st.facts.iter().filter(|f| f.kind == kind).map(|f| &f.args[..]).collect()
}

/// Proposes the next action: a mix of blind proposals drawn from the
/// vocabulary and informed ones built from the current state, so that both
/// accepted and rejected cases of every action kind come up.
pub fn propose(rng: &mut ChaCha8Rng, model: &Model, st: &OracleState) -> ActionInstance {
    let entries: Vec<(&str, &str, i64)> = model.entries().collect();
    let informed = rng.gen_bool(0.6);
    let roll = rng.gen_range(0..100);
    match roll {
        0..=29 => ActionInstance::new("add_data", random_triple(rng)),
        30..=41 => {
            let asserted = facts_of(st, "asserted");
            let args = if informed && !asserted.is_empty() { pick(rng, &asserted).to_vec() } else { random_triple(rng) };
            ActionInstance::new("delete_data", args)
        }
        42..=46 => {
            let asserted = facts_of(st, "asserted");
            let mut args = if informed && !asserted.is_empty() { pick(rng, &asserted).to_vec() } else { random_triple(rng) };
            args.push(random_object(rng));
            ActionInstance::new("update_data", args)
        }
        47..=48 => {
            // malformed triple
            ActionInstance::new("add_data", vec![Term::Int(1), Term::sym("type"), random_object(rng)])
        }
        49..=66 if !entries.is_empty() => {
            let (id, key, max) = *pick(rng, &entries);
            let level = if informed {
                facts_of(st, "intervention_level")
                    .into_iter()
                    .find(|a| a[0] == Term::sym(id) && a[1] == Term::Str(key.into()))
                    .and_then(|a| a[2].as_int())
                    .unwrap_or(1)
            } else {
                rng.gen_range(1..=max + 1)
            };
            let key = if rng.gen_bool(0.05) { "true".to_string() } else { key.to_string() };
            let id = if rng.gen_bool(0.03) { "no_such_entry" } else { id };
            ActionInstance::new("intervene", vec![Term::sym(id), Term::Str(key), Term::Int(level)])
        }
        67..=76 if !entries.is_empty() => {
            let live = facts_of(st, "live_intervention");
            let args = if informed && !live.is_empty() {
                pick(rng, &live)[1..].to_vec()
            } else {
                let (_, key, max) = *pick(rng, &entries);
                vec![Term::Str(key.into()), Term::Int(rng.gen_range(1..=max))]
            };
            ActionInstance::new("dismiss_intervention", args)
        }
        77..=86 if !entries.is_empty() => {
            let live = facts_of(st, "live_intervention");
            let args = if informed && !live.is_empty() {
                pick(rng, &live).to_vec()
            } else {
                let (id, key, max) = *pick(rng, &entries);
                vec![Term::sym(id), Term::Str(key.into()), Term::Int(rng.gen_range(1..=max))]
            };
            ActionInstance::new("request_intervention_increase", args)
        }
        _ => {
            let kind = *pick(rng, &["navigate_to_step", "concept_focus", "glossary_lookup", "nudge"]);
            let arg = if kind == "nudge" {
                Term::Str(format!("nudge {}", rng.gen_range(0..3)))
            } else {
                Term::sym(*pick(rng, &CLASSES))
            };
            ActionInstance::new(kind, vec![arg])
        }
    }
}
