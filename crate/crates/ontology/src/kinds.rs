//! Fluent and action kinds for authoring an ontology extension.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;
use sitcalc::{
    ActionInstance, ActionKind, FluentInstance, FluentKind, Reasoner, Registry, RegistryBuilder, Situation, Term,
    Verdict,
};

use crate::kb::InitialKnowledge;
use crate::triple::{Triple, TriplePattern};

pub const ASSERTED: &str = "asserted";
pub const INITIAL_ASSERTION: &str = "initial_assertion";
pub const RETRACTED: &str = "retracted";
pub const ADD_DATA: &str = "add_data";
pub const DELETE_DATA: &str = "delete_data";
pub const UPDATE_DATA: &str = "update_data";

/// Every kind this library registers.
pub const KIND_NAMES: [&str; 6] = [ASSERTED, INITIAL_ASSERTION, RETRACTED, ADD_DATA, DELETE_DATA, UPDATE_DATA];

/// Registers the ontology-authoring fluents and actions.
pub fn register(b: &mut RegistryBuilder) -> sitcalc::Result<()> {
    b.fluent(Arc::new(Asserted))?
        .fluent(Arc::new(InitialAssertion))?
        .fluent(Arc::new(Retracted))?
        .action(Arc::new(DataAction::Add))?
        .action(Arc::new(DataAction::Delete))?
        .action(Arc::new(DataAction::Update))?;
    Ok(())
}

/// Registers an initial-knowledge provider under `name`.
pub fn register_kb(b: &mut RegistryBuilder, name: &str, kb: Arc<dyn InitialKnowledge>) -> sitcalc::Result<()> {
    b.provide::<dyn InitialKnowledge>(name, kb)?;
    Ok(())
}

fn seed_asserts(registry: &Registry, pattern: &TriplePattern) -> Vec<Triple> {
    let mut out: BTreeSet<Triple> = BTreeSet::new();
    for (_, kb) in registry.providers::<dyn InitialKnowledge>() {
        out.extend(kb.asserted_in_s0(pattern));
    }
    out.into_iter().collect()
}

/// `(S, P, Old)` and `(S, P, New)` of an `update_data(S, P, Old, New)`.
fn update_parts(a: &ActionInstance) -> Option<(Vec<Term>, Vec<Term>)> {
    match a.args.as_slice() {
        [s, p, old, new] => Some((vec![s.clone(), p.clone(), old.clone()], vec![s.clone(), p.clone(), new.clone()])),
        _ => None,
    }
}

fn history_args(s: &Situation, pick: impl Fn(&ActionInstance) -> Option<Vec<Term>>) -> Vec<Vec<Term>> {
    s.ancestry().filter_map(Situation::last_action).filter_map(pick).collect()
}

/// `asserted(S, P, O)`: the learner has added the triple and not since
/// removed it. Last add/delete wins.
pub struct Asserted;

impl FluentKind for Asserted {
    fn name(&self) -> &str {
        ASSERTED
    }

    fn arity(&self) -> usize {
        3
    }

    fn initially(&self, _: &[Term], _: &str, _: &Registry) -> bool {
        false
    }

    fn successor(&self, args: &[Term], a: &ActionInstance, held: bool, _: &Registry) -> bool {
        match a.kind.as_str() {
            ADD_DATA if a.args == args => true,
            DELETE_DATA if a.args == args => false,
            UPDATE_DATA => match update_parts(a) {
                Some((_, new)) if new == args => true,
                Some((old, _)) if old == args => false,
                _ => held,
            },
            _ => held,
        }
    }

    fn candidates(&self, s: &Situation, _: &Registry) -> Vec<Vec<Term>> {
        history_args(s, |a| match a.kind.as_str() {
            ADD_DATA => Some(a.args.clone()),
            UPDATE_DATA => update_parts(a).map(|(_, new)| new),
            _ => None,
        })
    }
}

/// `initial_assertion(S, P, O)`: some registered initial knowledge asserts
/// the triple. Situation-independent.
pub struct InitialAssertion;

impl FluentKind for InitialAssertion {
    fn name(&self) -> &str {
        INITIAL_ASSERTION
    }

    fn arity(&self) -> usize {
        3
    }

    fn initially(&self, args: &[Term], _: &str, registry: &Registry) -> bool {
        match Triple::from_args(args) {
            Ok(t) => !seed_asserts(registry, &TriplePattern::exact(&t)).is_empty(),
            Err(_) => false,
        }
    }

    fn successor(&self, _: &[Term], _: &ActionInstance, held: bool, _: &Registry) -> bool {
        held
    }

    fn candidates(&self, _: &Situation, registry: &Registry) -> Vec<Vec<Term>> {
        seed_asserts(registry, &TriplePattern::any()).iter().map(Triple::to_args).collect()
    }
}

/// `retracted(S, P, O)`: the learner asserted the triple and later removed
/// it, and has not re-added it.
pub struct Retracted;

impl FluentKind for Retracted {
    fn name(&self) -> &str {
        RETRACTED
    }

    fn arity(&self) -> usize {
        3
    }

    fn initially(&self, _: &[Term], _: &str, _: &Registry) -> bool {
        false
    }

    fn successor(&self, args: &[Term], a: &ActionInstance, held: bool, _: &Registry) -> bool {
        match a.kind.as_str() {
            DELETE_DATA if a.args == args => true,
            ADD_DATA if a.args == args => false,
            UPDATE_DATA => match update_parts(a) {
                Some((_, new)) if new == args => false,
                Some((old, _)) if old == args => true,
                _ => held,
            },
            _ => held,
        }
    }

    fn candidates(&self, s: &Situation, _: &Registry) -> Vec<Vec<Term>> {
        history_args(s, |a| match a.kind.as_str() {
            DELETE_DATA => Some(a.args.clone()),
            UPDATE_DATA => update_parts(a).map(|(old, _)| old),
            _ => None,
        })
    }
}

/// `add_data(S, P, O)` needs `-asserted(S, P, O)`; `delete_data(S, P, O)`
/// needs `asserted(S, P, O)`; `update_data(S, P, Old, New)` needs
/// `asserted(S, P, Old) & -asserted(S, P, New)`.
pub enum DataAction {
    Add,
    Delete,
    Update,
}

impl ActionKind for DataAction {
    fn name(&self) -> &str {
        match self {
            DataAction::Add => ADD_DATA,
            DataAction::Delete => DELETE_DATA,
            DataAction::Update => UPDATE_DATA,
        }
    }

    fn arity(&self) -> usize {
        match self {
            DataAction::Update => 4,
            _ => 3,
        }
    }

    fn poss(&self, args: &[Term], s: &Situation, r: &Reasoner) -> sitcalc::Result<Verdict> {
        let asserted = |args: Vec<Term>| r.holds(&FluentInstance::new(ASSERTED, args), s);
        match self {
            DataAction::Add | DataAction::Delete => {
                if Triple::from_args(args).is_err() {
                    return Ok(Verdict::impossible("invalid-triple"));
                }
                let held = asserted(args.to_vec())?;
                Ok(match (self, held) {
                    (DataAction::Add, true) => Verdict::impossible("already-asserted"),
                    (DataAction::Delete, false) => Verdict::impossible("not-asserted"),
                    _ => Verdict::Possible,
                })
            }
            DataAction::Update => {
                let (old, new) = (args[..3].to_vec(), vec![args[0].clone(), args[1].clone(), args[3].clone()]);
                if Triple::from_args(&old).is_err() || Triple::from_args(&new).is_err() {
                    return Ok(Verdict::impossible("invalid-triple"));
                }
                if !asserted(old)? {
                    return Ok(Verdict::impossible("not-asserted"));
                }
                if asserted(new)? {
                    return Ok(Verdict::impossible("already-asserted"));
                }
                Ok(Verdict::Possible)
            }
        }
    }
}

/// The authored ontology in a situation: seed triples and learner triples.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Ontology {
    pub initial: Vec<Triple>,
    pub asserted: Vec<Triple>,
}

pub fn ontology(r: &Reasoner, s: &Situation) -> sitcalc::Result<Ontology> {
    let triples = |kind: &str| -> sitcalc::Result<Vec<Triple>> {
        Ok(r
            .holding_fluents(s, Some(kind))?
            .into_iter()
            .filter_map(|f| Triple::from_args(&f.args).ok())
            .collect())
    };
    Ok(Ontology { initial: triples(INITIAL_ASSERTION)?, asserted: triples(ASSERTED)? })
}
