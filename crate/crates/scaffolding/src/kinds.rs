//! Fluents and actions for contingent scaffolding.
//!
//! Arguments are `I` (the intervention id, a symbol), `Q` (the trigger's
//! canonical text, a string) and `L` / `N` (1-based levels, integers).

use std::sync::Arc;

use sitcalc::{
    ActionInstance, ActionKind, CmpOp, FluentInstance, FluentKind, Query, QueryAction, Reasoner, Registry,
    RegistryBuilder, Situation, Term, Verdict,
};

use crate::bank::{Intervention, InterventionBank};

pub const DISMISSED: &str = "dismissed";
pub const LIVE_INTERVENTION: &str = "live_intervention";
pub const INTERVENTION_LEVEL: &str = "intervention_level";
pub const INTERVENED: &str = "intervened";
pub const INCREASE_REQUESTED: &str = "increase_requested";
pub const INTERVENE: &str = "intervene";
pub const DISMISS_INTERVENTION: &str = "dismiss_intervention";
pub const REQUEST_INTERVENTION_INCREASE: &str = "request_intervention_increase";

/// Every kind this library registers.
pub const KIND_NAMES: [&str; 8] = [
    DISMISSED,
    LIVE_INTERVENTION,
    INTERVENTION_LEVEL,
    INTERVENED,
    INCREASE_REQUESTED,
    INTERVENE,
    DISMISS_INTERVENTION,
    REQUEST_INTERVENTION_INCREASE,
];

pub fn register(b: &mut RegistryBuilder) -> sitcalc::Result<()> {
    b.fluent(Arc::new(Dismissed))?
        .fluent(Arc::new(LiveIntervention))?
        .fluent(Arc::new(InterventionLevel))?
        .fluent(Arc::new(Marker::Intervened))?
        .fluent(Arc::new(Marker::IncreaseRequested))?
        .action(Arc::new(Intervene))?
        .action(Arc::new(QueryAction::new(DISMISS_INTERVENTION, 2, "no-live-intervention", |args| {
            Query::some("I", Query::atom(LIVE_INTERVENTION, vec![Term::var("I"), args[0].clone(), args[1].clone()]))
        })))?
        .action(Arc::new(QueryAction::new(REQUEST_INTERVENTION_INCREASE, 3, "no-live-intervention", |args| {
            Query::atom(LIVE_INTERVENTION, args.to_vec())
        })))?;
    Ok(())
}

/// Registers an intervention bank under `name`.
pub fn register_bank(b: &mut RegistryBuilder, name: &str, bank: Arc<dyn InterventionBank>) -> sitcalc::Result<()> {
    b.provide::<dyn InterventionBank>(name, bank)?;
    Ok(())
}

/// All entries of all registered banks, ordered by id. On an id clash the
/// bank registered under the smaller name wins.
pub fn bank_entries(registry: &Registry) -> Vec<Intervention> {
    let mut out: Vec<Intervention> = Vec::new();
    for (_, bank) in registry.providers::<dyn InterventionBank>() {
        for e in bank.intervention(None, None) {
            if !out.iter().any(|o| o.id == e.id) {
                out.push(e);
            }
        }
    }
    out.sort_by(|a, b| a.id.cmp(&b.id));
    out
}

/// The bank entry named by `I` whose trigger text is `Q`.
pub fn lookup(registry: &Registry, i: &Term, q: &Term) -> Option<Intervention> {
    let (Term::Sym(id), Term::Str(query)) = (i, q) else { return None };
    registry
        .providers::<dyn InterventionBank>()
        .into_iter()
        .find_map(|(_, bank)| bank.intervention(Some(id), None).into_iter().next())
        .filter(|e| &e.query_key() == query)
}

/// `dismissed(Q, N)`: the learner dismissed the interventions on `Q` at
/// level `N`. Never becomes false again.
pub struct Dismissed;

impl FluentKind for Dismissed {
    fn name(&self) -> &str {
        DISMISSED
    }

    fn arity(&self) -> usize {
        2
    }

    fn initially(&self, _: &[Term], _: &str, _: &Registry) -> bool {
        false
    }

    fn successor(&self, args: &[Term], a: &ActionInstance, held: bool, _: &Registry) -> bool {
        held || (a.kind == DISMISS_INTERVENTION && a.args == args)
    }

    fn candidates(&self, s: &Situation, _: &Registry) -> Vec<Vec<Term>> {
        s.ancestry()
            .filter_map(Situation::last_action)
            .filter(|a| a.kind == DISMISS_INTERVENTION)
            .map(|a| a.args.clone())
            .collect()
    }
}

/// `live_intervention(I, Q, L)`: shown and not yet dismissed or escalated.
pub struct LiveIntervention;

impl FluentKind for LiveIntervention {
    fn name(&self) -> &str {
        LIVE_INTERVENTION
    }

    fn arity(&self) -> usize {
        3
    }

    fn initially(&self, _: &[Term], _: &str, _: &Registry) -> bool {
        false
    }

    fn successor(&self, args: &[Term], a: &ActionInstance, held: bool, _: &Registry) -> bool {
        match a.kind.as_str() {
            INTERVENE if a.args == args => true,
            DISMISS_INTERVENTION if a.args[..] == args[1..] => false,
            REQUEST_INTERVENTION_INCREASE if a.args == args => false,
            _ => held,
        }
    }

    fn candidates(&self, s: &Situation, _: &Registry) -> Vec<Vec<Term>> {
        s.ancestry()
            .filter_map(Situation::last_action)
            .filter(|a| a.kind == INTERVENE)
            .map(|a| a.args.clone())
            .collect()
    }
}

/// `intervention_level(I, Q, L)`: the level at which `I` would next be
/// shown. Starts at 1 and rises by one per escalation, capped at the number
/// of levels in the bank entry.
pub struct InterventionLevel;

impl FluentKind for InterventionLevel {
    fn name(&self) -> &str {
        INTERVENTION_LEVEL
    }

    fn arity(&self) -> usize {
        3
    }

    fn initially(&self, args: &[Term], _: &str, registry: &Registry) -> bool {
        args[2] == Term::Int(1) && lookup(registry, &args[0], &args[1]).is_some()
    }

    fn successor(&self, args: &[Term], a: &ActionInstance, held: bool, registry: &Registry) -> bool {
        if a.kind != REQUEST_INTERVENTION_INCREASE || a.args[..2] != args[..2] {
            return held;
        }
        let (Some(from), Some(entry)) = (a.args[2].as_int(), lookup(registry, &args[0], &args[1])) else {
            return held;
        };
        args[2].as_int() == Some((from.saturating_add(1)).min(entry.max_level()))
    }

    fn candidates(&self, _: &Situation, registry: &Registry) -> Vec<Vec<Term>> {
        bank_entries(registry)
            .iter()
            .flat_map(|e| (1..=e.max_level()).map(move |l| vec![e.id_term(), e.query_term(), Term::Int(l)]))
            .collect()
    }
}

/// `intervened(I, Q, L)` and `increase_requested(I, Q, L)`: history markers
/// set by the action of the same arguments and never cleared.
pub enum Marker {
    Intervened,
    IncreaseRequested,
}

impl Marker {
    fn action(&self) -> &'static str {
        match self {
            Marker::Intervened => INTERVENE,
            Marker::IncreaseRequested => REQUEST_INTERVENTION_INCREASE,
        }
    }
}

impl FluentKind for Marker {
    fn name(&self) -> &str {
        match self {
            Marker::Intervened => INTERVENED,
            Marker::IncreaseRequested => INCREASE_REQUESTED,
        }
    }

    fn arity(&self) -> usize {
        3
    }

    fn initially(&self, _: &[Term], _: &str, _: &Registry) -> bool {
        false
    }

    fn successor(&self, args: &[Term], a: &ActionInstance, held: bool, _: &Registry) -> bool {
        held || (a.kind == self.action() && a.args == args)
    }

    fn candidates(&self, s: &Situation, _: &Registry) -> Vec<Vec<Term>> {
        s.ancestry()
            .filter_map(Situation::last_action)
            .filter(|a| a.kind == self.action())
            .map(|a| a.args.clone())
            .collect()
    }
}

/// `intervene(I, Q, L)`. Reasons, checked in order: `unknown-intervention`,
/// `not-triggered`, `wrong-level`, `already-live`, `dismissed-at-or-above`.
pub struct Intervene;

impl Intervene {
    /// Dismissal of `Q` at `L` or any higher level blocks showing it at `L`.
    pub fn undismissed(q: &Term, l: &Term) -> Query {
        Query::some(
            "N",
            Query::atom(DISMISSED, vec![q.clone(), Term::var("N")]).and(Query::cmp(Term::var("N"), CmpOp::Ge, l.clone())),
        )
        .not()
    }
}

impl ActionKind for Intervene {
    fn name(&self) -> &str {
        INTERVENE
    }

    fn arity(&self) -> usize {
        3
    }

    fn poss(&self, args: &[Term], s: &Situation, r: &Reasoner) -> sitcalc::Result<Verdict> {
        let Some(entry) = lookup(r.registry(), &args[0], &args[1]) else {
            return Ok(Verdict::impossible("unknown-intervention"));
        };
        if args[2].as_int().is_none() {
            return Ok(Verdict::impossible("wrong-level"));
        }
        if !r.entails(&entry.trigger, s)? {
            return Ok(Verdict::impossible("not-triggered"));
        }
        if !r.holds(&FluentInstance::new(INTERVENTION_LEVEL, args.to_vec()), s)? {
            return Ok(Verdict::impossible("wrong-level"));
        }
        if r.holds(&FluentInstance::new(LIVE_INTERVENTION, args.to_vec()), s)? {
            return Ok(Verdict::impossible("already-live"));
        }
        if !r.entails(&Self::undismissed(&args[1], &args[2]), s)? {
            return Ok(Verdict::impossible("dismissed-at-or-above"));
        }
        Ok(Verdict::Possible)
    }
}
