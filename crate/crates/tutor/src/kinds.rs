use std::sync::Arc;

use sitcalc::{ActionInstance, FluentKind, QueryAction, Registry, RegistryBuilder, Situation, Term};

pub const NAVIGATE_TO_STEP: &str = "navigate_to_step";
pub const CONCEPT_FOCUS: &str = "concept_focus";
pub const GLOSSARY_LOOKUP: &str = "glossary_lookup";
pub const NUDGE: &str = "nudge";
pub const CURRENT_FOCUS: &str = "current_focus";

pub const KIND_NAMES: [&str; 5] = [NAVIGATE_TO_STEP, CONCEPT_FOCUS, GLOSSARY_LOOKUP, NUDGE, CURRENT_FOCUS];

/// Registers the tracking actions and `current_focus`.
pub fn register(b: &mut RegistryBuilder) -> sitcalc::Result<()> {
    for name in [NAVIGATE_TO_STEP, CONCEPT_FOCUS, GLOSSARY_LOOKUP, NUDGE] {
        b.action(Arc::new(QueryAction::always(name, 1)))?;
    }
    b.fluent(Arc::new(CurrentFocus))?;
    Ok(())
}

fn sets_focus(a: &ActionInstance) -> bool {
    a.kind == CONCEPT_FOCUS || a.kind == NAVIGATE_TO_STEP
}

/// `current_focus(F)`: what the learner is looking at, from the latest
/// `concept_focus` or `navigate_to_step`.
pub struct CurrentFocus;

impl FluentKind for CurrentFocus {
    fn name(&self) -> &str {
        CURRENT_FOCUS
    }

    fn arity(&self) -> usize {
        1
    }

    fn initially(&self, _: &[Term], _: &str, _: &Registry) -> bool {
        false
    }

    fn successor(&self, args: &[Term], a: &ActionInstance, held: bool, _: &Registry) -> bool {
        if sets_focus(a) {
            a.args == args
        } else {
            held
        }
    }

    fn candidates(&self, s: &Situation, _: &Registry) -> Vec<Vec<Term>> {
        // only the latest focus-bearing action can hold
        s.ancestry().filter_map(Situation::last_action).find(|a| sets_focus(a)).map(|a| a.args.clone()).into_iter().collect()
    }
}
