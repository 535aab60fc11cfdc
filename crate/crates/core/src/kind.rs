//! The contracts a plugin implements to contribute fluents and actions.

use crate::error::Result;
use crate::query::Query;
use crate::reasoner::Reasoner;
use crate::registry::Registry;
use crate::situation::Situation;
use crate::term::{ActionInstance, Term};

/// A family of fluents sharing a name, e.g. `asserted/3`.
///
/// The kernel owns regression: a fluent kind only says what holds initially
/// and how a single action changes one ground instance. `registry` gives
/// access to registered providers (initial knowledge, banks) without the
/// kind depending on any concrete provider.
pub trait FluentKind: Send + Sync {
    fn name(&self) -> &str;

    fn arity(&self) -> usize;

    /// Truth of the ground instance in `initial(kb)`.
    fn initially(&self, args: &[Term], kb: &str, registry: &Registry) -> bool;

    /// Successor-state axiom: truth after `action` given the truth before it.
    fn successor(&self, args: &[Term], action: &ActionInstance, held_before: bool, registry: &Registry) -> bool;

    /// Finite set of ground argument tuples containing every instance that
    /// can hold in `s`. Duplicates are allowed.
    fn candidates(&self, s: &Situation, registry: &Registry) -> Vec<Vec<Term>>;
}

/// Outcome of a precondition check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Possible,
    /// Impossible, with a short machine-readable reason code.
    Impossible(String),
}

impl Verdict {
    pub fn is_possible(&self) -> bool {
        matches!(self, Verdict::Possible)
    }

    pub fn impossible(reason: impl Into<String>) -> Self {
        Verdict::Impossible(reason.into())
    }
}

/// An action kind with its possibility axiom.
pub trait ActionKind: Send + Sync {
    fn name(&self) -> &str;

    fn arity(&self) -> usize;

    /// Possibility axiom for the ground arguments in `s`.
    fn poss(&self, args: &[Term], s: &Situation, reasoner: &Reasoner) -> Result<Verdict>;
}

type Precondition = Box<dyn Fn(&[Term]) -> Query + Send + Sync>;

/// An action whose precondition is a query built from its arguments.
pub struct QueryAction {
    name: String,
    arity: usize,
    reason: String,
    precondition: Precondition,
}

impl QueryAction {
    pub fn new(
        name: impl Into<String>,
        arity: usize,
        reason: impl Into<String>,
        precondition: impl Fn(&[Term]) -> Query + Send + Sync + 'static,
    ) -> Self {
        Self { name: name.into(), arity, reason: reason.into(), precondition: Box::new(precondition) }
    }

    /// An action that is always possible.
    pub fn always(name: impl Into<String>, arity: usize) -> Self {
        Self::new(name, arity, "precondition-failed", |_| Query::True)
    }

    pub fn precondition(&self, args: &[Term]) -> Query {
        (self.precondition)(args)
    }
}

impl ActionKind for QueryAction {
    fn name(&self) -> &str {
        &self.name
    }

    fn arity(&self) -> usize {
        self.arity
    }

    fn poss(&self, args: &[Term], s: &Situation, reasoner: &Reasoner) -> Result<Verdict> {
        if reasoner.entails(&self.precondition(args), s)? {
            Ok(Verdict::Possible)
        } else {
            Ok(Verdict::Impossible(self.reason.clone()))
        }
    }
}
