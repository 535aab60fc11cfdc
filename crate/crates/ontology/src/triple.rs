use std::fmt;

use serde::{Deserialize, Serialize};
use sitcalc::Term;

/// A subject/predicate/object statement. Subject and predicate are symbols;
/// the object may be a symbol, string or integer.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Triple {
    pub subject: String,
    pub predicate: String,
    pub object: Term,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TripleError {
    #[error("triple {0} must not be empty")]
    Empty(&'static str),
    #[error("triple {0} must be a symbol")]
    NotSymbol(&'static str),
    #[error("triple object must be ground")]
    Variable,
    #[error("a triple has exactly three components, got {0}")]
    Arity(usize),
}

impl Triple {
    pub fn new(subject: impl Into<String>, predicate: impl Into<String>, object: Term) -> Result<Self, TripleError> {
        let (subject, predicate) = (subject.into(), predicate.into());
        if subject.is_empty() {
            return Err(TripleError::Empty("subject"));
        }
        if predicate.is_empty() {
            return Err(TripleError::Empty("predicate"));
        }
        match &object {
            Term::Var(_) => return Err(TripleError::Variable),
            Term::Sym(s) if s.is_empty() => return Err(TripleError::Empty("object")),
            _ => {}
        }
        Ok(Self { subject, predicate, object })
    }

    /// Shorthand for an all-symbol triple; panics on empty components.
    pub fn syms(subject: &str, predicate: &str, object: &str) -> Self {
        Self::new(subject, predicate, Term::sym(object)).expect("non-empty triple components")
    }

    pub fn from_args(args: &[Term]) -> Result<Self, TripleError> {
        let [s, p, o] = args else {
            return Err(TripleError::Arity(args.len()));
        };
        let Term::Sym(s) = s else {
            return Err(TripleError::NotSymbol("subject"));
        };
        let Term::Sym(p) = p else {
            return Err(TripleError::NotSymbol("predicate"));
        };
        Self::new(s.clone(), p.clone(), o.clone())
    }

    pub fn to_args(&self) -> Vec<Term> {
        vec![Term::Sym(self.subject.clone()), Term::Sym(self.predicate.clone()), self.object.clone()]
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", Term::Sym(self.subject.clone()), Term::Sym(self.predicate.clone()), self.object)
    }
}

/// A triple with optional components; `None` matches anything.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TriplePattern {
    pub subject: Option<String>,
    pub predicate: Option<String>,
    pub object: Option<Term>,
}

impl TriplePattern {
    pub fn any() -> Self {
        Self::default()
    }

    pub fn exact(t: &Triple) -> Self {
        Self { subject: Some(t.subject.clone()), predicate: Some(t.predicate.clone()), object: Some(t.object.clone()) }
    }

    /// Builds a pattern from fluent arguments, treating variables as wildcards.
    pub fn from_args(args: &[Term]) -> Self {
        let sym = |t: Option<&Term>| match t {
            Some(Term::Sym(s)) => Some(s.clone()),
            _ => None,
        };
        let object = match args.get(2) {
            Some(Term::Var(_)) | None => None,
            Some(t) => Some(t.clone()),
        };
        Self { subject: sym(args.first()), predicate: sym(args.get(1)), object }
    }

    pub fn matches(&self, t: &Triple) -> bool {
        self.subject.as_ref().is_none_or(|s| *s == t.subject)
            && self.predicate.as_ref().is_none_or(|p| *p == t.predicate)
            && self.object.as_ref().is_none_or(|o| *o == t.object)
    }
}
