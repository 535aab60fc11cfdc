//! Terms, fluent atoms and action instances.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::{self, Deserializer, MapAccess, SeqAccess, Visitor};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

use crate::time::Timestamp;

/// A first-order term. Variables only appear in queries; everything stored in
/// a situation is ground.
///
/// The derived ordering is the canonical term ordering used for sorting
/// bindings and fluent sets: variables, then integers, then symbols, then
/// strings.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    Int(i64),
    Sym(String),
    Str(String),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn sym(name: impl Into<String>) -> Self {
        Term::Sym(name.into())
    }

    pub fn str(text: impl Into<String>) -> Self {
        Term::Str(text.into())
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn is_ground(&self) -> bool {
        !self.is_var()
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Term::Int(n) => Some(*n),
            _ => None,
        }
    }

    /// Text of a symbol or string term.
    pub fn as_text(&self) -> Option<&str> {
        match self {
            Term::Sym(s) | Term::Str(s) => Some(s),
            _ => None,
        }
    }

    /// Apply a binding; unbound variables are left in place.
    pub fn substitute(&self, bindings: &Bindings) -> Term {
        match self {
            Term::Var(v) => bindings.get(v).cloned().unwrap_or_else(|| self.clone()),
            other => other.clone(),
        }
    }

    pub(crate) fn write_canonical(&self, out: &mut Vec<u8>) {
        let (tag, body): (u8, &[u8]) = match self {
            Term::Var(v) => (b'V', v.as_bytes()),
            Term::Int(_) => (b'I', &[]),
            Term::Sym(s) => (b'S', s.as_bytes()),
            Term::Str(s) => (b'T', s.as_bytes()),
        };
        out.push(tag);
        if let Term::Int(n) = self {
            out.extend_from_slice(&n.to_be_bytes());
        } else {
            out.extend_from_slice(&(body.len() as u64).to_be_bytes());
            out.extend_from_slice(body);
        }
    }
}

impl From<i64> for Term {
    fn from(n: i64) -> Self {
        Term::Int(n)
    }
}

impl From<&str> for Term {
    fn from(s: &str) -> Self {
        Term::Sym(s.to_owned())
    }
}

/// True for names that print without quotes as a symbol.
pub(crate) fn is_bare_symbol(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn write_quoted(f: &mut fmt::Formatter<'_>, s: &str, quote: char) -> fmt::Result {
    write!(f, "{quote}")?;
    for c in s.chars() {
        match c {
            '\\' => write!(f, "\\\\")?,
            '\n' => write!(f, "\\n")?,
            '\t' => write!(f, "\\t")?,
            c if c == quote => write!(f, "\\{c}")?,
            c => write!(f, "{c}")?,
        }
    }
    write!(f, "{quote}")
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Int(n) => write!(f, "{n}"),
            Term::Sym(s) if is_bare_symbol(s) => write!(f, "{s}"),
            Term::Sym(s) => write_quoted(f, s, '\''),
            Term::Str(s) => write_quoted(f, s, '"'),
        }
    }
}

// JSON encoding: integers as numbers, symbols as strings, strings as
// `{"str": ..}`, variables as `{"var": ..}`.
impl Serialize for Term {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Term::Int(n) => serializer.serialize_i64(*n),
            Term::Sym(s) => serializer.serialize_str(s),
            Term::Str(s) => {
                let mut map = serializer.serialize_map(Some(1))?;
                map.serialize_entry("str", s)?;
                map.end()
            }
            Term::Var(v) => {
                let mut map = serializer.serialize_map(Some(1))?;
                map.serialize_entry("var", v)?;
                map.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for Term {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct TermVisitor;

        impl<'de> Visitor<'de> for TermVisitor {
            type Value = Term;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an integer, a symbol string, or {\"str\"|\"var\": string}")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Term, E> {
                Ok(Term::Int(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Term, E> {
                i64::try_from(v)
                    .map(Term::Int)
                    .map_err(|_| E::custom("integer out of range"))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Term, E> {
                if v.is_empty() {
                    return Err(E::custom("empty symbol"));
                }
                Ok(Term::Sym(v.to_owned()))
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Term, A::Error> {
                let (key, value): (String, String) = map
                    .next_entry()?
                    .ok_or_else(|| de::Error::custom("empty term object"))?;
                if map.next_key::<String>()?.is_some() {
                    return Err(de::Error::custom("term object must have exactly one key"));
                }
                match key.as_str() {
                    "str" => Ok(Term::Str(value)),
                    "var" => Ok(Term::Var(value)),
                    other => Err(de::Error::unknown_field(other, &["str", "var"])),
                }
            }

            fn visit_seq<A: SeqAccess<'de>>(self, _seq: A) -> Result<Term, A::Error> {
                Err(de::Error::custom("compound terms are not supported"))
            }
        }

        deserializer.deserialize_any(TermVisitor)
    }
}

/// Variable bindings produced by query evaluation, ordered by variable name.
pub type Bindings = BTreeMap<String, Term>;

/// A (possibly non-ground) fluent atom such as `asserted(h1, type, hazard)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FluentInstance {
    pub kind: String,
    pub args: Vec<Term>,
}

impl FluentInstance {
    pub fn new(kind: impl Into<String>, args: Vec<Term>) -> Self {
        Self { kind: kind.into(), args }
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn substitute(&self, bindings: &Bindings) -> Self {
        Self {
            kind: self.kind.clone(),
            args: self.args.iter().map(|t| t.substitute(bindings)).collect(),
        }
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.args.iter().filter_map(|t| match t {
            Term::Var(v) => Some(v.as_str()),
            _ => None,
        })
    }
}

fn write_atom(f: &mut fmt::Formatter<'_>, kind: &str, args: &[Term]) -> fmt::Result {
    write!(f, "{kind}")?;
    if !args.is_empty() {
        write!(f, "(")?;
        for (i, a) in args.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")?;
    }
    Ok(())
}

impl fmt::Display for FluentInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_atom(f, &self.kind, &self.args)
    }
}

/// An action with its bookkeeping metadata. Only `kind` and `args` take part
/// in situation identity; `actor` and `at` are carried along for the log.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionInstance {
    pub kind: String,
    pub args: Vec<Term>,
    pub actor: String,
    pub at: Timestamp,
}

impl ActionInstance {
    pub fn new(kind: impl Into<String>, args: Vec<Term>) -> Self {
        Self {
            kind: kind.into(),
            args,
            actor: "anon".to_owned(),
            at: Timestamp::EPOCH,
        }
    }

    pub fn by(mut self, actor: impl Into<String>) -> Self {
        self.actor = actor.into();
        self
    }

    pub fn at(mut self, at: Timestamp) -> Self {
        self.at = at;
        self
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    /// Equality on kind and arguments only.
    pub fn same_action(&self, other: &ActionInstance) -> bool {
        self.kind == other.kind && self.args == other.args
    }

    /// True when this is a `kind` action whose arguments start with `prefix`.
    pub fn matches(&self, kind: &str, prefix: &[Term]) -> bool {
        self.kind == kind && self.args.len() >= prefix.len() && self.args[..prefix.len()] == *prefix
    }

    pub(crate) fn write_canonical(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&(self.kind.len() as u64).to_be_bytes());
        out.extend_from_slice(self.kind.as_bytes());
        out.extend_from_slice(&(self.args.len() as u64).to_be_bytes());
        for a in &self.args {
            a.write_canonical(out);
        }
    }
}

impl fmt::Display for ActionInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_atom(f, &self.kind, &self.args)
    }
}
