//! Initial knowledge providers and the triple file format.
//!
//! One triple per line: three whitespace-separated fields. A field is an
//! integer, a `"double quoted"` string, a `'single quoted'` symbol, or a bare
//! symbol. `#` starts a comment outside quotes; blank lines are ignored.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use sitcalc::{Protocol, Term};

use crate::triple::{Triple, TriplePattern};

/// Knowledge true in the initial situation. Conformers are registered under
/// the `s0` protocol and enumerated by the `initial_assertion` fluent.
pub trait InitialKnowledge: Send + Sync {
    /// Ground triples matching `pattern`, in canonical order.
    fn asserted_in_s0(&self, pattern: &TriplePattern) -> Vec<Triple>;
}

impl Protocol for dyn InitialKnowledge {
    const NAME: &'static str = "s0";
}

/// An immutable in-memory triple set.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TripleSet {
    triples: BTreeSet<Triple>,
}

impl TripleSet {
    pub fn new(triples: impl IntoIterator<Item = Triple>) -> Self {
        Self { triples: triples.into_iter().collect() }
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Triple> {
        self.triples.iter()
    }

    pub fn contains(&self, t: &Triple) -> bool {
        self.triples.contains(t)
    }
}

impl InitialKnowledge for TripleSet {
    fn asserted_in_s0(&self, pattern: &TriplePattern) -> Vec<Triple> {
        self.triples.iter().filter(|t| pattern.matches(t)).cloned().collect()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum KbError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Reads a triple file into a provider.
pub fn load_initial_kb(path: impl AsRef<Path>) -> Result<TripleSet, KbError> {
    let text = std::fs::read_to_string(path)?;
    parse_triples(&text)
}

pub fn parse_triples(text: &str) -> Result<TripleSet, KbError> {
    let mut out = BTreeSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |message: String| KbError::Parse { line, message };
        let fields = split_fields(raw).map_err(err)?;
        if fields.is_empty() {
            continue;
        }
        if fields.len() != 3 {
            return Err(err(format!("expected 3 fields, found {}", fields.len())));
        }
        let mut it = fields.into_iter();
        let (s, p, o) = (it.next().unwrap(), it.next().unwrap(), it.next().unwrap());
        let (Term::Sym(s), Term::Sym(p)) = (s, p) else {
            return Err(err("subject and predicate must be symbols".into()));
        };
        out.insert(Triple::new(s, p, o).map_err(|e| err(e.to_string()))?);
    }
    Ok(TripleSet { triples: out })
}

fn split_fields(line: &str) -> Result<Vec<Term>, String> {
    let chars: Vec<char> = line.chars().collect();
    let mut fields = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '#' {
            break;
        }
        if c == '"' || c == '\'' {
            let mut text = String::new();
            i += 1;
            loop {
                let Some(&d) = chars.get(i) else {
                    return Err("unterminated quote".into());
                };
                i += 1;
                if d == c {
                    break;
                }
                if d == '\\' {
                    let Some(&e) = chars.get(i) else {
                        return Err("unterminated escape".into());
                    };
                    i += 1;
                    text.push(match e {
                        'n' => '\n',
                        't' => '\t',
                        other => other,
                    });
                } else {
                    text.push(d);
                }
            }
            if chars.get(i).is_some_and(|d| !d.is_whitespace() && *d != '#') {
                return Err("quoted field must be followed by whitespace".into());
            }
            fields.push(if c == '"' { Term::Str(text) } else { Term::Sym(text) });
            continue;
        }
        let start = i;
        while i < chars.len() && !chars[i].is_whitespace() && chars[i] != '#' {
            if chars[i] == '"' || chars[i] == '\'' {
                return Err("quote inside bare field".into());
            }
            i += 1;
        }
        let word: String = chars[start..i].iter().collect();
        fields.push(match word.parse::<i64>() {
            Ok(n) => Term::Int(n),
            Err(_) => Term::Sym(word),
        });
    }
    Ok(fields)
}

fn needs_quotes(s: &str) -> bool {
    s.is_empty()
        || s.parse::<i64>().is_ok()
        || s.chars().any(|c| c.is_whitespace() || c == '#' || c == '"' || c == '\'' || c == '\\')
}

fn write_field(out: &mut String, t: &Term) {
    let quoted = |out: &mut String, s: &str, q: char| {
        out.push(q);
        for c in s.chars() {
            match c {
                '\\' => out.push_str("\\\\"),
                '\n' => out.push_str("\\n"),
                '\t' => out.push_str("\\t"),
                c if c == q => {
                    out.push('\\');
                    out.push(c);
                }
                c => out.push(c),
            }
        }
        out.push(q);
    };
    match t {
        Term::Int(n) => {
            let _ = write!(out, "{n}");
        }
        Term::Sym(s) if !needs_quotes(s) => out.push_str(s),
        Term::Sym(s) => quoted(out, s, '\''),
        Term::Str(s) => quoted(out, s, '"'),
        Term::Var(v) => out.push_str(v),
    }
}

/// Serializes triples in the file format, one per line, canonical order.
pub fn write_triples<'a>(triples: impl IntoIterator<Item = &'a Triple>) -> String {
    let sorted: BTreeSet<&Triple> = triples.into_iter().collect();
    let mut out = String::new();
    for t in sorted {
        write_field(&mut out, &Term::Sym(t.subject.clone()));
        out.push(' ');
        write_field(&mut out, &Term::Sym(t.predicate.clone()));
        out.push(' ');
        write_field(&mut out, &t.object);
        out.push('\n');
    }
    out
}
