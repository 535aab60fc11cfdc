//! Query formulas over fluents, with a small text syntax.
//!
//! ```text
//! expr    := conj ('|' conj)*
//! conj    := unary ('&' unary)*
//! unary   := '-' unary | '(' expr ')' | 'true' | 'some' '(' Var ',' expr ')'
//!          | term op term | name ['(' term (',' term)* ')']
//! op      := '=' | '!=' | '<' | '<=' | '>' | '>='
//! term    := Var | symbol | 'quoted symbol' | "string" | integer
//! ```
//!
//! Variables start with an uppercase letter or `_`. Printing is canonical:
//! `parse(q.to_string()) == q` for every well-formed query.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::Error;
use crate::term::{Bindings, FluentInstance, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    /// Compare two ground terms. Integers compare numerically; everything
    /// else by the canonical term ordering.
    pub fn eval(self, left: &Term, right: &Term) -> bool {
        let ord = match (left, right) {
            (Term::Int(a), Term::Int(b)) => a.cmp(b),
            (a, b) => a.cmp(b),
        };
        match self {
            CmpOp::Eq => ord == Ordering::Equal,
            CmpOp::Ne => ord != Ordering::Equal,
            CmpOp::Lt => ord == Ordering::Less,
            CmpOp::Le => ord != Ordering::Greater,
            CmpOp::Gt => ord == Ordering::Greater,
            CmpOp::Ge => ord != Ordering::Less,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Query {
    True,
    Atom(FluentInstance),
    And(Box<Query>, Box<Query>),
    Or(Box<Query>, Box<Query>),
    Not(Box<Query>),
    Some(String, Box<Query>),
    Cmp(Term, CmpOp, Term),
}

impl Query {
    pub fn atom(kind: impl Into<String>, args: Vec<Term>) -> Self {
        Query::Atom(FluentInstance::new(kind, args))
    }

    pub fn and(self, other: Query) -> Self {
        Query::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Query) -> Self {
        Query::Or(Box::new(self), Box::new(other))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        Query::Not(Box::new(self))
    }

    pub fn some(var: impl Into<String>, body: Query) -> Self {
        Query::Some(var.into(), Box::new(body))
    }

    pub fn cmp(left: Term, op: CmpOp, right: Term) -> Self {
        Query::Cmp(left, op, right)
    }

    /// Free variables, excluding those bound by `some`.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let mut term = |t: &Term, bound: &Vec<String>| {
            if let Term::Var(v) = t {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
        };
        match self {
            Query::True => {}
            Query::Atom(f) => f.args.iter().for_each(|t| term(t, bound)),
            Query::Cmp(l, _, r) => {
                term(l, bound);
                term(r, bound);
            }
            Query::And(a, b) | Query::Or(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Query::Not(e) => e.collect_free(bound, out),
            Query::Some(v, e) => {
                bound.push(v.clone());
                e.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// True when no free variable remains once `bindings` is applied.
    pub fn is_closed_under(&self, bindings: &Bindings) -> bool {
        self.free_vars().iter().all(|v| bindings.contains_key(v))
    }

    /// Fluent kinds referenced anywhere in the query.
    pub fn kinds(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        let mut stack = vec![self];
        while let Some(q) = stack.pop() {
            match q {
                Query::Atom(f) => {
                    out.insert(f.kind.as_str());
                }
                Query::And(a, b) | Query::Or(a, b) => {
                    stack.push(a);
                    stack.push(b);
                }
                Query::Not(e) | Query::Some(_, e) => stack.push(e),
                Query::True | Query::Cmp(..) => {}
            }
        }
        out
    }

    /// Apply bindings to every free occurrence.
    pub fn substitute(&self, bindings: &Bindings) -> Query {
        match self {
            Query::True => Query::True,
            Query::Atom(f) => Query::Atom(f.substitute(bindings)),
            Query::Cmp(l, op, r) => Query::Cmp(l.substitute(bindings), *op, r.substitute(bindings)),
            Query::And(a, b) => a.substitute(bindings).and(b.substitute(bindings)),
            Query::Or(a, b) => a.substitute(bindings).or(b.substitute(bindings)),
            Query::Not(e) => e.substitute(bindings).not(),
            Query::Some(v, e) => {
                let mut inner = bindings.clone();
                inner.remove(v);
                Query::some(v.clone(), e.substitute(&inner))
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Query::Or(..) => 1,
            Query::And(..) => 2,
            _ => 3,
        }
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, q: &Query, min: u8) -> fmt::Result {
    if q.precedence() < min {
        write!(f, "({q})")
    } else {
        write!(f, "{q}")
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Query::True => write!(f, "true"),
            Query::Atom(a) => write!(f, "{a}"),
            Query::Cmp(l, op, r) => write!(f, "{l} {} {r}", op.symbol()),
            Query::And(a, b) => {
                write_child(f, a, 2)?;
                write!(f, " & ")?;
                write_child(f, b, 3)
            }
            Query::Or(a, b) => {
                write_child(f, a, 1)?;
                write!(f, " | ")?;
                write_child(f, b, 2)
            }
            Query::Not(e) => match **e {
                Query::Cmp(..) => write!(f, "-({e})"),
                _ => {
                    write!(f, "-")?;
                    write_child(f, e, 3)
                }
            },
            Query::Some(v, e) => write!(f, "some({v}, {e})"),
        }
    }
}

impl FromStr for Query {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let tokens = lex(s)?;
        let mut p = Parser { tokens, pos: 0, len: s.len() };
        let q = p.expr()?;
        match p.peek() {
            None => Ok(q),
            Some((off, t)) => Err(syntax(*off, format!("unexpected {t:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Var(String),
    Quoted(String),
    Str(String),
    Int(i64),
    LParen,
    RParen,
    Comma,
    Amp,
    Bar,
    Minus,
    Op(CmpOp),
}

fn syntax(offset: usize, message: impl Into<String>) -> Error {
    Error::Syntax { offset, message: message.into() }
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, Error> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (off, c) = chars[i];
        match c {
            c if c.is_whitespace() => {
                i += 1;
            }
            '(' | ')' | ',' | '&' | '|' => {
                out.push((
                    off,
                    match c {
                        '(' => Tok::LParen,
                        ')' => Tok::RParen,
                        ',' => Tok::Comma,
                        '&' => Tok::Amp,
                        _ => Tok::Bar,
                    },
                ));
                i += 1;
            }
            '-' => {
                let neg_int = chars.get(i + 1).is_some_and(|(_, d)| d.is_ascii_digit());
                if neg_int {
                    let (n, next) = lex_int(&chars, i + 1, src)?;
                    out.push((off, Tok::Int(-n)));
                    i = next;
                } else {
                    out.push((off, Tok::Minus));
                    i += 1;
                }
            }
            '=' => {
                out.push((off, Tok::Op(CmpOp::Eq)));
                i += 1;
            }
            '!' | '<' | '>' => {
                let eq_next = chars.get(i + 1).is_some_and(|(_, d)| *d == '=');
                let op = match (c, eq_next) {
                    ('!', true) => CmpOp::Ne,
                    ('<', true) => CmpOp::Le,
                    ('>', true) => CmpOp::Ge,
                    ('<', false) => CmpOp::Lt,
                    ('>', false) => CmpOp::Gt,
                    _ => return Err(syntax(off, "expected `!=`")),
                };
                out.push((off, Tok::Op(op)));
                i += if eq_next { 2 } else { 1 };
            }
            '\'' | '"' => {
                let mut text = String::new();
                let mut j = i + 1;
                loop {
                    let Some(&(_, d)) = chars.get(j) else {
                        return Err(syntax(off, "unterminated quote"));
                    };
                    j += 1;
                    if d == c {
                        break;
                    }
                    if d == '\\' {
                        let Some(&(_, e)) = chars.get(j) else {
                            return Err(syntax(off, "unterminated escape"));
                        };
                        j += 1;
                        text.push(match e {
                            'n' => '\n',
                            't' => '\t',
                            other => other,
                        });
                    } else {
                        text.push(d);
                    }
                }
                if c == '\'' {
                    if text.is_empty() {
                        return Err(syntax(off, "empty symbol"));
                    }
                    out.push((off, Tok::Quoted(text)));
                } else {
                    out.push((off, Tok::Str(text)));
                }
                i = j;
            }
            c if c.is_ascii_digit() => {
                let (n, next) = lex_int(&chars, i, src)?;
                out.push((off, Tok::Int(n)));
                i = next;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i;
                while chars.get(j).is_some_and(|(_, d)| d.is_ascii_alphanumeric() || *d == '_') {
                    j += 1;
                }
                let end = chars.get(j).map_or(src.len(), |(o, _)| *o);
                let word = src[off..end].to_owned();
                out.push((off, if c.is_ascii_uppercase() || c == '_' { Tok::Var(word) } else { Tok::Ident(word) }));
                i = j;
            }
            other => return Err(syntax(off, format!("unexpected character {other:?}"))),
        }
    }
    Ok(out)
}

fn lex_int(chars: &[(usize, char)], start: usize, src: &str) -> Result<(i64, usize), Error> {
    let mut j = start;
    while chars.get(j).is_some_and(|(_, d)| d.is_ascii_digit()) {
        j += 1;
    }
    let from = chars[start].0;
    let to = chars.get(j).map_or(src.len(), |(o, _)| *o);
    let n = src[from..to].parse().map_err(|_| syntax(from, "integer out of range"))?;
    Ok((n, j))
}

struct Parser {
    tokens: Vec<(usize, Tok)>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&(usize, Tok)> {
        self.tokens.get(self.pos)
    }

    fn peek_tok(&self) -> Option<&Tok> {
        self.peek().map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.peek().map_or(self.len, |(o, _)| *o)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), Error> {
        let off = self.offset();
        match self.bump() {
            Some(t) if t == want => Ok(()),
            other => Err(syntax(off, format!("expected {want:?}, found {other:?}"))),
        }
    }

    fn expr(&mut self) -> Result<Query, Error> {
        let mut q = self.conj()?;
        while self.peek_tok() == Some(&Tok::Bar) {
            self.bump();
            q = q.or(self.conj()?);
        }
        Ok(q)
    }

    fn conj(&mut self) -> Result<Query, Error> {
        let mut q = self.unary()?;
        while self.peek_tok() == Some(&Tok::Amp) {
            self.bump();
            q = q.and(self.unary()?);
        }
        Ok(q)
    }

    fn unary(&mut self) -> Result<Query, Error> {
        let off = self.offset();
        match self.peek_tok().cloned() {
            Some(Tok::Minus) => {
                self.bump();
                Ok(self.unary()?.not())
            }
            Some(Tok::LParen) => {
                self.bump();
                let q = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(q)
            }
            Some(Tok::Ident(name)) => {
                let next = self.tokens.get(self.pos + 1).map(|(_, t)| t);
                if name == "true" && next != Some(&Tok::LParen) && !matches!(next, Some(Tok::Op(_))) {
                    self.bump();
                    return Ok(Query::True);
                }
                if name == "some" && next == Some(&Tok::LParen) {
                    self.bump();
                    self.bump();
                    let voff = self.offset();
                    let var = match self.bump() {
                        Some(Tok::Var(v)) => v,
                        other => return Err(syntax(voff, format!("expected variable, found {other:?}"))),
                    };
                    self.expect(Tok::Comma)?;
                    let body = self.expr()?;
                    self.expect(Tok::RParen)?;
                    return Ok(Query::some(var, body));
                }
                match next {
                    Some(Tok::LParen) => {
                        self.bump();
                        self.bump();
                        let mut args = vec![self.term()?];
                        while self.peek_tok() == Some(&Tok::Comma) {
                            self.bump();
                            args.push(self.term()?);
                        }
                        self.expect(Tok::RParen)?;
                        Ok(Query::atom(name, args))
                    }
                    Some(Tok::Op(_)) => self.comparison(),
                    _ => {
                        self.bump();
                        Ok(Query::atom(name, vec![]))
                    }
                }
            }
            Some(Tok::Var(_) | Tok::Quoted(_) | Tok::Str(_) | Tok::Int(_)) => self.comparison(),
            other => Err(syntax(off, format!("expected a formula, found {other:?}"))),
        }
    }

    fn comparison(&mut self) -> Result<Query, Error> {
        let left = self.term()?;
        let off = self.offset();
        let op = match self.bump() {
            Some(Tok::Op(op)) => op,
            other => return Err(syntax(off, format!("expected comparison operator, found {other:?}"))),
        };
        let right = self.term()?;
        Ok(Query::cmp(left, op, right))
    }

    fn term(&mut self) -> Result<Term, Error> {
        let off = self.offset();
        match self.bump() {
            Some(Tok::Var(v)) => Ok(Term::Var(v)),
            Some(Tok::Ident(s)) | Some(Tok::Quoted(s)) => Ok(Term::Sym(s)),
            Some(Tok::Str(s)) => Ok(Term::Str(s)),
            Some(Tok::Int(n)) => Ok(Term::Int(n)),
            other => Err(syntax(off, format!("expected a term, found {other:?}"))),
        }
    }
}
