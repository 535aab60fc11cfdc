//! `do`, `poss`, `holds`, `solve` and the two situation representations.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::cache::{CacheStats, HoldsCache};
use crate::error::{Error, Result};
use crate::kind::{ActionKind, FluentKind, Verdict};
use crate::query::Query;
use crate::registry::Registry;
use crate::situation::Situation;
use crate::term::{ActionInstance, Bindings, FluentInstance, Term};

/// Depth interval of tabled ancestors on a cold `holds` walk.
const CHECKPOINT: usize = 16;

/// Evaluates situations against a frozen [`Registry`].
pub struct Reasoner {
    registry: Arc<Registry>,
    cache: Option<HoldsCache>,
}

impl Reasoner {
    /// A reasoner with memoized `holds`.
    pub fn new(registry: Arc<Registry>) -> Self {
        Self { registry, cache: Some(HoldsCache::new()) }
    }

    /// A reasoner that recomputes every `holds` by full regression.
    pub fn uncached(registry: Arc<Registry>) -> Self {
        Self { registry, cache: None }
    }

    pub fn registry(&self) -> &Arc<Registry> {
        &self.registry
    }

    pub fn is_cached(&self) -> bool {
        self.cache.is_some()
    }

    pub fn clear_cache(&self) {
        if let Some(c) = &self.cache {
            c.clear();
        }
    }

    pub fn cache_stats(&self) -> CacheStats {
        self.cache.as_ref().map(HoldsCache::stats).unwrap_or_default()
    }

    fn action_kind(&self, a: &ActionInstance) -> Result<&Arc<dyn ActionKind>> {
        let kind = self.registry.action(&a.kind)?;
        if kind.arity() != a.args.len() {
            return Err(Error::Arity { kind: a.kind.clone(), expected: kind.arity(), got: a.args.len() });
        }
        if !a.is_ground() {
            return Err(Error::NonGround(a.to_string()));
        }
        Ok(kind)
    }

    fn fluent_kind(&self, f: &FluentInstance) -> Result<&Arc<dyn FluentKind>> {
        let kind = self.registry.fluent(&f.kind)?;
        if kind.arity() != f.args.len() {
            return Err(Error::Arity { kind: f.kind.clone(), expected: kind.arity(), got: f.args.len() });
        }
        Ok(kind)
    }

    /// Possibility check with the kind's reason code on failure.
    pub fn verdict(&self, a: &ActionInstance, s: &Situation) -> Result<Verdict> {
        self.action_kind(a)?.poss(&a.args, s, self)
    }

    pub fn poss(&self, a: &ActionInstance, s: &Situation) -> Result<bool> {
        Ok(self.verdict(a, s)?.is_possible())
    }

    /// `do(a, s)`, refusing actions whose precondition fails.
    pub fn do_action(&self, a: ActionInstance, s: &Situation) -> Result<Situation> {
        match self.verdict(&a, s)? {
            Verdict::Possible => Ok(s.extend_unchecked(a)),
            Verdict::Impossible(reason) => {
                Err(Error::NotPossible { action: a.to_string(), situation: s.digest(), reason })
            }
        }
    }

    /// Truth of a ground fluent, by regression over the history.
    pub fn holds(&self, f: &FluentInstance, s: &Situation) -> Result<bool> {
        let kind = self.fluent_kind(f)?;
        if !f.is_ground() {
            return Err(Error::NonGround(f.to_string()));
        }
        Ok(self.regress(kind.as_ref(), f, s))
    }

    fn regress(&self, kind: &dyn FluentKind, f: &FluentInstance, s: &Situation) -> bool {
        let reg = &*self.registry;
        let Some(cache) = &self.cache else {
            let mut chain = Vec::with_capacity(s.depth());
            let mut cur = s;
            while let (Some(a), Some(p)) = (cur.last_action(), cur.prior()) {
                chain.push(a);
                cur = p;
            }
            let mut value = kind.initially(&f.args, cur.kb(), reg);
            for a in chain.into_iter().rev() {
                value = kind.successor(&f.args, a, value, reg);
            }
            return value;
        };

        // Walk back to the nearest memoized ancestor, then replay forward,
        // tabling the queried situation and every CHECKPOINT-th depth.
        let (hit, passed) = cache.nearest(f, s);
        let mut value = match hit {
            Some(v) => v,
            None => kind.initially(&f.args, passed.last().expect("walk passes the root").kb(), reg),
        };
        let mut entries = Vec::with_capacity(passed.len());
        for node in passed.into_iter().rev() {
            if let Some(a) = node.last_action() {
                value = kind.successor(&f.args, a, value, reg);
            }
            if node.depth() % CHECKPOINT == 0 || node.ptr_eq(s) {
                entries.push((node.clone(), value));
            }
        }
        cache.insert_all(f, entries);
        value
    }

    /// Every binding of the query's free variables under which it holds in
    /// `s`, deduplicated and in canonical order.
    pub fn solve(&self, q: &Query, s: &Situation) -> Result<Vec<Bindings>> {
        let mut out = Vec::new();
        self.eval(q, s, &Bindings::new(), &mut out)?;
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// True when the query has at least one solution.
    pub fn entails(&self, q: &Query, s: &Situation) -> Result<bool> {
        Ok(!self.solve(q, s)?.is_empty())
    }

    fn eval(&self, q: &Query, s: &Situation, b: &Bindings, out: &mut Vec<Bindings>) -> Result<()> {
        match q {
            Query::True => out.push(b.clone()),
            Query::Atom(f) => {
                let kind = self.fluent_kind(f)?;
                let pattern = f.substitute(b);
                if pattern.is_ground() {
                    if self.regress(kind.as_ref(), &pattern, s) {
                        out.push(b.clone());
                    }
                    return Ok(());
                }
                let candidates: BTreeSet<Vec<Term>> = kind.candidates(s, &self.registry).into_iter().collect();
                for args in candidates {
                    let Some(extended) = unify(&pattern.args, &args, b) else {
                        continue;
                    };
                    let ground = FluentInstance { kind: f.kind.clone(), args };
                    if self.regress(kind.as_ref(), &ground, s) {
                        out.push(extended);
                    }
                }
            }
            Query::And(l, r) => {
                let mut left = Vec::new();
                self.eval(l, s, b, &mut left)?;
                for lb in &left {
                    self.eval(r, s, lb, out)?;
                }
            }
            Query::Or(l, r) => {
                self.eval(l, s, b, out)?;
                self.eval(r, s, b, out)?;
            }
            Query::Not(e) => {
                if !e.is_closed_under(b) {
                    return Err(Error::UnboundNegation(e.substitute(b).to_string()));
                }
                let mut inner = Vec::new();
                self.eval(e, s, b, &mut inner)?;
                if inner.is_empty() {
                    out.push(b.clone());
                }
            }
            Query::Some(v, e) => {
                let mut scoped = b.clone();
                let shadowed = scoped.remove(v);
                let mut inner = Vec::new();
                self.eval(e, s, &scoped, &mut inner)?;
                for mut r in inner {
                    r.remove(v);
                    if let Some(old) = &shadowed {
                        r.insert(v.clone(), old.clone());
                    }
                    out.push(r);
                }
            }
            Query::Cmp(l, op, r) => {
                let (l, r) = (l.substitute(b), r.substitute(b));
                if !l.is_ground() || !r.is_ground() {
                    return Err(Error::UnboundNegation(Query::Cmp(l, *op, r).to_string()));
                }
                if op.eval(&l, &r) {
                    out.push(b.clone());
                }
            }
        }
        Ok(())
    }

    /// Ground fluents holding in `s`, optionally restricted to one kind.
    /// An unknown kind filter yields the empty set.
    pub fn holding_fluents(&self, s: &Situation, kind_filter: Option<&str>) -> Result<BTreeSet<FluentInstance>> {
        let mut out = BTreeSet::new();
        for kind in self.registry.fluent_kinds() {
            if kind_filter.is_some_and(|k| k != kind.name()) {
                continue;
            }
            let candidates: BTreeSet<Vec<Term>> = kind.candidates(s, &self.registry).into_iter().collect();
            for args in candidates {
                let f = FluentInstance { kind: kind.name().to_owned(), args };
                if self.regress(kind.as_ref(), &f, s) {
                    out.insert(f);
                }
            }
        }
        Ok(out)
    }

    /// Progresses the history forward into an explicit fluent set.
    ///
    /// The universe of instances is every kind's candidate set for `s`; the
    /// set starts from `initially` and each action is applied eagerly.
    pub fn progress(&self, s: &Situation) -> Result<StateSnapshot> {
        let reg = &*self.registry;
        let mut universe: Vec<(&Arc<dyn FluentKind>, FluentInstance)> = Vec::new();
        for kind in reg.fluent_kinds() {
            let candidates: BTreeSet<Vec<Term>> = kind.candidates(s, reg).into_iter().collect();
            universe.extend(candidates.into_iter().map(|args| (kind, FluentInstance::new(kind.name(), args))));
        }
        let kb = s.kb();
        let mut state: BTreeSet<FluentInstance> = universe
            .iter()
            .filter(|(k, f)| k.initially(&f.args, kb, reg))
            .map(|(_, f)| f.clone())
            .collect();
        for a in s.actions() {
            state = universe
                .iter()
                .filter(|(k, f)| k.successor(&f.args, a, state.contains(f), reg))
                .map(|(_, f)| f.clone())
                .collect();
        }
        Ok(StateSnapshot { fluents: state })
    }
}

/// Binds the variables of `pattern` against the ground `args`, extending `b`.
fn unify(pattern: &[Term], args: &[Term], b: &Bindings) -> Option<Bindings> {
    if pattern.len() != args.len() {
        return None;
    }
    let mut out = b.clone();
    for (p, a) in pattern.iter().zip(args) {
        match p {
            Term::Var(v) => match out.get(v) {
                Some(bound) if bound != a => return None,
                Some(_) => {}
                None => {
                    out.insert(v.clone(), a.clone());
                }
            },
            ground if ground != a => return None,
            _ => {}
        }
    }
    Some(out)
}

/// A situation represented as the explicit set of ground fluents holding in it.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StateSnapshot {
    fluents: BTreeSet<FluentInstance>,
}

impl StateSnapshot {
    pub fn holds(&self, f: &FluentInstance) -> bool {
        self.fluents.contains(f)
    }

    pub fn fluents(&self) -> &BTreeSet<FluentInstance> {
        &self.fluents
    }

    pub fn into_fluents(self) -> BTreeSet<FluentInstance> {
        self.fluents
    }

    pub fn len(&self) -> usize {
        self.fluents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fluents.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unify_checks_repeated_variables() {
        let p = vec![Term::var("X"), Term::var("X")];
        assert!(unify(&p, &[Term::sym("a"), Term::sym("a")], &Bindings::new()).is_some());
        assert!(unify(&p, &[Term::sym("a"), Term::sym("b")], &Bindings::new()).is_none());
        assert!(unify(&p, &[Term::sym("a")], &Bindings::new()).is_none());
        let mut b = Bindings::new();
        b.insert("Y".into(), Term::Int(1));
        let got = unify(&[Term::var("X"), Term::sym("k")], &[Term::Int(2), Term::sym("k")], &b).unwrap();
        assert_eq!(got.len(), 2);
        assert_eq!(got["X"], Term::Int(2));
    }
}
