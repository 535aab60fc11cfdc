//! Situation terms: `initial(kb)` or `do(action, prior)`.
//!
//! Situations are persistent linked histories sharing their prefixes. Each
//! node carries a SHA-256 digest over the kb id and the (kind, args) of every
//! action, so two situations have equal digests exactly when their histories
//! are equal modulo actor/timestamp metadata.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use sha2::{Digest as _, Sha256};

use crate::term::ActionInstance;

/// Structural digest of a situation.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Digest([u8; 32]);

impl Digest {
    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }
}

impl fmt::Display for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.0 {
            write!(f, "{b:02x}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digest({self})")
    }
}

enum Step {
    Initial(String),
    Do(ActionInstance),
}

struct Node {
    step: Step,
    prior: Option<Situation>,
    digest: Digest,
    depth: usize,
}

// Long histories would otherwise drop recursively, one stack frame per action.
impl Drop for Node {
    fn drop(&mut self) {
        let mut next = self.prior.take();
        while let Some(s) = next {
            match Arc::try_unwrap(s.0) {
                Ok(mut node) => next = node.prior.take(),
                Err(_) => break,
            }
        }
    }
}

/// A ground situation term.
#[derive(Clone)]
pub struct Situation(Arc<Node>);

impl Situation {
    /// The initial situation of the named initial-knowledge provider.
    pub fn initial(kb: impl Into<String>) -> Self {
        let kb = kb.into();
        let mut h = Sha256::new();
        h.update(b"initial\0");
        h.update(kb.as_bytes());
        Situation(Arc::new(Node {
            digest: Digest(h.finalize().into()),
            step: Step::Initial(kb),
            prior: None,
            depth: 0,
        }))
    }

    /// Builds `do(action, self)` without consulting any precondition.
    ///
    /// Use [`Reasoner::do_action`](crate::Reasoner::do_action) for legal
    /// progression; this constructor exists for replay tooling and for
    /// building arbitrary terms in property tests.
    pub fn extend_unchecked(&self, action: ActionInstance) -> Situation {
        let mut buf = Vec::with_capacity(64);
        action.write_canonical(&mut buf);
        let mut h = Sha256::new();
        h.update(b"do\0");
        h.update(self.0.digest.0);
        h.update(&buf);
        Situation(Arc::new(Node {
            digest: Digest(h.finalize().into()),
            step: Step::Do(action),
            prior: Some(self.clone()),
            depth: self.0.depth + 1,
        }))
    }

    pub fn digest(&self) -> Digest {
        self.0.digest
    }

    /// Number of `do` layers.
    pub fn depth(&self) -> usize {
        self.0.depth
    }

    pub fn is_initial(&self) -> bool {
        self.0.prior.is_none()
    }

    /// The last action, if any.
    pub fn last_action(&self) -> Option<&ActionInstance> {
        match &self.0.step {
            Step::Do(a) => Some(a),
            Step::Initial(_) => None,
        }
    }

    pub fn prior(&self) -> Option<&Situation> {
        self.0.prior.as_ref()
    }

    /// Id of the initial-knowledge provider at the root of this history.
    pub fn kb(&self) -> &str {
        let mut cur = self;
        while let Some(p) = cur.prior() {
            cur = p;
        }
        match &cur.0.step {
            Step::Initial(kb) => kb,
            Step::Do(_) => unreachable!("root of a history is always initial"),
        }
    }

    /// Iterates from the most recent action back to the initial situation,
    /// yielding every situation on the way (including `self`).
    pub fn ancestry(&self) -> Ancestry<'_> {
        Ancestry { next: Some(self) }
    }

    /// Actions in chronological order.
    pub fn actions(&self) -> Vec<&ActionInstance> {
        let mut out: Vec<&ActionInstance> = self.ancestry().filter_map(Situation::last_action).collect();
        out.reverse();
        out
    }

    /// Every prefix of this history, oldest first, ending with `self`.
    pub fn prefixes(&self) -> Vec<Situation> {
        let mut out: Vec<Situation> = self.ancestry().cloned().collect();
        out.reverse();
        out
    }

    pub fn ptr_eq(&self, other: &Situation) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

pub struct Ancestry<'a> {
    next: Option<&'a Situation>,
}

impl<'a> Iterator for Ancestry<'a> {
    type Item = &'a Situation;

    fn next(&mut self) -> Option<Self::Item> {
        let cur = self.next?;
        self.next = cur.prior();
        Some(cur)
    }
}

/// Structural equality: same kb and same (kind, args) history.
impl PartialEq for Situation {
    fn eq(&self, other: &Self) -> bool {
        let (mut a, mut b) = (self, other);
        loop {
            if a.ptr_eq(b) {
                return true;
            }
            if a.0.digest != b.0.digest || a.0.depth != b.0.depth {
                return false;
            }
            match (&a.0.step, &b.0.step) {
                (Step::Initial(x), Step::Initial(y)) => return x == y,
                (Step::Do(x), Step::Do(y)) if x.same_action(y) => {}
                _ => return false,
            }
            match (a.prior(), b.prior()) {
                (Some(pa), Some(pb)) => {
                    a = pa;
                    b = pb;
                }
                _ => return false,
            }
        }
    }
}

impl Eq for Situation {}

impl Hash for Situation {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write(&self.0.digest.0[..16]);
    }
}

impl fmt::Display for Situation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let actions = self.actions();
        for a in actions.iter().rev() {
            write!(f, "do({a}, ")?;
        }
        write!(f, "initial({})", self.kb())?;
        for _ in 0..actions.len() {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Situation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Situation(depth={}, digest={})", self.depth(), self.digest())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::Term;
    use crate::time::Timestamp;

    fn act(kind: &str, arg: &str) -> ActionInstance {
        ActionInstance::new(kind, vec![Term::sym(arg)])
    }

    #[test]
    fn digest_ignores_metadata() {
        let s0 = Situation::initial("kb");
        let a = s0.extend_unchecked(act("nudge", "x").by("alice"));
        let b = s0.extend_unchecked(act("nudge", "x").at(Timestamp::from_millis(99)));
        assert_eq!(a.digest(), b.digest());
        assert_eq!(a, b);
    }

    #[test]
    fn digest_distinguishes_kb_order_and_args() {
        let a = Situation::initial("kb");
        let b = Situation::initial("other");
        assert_ne!(a.digest(), b.digest());
        let ab = a.extend_unchecked(act("p", "1")).extend_unchecked(act("q", "1"));
        let ba = a.extend_unchecked(act("q", "1")).extend_unchecked(act("p", "1"));
        assert_ne!(ab.digest(), ba.digest());
        assert_ne!(ab, ba);
        // an independently rebuilt history is equal but not pointer-equal
        let ab2 = Situation::initial("kb").extend_unchecked(act("p", "1")).extend_unchecked(act("q", "1"));
        assert!(!ab.ptr_eq(&ab2));
        assert_eq!(ab, ab2);
    }

    #[test]
    fn unwinding_terminates_at_initial() {
        let mut s = Situation::initial("k");
        for i in 0..10 {
            s = s.extend_unchecked(act("a", &format!("x{i}")));
        }
        assert_eq!(s.depth(), 10);
        assert_eq!(s.ancestry().count(), 11);
        assert_eq!(s.kb(), "k");
        assert_eq!(s.actions().len(), 10);
        assert_eq!(s.actions()[0].args[0], Term::sym("x0"));
        assert!(s.ancestry().last().unwrap().is_initial());
    }

    #[test]
    fn display_nests_do_terms() {
        let s = Situation::initial("k").extend_unchecked(act("a", "x")).extend_unchecked(act("b", "y"));
        assert_eq!(s.to_string(), "do(b(y), do(a(x), initial(k)))");
    }

    #[test]
    fn dropping_a_long_history_does_not_overflow() {
        let mut s = Situation::initial("k");
        for _ in 0..200_000 {
            s = s.extend_unchecked(act("a", "x"));
        }
        drop(s);
    }
}
