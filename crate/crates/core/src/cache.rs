use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::RwLock;

use crate::situation::Situation;
use crate::term::FluentInstance;

/// Memo table for ground `holds` results, keyed by fluent and then situation.
///
/// Situations hash by digest and compare structurally, so a replayed history
/// hits the entries computed for the original. Concurrent inserts of the same
/// key always carry the same value.
#[derive(Default)]
pub struct HoldsCache {
    table: RwLock<HashMap<FluentInstance, HashMap<Situation, bool>>>,
    hits: AtomicU64,
    misses: AtomicU64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CacheStats {
    pub entries: usize,
    pub hits: u64,
    pub misses: u64,
}

impl HoldsCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, fluent: &FluentInstance, s: &Situation) -> Option<bool> {
        let found = self.table.read().unwrap_or_else(|e| e.into_inner()).get(fluent).and_then(|m| m.get(s)).copied();
        let counter = if found.is_some() { &self.hits } else { &self.misses };
        counter.fetch_add(1, Ordering::Relaxed);
        found
    }

    /// Walks back from `s` to the nearest situation with a tabled value for
    /// `fluent`. Returns that value, or `None` when the walk reached the
    /// initial situation, and the situations passed on the way, `s` first
    /// (the initial situation included when there was no hit).
    pub fn nearest<'s>(&self, fluent: &FluentInstance, s: &'s Situation) -> (Option<bool>, Vec<&'s Situation>) {
        let table = self.table.read().unwrap_or_else(|e| e.into_inner());
        let known = table.get(fluent);
        let mut passed = Vec::new();
        let mut cur = s;
        let value = loop {
            if let Some(v) = known.and_then(|m| m.get(cur)) {
                break Some(*v);
            }
            passed.push(cur);
            match cur.prior() {
                Some(p) => cur = p,
                None => break None,
            }
        };
        self.misses.fetch_add(passed.len() as u64, Ordering::Relaxed);
        if value.is_some() {
            self.hits.fetch_add(1, Ordering::Relaxed);
        }
        (value, passed)
    }

    pub fn insert_all(&self, fluent: &FluentInstance, entries: impl IntoIterator<Item = (Situation, bool)>) {
        let mut table = self.table.write().unwrap_or_else(|e| e.into_inner());
        let m = match table.get_mut(fluent) {
            Some(m) => m,
            None => table.entry(fluent.clone()).or_default(),
        };
        m.extend(entries);
    }

    pub fn clear(&self) {
        self.table.write().unwrap_or_else(|e| e.into_inner()).clear();
        self.hits.store(0, Ordering::Relaxed);
        self.misses.store(0, Ordering::Relaxed);
    }

    pub fn stats(&self) -> CacheStats {
        CacheStats {
            entries: self.table.read().unwrap_or_else(|e| e.into_inner()).values().map(HashMap::len).sum(),
            hits: self.hits.load(Ordering::Relaxed),
            misses: self.misses.load(Ordering::Relaxed),
        }
    }
}
