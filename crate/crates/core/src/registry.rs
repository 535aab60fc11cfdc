//! Registry of conformers: fluent kinds, action kinds and typed providers.
//!
//! Providers are grouped by [`Protocol`], a trait-object type with a family
//! name. An upper layer declares `impl Protocol for dyn MyContract` and can
//! then register and enumerate implementations without the kernel knowing
//! the contract. Every family is kept name-sorted, so enumeration never
//! depends on registration order.

use std::any::Any;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::kind::{ActionKind, FluentKind};

pub const FLUENT_FAMILY: &str = "fluent";
pub const ACTION_FAMILY: &str = "action";

/// A provider contract that can be registered by name.
pub trait Protocol: Send + Sync + 'static {
    const NAME: &'static str;
}

type ProviderSlot = Box<dyn Any + Send + Sync>;

#[derive(Default)]
pub struct Registry {
    fluents: BTreeMap<String, Arc<dyn FluentKind>>,
    actions: BTreeMap<String, Arc<dyn ActionKind>>,
    providers: BTreeMap<&'static str, BTreeMap<String, ProviderSlot>>,
}

impl Registry {
    pub fn builder() -> RegistryBuilder {
        RegistryBuilder::default()
    }

    pub fn fluent(&self, name: &str) -> Result<&Arc<dyn FluentKind>> {
        self.fluents
            .get(name)
            .ok_or_else(|| Error::UnknownKind { family: FLUENT_FAMILY, name: name.to_owned() })
    }

    pub fn action(&self, name: &str) -> Result<&Arc<dyn ActionKind>> {
        self.actions
            .get(name)
            .ok_or_else(|| Error::UnknownKind { family: ACTION_FAMILY, name: name.to_owned() })
    }

    pub fn is_fluent(&self, name: &str) -> bool {
        self.fluents.contains_key(name)
    }

    pub fn is_action(&self, name: &str) -> bool {
        self.actions.contains_key(name)
    }

    /// Fluent kinds in name order.
    pub fn fluent_kinds(&self) -> impl Iterator<Item = &Arc<dyn FluentKind>> {
        self.fluents.values()
    }

    /// Action kinds in name order.
    pub fn action_kinds(&self) -> impl Iterator<Item = &Arc<dyn ActionKind>> {
        self.actions.values()
    }

    /// Providers conforming to `P`, in name order.
    pub fn providers<P: Protocol + ?Sized>(&self) -> Vec<(&str, Arc<P>)> {
        self.providers
            .get(P::NAME)
            .into_iter()
            .flatten()
            .filter_map(|(name, slot)| slot.downcast_ref::<Arc<P>>().map(|p| (name.as_str(), Arc::clone(p))))
            .collect()
    }

    pub fn provider<P: Protocol + ?Sized>(&self, name: &str) -> Option<Arc<P>> {
        self.providers
            .get(P::NAME)?
            .get(name)?
            .downcast_ref::<Arc<P>>()
            .cloned()
    }

    /// Names of everything registered in `family` (`fluent`, `action`, or a
    /// protocol name), name-sorted. Unknown families are empty.
    pub fn conformers(&self, family: &str) -> Vec<String> {
        match family {
            FLUENT_FAMILY => self.fluents.keys().cloned().collect(),
            ACTION_FAMILY => self.actions.keys().cloned().collect(),
            other => self
                .providers
                .get(other)
                .map(|m| m.keys().cloned().collect())
                .unwrap_or_default(),
        }
    }

    /// Every family with at least one possible member, name-sorted.
    pub fn families(&self) -> Vec<&str> {
        let mut out = vec![ACTION_FAMILY, FLUENT_FAMILY];
        out.extend(self.providers.keys().copied());
        out.sort_unstable();
        out.dedup();
        out
    }
}

impl fmt::Debug for Registry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Registry")
            .field("fluents", &self.fluents.keys().collect::<Vec<_>>())
            .field("actions", &self.actions.keys().collect::<Vec<_>>())
            .field(
                "providers",
                &self.providers.iter().map(|(k, v)| (k, v.keys().collect::<Vec<_>>())).collect::<Vec<_>>(),
            )
            .finish()
    }
}

/// Mutable registration phase; [`RegistryBuilder::build`] freezes it.
#[derive(Default, Debug)]
pub struct RegistryBuilder {
    inner: Registry,
}

fn duplicate(family: &str, name: &str) -> Error {
    Error::DuplicateName { family: family.to_owned(), name: name.to_owned() }
}

impl RegistryBuilder {
    pub fn fluent(&mut self, kind: Arc<dyn FluentKind>) -> Result<&mut Self> {
        let name = kind.name().to_owned();
        if self.inner.fluents.contains_key(&name) {
            return Err(duplicate(FLUENT_FAMILY, &name));
        }
        self.inner.fluents.insert(name, kind);
        Ok(self)
    }

    pub fn action(&mut self, kind: Arc<dyn ActionKind>) -> Result<&mut Self> {
        let name = kind.name().to_owned();
        if self.inner.actions.contains_key(&name) {
            return Err(duplicate(ACTION_FAMILY, &name));
        }
        self.inner.actions.insert(name, kind);
        Ok(self)
    }

    pub fn provide<P: Protocol + ?Sized>(&mut self, name: impl Into<String>, provider: Arc<P>) -> Result<&mut Self> {
        let name = name.into();
        let family = self.inner.providers.entry(P::NAME).or_default();
        if family.contains_key(&name) {
            return Err(duplicate(P::NAME, &name));
        }
        family.insert(name, Box::new(provider));
        Ok(self)
    }

    /// Read access during registration, e.g. to validate cross references.
    pub fn peek(&self) -> &Registry {
        &self.inner
    }

    pub fn build(self) -> Registry {
        self.inner
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kind::QueryAction;

    trait Greeter: Send + Sync {
        fn greet(&self) -> String;
    }

    impl Protocol for dyn Greeter {
        const NAME: &'static str = "greeter";
    }

    struct Hello(&'static str);

    impl Greeter for Hello {
        fn greet(&self) -> String {
            format!("hello {}", self.0)
        }
    }

    #[test]
    fn fresh_registry_is_empty_in_every_family() {
        let r = Registry::builder().build();
        for family in [FLUENT_FAMILY, ACTION_FAMILY, "greeter", "nonsense"] {
            assert!(r.conformers(family).is_empty());
        }
    }

    #[test]
    fn providers_enumerate_sorted_and_typed() {
        let mut b = Registry::builder();
        b.provide::<dyn Greeter>("zed", Arc::new(Hello("z"))).unwrap();
        b.provide::<dyn Greeter>("amy", Arc::new(Hello("a"))).unwrap();
        let err = b.provide::<dyn Greeter>("amy", Arc::new(Hello("again"))).unwrap_err();
        assert_eq!(err, Error::DuplicateName { family: "greeter".into(), name: "amy".into() });
        let r = b.build();
        assert_eq!(r.conformers("greeter"), vec!["amy", "zed"]);
        let greetings: Vec<String> = r.providers::<dyn Greeter>().iter().map(|(_, g)| g.greet()).collect();
        assert_eq!(greetings, vec!["hello a", "hello z"]);
        assert_eq!(r.provider::<dyn Greeter>("zed").unwrap().greet(), "hello z");
        assert!(r.provider::<dyn Greeter>("bob").is_none());
    }

    #[test]
    fn duplicate_action_rejected() {
        let mut b = Registry::builder();
        b.action(Arc::new(QueryAction::always("nudge", 1))).unwrap();
        assert!(matches!(
            b.action(Arc::new(QueryAction::always("nudge", 1))),
            Err(Error::DuplicateName { .. })
        ));
        let r = b.build();
        assert!(r.is_action("nudge"));
        assert!(matches!(r.fluent("nudge"), Err(Error::UnknownKind { family: "fluent", .. })));
    }
}
