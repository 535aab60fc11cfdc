//! Situation-calculus reasoning kernel.
//!
//! A [`Situation`] is either `initial(kb)` or `do(action, prior)`. Fluent and
//! action kinds are plugins implementing [`FluentKind`] and [`ActionKind`];
//! they are registered in a [`Registry`] and evaluated by a [`Reasoner`],
//! which never depends on any concrete kind. `holds` is answered by
//! regression over the history (optionally memoized) and a situation can
//! also be progressed into an explicit [`StateSnapshot`].

mod cache;
mod error;
mod kind;
mod query;
mod reasoner;
mod registry;
mod situation;
mod term;
mod time;

pub use cache::{CacheStats, HoldsCache};
pub use error::{Error, Result};
pub use kind::{ActionKind, FluentKind, QueryAction, Verdict};
pub use query::{CmpOp, Query};
pub use reasoner::{Reasoner, StateSnapshot};
pub use registry::{Protocol, Registry, RegistryBuilder, ACTION_FAMILY, FLUENT_FAMILY};
pub use situation::{Ancestry, Digest, Situation};
pub use term::{ActionInstance, Bindings, FluentInstance, Term};
pub use time::{Timestamp, TimestampError};
