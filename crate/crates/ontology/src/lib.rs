//! Ontology authoring on top of the situation-calculus kernel.
//!
//! The learner's work is an extension of a seed ontology: seed triples come
//! from [`InitialKnowledge`] providers (the `s0` protocol) and are visible
//! through the situation-independent `initial_assertion` fluent, while the
//! learner's own triples are tracked by `asserted`, changed through the
//! `add_data`, `delete_data` and `update_data` actions.

mod ids;
mod kb;
mod kinds;
mod triple;

pub use ids::IdGenerator;
pub use kb::{load_initial_kb, parse_triples, write_triples, InitialKnowledge, KbError, TripleSet};
pub use kinds::{
    ontology, register, register_kb, Asserted, DataAction, InitialAssertion, Ontology, Retracted, ADD_DATA, ASSERTED,
    DELETE_DATA, INITIAL_ASSERTION, KIND_NAMES, RETRACTED, UPDATE_DATA,
};
pub use triple::{Triple, TripleError, TriplePattern};
