//! Contingent scaffolding: hints drawn from intervention banks, shown when
//! their trigger query holds, dismissable by the learner and escalated on
//! request.
//!
//! Kinds only reference their own vocabulary and whatever the bank triggers
//! mention, so this crate works over any domain registered alongside it.

mod bank;
mod kinds;
mod pending;

pub use bank::{load_bank, parse_bank, BankError, Intervention, InterventionBank, StaticBank};
pub use kinds::{
    bank_entries, lookup, register, register_bank, Dismissed, Intervene, InterventionLevel, LiveIntervention, Marker,
    DISMISSED, DISMISS_INTERVENTION, INCREASE_REQUESTED, INTERVENE, INTERVENED, INTERVENTION_LEVEL, KIND_NAMES,
    LIVE_INTERVENTION, REQUEST_INTERVENTION_INCREASE,
};
pub use pending::{pending_interventions, Pending};
