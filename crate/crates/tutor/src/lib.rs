//! The STPA tutor application layer: tracking actions, the focus fluent,
//! step tabs, glossary and the configuration that wires seed knowledge and
//! the intervention bank into a registry.

mod config;
mod kinds;

pub use config::{load_app_config, AppConfig, ConfigError, Glossary, GlossaryEntry, ServerConfig, StepTab};
pub use kinds::{
    register, CurrentFocus, CONCEPT_FOCUS, CURRENT_FOCUS, GLOSSARY_LOOKUP, KIND_NAMES, NAVIGATE_TO_STEP, NUDGE,
};
