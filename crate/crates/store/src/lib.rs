//! Append-only per-project action logs. A project's situation is the fold of
//! its log over `do`, starting from the initial situation of its knowledge
//! base.

mod event;
mod store;

pub use event::ActionEvent;
pub use store::{Appended, ProjectInfo, ProjectStore, Result, StoreError};
