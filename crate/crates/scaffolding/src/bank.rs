use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;
use sitcalc::{Protocol, Query, Term};

/// A bank entry: a trigger query and hint payloads ordered from least to
/// most intrusive. Level `n` (1-based) shows `levels[n - 1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Intervention {
    pub id: String,
    pub trigger: Query,
    pub levels: Vec<String>,
}

impl Intervention {
    pub fn new(id: impl Into<String>, trigger: Query, levels: Vec<String>) -> Result<Self, BankError> {
        let id = id.into();
        if id.is_empty() {
            return Err(BankError::Invalid { id, message: "empty id".into() });
        }
        if levels.is_empty() {
            return Err(BankError::Invalid { id, message: "at least one level is required".into() });
        }
        Ok(Self { id, trigger, levels })
    }

    pub fn max_level(&self) -> i64 {
        self.levels.len() as i64
    }

    /// Canonical text of the trigger; this is the query identity `Q` used by
    /// dismissal, so entries with the same trigger share dismissals.
    pub fn query_key(&self) -> String {
        self.trigger.to_string()
    }

    pub fn id_term(&self) -> Term {
        Term::Sym(self.id.clone())
    }

    pub fn query_term(&self) -> Term {
        Term::Str(self.query_key())
    }

    /// Payload for a 1-based level.
    pub fn payload(&self, level: i64) -> Option<&str> {
        let idx = usize::try_from(level.checked_sub(1)?).ok()?;
        self.levels.get(idx).map(String::as_str)
    }
}

/// A source of interventions, registered under the `interventions` protocol.
pub trait InterventionBank: Send + Sync {
    /// Entries matching the optional id and query key, ordered by id.
    fn intervention(&self, id: Option<&str>, query: Option<&str>) -> Vec<Intervention>;
}

impl Protocol for dyn InterventionBank {
    const NAME: &'static str = "interventions";
}

/// A fixed set of interventions with unique ids.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StaticBank {
    entries: BTreeMap<String, Intervention>,
}

impl StaticBank {
    pub fn new(entries: impl IntoIterator<Item = Intervention>) -> Result<Self, BankError> {
        let mut map = BTreeMap::new();
        for e in entries {
            if map.contains_key(&e.id) {
                return Err(BankError::Invalid { id: e.id, message: "duplicate id".into() });
            }
            map.insert(e.id.clone(), e);
        }
        Ok(Self { entries: map })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Intervention> {
        self.entries.values()
    }
}

impl InterventionBank for StaticBank {
    fn intervention(&self, id: Option<&str>, query: Option<&str>) -> Vec<Intervention> {
        self.entries
            .values()
            .filter(|e| id.is_none_or(|i| i == e.id))
            .filter(|e| query.is_none_or(|q| q == e.query_key()))
            .cloned()
            .collect()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum BankError {
    #[error("intervention `{id}`: {message}")]
    Invalid { id: String, message: String },
    #[error("intervention `{id}`: bad trigger: {source}")]
    Trigger { id: String, source: sitcalc::Error },
    #[error("bank file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BankFile {
    #[serde(default)]
    intervention: Vec<EntryFile>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryFile {
    id: String,
    trigger: String,
    levels: Vec<String>,
}

/// Parses a bank in TOML form:
///
/// ```toml
/// [[intervention]]
/// id = "no-losses"
/// trigger = "-some(L, loss(L))"
/// levels = ["Have you thought about losses?", "Add a loss."]
/// ```
pub fn parse_bank(text: &str) -> Result<StaticBank, BankError> {
    let file: BankFile = toml::from_str(text).map_err(|e| BankError::Format(e.to_string()))?;
    let entries = file
        .intervention
        .into_iter()
        .map(|e| {
            let trigger = e.trigger.parse().map_err(|source| BankError::Trigger { id: e.id.clone(), source })?;
            Intervention::new(e.id, trigger, e.levels)
        })
        .collect::<Result<Vec<_>, _>>()?;
    StaticBank::new(entries)
}

pub fn load_bank(path: impl AsRef<Path>) -> Result<StaticBank, BankError> {
    parse_bank(&std::fs::read_to_string(path)?)
}
