use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use ontology_authoring::{load_initial_kb, InitialKnowledge, TripleSet};
use scaffolding::{load_bank, InterventionBank, StaticBank};
use serde::{Deserialize, Serialize};
use sitcalc::Registry;

#[derive(Debug, thiserror::Error)]
#[error("config field `{field}`: {message}")]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    fn new(field: impl Into<String>, message: impl ToString) -> Self {
        Self { field: field.into(), message: message.to_string() }
    }
}

/// A tab of the learner interface and the predicates its triple form offers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepTab {
    pub id: String,
    pub title: String,
    #[serde(default)]
    pub predicates: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlossaryEntry {
    pub term: String,
    pub definition: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Glossary {
    entries: BTreeMap<String, GlossaryEntry>,
}

impl Glossary {
    pub fn new(entries: impl IntoIterator<Item = GlossaryEntry>) -> Result<Self, ConfigError> {
        let mut map = BTreeMap::new();
        for e in entries {
            if e.term.is_empty() {
                return Err(ConfigError::new("glossary", "empty term"));
            }
            if map.contains_key(&e.term) {
                return Err(ConfigError::new("glossary", format!("duplicate term `{}`", e.term)));
            }
            map.insert(e.term.clone(), e);
        }
        Ok(Self { entries: map })
    }

    pub fn lookup(&self, term: &str) -> Option<&GlossaryEntry> {
        self.entries.get(term)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &GlossaryEntry> {
        self.entries.values()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServerConfig {
    pub listen: Option<String>,
    #[serde(default)]
    pub cors_origins: Vec<String>,
    pub static_dir: Option<PathBuf>,
}

/// A loaded application configuration. Paths in the file are relative to
/// the file's directory.
#[derive(Clone, Debug)]
pub struct AppConfig {
    pub steps: Vec<StepTab>,
    pub glossary: Glossary,
    pub kbs: Vec<(String, TripleSet)>,
    pub bank: StaticBank,
    pub server: ServerConfig,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    bank: Option<PathBuf>,
    glossary: Option<PathBuf>,
    #[serde(default)]
    kb: Vec<KbFile>,
    #[serde(default)]
    step: Vec<StepTab>,
    #[serde(default)]
    server: ServerConfig,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct KbFile {
    name: String,
    path: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GlossaryFile {
    #[serde(default)]
    term: Vec<GlossaryEntry>,
}

/// Loads an app config:
///
/// ```toml
/// bank = "bank.toml"
/// glossary = "glossary.toml"
///
/// [[kb]]
/// name = "stpa"
/// path = "seed.triples"
///
/// [[step]]
/// id = "losses"
/// title = "Losses"
/// predicates = ["type", "label"]
///
/// [server]
/// listen = "127.0.0.1:8080"
/// cors_origins = ["http://localhost:5173"]
/// ```
pub fn load_app_config(path: impl AsRef<Path>) -> Result<AppConfig, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::new("path", format!("{}: {e}", path.display())))?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let file: ConfigFile = toml::from_str(&text).map_err(|e| ConfigError::new("syntax", e))?;

    if file.step.is_empty() {
        return Err(ConfigError::new("step", "at least one step tab is required"));
    }
    for (i, step) in file.step.iter().enumerate() {
        if step.id.is_empty() {
            return Err(ConfigError::new("step.id", "empty id"));
        }
        if file.step[..i].iter().any(|s| s.id == step.id) {
            return Err(ConfigError::new("step.id", format!("duplicate id `{}`", step.id)));
        }
    }

    if file.kb.is_empty() {
        return Err(ConfigError::new("kb", "at least one initial knowledge base is required"));
    }
    let mut kbs: Vec<(String, TripleSet)> = Vec::new();
    for kb in file.kb {
        if kb.name.is_empty() || kbs.iter().any(|(n, _)| *n == kb.name) {
            return Err(ConfigError::new("kb.name", format!("bad or duplicate name `{}`", kb.name)));
        }
        let triples = match kb.path {
            Some(p) => load_initial_kb(dir.join(&p)).map_err(|e| ConfigError::new("kb.path", format!("{}: {e}", p.display())))?,
            None => TripleSet::default(),
        };
        kbs.push((kb.name, triples));
    }

    let bank = match file.bank {
        Some(p) => load_bank(dir.join(&p)).map_err(|e| ConfigError::new("bank", format!("{}: {e}", p.display())))?,
        None => StaticBank::default(),
    };

    let glossary = match file.glossary {
        Some(p) => {
            let text = std::fs::read_to_string(dir.join(&p))
                .map_err(|e| ConfigError::new("glossary", format!("{}: {e}", p.display())))?;
            let g: GlossaryFile = toml::from_str(&text).map_err(|e| ConfigError::new("glossary", e))?;
            Glossary::new(g.term)?
        }
        None => Glossary::default(),
    };

    let mut server = file.server;
    server.static_dir = server.static_dir.map(|p| dir.join(p));

    let config = AppConfig { steps: file.step, glossary, kbs, bank, server };
    config.registry()?;
    Ok(config)
}

impl AppConfig {
    /// The full registry: ontology, scaffolding and app kinds, with the
    /// configured knowledge bases and bank. Bank triggers must only mention
    /// registered fluents.
    pub fn registry(&self) -> Result<Registry, ConfigError> {
        let mut b = Registry::builder();
        let kernel = |e: sitcalc::Error| ConfigError::new("registry", e);
        ontology_authoring::register(&mut b).map_err(kernel)?;
        scaffolding::register(&mut b).map_err(kernel)?;
        crate::kinds::register(&mut b).map_err(kernel)?;
        for (name, kb) in &self.kbs {
            ontology_authoring::register_kb(&mut b, name, Arc::new(kb.clone()) as Arc<dyn InitialKnowledge>)
                .map_err(kernel)?;
        }
        scaffolding::register_bank(&mut b, "bank", Arc::new(self.bank.clone()) as Arc<dyn InterventionBank>)
            .map_err(kernel)?;
        for entry in self.bank.iter() {
            for kind in entry.trigger.kinds() {
                if !b.peek().is_fluent(kind) {
                    return Err(ConfigError::new(
                        "bank",
                        format!("intervention `{}` mentions unknown fluent `{kind}`", entry.id),
                    ));
                }
            }
        }
        Ok(b.build())
    }

    pub fn kb_names(&self) -> impl Iterator<Item = &str> {
        self.kbs.iter().map(|(n, _)| n.as_str())
    }
}
