use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use ontology_authoring::{IdGenerator, InitialKnowledge};
use serde::{Deserialize, Serialize};
use sitcalc::{ActionInstance, Reasoner, Situation};

use crate::event::ActionEvent;

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("no project `{0}`")]
    NotFound(String),
    #[error("no initial knowledge base named `{0}`")]
    UnknownKb(String),
    #[error("project `{project}`: corrupt log at seq {seq}: {message}")]
    CorruptLog { project: String, seq: u64, message: String },
    #[error(transparent)]
    Kernel(#[from] sitcalc::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, StoreError>;

/// The index file of a project.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectInfo {
    pub id: String,
    pub kb: String,
}

/// Result of a successful append.
#[derive(Clone, Debug)]
pub struct Appended {
    pub seq: u64,
    pub situation: Situation,
}

struct Live {
    kb: String,
    situation: Situation,
    last_seq: u64,
    log: File,
}

/// Projects on disk under `<root>/projects/<id>/`, each with a
/// `project.json` index and an `events.jsonl` log.
///
/// Appends to one project are serialized; different projects proceed
/// independently. Every append is checked with `poss` and synced to disk
/// before it is acknowledged.
pub struct ProjectStore {
    root: PathBuf,
    reasoner: Arc<Reasoner>,
    project_ids: IdGenerator,
    symbol_ids: IdGenerator,
    live: Mutex<HashMap<String, Arc<Mutex<Live>>>>,
}

const INDEX: &str = "project.json";
const LOG: &str = "events.jsonl";

impl ProjectStore {
    pub fn open(root: impl AsRef<Path>, reasoner: Arc<Reasoner>) -> Result<Self> {
        let root = root.as_ref().to_path_buf();
        std::fs::create_dir_all(root.join("projects"))?;
        Ok(Self {
            project_ids: IdGenerator::open(root.join("project-ids"))?,
            symbol_ids: IdGenerator::open(root.join("symbol-ids"))?,
            root,
            reasoner,
            live: Mutex::new(HashMap::new()),
        })
    }

    pub fn reasoner(&self) -> &Arc<Reasoner> {
        &self.reasoner
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn dir(&self, id: &str) -> PathBuf {
        self.root.join("projects").join(id)
    }

    pub fn log_path(&self, id: &str) -> PathBuf {
        self.dir(id).join(LOG)
    }

    pub fn create_project(&self, kb: &str) -> Result<String> {
        if self.reasoner.registry().provider::<dyn InitialKnowledge>(kb).is_none() {
            return Err(StoreError::UnknownKb(kb.to_owned()));
        }
        loop {
            let id = self.project_ids.next("p")?;
            let dir = self.dir(&id);
            match std::fs::create_dir(&dir) {
                Ok(()) => {}
                Err(e) if e.kind() == io::ErrorKind::AlreadyExists => continue,
                Err(e) => return Err(e.into()),
            }
            File::create(dir.join(LOG))?.sync_all()?;
            let info = ProjectInfo { id: id.clone(), kb: kb.to_owned() };
            let mut f = File::create(dir.join(INDEX))?;
            f.write_all(serde_json::to_string(&info).expect("index serializes").as_bytes())?;
            f.sync_all()?;
            File::open(self.root.join("projects"))?.sync_all()?;
            return Ok(id);
        }
    }

    /// Project ids, sorted by name.
    pub fn list_projects(&self) -> Result<Vec<String>> {
        let mut ids = Vec::new();
        for entry in std::fs::read_dir(self.root.join("projects"))? {
            let entry = entry?;
            if entry.path().join(INDEX).is_file() {
                if let Some(name) = entry.file_name().to_str() {
                    ids.push(name.to_owned());
                }
            }
        }
        ids.sort();
        Ok(ids)
    }

    pub fn info(&self, id: &str) -> Result<ProjectInfo> {
        if id.is_empty() || id.contains(['/', '\\']) || id.starts_with('.') {
            return Err(StoreError::NotFound(id.to_owned()));
        }
        let text = match std::fs::read_to_string(self.dir(id).join(INDEX)) {
            Ok(t) => t,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Err(StoreError::NotFound(id.to_owned())),
            Err(e) => return Err(e.into()),
        };
        serde_json::from_str(&text).map_err(|e| StoreError::CorruptLog { project: id.to_owned(), seq: 0, message: e.to_string() })
    }

    /// Reads the log from disk and folds it over `do` from the initial
    /// situation. Every event must have the next seq, name this project and
    /// be possible where it occurs. An unterminated last line is an append
    /// that was never acknowledged and is ignored.
    pub fn replay(&self, id: &str) -> Result<Situation> {
        Ok(self.replay_events(id)?.0)
    }

    /// Like [`replay`](Self::replay), also returning the events.
    pub fn replay_events(&self, id: &str) -> Result<(Situation, Vec<ActionEvent>)> {
        let info = self.info(id)?;
        let mut text = String::new();
        File::open(self.log_path(id))?.read_to_string(&mut text)?;
        let complete = match text.rfind('\n') {
            Some(i) => &text[..=i],
            None => "",
        };
        let corrupt = |seq: u64, message: String| StoreError::CorruptLog { project: id.to_owned(), seq, message };
        let mut s = Situation::initial(info.kb.clone());
        let mut events = Vec::new();
        for (i, line) in complete.lines().enumerate() {
            let expected = i as u64 + 1;
            let e = ActionEvent::from_line(line).map_err(|e| corrupt(expected, format!("unreadable event: {e}")))?;
            if e.seq != expected {
                return Err(corrupt(expected, format!("found seq {}", e.seq)));
            }
            if e.project != id {
                return Err(corrupt(expected, format!("event belongs to project `{}`", e.project)));
            }
            s = match self.reasoner.do_action(e.action(), &s) {
                Ok(next) => next,
                Err(err) => return Err(corrupt(expected, err.to_string())),
            };
            events.push(e);
        }
        Ok((s, events))
    }

    fn live(&self, id: &str) -> Result<Arc<Mutex<Live>>> {
        let mut map = self.live.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(l) = map.get(id) {
            return Ok(l.clone());
        }
        let info = self.info(id)?;
        let (situation, events) = self.replay_events(id)?;
        let path = self.log_path(id);
        let acknowledged: u64 = {
            let mut len = 0u64;
            let mut reader = BufReader::new(File::open(&path)?);
            let mut buf = Vec::new();
            loop {
                buf.clear();
                let n = reader.read_until(b'\n', &mut buf)?;
                if n == 0 || buf.last() != Some(&b'\n') {
                    break;
                }
                len += n as u64;
            }
            len
        };
        let log = OpenOptions::new().write(true).open(&path)?;
        // drop a torn tail left by a crash mid-append
        if log.metadata()?.len() != acknowledged {
            log.set_len(acknowledged)?;
            log.sync_all()?;
        }
        let mut log = log;
        io::Seek::seek(&mut log, io::SeekFrom::End(0))?;
        let live = Arc::new(Mutex::new(Live { kb: info.kb, situation, last_seq: events.len() as u64, log }));
        map.insert(id.to_owned(), live.clone());
        Ok(live)
    }

    /// The current situation of a project.
    pub fn situation(&self, id: &str) -> Result<Situation> {
        let live = self.live(id)?;
        let l = live.lock().unwrap_or_else(|e| e.into_inner());
        Ok(l.situation.clone())
    }

    pub fn kb(&self, id: &str) -> Result<String> {
        let live = self.live(id)?;
        let l = live.lock().unwrap_or_else(|e| e.into_inner());
        Ok(l.kb.clone())
    }

    /// Checks `poss`, writes and syncs the event, then advances the project.
    /// A rejected action writes nothing.
    pub fn append(&self, id: &str, action: ActionInstance) -> Result<Appended> {
        let live = self.live(id)?;
        let mut l = live.lock().unwrap_or_else(|e| e.into_inner());
        let next = self.reasoner.do_action(action.clone(), &l.situation)?;
        let seq = l.last_seq + 1;
        let mut line = ActionEvent::new(seq, id, &action).to_line();
        line.push('\n');
        let written = l.log.write_all(line.as_bytes()).and_then(|()| l.log.sync_data());
        if let Err(e) = written {
            // the tail is unknown now; reload from disk next time
            drop(l);
            self.live.lock().unwrap_or_else(|e| e.into_inner()).remove(id);
            return Err(e.into());
        }
        l.last_seq = seq;
        l.situation = next.clone();
        Ok(Appended { seq, situation: next })
    }

    /// A fresh symbol `<prefix>_<n>`, unique across the store.
    pub fn fresh_id(&self, prefix: &str) -> Result<String> {
        Ok(self.symbol_ids.next(prefix)?)
    }
}
