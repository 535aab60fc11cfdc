use std::io;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

/// Hands out fresh symbols `<prefix>_<n>` from a monotone counter.
///
/// The counter is shared by all prefixes and `n` never repeats, so ids are
/// unique whatever prefixes are used. When backed by a file, the counter is
/// written (and synced) before an id is returned.
#[derive(Debug)]
pub struct IdGenerator {
    last: Mutex<u64>,
    path: Option<PathBuf>,
}

impl IdGenerator {
    pub fn in_memory() -> Self {
        Self { last: Mutex::new(0), path: None }
    }

    /// Opens a persistent counter, starting from zero if the file is absent.
    pub fn open(path: impl AsRef<Path>) -> io::Result<Self> {
        let path = path.as_ref().to_path_buf();
        let last = match std::fs::read_to_string(&path) {
            Ok(text) => text
                .trim()
                .parse()
                .map_err(|_| io::Error::new(io::ErrorKind::InvalidData, format!("bad id counter in {}", path.display())))?,
            Err(e) if e.kind() == io::ErrorKind::NotFound => 0,
            Err(e) => return Err(e),
        };
        Ok(Self { last: Mutex::new(last), path: Some(path) })
    }

    pub fn next(&self, prefix: &str) -> io::Result<String> {
        let mut last = self.last.lock().unwrap_or_else(|e| e.into_inner());
        let n = *last + 1;
        if let Some(path) = &self.path {
            let tmp = path.with_extension("tmp");
            {
                use std::io::Write;
                let mut f = std::fs::File::create(&tmp)?;
                writeln!(f, "{n}")?;
                f.sync_all()?;
            }
            std::fs::rename(&tmp, path)?;
        }
        *last = n;
        Ok(format!("{prefix}_{n}"))
    }

    /// Number of ids handed out so far.
    pub fn issued(&self) -> u64 {
        *self.last.lock().unwrap_or_else(|e| e.into_inner())
    }
}
