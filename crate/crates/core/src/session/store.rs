use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use super::{Engine, Session, SessionError, SessionEvent, SessionSnapshot};

const EVENTS_FILE: &str = "events.jsonl";
const SNAPSHOT_FILE: &str = "snapshot.json";

/// Sessions on disk: `<root>/<id>/events.jsonl` is an append-only log of
/// every request and its outcome, `<root>/<id>/snapshot.json` the latest state.
#[derive(Debug, Clone)]
pub struct SessionStore {
    root: PathBuf,
}

fn valid_id(id: &str) -> bool {
    !id.is_empty() && id.len() <= 64 && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
}

impl SessionStore {
    pub fn open(root: impl Into<PathBuf>) -> Result<Self, SessionError> {
        let root = root.into();
        fs::create_dir_all(&root)?;
        Ok(Self { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn dir(&self, id: &str) -> Result<PathBuf, SessionError> {
        if !valid_id(id) {
            return Err(SessionError::UnknownSession(id.to_string()));
        }
        Ok(self.root.join(id))
    }

    /// Appends unsaved events and rewrites the snapshot. The snapshot is
    /// replaced atomically, so a crash leaves either the old or new state.
    pub fn save(&self, session: &mut Session) -> Result<(), SessionError> {
        let dir = self.dir(session.id())?;
        fs::create_dir_all(&dir)?;
        if !session.pending.is_empty() {
            let mut buf = Vec::new();
            for ev in &session.pending {
                serde_json::to_writer(&mut buf, ev)?;
                buf.push(b'\n');
            }
            let mut f = OpenOptions::new().create(true).append(true).open(dir.join(EVENTS_FILE))?;
            f.write_all(&buf)?;
            f.sync_data()?;
        }
        session.pending.clear();

        let tmp = dir.join(format!("{SNAPSHOT_FILE}.tmp"));
        {
            let mut f = File::create(&tmp)?;
            serde_json::to_writer_pretty(&mut f, &session.state)?;
            f.write_all(b"\n")?;
            f.sync_all()?;
        }
        fs::rename(&tmp, dir.join(SNAPSHOT_FILE))?;
        Ok(())
    }

    pub fn exists(&self, id: &str) -> bool {
        self.dir(id).map(|d| d.join(SNAPSHOT_FILE).is_file()).unwrap_or(false)
    }

    pub fn load_snapshot(&self, id: &str) -> Result<SessionSnapshot, SessionError> {
        let path = self.dir(id)?.join(SNAPSHOT_FILE);
        let file = match File::open(&path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                return Err(SessionError::UnknownSession(id.to_string()))
            }
            Err(e) => return Err(e.into()),
        };
        let snapshot: SessionSnapshot = serde_json::from_reader(BufReader::new(file))?;
        if snapshot.id != id {
            return Err(SessionError::Corrupt(format!("snapshot in {id:?} belongs to {:?}", snapshot.id)));
        }
        Ok(snapshot)
    }

    /// Loads and resumes a session. Fails with a hash mismatch if the engine
    /// was built from different artifacts than the session.
    pub fn load(&self, engine: &Engine, id: &str) -> Result<Session, SessionError> {
        engine.restore(self.load_snapshot(id)?)
    }

    pub fn load_events(&self, id: &str) -> Result<Vec<SessionEvent>, SessionError> {
        let path = self.dir(id)?.join(EVENTS_FILE);
        let file = match File::open(&path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                return Err(SessionError::UnknownSession(id.to_string()))
            }
            Err(e) => return Err(e.into()),
        };
        let mut events = Vec::new();
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let ev = serde_json::from_str(&line)
                .map_err(|e| SessionError::Corrupt(format!("{EVENTS_FILE} line {}: {e}", i + 1)))?;
            events.push(ev);
        }
        Ok(events)
    }

    /// Ids of stored sessions, sorted.
    pub fn list(&self) -> Result<Vec<String>, SessionError> {
        let mut ids = Vec::new();
        for entry in fs::read_dir(&self.root)? {
            let entry = entry?;
            let name = entry.file_name().to_string_lossy().into_owned();
            if valid_id(&name) && entry.path().join(SNAPSHOT_FILE).is_file() {
                ids.push(name);
            }
        }
        ids.sort();
        Ok(ids)
    }
}
