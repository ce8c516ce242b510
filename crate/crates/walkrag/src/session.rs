//! Conversation state and the session store.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use parking_lot::{Mutex, RwLock};
use serde::{Deserialize, Serialize};

use crate::payload::RouteAnswer;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TurnRecord {
    pub utterance: String,
    /// `spatial` or `information`; absent when classification failed.
    pub intent: Option<String>,
    pub answer: String,
    /// Machine-readable failure code for turns that did not complete normally.
    pub error: Option<String>,
    /// Route selected on this turn, if any.
    pub route: Option<RouteAnswer>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConversationState {
    pub turns: Vec<TurnRecord>,
    pub last_route: Option<RouteAnswer>,
}

impl ConversationState {
    pub fn apply(&mut self, turn: TurnRecord) {
        if let Some(route) = &turn.route {
            self.last_route = Some(route.clone());
        }
        self.turns.push(turn);
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SessionError {
    #[error("unknown session {0}")]
    UnknownSession(String),
    #[error("session log {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("session log {path} line {line}: {reason}")]
    Corrupt { path: PathBuf, line: usize, reason: String },
}

pub type SharedState = Arc<Mutex<ConversationState>>;

/// In-memory sessions keyed by id. With a directory configured, each turn is
/// appended to `<dir>/<id>.jsonl` and sessions are replayed on open.
#[derive(Default)]
pub struct SessionStore {
    sessions: RwLock<HashMap<String, SharedState>>,
    dir: Option<PathBuf>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> SessionError + '_ {
    move |source| SessionError::Io { path: path.to_owned(), source }
}

fn valid_id(id: &str) -> bool {
    !id.is_empty() && id.len() <= 64 && id.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'-')
}

impl SessionStore {
    pub fn in_memory() -> Self {
        Self::default()
    }

    pub fn persistent(dir: impl Into<PathBuf>) -> Result<Self, SessionError> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        let store = Self { sessions: RwLock::default(), dir: Some(dir.clone()) };
        let mut sessions = store.sessions.write();
        for entry in std::fs::read_dir(&dir).map_err(io_err(&dir))? {
            let path = entry.map_err(io_err(&dir))?.path();
            let Some(id) =
                path.file_stem().and_then(|s| s.to_str()).filter(|_| path.extension().is_some_and(|e| e == "jsonl"))
            else {
                continue;
            };
            if !valid_id(id) {
                continue;
            }
            let mut state = ConversationState::default();
            let file = File::open(&path).map_err(io_err(&path))?;
            for (i, line) in BufReader::new(file).lines().enumerate() {
                let line = line.map_err(io_err(&path))?;
                if line.trim().is_empty() {
                    continue;
                }
                let turn: TurnRecord = serde_json::from_str(&line).map_err(|e| SessionError::Corrupt {
                    path: path.clone(),
                    line: i + 1,
                    reason: e.to_string(),
                })?;
                state.apply(turn);
            }
            sessions.insert(id.to_owned(), Arc::new(Mutex::new(state)));
        }
        drop(sessions);
        Ok(store)
    }

    fn log_path(&self, id: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{id}.jsonl")))
    }

    pub fn create(&self) -> Result<String, SessionError> {
        let id = uuid::Uuid::new_v4().simple().to_string();
        if let Some(path) = self.log_path(&id) {
            File::create(&path).map_err(io_err(&path))?;
        }
        self.sessions.write().insert(id.clone(), SharedState::default());
        Ok(id)
    }

    pub fn get(&self, id: &str) -> Result<SharedState, SessionError> {
        self.sessions.read().get(id).cloned().ok_or_else(|| SessionError::UnknownSession(id.to_owned()))
    }

    pub fn len(&self) -> usize {
        self.sessions.read().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Persists `turn` (when configured) and applies it to `state`.
    pub fn record(&self, id: &str, state: &mut ConversationState, turn: TurnRecord) -> Result<(), SessionError> {
        if let Some(path) = self.log_path(id) {
            let mut line = serde_json::to_string(&turn).expect("turn serializes");
            line.push('\n');
            let mut f = OpenOptions::new().create(true).append(true).open(&path).map_err(io_err(&path))?;
            f.write_all(line.as_bytes()).map_err(io_err(&path))?;
        }
        state.apply(turn);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn turn(text: &str) -> TurnRecord {
        TurnRecord {
            utterance: text.into(),
            intent: Some("information".into()),
            answer: "a".into(),
            error: None,
            route: None,
        }
    }

    #[test]
    fn ids_are_unique_uuid_strings() {
        let store = SessionStore::in_memory();
        let a = store.create().unwrap();
        let b = store.create().unwrap();
        assert_ne!(a, b);
        assert_eq!(a.len(), 32);
        assert!(a.bytes().all(|c| c.is_ascii_hexdigit()));
        assert!(matches!(store.get("nope"), Err(SessionError::UnknownSession(_))));
    }

    #[test]
    fn sessions_are_isolated() {
        let store = SessionStore::in_memory();
        let a = store.create().unwrap();
        let b = store.create().unwrap();
        let sa = store.get(&a).unwrap();
        store.record(&a, &mut sa.lock(), turn("hi")).unwrap();
        assert_eq!(sa.lock().turns.len(), 1);
        assert!(store.get(&b).unwrap().lock().turns.is_empty());
    }

    #[test]
    fn persistence_replays_turns() {
        let dir = tempfile::tempdir().unwrap();
        let id = {
            let store = SessionStore::persistent(dir.path()).unwrap();
            let id = store.create().unwrap();
            let s = store.get(&id).unwrap();
            store.record(&id, &mut s.lock(), turn("one")).unwrap();
            store.record(&id, &mut s.lock(), turn("two")).unwrap();
            id
        };
        let store = SessionStore::persistent(dir.path()).unwrap();
        let s = store.get(&id).unwrap();
        let utterances: Vec<String> = s.lock().turns.iter().map(|t| t.utterance.clone()).collect();
        assert_eq!(utterances, ["one", "two"]);
    }

    #[test]
    fn corrupt_log_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("abc.jsonl"), "{}\n").unwrap();
        assert!(matches!(SessionStore::persistent(dir.path()), Err(SessionError::Corrupt { line: 1, .. })));
    }
}
