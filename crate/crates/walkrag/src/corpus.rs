//! Passage corpus: JSONL ingestion and the in-memory store.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Read};

use serde::{Deserialize, Serialize};
use walkrag_core::Passage;

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("duplicate passage id {0:?}")]
    DuplicateId(String),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Line {
    id: String,
    text: String,
    #[serde(default)]
    source: Option<String>,
}

#[derive(Debug, Clone, Default)]
pub struct PassageStore {
    passages: Vec<Passage>,
    by_id: HashMap<String, usize>,
}

impl PassageStore {
    pub fn insert(&mut self, passage: Passage) -> Result<(), CorpusError> {
        if self.by_id.contains_key(&passage.id) {
            return Err(CorpusError::DuplicateId(passage.id));
        }
        self.by_id.insert(passage.id.clone(), self.passages.len());
        self.passages.push(passage);
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<&Passage> {
        self.by_id.get(id).map(|&i| &self.passages[i])
    }

    pub fn passages(&self) -> &[Passage] {
        &self.passages
    }

    pub fn len(&self) -> usize {
        self.passages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.passages.is_empty()
    }
}

/// Reads one JSON object per line (`id`, `text`, optional `source`) into `store`.
/// Blank lines are ignored. Returns the number of passages added.
pub fn ingest_corpus(input: impl Read, store: &mut PassageStore) -> Result<usize, CorpusError> {
    let mut added = 0;
    for (i, line) in BufReader::new(input).lines().enumerate() {
        let line = line?;
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: Line = serde_json::from_str(&line)
            .map_err(|e| CorpusError::MalformedLine { line: line_no, reason: e.to_string() })?;
        if parsed.id.is_empty() || parsed.text.trim().is_empty() {
            return Err(CorpusError::MalformedLine {
                line: line_no,
                reason: "`id` and `text` must be non-empty".into(),
            });
        }
        store.insert(Passage { id: parsed.id, text: parsed.text, source: parsed.source })?;
        added += 1;
    }
    Ok(added)
}

/// Convenience wrapper returning a fresh store.
pub fn load_corpus(input: impl Read) -> Result<PassageStore, CorpusError> {
    let mut store = PassageStore::default();
    ingest_corpus(input, &mut store)?;
    Ok(store)
}
