//! Local name → coordinate lookup.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::geo::LatLon;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum GazetteerError {
    #[error("place not found: {0}")]
    NotFound(String),
    #[error("duplicate gazetteer name: {0}")]
    DuplicateName(String),
    #[error("invalid coordinates for {0}")]
    InvalidCoordinate(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GazetteerEntry {
    pub name: String,
    pub pos: LatLon,
}

/// Case-folded, whitespace-collapsed lookup key.
pub fn normalize_name(name: &str) -> String {
    let mut out = String::with_capacity(name.len());
    for word in name.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.extend(word.chars().flat_map(char::to_lowercase));
    }
    out
}

#[derive(Debug, Clone, Default)]
pub struct Gazetteer {
    entries: Vec<GazetteerEntry>,
    by_key: BTreeMap<String, usize>,
}

impl Gazetteer {
    pub fn new(entries: Vec<GazetteerEntry>) -> Result<Self, GazetteerError> {
        let mut by_key = BTreeMap::new();
        for (i, e) in entries.iter().enumerate() {
            if !e.pos.is_valid() {
                return Err(GazetteerError::InvalidCoordinate(e.name.clone()));
            }
            if by_key.insert(normalize_name(&e.name), i).is_some() {
                return Err(GazetteerError::DuplicateName(e.name.clone()));
            }
        }
        Ok(Self { entries, by_key })
    }

    pub fn entries(&self) -> &[GazetteerEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn lookup(&self, name: &str) -> Option<&GazetteerEntry> {
        self.by_key.get(&normalize_name(name)).map(|&i| &self.entries[i])
    }

    /// Coordinates of the unique case-insensitive match; never guesses.
    pub fn geocode(&self, name: &str) -> Result<LatLon, GazetteerError> {
        self.lookup(name).map(|e| e.pos).ok_or_else(|| GazetteerError::NotFound(String::from(name.trim())))
    }
}
