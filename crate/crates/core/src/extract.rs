//! Raw map entities as read from an OSM extract.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::geo::LatLon;

pub type NodeId = i64;
pub type WayId = i64;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum ExtractError {
    #[error("way {way_id} references missing node {node_id}")]
    DanglingReference { way_id: WayId, node_id: NodeId },
    #[error("node {0} declared twice")]
    DuplicateNode(NodeId),
    #[error("node {0} has out-of-range coordinates")]
    InvalidCoordinate(NodeId),
}

/// Key/value tags in document order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Tags(Vec<(String, String)>);

impl Tags {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    pub fn insert(&mut self, key: impl Into<String>, value: impl Into<String>) {
        let key = key.into();
        let value = value.into();
        match self.0.iter_mut().find(|(k, _)| *k == key) {
            Some(slot) => slot.1 = value,
            None => self.0.push((key, value)),
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn contains_key(&self, key: &str) -> bool {
        self.get(key).is_some()
    }

    /// True when `key` is present with one of `values`.
    pub fn is_one_of(&self, key: &str, values: &[&str]) -> bool {
        self.get(key).is_some_and(|v| values.contains(&v))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<K: Into<String>, V: Into<String>> FromIterator<(K, V)> for Tags {
    fn from_iter<I: IntoIterator<Item = (K, V)>>(iter: I) -> Self {
        let mut tags = Tags::new();
        for (k, v) in iter {
            tags.insert(k, v);
        }
        tags
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: NodeId,
    pub pos: LatLon,
    pub tags: Tags,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Way {
    pub id: WayId,
    pub nodes: Vec<NodeId>,
    pub tags: Tags,
}

/// Nodes and ways of a map extract. Way order is document order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MapExtract {
    pub nodes: Vec<Node>,
    pub ways: Vec<Way>,
}

impl MapExtract {
    /// Checks id uniqueness, coordinate ranges and way references.
    pub fn validate(&self) -> Result<(), ExtractError> {
        let mut seen = BTreeSet::new();
        for node in &self.nodes {
            if !seen.insert(node.id) {
                return Err(ExtractError::DuplicateNode(node.id));
            }
            if !node.pos.is_valid() {
                return Err(ExtractError::InvalidCoordinate(node.id));
            }
        }
        for way in &self.ways {
            if let Some(&missing) = way.nodes.iter().find(|id| !seen.contains(id)) {
                return Err(ExtractError::DanglingReference { way_id: way.id, node_id: missing });
            }
        }
        Ok(())
    }

    pub fn node_positions(&self) -> alloc::collections::BTreeMap<NodeId, LatLon> {
        self.nodes.iter().map(|n| (n.id, n.pos)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn node(id: NodeId) -> Node {
        Node { id, pos: LatLon::new(48.0, 2.0), tags: Tags::new() }
    }

    #[test]
    fn dangling_reference_is_reported() {
        let extract =
            MapExtract { nodes: vec![node(1)], ways: vec![Way { id: 9, nodes: vec![1, 2], tags: Tags::new() }] };
        assert_eq!(extract.validate(), Err(ExtractError::DanglingReference { way_id: 9, node_id: 2 }));
    }

    #[test]
    fn duplicate_nodes_are_rejected() {
        let extract = MapExtract { nodes: vec![node(1), node(1)], ways: vec![] };
        assert_eq!(extract.validate(), Err(ExtractError::DuplicateNode(1)));
    }

    #[test]
    fn tag_insert_overwrites_in_place() {
        let mut tags: Tags = [("highway", "footway"), ("name", "A")].into_iter().collect();
        tags.insert("highway", "path");
        assert_eq!(tags.get("highway"), Some("path"));
        assert_eq!(tags.iter().next(), Some(("highway", "path")));
        assert_eq!(tags.len(), 2);
    }
}
