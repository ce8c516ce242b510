//! Walkable street network.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::extract::{MapExtract, NodeId, Tags};
use crate::geo::{haversine, LatLon};

/// Shortest length given to an edge whose endpoints share coordinates.
pub const MIN_EDGE_LENGTH_M: f64 = 1e-3;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("no walkable way in the extract")]
    EmptyGraph,
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("edge {0}-{1} has non-positive length")]
    InvalidLength(NodeId, NodeId),
    #[error("nearest node is {distance_m:.1} m away (limit {limit_m} m)")]
    TooFar { distance_m: f64, limit_m: f64 },
}

const WALKABLE_HIGHWAY: &[&str] = &["footway", "path", "pedestrian", "living_street", "steps", "track"];
const SIDEWALK_SIDES: &[&str] = &["left", "right", "both"];
const FOOT_ALLOWED: &[&str] = &["yes", "designated"];

/// Pedestrian access predicate over way tags.
pub fn is_walkable(tags: &Tags) -> bool {
    tags.is_one_of("highway", WALKABLE_HIGHWAY)
        || tags.is_one_of("sidewalk", SIDEWALK_SIDES)
        || tags.is_one_of("foot", FOOT_ALLOWED)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    /// Dense index of the neighbor.
    pub to: usize,
    pub length_m: f64,
    /// Index into [`PedestrianGraph::street_name`].
    pub street: Option<u32>,
}

/// Undirected graph with dense node indices ordered by node id.
#[derive(Debug, Clone, PartialEq)]
pub struct PedestrianGraph {
    ids: Vec<NodeId>,
    positions: Vec<LatLon>,
    adjacency: Vec<Vec<Edge>>,
    streets: Vec<String>,
}

struct Builder {
    ids: Vec<NodeId>,
    positions: Vec<LatLon>,
    edges: BTreeMap<(usize, usize), (f64, Option<u32>)>,
    streets: Vec<String>,
    street_index: BTreeMap<String, u32>,
}

impl Builder {
    fn new(nodes: BTreeMap<NodeId, LatLon>) -> Self {
        let (ids, positions) = nodes.into_iter().unzip();
        Self { ids, positions, edges: BTreeMap::new(), streets: Vec::new(), street_index: BTreeMap::new() }
    }

    fn index(&self, id: NodeId) -> Result<usize, GraphError> {
        self.ids.binary_search(&id).map_err(|_| GraphError::UnknownNode(id))
    }

    fn street(&mut self, name: Option<&str>) -> Option<u32> {
        let name = name?;
        if let Some(&i) = self.street_index.get(name) {
            return Some(i);
        }
        let i = self.streets.len() as u32;
        self.streets.push(name.to_string());
        self.street_index.insert(name.to_string(), i);
        Some(i)
    }

    /// First edge between a pair wins.
    fn add(&mut self, a: usize, b: usize, length_m: f64, street: Option<u32>) {
        if a == b {
            return;
        }
        let key = if a < b { (a, b) } else { (b, a) };
        self.edges.entry(key).or_insert((length_m, street));
    }

    fn finish(self) -> PedestrianGraph {
        let mut adjacency = alloc::vec![Vec::new(); self.ids.len()];
        for (&(a, b), &(length_m, street)) in &self.edges {
            adjacency[a].push(Edge { to: b, length_m, street });
            adjacency[b].push(Edge { to: a, length_m, street });
        }
        for list in &mut adjacency {
            list.sort_by_key(|e| e.to);
        }
        PedestrianGraph { ids: self.ids, positions: self.positions, adjacency, streets: self.streets }
    }
}

impl PedestrianGraph {
    /// Keeps the nodes of walkable ways and links consecutive way nodes with
    /// haversine-weighted edges.
    pub fn from_extract(extract: &MapExtract) -> Result<Self, GraphError> {
        let positions = extract.node_positions();
        let walkable: Vec<_> = extract.ways.iter().filter(|w| is_walkable(&w.tags)).collect();
        if walkable.is_empty() {
            return Err(GraphError::EmptyGraph);
        }
        let mut nodes = BTreeMap::new();
        for way in &walkable {
            for id in &way.nodes {
                let pos = positions.get(id).ok_or(GraphError::UnknownNode(*id))?;
                nodes.insert(*id, *pos);
            }
        }
        let mut b = Builder::new(nodes);
        for way in walkable {
            let street = b.street(way.tags.get("name"));
            for pair in way.nodes.windows(2) {
                let (i, j) = (b.index(pair[0])?, b.index(pair[1])?);
                let len = haversine(b.positions[i], b.positions[j]).max(MIN_EDGE_LENGTH_M);
                b.add(i, j, len, street);
            }
        }
        Ok(b.finish())
    }

    /// Graph from explicit nodes and weighted edges, e.g. for synthetic tests.
    pub fn from_edges(nodes: &[(NodeId, LatLon)], edges: &[(NodeId, NodeId, f64)]) -> Result<Self, GraphError> {
        let mut b = Builder::new(nodes.iter().copied().collect());
        for &(u, v, len) in edges {
            if !(len > 0.0 && len.is_finite()) {
                return Err(GraphError::InvalidLength(u, v));
            }
            let (i, j) = (b.index(u)?, b.index(v)?);
            b.add(i, j, len, None);
        }
        Ok(b.finish())
    }

    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn index_of(&self, id: NodeId) -> Option<usize> {
        self.ids.binary_search(&id).ok()
    }

    pub fn node_id(&self, index: usize) -> NodeId {
        self.ids[index]
    }

    pub fn node_ids(&self) -> &[NodeId] {
        &self.ids
    }

    pub fn position(&self, index: usize) -> LatLon {
        self.positions[index]
    }

    pub fn position_of(&self, id: NodeId) -> Option<LatLon> {
        self.index_of(id).map(|i| self.positions[i])
    }

    pub fn neighbors(&self, index: usize) -> &[Edge] {
        &self.adjacency[index]
    }

    pub fn degree(&self, id: NodeId) -> Option<usize> {
        self.index_of(id).map(|i| self.adjacency[i].len())
    }

    pub fn street_name(&self, street: u32) -> &str {
        &self.streets[street as usize]
    }

    pub fn streets(&self) -> &[String] {
        &self.streets
    }

    /// Edge between two dense indices, if any.
    pub fn edge(&self, a: usize, b: usize) -> Option<&Edge> {
        let list = &self.adjacency[a];
        list.binary_search_by_key(&b, |e| e.to).ok().map(|k| &list[k])
    }

    /// Length of the edge between two node ids, if they are adjacent.
    pub fn edge_length(&self, a: NodeId, b: NodeId) -> Option<f64> {
        let (i, j) = (self.index_of(a)?, self.index_of(b)?);
        self.edge(i, j).map(|e| e.length_m)
    }

    /// Nearest node to `point`; ties go to the lowest node id.
    pub fn snap(&self, point: LatLon, max_snap_m: f64) -> Result<NodeId, GraphError> {
        let mut best: Option<(usize, f64)> = None;
        for (i, pos) in self.positions.iter().enumerate() {
            let d = haversine(point, *pos);
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((i, d));
            }
        }
        let (i, d) = best.ok_or(GraphError::EmptyGraph)?;
        if d > max_snap_m {
            return Err(GraphError::TooFar { distance_m: d, limit_m: max_snap_m });
        }
        Ok(self.ids[i])
    }

    /// Rebuilds a graph from serialized parts (see [`PedestrianGraph::parts`]).
    pub fn from_parts(
        nodes: Vec<(NodeId, LatLon)>,
        edges: Vec<(NodeId, NodeId, f64, Option<String>)>,
    ) -> Result<Self, GraphError> {
        let mut b = Builder::new(nodes.into_iter().collect());
        for (u, v, len, name) in edges {
            if !(len > 0.0 && len.is_finite()) {
                return Err(GraphError::InvalidLength(u, v));
            }
            let (i, j) = (b.index(u)?, b.index(v)?);
            let street = b.street(name.as_deref());
            b.add(i, j, len, street);
        }
        Ok(b.finish())
    }

    /// Nodes and undirected edges (each once, lower index first).
    #[allow(clippy::type_complexity)]
    pub fn parts(&self) -> (Vec<(NodeId, LatLon)>, Vec<(NodeId, NodeId, f64, Option<String>)>) {
        let nodes = self.ids.iter().copied().zip(self.positions.iter().copied()).collect();
        let mut edges = Vec::new();
        for (a, list) in self.adjacency.iter().enumerate() {
            for e in list.iter().filter(|e| e.to > a) {
                edges.push((
                    self.ids[a],
                    self.ids[e.to],
                    e.length_m,
                    e.street.map(|s| self.street_name(s).to_string()),
                ));
            }
        }
        (nodes, edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extract::{Node, Way};
    use alloc::vec;

    fn tags(pairs: &[(&str, &str)]) -> Tags {
        pairs.iter().copied().collect()
    }

    fn node(id: NodeId, lat: f64, lon: f64) -> Node {
        Node { id, pos: LatLon::new(lat, lon), tags: Tags::new() }
    }

    fn abc_extract(highway: &str) -> MapExtract {
        MapExtract {
            nodes: vec![node(1, 48.85, 2.29), node(2, 48.85, 2.30), node(3, 48.86, 2.30)],
            ways: vec![Way { id: 1, nodes: vec![1, 2, 3], tags: tags(&[("highway", highway)]) }],
        }
    }

    #[test]
    fn footway_becomes_haversine_edges() {
        let e = abc_extract("footway");
        let g = PedestrianGraph::from_extract(&e).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
        let ab = haversine(LatLon::new(48.85, 2.29), LatLon::new(48.85, 2.30));
        assert_eq!(g.edge_length(1, 2), Some(ab));
        assert_eq!(g.edge_length(2, 1), Some(ab));
        assert!(g.edge_length(1, 3).is_none());
    }

    #[test]
    fn motorway_only_is_empty() {
        assert_eq!(PedestrianGraph::from_extract(&abc_extract("motorway")), Err(GraphError::EmptyGraph));
    }

    #[test]
    fn shared_node_connects_two_ways() {
        // Ways [1,2,3] and [4,2,5] cross at 2; by hand, 2 touches 1, 3, 4 and 5.
        let extract = MapExtract {
            nodes: vec![
                node(1, 0.0, 0.0),
                node(2, 0.0, 0.001),
                node(3, 0.0, 0.002),
                node(4, 0.001, 0.001),
                node(5, -0.001, 0.001),
            ],
            ways: vec![
                Way { id: 1, nodes: vec![1, 2, 3], tags: tags(&[("highway", "path")]) },
                Way { id: 2, nodes: vec![4, 2, 5], tags: tags(&[("sidewalk", "both"), ("highway", "residential")]) },
            ],
        };
        let g = PedestrianGraph::from_extract(&extract).unwrap();
        assert_eq!(g.degree(2), Some(4));
        assert_eq!(g.degree(1), Some(1));
        assert_eq!(g.degree(4), Some(1));
        assert_eq!(g.edge_count(), 4);
    }

    #[test]
    fn non_walkable_way_nodes_are_dropped() {
        let mut e = abc_extract("footway");
        e.nodes.push(node(4, 48.87, 2.31));
        e.ways.push(Way { id: 2, nodes: vec![3, 4], tags: tags(&[("highway", "primary")]) });
        let g = PedestrianGraph::from_extract(&e).unwrap();
        assert_eq!(g.node_ids(), &[1, 2, 3]);
    }

    #[test]
    fn walkable_predicate() {
        assert!(is_walkable(&tags(&[("highway", "living_street")])));
        assert!(is_walkable(&tags(&[("highway", "primary"), ("sidewalk", "left")])));
        assert!(is_walkable(&tags(&[("foot", "designated")])));
        assert!(!is_walkable(&tags(&[("highway", "primary"), ("sidewalk", "no")])));
        assert!(!is_walkable(&tags(&[("foot", "no")])));
    }

    #[test]
    fn snap_exact_tie_and_limit() {
        let p = LatLon::new(0.0, 0.0);
        let g = PedestrianGraph::from_edges(
            &[(7, LatLon::new(0.0, 0.001)), (3, LatLon::new(0.0, -0.001)), (9, LatLon::new(0.01, 0.0))],
            &[(7, 3, 1.0)],
        )
        .unwrap();
        assert_eq!(g.snap(p, 500.0), Ok(3));
        assert_eq!(g.snap(LatLon::new(0.01, 0.0), 500.0), Ok(9));
        // ~600 m west of node 3, every node farther than that.
        let far = LatLon::new(0.0, -0.001 - 600.0 / 111_194.93);
        assert!(matches!(g.snap(far, 500.0), Err(GraphError::TooFar { .. })));
    }

    #[test]
    fn parts_round_trip() {
        let e = abc_extract("footway");
        let mut e2 = e.clone();
        e2.ways[0].tags.insert("name", "Quai Branly");
        let g = PedestrianGraph::from_extract(&e2).unwrap();
        let (nodes, edges) = g.parts();
        assert_eq!(PedestrianGraph::from_parts(nodes, edges).unwrap(), g);
    }
}
