//! Shortest and alternative pedestrian routes with turn-by-turn segments.

use alloc::collections::BinaryHeap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::extract::NodeId;
use crate::geo::{bearing_change, initial_bearing, LatLon};
use crate::graph::PedestrianGraph;

pub const DEFAULT_ALTERNATIVES: usize = 3;
pub const DEFAULT_PENALTY_FACTOR: f64 = 1.4;
pub const DEFAULT_MAX_SNAP_M: f64 = 500.0;

/// Heading changes up to this many degrees either way read as "continue".
pub const STRAIGHT_LIMIT_DEG: f64 = 30.0;
/// Beyond this the walker reverses direction; reported as a U-turn.
pub const TURN_LIMIT_DEG: f64 = 150.0;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum RoutingError {
    #[error("no route between {src} and {dst}")]
    NoRoute { src: NodeId, dst: NodeId },
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("nodes {0} and {1} are not adjacent")]
    NotAdjacent(NodeId, NodeId),
    #[error("alternative count must be at least 1")]
    InvalidCount,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InstructionKind {
    Depart,
    Continue,
    TurnLeft,
    TurnRight,
    Arrive,
}

impl InstructionKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            InstructionKind::Depart => "depart",
            InstructionKind::Continue => "continue",
            InstructionKind::TurnLeft => "turn_left",
            InstructionKind::TurnRight => "turn_right",
            InstructionKind::Arrive => "arrive",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "depart" => InstructionKind::Depart,
            "continue" => InstructionKind::Continue,
            "turn_left" => InstructionKind::TurnLeft,
            "turn_right" => InstructionKind::TurnRight,
            "arrive" => InstructionKind::Arrive,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instruction {
    pub kind: InstructionKind,
    pub text: String,
    /// Distance walked after the manoeuvre; 0 for `Arrive`.
    pub distance_m: f64,
}

/// One node-to-node leg of a route. `instruction` is the manoeuvre at its start.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub start: NodeId,
    pub end: NodeId,
    pub polyline: Vec<LatLon>,
    pub length_m: f64,
    pub street: Option<String>,
    pub instruction: Instruction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RouteCandidate {
    pub nodes: Vec<NodeId>,
    pub segments: Vec<Segment>,
    pub total_length_m: f64,
}

impl RouteCandidate {
    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// Segment chain shares endpoints and matches the node sequence.
    pub fn is_continuous(&self) -> bool {
        if self.segments.is_empty() {
            return self.nodes.len() <= 1;
        }
        if self.nodes.len() != self.segments.len() + 1 {
            return false;
        }
        let chained = self.segments.windows(2).all(|w| w[0].end == w[1].start);
        let aligned =
            self.segments.iter().enumerate().all(|(i, s)| s.start == self.nodes[i] && s.end == self.nodes[i + 1]);
        let drawn = self.segments.iter().all(|s| s.polyline.len() >= 2);
        let joined = self.segments.windows(2).all(|w| w[0].polyline.last() == w[1].polyline.first());
        chained && aligned && drawn && joined
    }

    /// Full instruction list: one per segment, then `Arrive`.
    pub fn instructions(&self) -> Vec<Instruction> {
        let mut out: Vec<Instruction> = self.segments.iter().map(|s| s.instruction.clone()).collect();
        if !out.is_empty() {
            out.push(Instruction {
                kind: InstructionKind::Arrive,
                text: String::from("Arrive at your destination"),
                distance_m: 0.0,
            });
        }
        out
    }

    /// Route vertices from origin to destination.
    pub fn geometry(&self) -> Vec<LatLon> {
        let mut out = Vec::new();
        for (i, s) in self.segments.iter().enumerate() {
            let skip = usize::from(i > 0);
            out.extend(s.polyline.iter().skip(skip).copied());
        }
        out
    }

    /// Point halfway along the route, or `None` for an empty route.
    pub fn midpoint(&self) -> Option<LatLon> {
        let half = self.total_length_m / 2.0;
        let mut walked = 0.0;
        for s in &self.segments {
            if walked + s.length_m >= half {
                let t = if s.length_m > 0.0 { (half - walked) / s.length_m } else { 0.0 };
                let (a, b) = (s.polyline[0], s.polyline[s.polyline.len() - 1]);
                return Some(LatLon::new(a.lat + t * (b.lat - a.lat), a.lon + t * (b.lon - a.lon)));
            }
            walked += s.length_m;
        }
        self.segments.last().map(|s| s.polyline[s.polyline.len() - 1])
    }
}

#[derive(Clone, Copy, PartialEq)]
struct HeapEntry {
    dist: f64,
    node: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    // Min-heap on (dist, node index); node indices follow node-id order.
    fn cmp(&self, other: &Self) -> Ordering {
        other.dist.total_cmp(&self.dist).then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Dijkstra over dense indices with per-edge weights `weights[u][k]` aligned
/// with `graph.neighbors(u)`. Equal-cost predecessors resolve to the lowest index.
fn dijkstra(graph: &PedestrianGraph, src: usize, dst: usize, weights: &[Vec<f64>]) -> Option<Vec<usize>> {
    let n = graph.node_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut pred = vec![usize::MAX; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[src] = 0.0;
    heap.push(HeapEntry { dist: 0.0, node: src });
    while let Some(HeapEntry { dist: d, node: u }) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        if u == dst {
            break;
        }
        for (k, e) in graph.neighbors(u).iter().enumerate() {
            let v = e.to;
            if done[v] {
                continue;
            }
            let nd = d + weights[u][k];
            if nd < dist[v] {
                dist[v] = nd;
                pred[v] = u;
                heap.push(HeapEntry { dist: nd, node: v });
            } else if nd == dist[v] && u < pred[v] {
                pred[v] = u;
            }
        }
    }
    if !done[dst] {
        return None;
    }
    let mut path = vec![dst];
    let mut cur = dst;
    while cur != src {
        cur = pred[cur];
        path.push(cur);
    }
    path.reverse();
    Some(path)
}

fn base_weights(graph: &PedestrianGraph) -> Vec<Vec<f64>> {
    (0..graph.node_count()).map(|u| graph.neighbors(u).iter().map(|e| e.length_m).collect()).collect()
}

fn resolve(graph: &PedestrianGraph, id: NodeId) -> Result<usize, RoutingError> {
    graph.index_of(id).ok_or(RoutingError::UnknownNode(id))
}

fn route_from_indices(graph: &PedestrianGraph, path: &[usize]) -> RouteCandidate {
    let nodes: Vec<NodeId> = path.iter().map(|&i| graph.node_id(i)).collect();
    // Indices come from the graph's own adjacency, so every pair is an edge.
    segmentize(&nodes, graph).expect("dijkstra path follows graph edges")
}

/// Minimum-length route from `src` to `dst`.
pub fn shortest_path(graph: &PedestrianGraph, src: NodeId, dst: NodeId) -> Result<RouteCandidate, RoutingError> {
    let (s, t) = (resolve(graph, src)?, resolve(graph, dst)?);
    let path = dijkstra(graph, s, t, &base_weights(graph)).ok_or(RoutingError::NoRoute { src, dst })?;
    Ok(route_from_indices(graph, &path))
}

/// Up to `k` distinct routes by the penalty method.
///
/// The first entry is the shortest path. After each accepted route the
/// weights of its edges are multiplied by `penalty_factor` on a private
/// overlay and the search is repeated; it stops after `k` routes or as soon
/// as a search returns a node sequence already accepted.
pub fn alternative_routes(
    graph: &PedestrianGraph,
    src: NodeId,
    dst: NodeId,
    k: usize,
    penalty_factor: f64,
) -> Result<Vec<RouteCandidate>, RoutingError> {
    if k == 0 {
        return Err(RoutingError::InvalidCount);
    }
    let (s, t) = (resolve(graph, src)?, resolve(graph, dst)?);
    let mut weights = base_weights(graph);
    let mut accepted: Vec<Vec<usize>> = Vec::new();
    while accepted.len() < k {
        let Some(path) = dijkstra(graph, s, t, &weights) else {
            break;
        };
        if accepted.contains(&path) {
            break;
        }
        for pair in path.windows(2) {
            penalize(graph, &mut weights, pair[0], pair[1], penalty_factor);
            penalize(graph, &mut weights, pair[1], pair[0], penalty_factor);
        }
        accepted.push(path);
    }
    if accepted.is_empty() {
        return Err(RoutingError::NoRoute { src, dst });
    }
    Ok(accepted.iter().map(|p| route_from_indices(graph, p)).collect())
}

fn penalize(graph: &PedestrianGraph, weights: &mut [Vec<f64>], u: usize, v: usize, factor: f64) {
    if let Some(k) = graph.neighbors(u).iter().position(|e| e.to == v) {
        weights[u][k] *= factor;
    }
}

const COMPASS: [&str; 8] = ["north", "northeast", "east", "southeast", "south", "southwest", "west", "northwest"];

fn compass(bearing: f64) -> &'static str {
    let sector = libm::floor((bearing + 22.5) / 45.0) as i64;
    COMPASS[sector.rem_euclid(8) as usize]
}

/// Manoeuvre for a heading change in degrees (positive = clockwise).
pub fn turn_kind(change: f64) -> (InstructionKind, bool) {
    let a = change.abs();
    if a <= STRAIGHT_LIMIT_DEG {
        (InstructionKind::Continue, false)
    } else if a <= TURN_LIMIT_DEG {
        if change < 0.0 {
            (InstructionKind::TurnLeft, false)
        } else {
            (InstructionKind::TurnRight, false)
        }
    } else {
        (InstructionKind::Continue, true)
    }
}

fn instruction_text(kind: InstructionKind, u_turn: bool, bearing: f64, street: Option<&str>, meters: f64) -> String {
    let m = libm::round(meters);
    match (kind, street) {
        (InstructionKind::Depart, Some(s)) => format!("Head {} on {s} for {m:.0} m", compass(bearing)),
        (InstructionKind::Depart, None) => format!("Head {} for {m:.0} m", compass(bearing)),
        (InstructionKind::Continue, Some(s)) if u_turn => format!("Make a U-turn onto {s} and walk {m:.0} m"),
        (InstructionKind::Continue, None) if u_turn => format!("Make a U-turn and walk {m:.0} m"),
        (InstructionKind::Continue, Some(s)) => format!("Continue on {s} for {m:.0} m"),
        (InstructionKind::Continue, None) => format!("Continue straight for {m:.0} m"),
        (InstructionKind::TurnLeft, Some(s)) => format!("Turn left onto {s} and walk {m:.0} m"),
        (InstructionKind::TurnLeft, None) => format!("Turn left and walk {m:.0} m"),
        (InstructionKind::TurnRight, Some(s)) => format!("Turn right onto {s} and walk {m:.0} m"),
        (InstructionKind::TurnRight, None) => format!("Turn right and walk {m:.0} m"),
        (InstructionKind::Arrive, _) => String::from("Arrive at your destination"),
    }
}

/// One segment per consecutive node pair, each carrying the manoeuvre at its start.
pub fn segmentize(nodes: &[NodeId], graph: &PedestrianGraph) -> Result<RouteCandidate, RoutingError> {
    let mut segments = Vec::with_capacity(nodes.len().saturating_sub(1));
    let mut prev_bearing: Option<f64> = None;
    for pair in nodes.windows(2) {
        let (a, b) = (resolve(graph, pair[0])?, resolve(graph, pair[1])?);
        let edge = graph.edge(a, b).ok_or(RoutingError::NotAdjacent(pair[0], pair[1]))?;
        let (pa, pb) = (graph.position(a), graph.position(b));
        let bearing = initial_bearing(pa, pb);
        let street = edge.street.map(|s| String::from(graph.street_name(s)));
        let (kind, u_turn) = match prev_bearing {
            None => (InstructionKind::Depart, false),
            Some(prev) => turn_kind(bearing_change(prev, bearing)),
        };
        // Heading along the edge at `b`, for the next manoeuvre.
        prev_bearing = Some((initial_bearing(pb, pa) + 180.0) % 360.0);
        segments.push(Segment {
            start: pair[0],
            end: pair[1],
            polyline: vec![pa, pb],
            length_m: edge.length_m,
            instruction: Instruction {
                kind,
                text: instruction_text(kind, u_turn, bearing, street.as_deref(), edge.length_m),
                distance_m: edge.length_m,
            },
            street,
        });
    }
    let total_length_m = segments.iter().map(|s| s.length_m).sum();
    Ok(RouteCandidate { nodes: nodes.to_vec(), segments, total_length_m })
}
