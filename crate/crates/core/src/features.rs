//! Walkability features and POIs derived from map tags.
//!
//! Kind rules:
//!
//! | kind          | matching tags                                                        |
//! |---------------|----------------------------------------------------------------------|
//! | Sidewalk      | `highway=footway`, any `footway=*`, any `sidewalk=*`                 |
//! | GreenArea     | `landuse` in grass/forest/meadow/recreation_ground, `natural` in wood/tree/scrub, `leisure` in park/garden |
//! | Accessibility | `wheelchair` in yes/designated                                       |
//! | POI           | any `tourism=*`, category is the tag value                           |
//!
//! An entity matching several rules yields one record per matched kind.
//! Way geometry is reduced to the arithmetic centroid of its vertices.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::extract::{MapExtract, NodeId, Tags};
use crate::geo::LatLon;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FeatureKind {
    Sidewalk,
    GreenArea,
    Accessibility,
    Poi,
}

impl FeatureKind {
    pub const ALL: [FeatureKind; 4] =
        [FeatureKind::Sidewalk, FeatureKind::GreenArea, FeatureKind::Accessibility, FeatureKind::Poi];

    pub fn as_str(&self) -> &'static str {
        match self {
            FeatureKind::Sidewalk => "sidewalk",
            FeatureKind::GreenArea => "green_area",
            FeatureKind::Accessibility => "accessibility",
            FeatureKind::Poi => "poi",
        }
    }
}

/// Where a feature came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum FeatureSource {
    Node(NodeId),
    Way(i64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRecord {
    pub id: FeatureSource,
    pub kind: FeatureKind,
    pub pos: LatLon,
    pub tags: Tags,
    pub name: Option<String>,
    /// Only set for POIs.
    pub category: Option<String>,
}

pub type FeatureSet = Vec<FeatureRecord>;

const GREEN_LANDUSE: &[&str] = &["grass", "forest", "meadow", "recreation_ground"];
const GREEN_NATURAL: &[&str] = &["wood", "tree", "scrub"];
const GREEN_LEISURE: &[&str] = &["park", "garden"];
const ACCESSIBLE: &[&str] = &["yes", "designated"];

/// Kinds an entity with these tags belongs to, in `FeatureKind` order.
pub fn kinds_for_tags(tags: &Tags) -> Vec<FeatureKind> {
    let mut kinds = Vec::new();
    if tags.get("highway") == Some("footway") || tags.contains_key("footway") || tags.contains_key("sidewalk") {
        kinds.push(FeatureKind::Sidewalk);
    }
    if tags.is_one_of("landuse", GREEN_LANDUSE)
        || tags.is_one_of("natural", GREEN_NATURAL)
        || tags.is_one_of("leisure", GREEN_LEISURE)
    {
        kinds.push(FeatureKind::GreenArea);
    }
    if tags.is_one_of("wheelchair", ACCESSIBLE) {
        kinds.push(FeatureKind::Accessibility);
    }
    if tags.get("tourism").is_some_and(|v| !v.is_empty()) {
        kinds.push(FeatureKind::Poi);
    }
    kinds
}

fn centroid(points: &[LatLon]) -> Option<LatLon> {
    if points.is_empty() {
        return None;
    }
    // A closed ring repeats its first vertex; count it once.
    let ring = points.len() > 1 && points.first() == points.last();
    let pts = if ring { &points[..points.len() - 1] } else { points };
    let n = pts.len() as f64;
    let (lat, lon) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.lat, b + p.lon));
    Some(LatLon::new(lat / n, lon / n))
}

fn records_for(id: FeatureSource, pos: LatLon, tags: &Tags, out: &mut FeatureSet) {
    for kind in kinds_for_tags(tags) {
        out.push(FeatureRecord {
            id,
            kind,
            pos,
            tags: tags.clone(),
            name: tags.get("name").map(ToString::to_string),
            category: match kind {
                FeatureKind::Poi => tags.get("tourism").map(ToString::to_string),
                _ => None,
            },
        });
    }
}

/// Derives feature records from every node and way of a validated extract.
pub fn extract_features(extract: &MapExtract) -> FeatureSet {
    let positions = extract.node_positions();
    let mut out = Vec::new();
    for node in &extract.nodes {
        records_for(FeatureSource::Node(node.id), node.pos, &node.tags, &mut out);
    }
    for way in &extract.ways {
        if kinds_for_tags(&way.tags).is_empty() {
            continue;
        }
        let pts: Vec<LatLon> = way.nodes.iter().filter_map(|id| positions.get(id).copied()).collect();
        if let Some(c) = centroid(&pts) {
            records_for(FeatureSource::Way(way.id), c, &way.tags, &mut out);
        }
    }
    out
}
