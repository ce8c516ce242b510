//! Ingest: parse the map extract and gazetteer, write graph, features and stats.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use walkrag_core::features::FeatureSource;
use walkrag_core::graph::GraphError;
use walkrag_core::{extract_features, FeatureKind, FeatureSet, Gazetteer, MapExtract, PedestrianGraph};

use crate::data::{load_gazetteer, DataError};
use crate::osm::{parse_map_extract, OsmError};

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("map extract: {0}")]
    Osm(#[from] OsmError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("graph: {0}")]
    Graph(#[from] GraphError),
    #[error("writing artifacts: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestStats {
    pub extract_nodes: usize,
    pub extract_ways: usize,
    pub graph_nodes: usize,
    pub graph_edges: usize,
    pub features: BTreeMap<String, usize>,
    pub gazetteer_entries: usize,
}

pub struct Ingested {
    pub extract: MapExtract,
    pub graph: PedestrianGraph,
    pub features: FeatureSet,
    pub gazetteer: Gazetteer,
    pub stats: IngestStats,
}

pub fn ingest(map: impl Read, gazetteer: impl Read) -> Result<Ingested, IngestError> {
    let extract = parse_map_extract(map)?;
    let gazetteer = load_gazetteer(gazetteer)?;
    let graph = PedestrianGraph::from_extract(&extract)?;
    let features = extract_features(&extract);
    let mut counts: BTreeMap<String, usize> = FeatureKind::ALL.iter().map(|k| (k.as_str().to_owned(), 0)).collect();
    for f in &features {
        *counts.get_mut(f.kind.as_str()).expect("all kinds present") += 1;
    }
    let stats = IngestStats {
        extract_nodes: extract.nodes.len(),
        extract_ways: extract.ways.len(),
        graph_nodes: graph.node_count(),
        graph_edges: graph.edge_count(),
        features: counts,
        gazetteer_entries: gazetteer.len(),
    };
    Ok(Ingested { extract, graph, features, gazetteer, stats })
}

#[derive(Serialize)]
struct GraphFile {
    nodes: Vec<(i64, f64, f64)>,
    edges: Vec<(i64, i64, f64, Option<String>)>,
}

#[derive(Serialize)]
struct FeatureOut<'a> {
    kind: &'a str,
    source: String,
    lat: f64,
    lon: f64,
    name: Option<&'a str>,
    category: Option<&'a str>,
}

fn write_json(path: &Path, value: &impl Serialize) -> std::io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    out.flush()
}

/// Writes `graph.json`, `features.json` and `stats.json` into `dir`.
pub fn write_artifacts(dir: &Path, ingested: &Ingested) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let (nodes, edges) = ingested.graph.parts();
    let graph = GraphFile { nodes: nodes.into_iter().map(|(id, p)| (id, p.lat, p.lon)).collect(), edges };
    write_json(&dir.join("graph.json"), &graph)?;
    let features: Vec<FeatureOut> = ingested
        .features
        .iter()
        .map(|f| FeatureOut {
            kind: f.kind.as_str(),
            source: match f.id {
                FeatureSource::Node(id) => format!("node/{id}"),
                FeatureSource::Way(id) => format!("way/{id}"),
            },
            lat: f.pos.lat,
            lon: f.pos.lon,
            name: f.name.as_deref(),
            category: f.category.as_deref(),
        })
        .collect();
    write_json(&dir.join("features.json"), &features)?;
    write_json(&dir.join("stats.json"), &ingested.stats)
}
