//! Core algorithms of the walkrag engine.
//!
//! Everything in this crate is pure computation over in-memory data and
//! needs only `alloc`: tag rules for map features, the pedestrian graph and
//! its router, the capped-count walkability score, an R-tree backed spatial
//! join, a token-hashing encoder with a cosine vector index, and the
//! rule-based intent classifier. File formats, HTTP, and the command line
//! live in the `walkrag` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod air;
pub mod extract;
pub mod features;
pub mod gazetteer;
pub mod geo;
pub mod graph;
pub mod intent;
pub mod retrieval;
pub mod routing;
pub mod spatial;
pub mod walkability;

pub use air::{AirQualityClient, AirQualitySample, Aqi, FixtureAirQuality};
pub use extract::{MapExtract, Node, Tags, Way};
pub use features::{extract_features, FeatureKind, FeatureRecord, FeatureSet};
pub use gazetteer::{Gazetteer, GazetteerEntry};
pub use geo::{haversine, LatLon};
pub use graph::PedestrianGraph;
pub use intent::{classify_intent, Intent, Preference, RuleClassifier};
pub use retrieval::{Embedder, Embedding, HashingEncoder, Passage, SearchResult, VectorIndex};
pub use routing::{Instruction, InstructionKind, RouteCandidate, Segment};
pub use spatial::{Corridor, PreferenceFilter, SpatialIndex};
pub use walkability::{IndicatorKind, IndicatorWeights, WalkabilityScore};
