//! Structured route payload handed to the generator and returned by the API.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use walkrag_core::walkability::IndicatorKind;
use walkrag_core::{FeatureRecord, LatLon, RouteCandidate, WalkabilityScore};

pub const PAYLOAD_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstructionOut {
    pub kind: String,
    pub text: String,
    pub distance_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorOut {
    pub kind: String,
    pub c: f64,
    pub w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkabilityOut {
    pub ws: f64,
    pub tau: f64,
    pub indicators: Vec<IndicatorOut>,
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoiOut {
    pub name: String,
    pub category: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentOut {
    pub index: usize,
    pub length_m: f64,
    pub pois: Vec<PoiOut>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoutePayload {
    pub payload_version: u32,
    pub origin: String,
    pub destination: String,
    pub instructions: Vec<InstructionOut>,
    pub walkability: WalkabilityOut,
    pub segments: Vec<SegmentOut>,
}

/// A POI attached to a route segment, with its position for map output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoiPoint {
    pub name: String,
    pub category: String,
    pub segment: usize,
    pub lat: f64,
    pub lon: f64,
}

/// Selected route plus everything needed to draw it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteAnswer {
    pub payload: RoutePayload,
    /// `[lat, lon]` pairs along the route.
    pub geometry: Vec<[f64; 2]>,
    pub pois: Vec<PoiPoint>,
}

/// Distances are reported to the decimetre.
pub fn round_m(x: f64) -> f64 {
    (x * 10.0).round() / 10.0
}

fn poi_out(f: &FeatureRecord) -> PoiOut {
    let category = f.category.clone().unwrap_or_else(|| "poi".into());
    PoiOut { name: f.name.clone().unwrap_or_else(|| category.clone()), category }
}

/// Assembles the answer for `route`. `pois_per_segment` holds feature
/// indices, one list per segment.
pub fn build_answer(
    origin: &str,
    destination: &str,
    route: &RouteCandidate,
    score: &WalkabilityScore,
    features: &[FeatureRecord],
    pois_per_segment: &[Vec<usize>],
) -> RouteAnswer {
    let instructions = route
        .instructions()
        .into_iter()
        .map(|i| InstructionOut { kind: i.kind.as_str().into(), text: i.text, distance_m: round_m(i.distance_m) })
        .collect();
    let weights = score.weights.values();
    let indicators = IndicatorKind::ALL
        .iter()
        .map(|k| IndicatorOut { kind: k.as_str().into(), c: score.c[k.index()], w: weights[k.index()] })
        .collect();
    let mut pois = Vec::new();
    let segments = route
        .segments
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let attached = pois_per_segment.get(i).map(Vec::as_slice).unwrap_or(&[]);
            for &f in attached {
                let out = poi_out(&features[f]);
                pois.push(PoiPoint {
                    name: out.name,
                    category: out.category,
                    segment: i,
                    lat: features[f].pos.lat,
                    lon: features[f].pos.lon,
                });
            }
            SegmentOut {
                index: i,
                length_m: round_m(s.length_m),
                pois: attached.iter().map(|&f| poi_out(&features[f])).collect(),
            }
        })
        .collect();
    RouteAnswer {
        payload: RoutePayload {
            payload_version: PAYLOAD_VERSION,
            origin: origin.into(),
            destination: destination.into(),
            instructions,
            walkability: WalkabilityOut {
                ws: score.ws,
                tau: score.tau,
                indicators,
                flags: score.flags.iter().map(|f| f.as_str().into()).collect(),
            },
            segments,
        },
        geometry: route.geometry().iter().map(|p: &LatLon| [p.lat, p.lon]).collect(),
        pois,
    }
}

impl RoutePayload {
    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("payload serializes")
    }

    pub fn poi_names(&self) -> impl Iterator<Item = &str> {
        self.segments.iter().flat_map(|s| s.pois.iter().map(|p| p.name.as_str()))
    }
}

impl RouteAnswer {
    /// GeoJSON `FeatureCollection`: the route line first, then one point per POI.
    pub fn geojson(&self) -> Value {
        let line: Vec<[f64; 2]> = self.geometry.iter().map(|[lat, lon]| [*lon, *lat]).collect();
        let mut features = vec![json!({
            "type": "Feature",
            "geometry": {"type": "LineString", "coordinates": line},
            "properties": {
                "origin": self.payload.origin,
                "destination": self.payload.destination,
                "ws": self.payload.walkability.ws,
            },
        })];
        for p in &self.pois {
            features.push(json!({
                "type": "Feature",
                "geometry": {"type": "Point", "coordinates": [p.lon, p.lat]},
                "properties": {"name": p.name, "category": p.category, "segment": p.segment},
            }));
        }
        json!({"type": "FeatureCollection", "features": features})
    }
}
