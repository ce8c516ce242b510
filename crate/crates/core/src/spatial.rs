//! Point R-tree, buffered route corridors and the POI spatial join.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::features::{FeatureKind, FeatureRecord};
use crate::gazetteer::normalize_name;
use crate::geo::{point_polyline_distance, BBox, LatLon};
use crate::routing::RouteCandidate;

const NODE_CAPACITY: usize = 16;

#[derive(Debug, Clone, Copy)]
struct TreeNode {
    bbox: BBox,
    /// Child range: into `items` on level 0, into the level below otherwise.
    start: usize,
    end: usize,
}

/// Static R-tree over points, bulk loaded with sort-tile-recursive packing.
#[derive(Debug, Clone, Default)]
pub struct SpatialIndex {
    items: Vec<(LatLon, usize)>,
    levels: Vec<Vec<TreeNode>>,
}

fn center(b: &BBox) -> (f64, f64) {
    ((b.min_lat + b.max_lat) / 2.0, (b.min_lon + b.max_lon) / 2.0)
}

/// Orders entries into STR tiles: vertical slices by longitude, each sorted by latitude.
fn str_sort<T>(entries: &mut [T], key: impl Fn(&T) -> (f64, f64)) {
    let n = entries.len();
    if n <= NODE_CAPACITY {
        return;
    }
    let leaves = n.div_ceil(NODE_CAPACITY);
    let slices = libm::ceil(libm::sqrt(leaves as f64)) as usize;
    let per_slice = slices * NODE_CAPACITY;
    entries.sort_by(|a, b| key(a).1.total_cmp(&key(b).1));
    for slice in entries.chunks_mut(per_slice) {
        slice.sort_by(|a, b| key(a).0.total_cmp(&key(b).0));
    }
}

impl SpatialIndex {
    /// Item `i` of the result of [`SpatialIndex::query`] refers to `points[i]`.
    pub fn build(points: impl IntoIterator<Item = LatLon>) -> Self {
        let mut items: Vec<(LatLon, usize)> = points.into_iter().enumerate().map(|(i, p)| (p, i)).collect();
        if items.is_empty() {
            return Self::default();
        }
        str_sort(&mut items, |(p, _)| (p.lat, p.lon));
        let mut level: Vec<TreeNode> = items
            .chunks(NODE_CAPACITY)
            .enumerate()
            .map(|(c, chunk)| {
                let pts: Vec<LatLon> = chunk.iter().map(|(p, _)| *p).collect();
                TreeNode {
                    bbox: BBox::from_points(&pts).expect("non-empty chunk"),
                    start: c * NODE_CAPACITY,
                    end: c * NODE_CAPACITY + chunk.len(),
                }
            })
            .collect();
        let mut levels = Vec::new();
        while level.len() > 1 {
            str_sort(&mut level, |n| center(&n.bbox));
            let parents = level
                .chunks(NODE_CAPACITY)
                .enumerate()
                .map(|(c, chunk)| TreeNode {
                    bbox: chunk.iter().skip(1).fold(chunk[0].bbox, |acc, n| acc.union(&n.bbox)),
                    start: c * NODE_CAPACITY,
                    end: c * NODE_CAPACITY + chunk.len(),
                })
                .collect();
            levels.push(level);
            level = parents;
        }
        levels.push(level);
        Self { items, levels }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Indices of all points inside `bbox` (boundary inclusive), ascending.
    pub fn query(&self, bbox: &BBox) -> Vec<usize> {
        let mut out = Vec::new();
        let Some(top) = self.levels.len().checked_sub(1) else {
            return out;
        };
        let mut stack: Vec<(usize, usize)> = vec![(top, 0)];
        while let Some((depth, idx)) = stack.pop() {
            let node = &self.levels[depth][idx];
            if !node.bbox.intersects(bbox) {
                continue;
            }
            if depth == 0 {
                out.extend(self.items[node.start..node.end].iter().filter(|(p, _)| bbox.contains(*p)).map(|(_, i)| *i));
            } else {
                stack.extend((node.start..node.end).map(|c| (depth - 1, c)));
            }
        }
        out.sort_unstable();
        out
    }
}

/// Builds the index over feature positions; query results index into `features`.
pub fn build_spatial_index(features: &[FeatureRecord]) -> SpatialIndex {
    SpatialIndex::build(features.iter().map(|f| f.pos))
}

/// Region within `buffer_m` of a route's segments.
#[derive(Debug, Clone)]
pub struct Corridor {
    segments: Vec<(Vec<LatLon>, BBox)>,
    buffer_m: f64,
}

impl Corridor {
    pub fn new(polylines: impl IntoIterator<Item = Vec<LatLon>>, buffer_m: f64) -> Self {
        let segments = polylines
            .into_iter()
            .filter_map(|line| BBox::from_points(&line).map(|b| (line, b.expand_m(buffer_m))))
            .collect();
        Self { segments, buffer_m }
    }

    pub fn buffer_m(&self) -> f64 {
        self.buffer_m
    }

    pub fn segment_count(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// Prefilter boxes, one per segment.
    pub fn segment_bboxes(&self) -> impl Iterator<Item = &BBox> {
        self.segments.iter().map(|(_, b)| b)
    }

    /// Exact distance from `p` to segment `i`.
    pub fn distance_to_segment(&self, i: usize, p: LatLon) -> f64 {
        point_polyline_distance(p, &self.segments[i].0)
    }

    /// Nearest segment within the buffer; ties go to the earlier segment.
    pub fn nearest_segment(&self, p: LatLon) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for (i, (line, bbox)) in self.segments.iter().enumerate() {
            if !bbox.contains(p) {
                continue;
            }
            let d = point_polyline_distance(p, line);
            if d <= self.buffer_m && best.is_none_or(|(_, bd)| d < bd) {
                best = Some((i, d));
            }
        }
        best
    }

    pub fn contains(&self, p: LatLon) -> bool {
        self.nearest_segment(p).is_some()
    }

    /// Indices of indexed points inside the corridor, ascending.
    pub fn candidates(&self, index: &SpatialIndex) -> Vec<usize> {
        let mut found = BTreeSet::new();
        for (_, bbox) in &self.segments {
            found.extend(index.query(bbox));
        }
        found.into_iter().collect()
    }
}

/// Corridor of `buffer_m` around every segment of `route`.
pub fn buffer_route(route: &RouteCandidate, buffer_m: f64) -> Corridor {
    Corridor::new(route.segments.iter().map(|s| s.polyline.clone()), buffer_m)
}

/// Which POIs a user wants attached to the route.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PreferenceFilter {
    categories: BTreeSet<String>,
}

impl PreferenceFilter {
    /// General tourist information: every POI qualifies.
    pub fn general() -> Self {
        Self::default()
    }

    pub fn categories<I, S>(categories: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Self { categories: categories.into_iter().map(|c| normalize_name(c.as_ref())).collect() }
    }

    pub fn default_mode(&self) -> bool {
        self.categories.is_empty()
    }

    pub fn category_set(&self) -> &BTreeSet<String> {
        &self.categories
    }

    pub fn accepts(&self, feature: &FeatureRecord) -> bool {
        if feature.kind != FeatureKind::Poi {
            return false;
        }
        if self.default_mode() {
            return true;
        }
        feature.category.as_deref().is_some_and(|c| self.categories.contains(&normalize_name(c)))
    }
}

/// Attaches each accepted POI inside the corridor to its nearest segment.
///
/// Returns one list of feature indices per segment, each ascending.
pub fn spatial_join(
    corridor: &Corridor,
    index: &SpatialIndex,
    features: &[FeatureRecord],
    filter: &PreferenceFilter,
) -> Vec<Vec<usize>> {
    let mut attached = vec![Vec::new(); corridor.segment_count()];
    for i in corridor.candidates(index) {
        let f = &features[i];
        if !filter.accepts(f) {
            continue;
        }
        if let Some((seg, _)) = corridor.nearest_segment(f.pos) {
            attached[seg].push(i);
        }
    }
    attached
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extract::Tags;
    use crate::features::FeatureSource;
    use crate::geo::haversine;
    use alloc::string::ToString;
    use rand::{Rng, SeedableRng};

    fn poi(i: i64, pos: LatLon, category: &str) -> FeatureRecord {
        FeatureRecord {
            id: FeatureSource::Node(i),
            kind: FeatureKind::Poi,
            pos,
            tags: Tags::new(),
            name: Some(alloc::format!("poi {i}")),
            category: Some(category.to_string()),
        }
    }

    fn scan(points: &[LatLon], bbox: &BBox) -> Vec<usize> {
        points.iter().enumerate().filter(|(_, p)| bbox.contains(**p)).map(|(i, _)| i).collect()
    }

    #[test]
    fn empty_index_returns_nothing() {
        let idx = SpatialIndex::build(core::iter::empty());
        let everything = BBox { min_lat: -90.0, min_lon: -180.0, max_lat: 90.0, max_lon: 180.0 };
        assert!(idx.query(&everything).is_empty());
    }

    #[test]
    fn single_point_found() {
        let p = LatLon::new(48.85, 2.29);
        let idx = SpatialIndex::build([p]);
        assert_eq!(idx.query(&BBox::from_point(p).expand_m(1.0)), vec![0]);
        assert!(idx.query(&BBox::from_point(LatLon::new(0.0, 0.0))).is_empty());
    }

    #[test]
    fn index_matches_linear_scan() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let points: Vec<LatLon> =
            (0..1000).map(|_| LatLon::new(rng.gen_range(48.80..48.90), rng.gen_range(2.25..2.40))).collect();
        let idx = SpatialIndex::build(points.iter().copied());
        for _ in 0..100 {
            let (a, b): (f64, f64) = (rng.gen_range(48.80..48.90), rng.gen_range(48.80..48.90));
            let (c, d): (f64, f64) = (rng.gen_range(2.25..2.40), rng.gen_range(2.25..2.40));
            let bbox = BBox { min_lat: a.min(b), max_lat: a.max(b), min_lon: c.min(d), max_lon: c.max(d) };
            assert_eq!(idx.query(&bbox), scan(&points, &bbox));
        }
    }

    fn straight_corridor(buffer_m: f64) -> Corridor {
        Corridor::new(
            [
                vec![LatLon::new(48.85, 2.290), LatLon::new(48.85, 2.292)],
                vec![LatLon::new(48.85, 2.292), LatLon::new(48.85, 2.294)],
                vec![LatLon::new(48.85, 2.294), LatLon::new(48.85, 2.296)],
                vec![LatLon::new(48.85, 2.296), LatLon::new(48.85, 2.298)],
            ],
            buffer_m,
        )
    }

    #[test]
    fn point_on_polyline_is_inside() {
        let c = straight_corridor(0.5);
        assert!(c.contains(LatLon::new(48.85, 2.293)));
    }

    #[test]
    fn point_at_150m_is_outside_100m_buffer() {
        let c = straight_corridor(100.0);
        let north = LatLon::new(48.85 + 150.0 / 111_194.93, 2.293);
        let d = c.distance_to_segment(1, north);
        assert!((d - 150.0).abs() < 0.5, "{d}");
        assert!(!c.contains(north));
    }

    #[test]
    fn empty_corridor_contains_nothing() {
        let c = Corridor::new(Vec::<Vec<LatLon>>::new(), 100.0);
        assert!(c.is_empty());
        assert!(!c.contains(LatLon::new(48.85, 2.29)));
    }

    #[test]
    fn category_filter_keeps_only_requested() {
        let c = straight_corridor(200.0);
        let features = vec![poi(1, LatLon::new(48.8501, 2.291), "museum"), poi(2, LatLon::new(48.8501, 2.295), "cafe")];
        let idx = build_spatial_index(&features);
        let joined = spatial_join(&c, &idx, &features, &PreferenceFilter::categories(["museum"]));
        let all: Vec<usize> = joined.concat();
        assert_eq!(all, vec![0]);
        let general = spatial_join(&c, &idx, &features, &PreferenceFilter::general());
        assert_eq!(general.concat().len(), 2);
    }

    #[test]
    fn shared_vertex_tie_goes_to_earlier_segment() {
        // Segments are numbered from 0 here; 2.296 joins the third and fourth.
        let c = straight_corridor(200.0);
        let features = vec![poi(1, LatLon::new(48.85, 2.296), "museum")];
        let idx = build_spatial_index(&features);
        let joined = spatial_join(&c, &idx, &features, &PreferenceFilter::general());
        assert_eq!(joined[2], vec![0]);
        assert!(joined[3].is_empty());
    }

    #[test]
    fn join_matches_all_pairs_oracle() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        let c = straight_corridor(200.0);
        let lines: Vec<[LatLon; 2]> = (0..4)
            .map(|i| {
                let a = 2.290 + 0.002 * i as f64;
                [LatLon::new(48.85, a), LatLon::new(48.85, a + 0.002)]
            })
            .collect();
        let features: Vec<FeatureRecord> = (0..200)
            .map(|i| poi(i, LatLon::new(rng.gen_range(48.845..48.855), rng.gen_range(2.287..2.301)), "museum"))
            .collect();
        let idx = build_spatial_index(&features);
        let joined = spatial_join(&c, &idx, &features, &PreferenceFilter::general());
        let mut expected = vec![Vec::new(); 4];
        for (fi, f) in features.iter().enumerate() {
            // Oracle: dense sampling of each segment.
            let mut best: Option<(usize, f64)> = None;
            for (si, l) in lines.iter().enumerate() {
                let d = (0..=2000)
                    .map(|k| {
                        let q = match k {
                            0 => l[0],
                            2000 => l[1],
                            _ => {
                                let t = k as f64 / 2000.0;
                                LatLon::new(l[0].lat, l[0].lon + t * (l[1].lon - l[0].lon))
                            }
                        };
                        haversine(f.pos, q)
                    })
                    .fold(f64::INFINITY, f64::min);
                if d <= 200.0 && best.is_none_or(|(_, bd)| d < bd) {
                    best = Some((si, d));
                }
            }
            if let Some((si, _)) = best {
                expected[si].push(fi);
            }
        }
        assert_eq!(joined, expected);
    }
}
