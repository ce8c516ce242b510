//! Spherical-earth geometry helpers.
//!
//! All trigonometry goes through `libm` so distances are bit-identical on
//! every platform, which keeps serialized payloads stable.

use libm::{asin, atan2, cos, sin, sqrt};

/// Mean Earth radius in meters.
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// A WGS84 coordinate in decimal degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatLon {
    pub lat: f64,
    pub lon: f64,
}

impl LatLon {
    pub const fn new(lat: f64, lon: f64) -> Self {
        Self { lat, lon }
    }

    pub fn is_valid(&self) -> bool {
        self.lat.is_finite()
            && self.lon.is_finite()
            && (-90.0..=90.0).contains(&self.lat)
            && (-180.0..=180.0).contains(&self.lon)
    }
}

/// Great-circle distance in meters.
pub fn haversine(a: LatLon, b: LatLon) -> f64 {
    let phi1 = a.lat.to_radians();
    let phi2 = b.lat.to_radians();
    let dphi = (b.lat - a.lat).to_radians();
    let dlambda = (b.lon - a.lon).to_radians();
    let s1 = sin(dphi / 2.0);
    let s2 = sin(dlambda / 2.0);
    let h = s1 * s1 + cos(phi1) * cos(phi2) * s2 * s2;
    2.0 * EARTH_RADIUS_M * asin(sqrt(h.min(1.0)))
}

/// Initial bearing from `a` to `b` in degrees, clockwise from north, in `[0, 360)`.
pub fn initial_bearing(a: LatLon, b: LatLon) -> f64 {
    let phi1 = a.lat.to_radians();
    let phi2 = b.lat.to_radians();
    let dlambda = (b.lon - a.lon).to_radians();
    let y = sin(dlambda) * cos(phi2);
    let x = cos(phi1) * sin(phi2) - sin(phi1) * cos(phi2) * cos(dlambda);
    let deg = atan2(y, x).to_degrees();
    let wrapped = deg % 360.0;
    if wrapped < 0.0 {
        wrapped + 360.0
    } else {
        wrapped
    }
}

/// Signed change of heading in `(-180, 180]`; positive turns are clockwise (right).
pub fn bearing_change(from: f64, to: f64) -> f64 {
    let mut d = (to - from) % 360.0;
    if d <= -180.0 {
        d += 360.0;
    } else if d > 180.0 {
        d -= 360.0;
    }
    d
}

/// Distance from `p` to the straight segment `a`–`b`.
///
/// The closest-point parameter is found in an equirectangular projection
/// centred on `p`; the distance to that point is then measured with
/// [`haversine`].
pub fn point_segment_distance(p: LatLon, a: LatLon, b: LatLon) -> f64 {
    let k = cos(p.lat.to_radians());
    let ax = (a.lon - p.lon) * k;
    let ay = a.lat - p.lat;
    let bx = (b.lon - p.lon) * k;
    let by = b.lat - p.lat;
    let dx = bx - ax;
    let dy = by - ay;
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 { 0.0 } else { -(ax * dx + ay * dy) / len2 };
    let closest = if t <= 0.0 {
        a
    } else if t >= 1.0 {
        b
    } else {
        LatLon::new(a.lat + t * (b.lat - a.lat), a.lon + t * (b.lon - a.lon))
    };
    haversine(p, closest)
}

/// Minimum distance from `p` to a polyline. Infinite for an empty polyline.
pub fn point_polyline_distance(p: LatLon, line: &[LatLon]) -> f64 {
    match line {
        [] => f64::INFINITY,
        [only] => haversine(p, *only),
        _ => line.windows(2).map(|w| point_segment_distance(p, w[0], w[1])).fold(f64::INFINITY, f64::min),
    }
}

/// Axis-aligned box in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox {
    pub min_lat: f64,
    pub min_lon: f64,
    pub max_lat: f64,
    pub max_lon: f64,
}

impl BBox {
    pub fn from_point(p: LatLon) -> Self {
        Self { min_lat: p.lat, min_lon: p.lon, max_lat: p.lat, max_lon: p.lon }
    }

    pub fn from_points(points: &[LatLon]) -> Option<Self> {
        let (first, rest) = points.split_first()?;
        let mut bbox = Self::from_point(*first);
        for p in rest {
            bbox.extend(*p);
        }
        Some(bbox)
    }

    pub fn extend(&mut self, p: LatLon) {
        self.min_lat = self.min_lat.min(p.lat);
        self.min_lon = self.min_lon.min(p.lon);
        self.max_lat = self.max_lat.max(p.lat);
        self.max_lon = self.max_lon.max(p.lon);
    }

    pub fn union(&self, other: &BBox) -> BBox {
        BBox {
            min_lat: self.min_lat.min(other.min_lat),
            min_lon: self.min_lon.min(other.min_lon),
            max_lat: self.max_lat.max(other.max_lat),
            max_lon: self.max_lon.max(other.max_lon),
        }
    }

    pub fn contains(&self, p: LatLon) -> bool {
        p.lat >= self.min_lat && p.lat <= self.max_lat && p.lon >= self.min_lon && p.lon <= self.max_lon
    }

    pub fn intersects(&self, other: &BBox) -> bool {
        self.min_lat <= other.max_lat
            && self.max_lat >= other.min_lat
            && self.min_lon <= other.max_lon
            && self.max_lon >= other.min_lon
    }

    /// Grow the box by at least `meters` on every side.
    ///
    /// Uses a local equirectangular approximation, padded by 1% so the
    /// result is a safe prefilter for an exact haversine test.
    pub fn expand_m(&self, meters: f64) -> BBox {
        let dlat = (meters / EARTH_RADIUS_M).to_degrees() * 1.01;
        let widest = self.min_lat.abs().max(self.max_lat.abs()).min(89.0);
        let dlon = dlat / cos((widest + dlat).min(89.9).to_radians());
        BBox {
            min_lat: self.min_lat - dlat,
            min_lon: self.min_lon - dlon,
            max_lat: self.max_lat + dlat,
            max_lon: self.max_lon + dlon,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haversine_identity_is_zero() {
        let p = LatLon::new(48.8584, 2.2945);
        assert_eq!(haversine(p, p), 0.0);
    }

    #[test]
    fn one_degree_of_longitude_on_equator() {
        // 2πR/360, evaluated independently of the haversine path.
        let expected = 2.0 * core::f64::consts::PI * EARTH_RADIUS_M / 360.0;
        assert!((expected - 111_194.93).abs() < 0.01);
        let d = haversine(LatLon::new(0.0, 0.0), LatLon::new(0.0, 1.0));
        assert!((d - expected).abs() < 1.0, "{d}");
        assert!((d - 111_195.0).abs() < 1.0);
    }

    #[test]
    fn bearings_of_cardinal_directions() {
        let o = LatLon::new(0.0, 0.0);
        assert!((initial_bearing(o, LatLon::new(1.0, 0.0)) - 0.0).abs() < 1e-9);
        assert!((initial_bearing(o, LatLon::new(0.0, 1.0)) - 90.0).abs() < 1e-9);
        assert!((initial_bearing(o, LatLon::new(-1.0, 0.0)) - 180.0).abs() < 1e-9);
        assert!((initial_bearing(o, LatLon::new(0.0, -1.0)) - 270.0).abs() < 1e-9);
    }

    #[test]
    fn bearing_change_wraps() {
        assert_eq!(bearing_change(350.0, 10.0), 20.0);
        assert_eq!(bearing_change(10.0, 350.0), -20.0);
        assert_eq!(bearing_change(0.0, 180.0), 180.0);
        assert_eq!(bearing_change(90.0, 0.0), -90.0);
    }

    #[test]
    fn point_on_segment_has_zero_distance() {
        let a = LatLon::new(48.85, 2.29);
        let b = LatLon::new(48.85, 2.30);
        assert_eq!(point_segment_distance(a, a, b), 0.0);
        assert_eq!(point_segment_distance(b, a, b), 0.0);
        let mid = LatLon::new(48.85, 2.295);
        assert!(point_segment_distance(mid, a, b) < 1e-6);
    }

    #[test]
    fn segment_distance_matches_dense_sampling() {
        let a = LatLon::new(48.850, 2.290);
        let b = LatLon::new(48.852, 2.296);
        let p = LatLon::new(48.8525, 2.2921);
        let mut best = f64::INFINITY;
        for i in 0..=100_000 {
            let t = i as f64 / 100_000.0;
            let q = LatLon::new(a.lat + t * (b.lat - a.lat), a.lon + t * (b.lon - a.lon));
            best = best.min(haversine(p, q));
        }
        let d = point_segment_distance(p, a, b);
        assert!((d - best).abs() < 0.05, "{d} vs {best}");
    }

    #[test]
    fn expanded_bbox_covers_buffer() {
        let p = LatLon::new(48.85, 2.29);
        let bbox = BBox::from_point(p).expand_m(100.0);
        // A point 99 m due east and 99 m due north must be inside.
        let east = LatLon::new(48.85, 2.29 + 99.0 / (111_194.93 * cos(48.85_f64.to_radians())));
        let north = LatLon::new(48.85 + 99.0 / 111_194.93, 2.29);
        assert!(bbox.contains(east));
        assert!(bbox.contains(north));
    }
}
