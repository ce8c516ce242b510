//! Air-quality samples and the client contract.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;

use crate::geo::LatLon;

/// Provider grade, 1 (good) to 5 (very poor).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Aqi(u8);

impl Aqi {
    pub fn new(grade: u8) -> Option<Self> {
        (1..=5).contains(&grade).then_some(Self(grade))
    }

    pub fn get(self) -> u8 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AirQualitySample {
    pub aqi: Aqi,
    pub location: LatLon,
    /// Seconds since the Unix epoch, as reported by the provider (0 for fixtures).
    pub timestamp: i64,
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum AirQualityError {
    #[error("air quality unavailable: {0}")]
    Unavailable(String),
}

pub trait AirQualityClient: Send + Sync {
    fn fetch(&self, location: LatLon) -> Result<AirQualitySample, AirQualityError>;
}

/// Fixture key for a coordinate: both components cut to two decimals
/// (floor), naming the ~1.1 km grid cell the point falls in.
pub fn fixture_key(location: LatLon) -> String {
    format!("{:.2},{:.2}", cell(location.lat), cell(location.lon))
}

fn cell(deg: f64) -> f64 {
    // The epsilon keeps exact grid values such as 48.85 (48.849999... in
    // binary) in their own cell. `+ 0.0` turns -0.0 into 0.0.
    libm::floor(deg * 100.0 + 1e-6) / 100.0 + 0.0
}

/// Stub client answering from a `"lat,lon"` → grade table.
#[derive(Debug, Clone, Default)]
pub struct FixtureAirQuality {
    grades: BTreeMap<String, Aqi>,
}

impl FixtureAirQuality {
    pub fn new(grades: BTreeMap<String, Aqi>) -> Self {
        Self { grades }
    }

    pub fn len(&self) -> usize {
        self.grades.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grades.is_empty()
    }
}

impl AirQualityClient for FixtureAirQuality {
    fn fetch(&self, location: LatLon) -> Result<AirQualitySample, AirQualityError> {
        let key = fixture_key(location);
        self.grades
            .get(&key)
            .map(|&aqi| AirQualitySample { aqi, location, timestamp: 0 })
            .ok_or_else(|| AirQualityError::Unavailable(format!("no fixture for {key}")))
    }
}

/// Fetches one sample; any client failure surfaces as `Unavailable`.
pub fn fetch_air_quality(location: LatLon, client: &dyn AirQualityClient) -> Result<AirQualitySample, AirQualityError> {
    client.fetch(location)
}
