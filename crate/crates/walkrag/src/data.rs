//! Gazetteer CSV and air-quality fixture loaders.

use std::collections::BTreeMap;
use std::io::Read;

use serde::Deserialize;
use walkrag_core::gazetteer::GazetteerError;
use walkrag_core::{Aqi, FixtureAirQuality, Gazetteer, GazetteerEntry, LatLon};

#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("gazetteer: {0}")]
    Csv(#[from] csv::Error),
    #[error("gazetteer header must be `name,lat,lon`, got {0:?}")]
    Header(Vec<String>),
    #[error(transparent)]
    Gazetteer(#[from] GazetteerError),
    #[error("air-quality fixture: {0}")]
    Json(#[from] serde_json::Error),
    #[error("air-quality fixture key {0:?} is not `lat,lon` with two decimals")]
    Key(String),
    #[error("air-quality grade {1} for {0:?} is outside 1..5")]
    Grade(String, i64),
}

#[derive(Debug, Deserialize)]
struct Row {
    name: String,
    lat: f64,
    lon: f64,
}

/// Reads a `name,lat,lon` CSV.
pub fn load_gazetteer(input: impl Read) -> Result<Gazetteer, DataError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    if header != ["name", "lat", "lon"] {
        return Err(DataError::Header(header));
    }
    let mut entries = Vec::new();
    for row in reader.deserialize::<Row>() {
        let row = row?;
        entries.push(GazetteerEntry { name: row.name, pos: LatLon::new(row.lat, row.lon) });
    }
    Ok(Gazetteer::new(entries)?)
}

fn valid_key(key: &str) -> bool {
    let mut parts = key.split(',');
    let ok = |p: Option<&str>| {
        p.is_some_and(|s| s.parse::<f64>().is_ok() && s.rsplit_once('.').is_some_and(|(_, frac)| frac.len() == 2))
    };
    ok(parts.next()) && ok(parts.next()) && parts.next().is_none()
}

/// Reads a JSON object mapping `"lat,lon"` (two decimals) to a 1..5 grade.
pub fn load_air_fixture(input: impl Read) -> Result<FixtureAirQuality, DataError> {
    let raw: BTreeMap<String, i64> = serde_json::from_reader(input)?;
    let mut grades = BTreeMap::new();
    for (key, grade) in raw {
        if !valid_key(&key) {
            return Err(DataError::Key(key));
        }
        let aqi = u8::try_from(grade).ok().and_then(Aqi::new).ok_or_else(|| DataError::Grade(key.clone(), grade))?;
        grades.insert(key, aqi);
    }
    Ok(FixtureAirQuality::new(grades))
}

#[cfg(test)]
mod tests {
    use super::*;
    use walkrag_core::AirQualityClient;

    #[test]
    fn gazetteer_rows() {
        let csv = "name,lat,lon\nEiffel Tower,48.8584,2.2945\n\"Notre Dame\", 48.8530 ,2.3499\n";
        let g = load_gazetteer(csv.as_bytes()).unwrap();
        assert_eq!(g.geocode("eiffel tower").unwrap(), LatLon::new(48.8584, 2.2945));
        assert_eq!(g.geocode(" Notre Dame ").unwrap(), LatLon::new(48.8530, 2.3499));
    }

    #[test]
    fn gazetteer_header_checked() {
        assert!(matches!(load_gazetteer("place,lat,lon\n".as_bytes()), Err(DataError::Header(_))));
    }

    #[test]
    fn gazetteer_bad_number() {
        assert!(matches!(load_gazetteer("name,lat,lon\nX,north,2\n".as_bytes()), Err(DataError::Csv(_))));
    }

    #[test]
    fn air_fixture() {
        let aq = load_air_fixture(r#"{"48.85,2.29": 2}"#.as_bytes()).unwrap();
        assert_eq!(aq.fetch(LatLon::new(48.8584, 2.2945)).unwrap().aqi.get(), 2);
        assert!(matches!(load_air_fixture(r#"{"48.85,2.29": 7}"#.as_bytes()), Err(DataError::Grade(_, 7))));
        assert!(matches!(load_air_fixture(r#"{"48.8,2.29": 1}"#.as_bytes()), Err(DataError::Key(_))));
    }
}
