//! Capped-count walkability score.
//!
//! For every segment of a route the occurrences of each indicator are
//! counted and capped at `tau`. The capped counts are averaged over the
//! segments to give `c_i`, and the score is `sum_i(w_i * c_i) / tau`, which
//! lies in `[0, 1]` because every `c_i <= tau` and the weights sum to 1.

use alloc::vec::Vec;

use crate::air::Aqi;
use crate::features::{FeatureKind, FeatureRecord};
use crate::geo::LatLon;
use crate::routing::RouteCandidate;
use crate::spatial::{Corridor, SpatialIndex};

pub const DEFAULT_TAU: f64 = 5.0;
pub const DEFAULT_INDICATOR_BUFFER_M: f64 = 100.0;
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;
pub const PREFERRED_WEIGHT: f64 = 0.4;
pub const OTHER_WEIGHT: f64 = 0.2;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum WalkabilityError {
    #[error("weights must be non-negative and sum to 1 (got sum {0})")]
    InvalidWeights(f64),
    #[error("tau must be positive and finite")]
    InvalidTau,
    #[error("average count {0} outside [0, tau]")]
    InvalidCount(f64),
    #[error("route has no segments")]
    EmptyRoute,
    #[error("no candidate routes")]
    NoCandidates,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IndicatorKind {
    Sidewalk,
    Pollution,
    GreenArea,
    Accessibility,
}

impl IndicatorKind {
    pub const ALL: [IndicatorKind; 4] =
        [IndicatorKind::Sidewalk, IndicatorKind::Pollution, IndicatorKind::GreenArea, IndicatorKind::Accessibility];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            IndicatorKind::Sidewalk => "sidewalk",
            IndicatorKind::Pollution => "pollution",
            IndicatorKind::GreenArea => "green_area",
            IndicatorKind::Accessibility => "accessibility",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        IndicatorKind::ALL.into_iter().find(|k| k.as_str() == s)
    }

    /// Map feature kind counted for this indicator; pollution has none.
    pub fn feature_kind(self) -> Option<FeatureKind> {
        match self {
            IndicatorKind::Sidewalk => Some(FeatureKind::Sidewalk),
            IndicatorKind::GreenArea => Some(FeatureKind::GreenArea),
            IndicatorKind::Accessibility => Some(FeatureKind::Accessibility),
            IndicatorKind::Pollution => None,
        }
    }
}

/// One value per indicator, indexed in [`IndicatorKind::ALL`] order.
pub type PerIndicator = [f64; 4];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndicatorWeights(PerIndicator);

impl IndicatorWeights {
    pub fn new(w: PerIndicator) -> Result<Self, WalkabilityError> {
        let sum: f64 = w.iter().sum();
        let valid = w.iter().all(|x| x.is_finite() && *x >= 0.0) && (sum - 1.0).abs() <= WEIGHT_SUM_TOLERANCE;
        if valid {
            Ok(Self(w))
        } else {
            Err(WalkabilityError::InvalidWeights(sum))
        }
    }

    pub fn uniform() -> Self {
        Self([0.25; 4])
    }

    /// Preferred indicators get 0.4, the rest 0.2, then the set is renormalized.
    pub fn with_preferences(preferred: &[IndicatorKind]) -> Self {
        if preferred.is_empty() {
            return Self::uniform();
        }
        let mut w = [OTHER_WEIGHT; 4];
        for k in preferred {
            w[k.index()] = PREFERRED_WEIGHT;
        }
        let sum: f64 = w.iter().sum();
        if (sum - 1.0).abs() > f64::EPSILON {
            for x in &mut w {
                *x /= sum;
            }
        }
        Self(w)
    }

    pub fn get(&self, kind: IndicatorKind) -> f64 {
        self.0[kind.index()]
    }

    pub fn values(&self) -> PerIndicator {
        self.0
    }
}

impl Default for IndicatorWeights {
    fn default() -> Self {
        Self::uniform()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreFlag {
    EmptyRoute,
    PollutionEstimated,
}

impl ScoreFlag {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScoreFlag::EmptyRoute => "empty_route",
            ScoreFlag::PollutionEstimated => "pollution_estimated",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WalkabilityScore {
    /// Average capped count per indicator.
    pub c: PerIndicator,
    pub weights: IndicatorWeights,
    pub tau: f64,
    pub ws: f64,
    pub flags: Vec<ScoreFlag>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkabilityParams {
    pub tau: f64,
    pub indicator_buffer_m: f64,
}

impl Default for WalkabilityParams {
    fn default() -> Self {
        Self { tau: DEFAULT_TAU, indicator_buffer_m: DEFAULT_INDICATOR_BUFFER_M }
    }
}

/// Raw sidewalk, green-area and accessibility counts within `buffer_m` of a
/// segment polyline. The pollution slot is left at 0.
pub fn count_indicators(
    polyline: &[LatLon],
    features: &[FeatureRecord],
    index: &SpatialIndex,
    buffer_m: f64,
) -> PerIndicator {
    let corridor = Corridor::new([polyline.to_vec()], buffer_m);
    let mut counts = [0.0; 4];
    for i in corridor.candidates(index) {
        let f = &features[i];
        let slot = match f.kind {
            FeatureKind::Sidewalk => IndicatorKind::Sidewalk,
            FeatureKind::GreenArea => IndicatorKind::GreenArea,
            FeatureKind::Accessibility => IndicatorKind::Accessibility,
            FeatureKind::Poi => continue,
        };
        if corridor.contains(f.pos) {
            counts[slot.index()] += 1.0;
        }
    }
    counts
}

/// Pseudo-count for a 1..5 air-quality grade: `tau * (5 - aqi) / 4`.
pub fn pollution_count(aqi: Aqi, tau: f64) -> f64 {
    tau * f64::from(5 - aqi.get()) / 4.0
}

/// Pseudo-count used when no air-quality sample is available.
pub fn estimated_pollution_count(tau: f64) -> f64 {
    tau / 2.0
}

/// `c_i = sum over segments of min(count_i, tau) / number of segments`.
pub fn average_capped_counts(segments: &[PerIndicator], tau: f64) -> Result<PerIndicator, WalkabilityError> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(WalkabilityError::InvalidTau);
    }
    if segments.is_empty() {
        return Err(WalkabilityError::EmptyRoute);
    }
    let mut c = [0.0; 4];
    for counts in segments {
        for (acc, raw) in c.iter_mut().zip(counts) {
            *acc += raw.max(0.0).min(tau);
        }
    }
    let n = segments.len() as f64;
    Ok(c.map(|total| total / n))
}

/// `ws = sum_i(w_i * c_i) / tau`.
pub fn walkability_score(
    c: PerIndicator,
    weights: IndicatorWeights,
    tau: f64,
) -> Result<WalkabilityScore, WalkabilityError> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(WalkabilityError::InvalidTau);
    }
    IndicatorWeights::new(weights.values())?;
    if let Some(bad) = c.iter().find(|x| !(**x >= 0.0 && **x <= tau)) {
        return Err(WalkabilityError::InvalidCount(*bad));
    }
    let weighted: f64 = c.iter().zip(weights.values()).map(|(ci, wi)| wi * ci).sum();
    // Weights may sum to 1 ± 1e-9; keep the score inside its range.
    let ws = (weighted / tau).clamp(0.0, 1.0);
    Ok(WalkabilityScore { c, weights, tau, ws, flags: Vec::new() })
}

/// Scores a route. `pollution` is the per-segment pseudo-count, or `None`
/// when air quality was unavailable (estimated at `tau / 2` and flagged).
pub fn score_route(
    route: &RouteCandidate,
    features: &[FeatureRecord],
    index: &SpatialIndex,
    pollution: Option<f64>,
    weights: IndicatorWeights,
    params: WalkabilityParams,
) -> Result<WalkabilityScore, WalkabilityError> {
    if route.segments.is_empty() {
        let mut score = walkability_score([0.0; 4], weights, params.tau)?;
        score.flags.push(ScoreFlag::EmptyRoute);
        return Ok(score);
    }
    let pseudo = pollution.unwrap_or_else(|| estimated_pollution_count(params.tau));
    let per_segment: Vec<PerIndicator> = route
        .segments
        .iter()
        .map(|s| {
            let mut counts = count_indicators(&s.polyline, features, index, params.indicator_buffer_m);
            counts[IndicatorKind::Pollution.index()] = pseudo;
            counts
        })
        .collect();
    let c = average_capped_counts(&per_segment, params.tau)?;
    let mut score = walkability_score(c, weights, params.tau)?;
    if pollution.is_none() {
        score.flags.push(ScoreFlag::PollutionEstimated);
    }
    Ok(score)
}

/// Index of the highest-scoring candidate; ties go to the shorter route,
/// then to the earlier entry.
pub fn select_best_route(scored: &[(RouteCandidate, WalkabilityScore)]) -> Result<usize, WalkabilityError> {
    select_best(scored.iter().map(|(r, s)| (s.ws, r.total_length_m)))
}

/// Same rule over `(ws, total_length_m)` pairs.
pub fn select_best(candidates: impl IntoIterator<Item = (f64, f64)>) -> Result<usize, WalkabilityError> {
    let mut best: Option<(usize, f64, f64)> = None;
    for (i, (ws, len)) in candidates.into_iter().enumerate() {
        let better = match best {
            None => true,
            Some((_, bws, blen)) => ws > bws || (ws == bws && len < blen),
        };
        if better {
            best = Some((i, ws, len));
        }
    }
    best.map(|(i, _, _)| i).ok_or(WalkabilityError::NoCandidates)
}
