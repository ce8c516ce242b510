//! Utterance classification into itinerary requests and information requests.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::gazetteer::Gazetteer;
use crate::walkability::IndicatorKind;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum IntentError {
    #[error("empty utterance")]
    EmptyUtterance,
    #[error("classifier failure: {0}")]
    Classifier(String),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Preference {
    Indicator(IndicatorKind),
    /// POI category, matched against `tourism=*` values.
    Category(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntentKind {
    Spatial,
    Information,
}

impl IntentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            IntentKind::Spatial => "spatial",
            IntentKind::Information => "information",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Intent {
    Spatial { origin: String, destination: String, preferences: Vec<Preference> },
    Information { query: String },
}

impl Intent {
    pub fn kind(&self) -> IntentKind {
        match self {
            Intent::Spatial { .. } => IntentKind::Spatial,
            Intent::Information { .. } => IntentKind::Information,
        }
    }

    pub fn indicator_preferences(&self) -> Vec<IndicatorKind> {
        match self {
            Intent::Spatial { preferences, .. } => preferences
                .iter()
                .filter_map(|p| match p {
                    Preference::Indicator(k) => Some(*k),
                    Preference::Category(_) => None,
                })
                .collect(),
            Intent::Information { .. } => Vec::new(),
        }
    }

    pub fn category_preferences(&self) -> Vec<String> {
        match self {
            Intent::Spatial { preferences, .. } => preferences
                .iter()
                .filter_map(|p| match p {
                    Preference::Category(c) => Some(c.clone()),
                    Preference::Indicator(_) => None,
                })
                .collect(),
            Intent::Information { .. } => Vec::new(),
        }
    }
}

/// Anything that can turn an utterance into an [`Intent`].
pub trait IntentClassifier {
    fn classify(&self, utterance: &str) -> Result<Intent, IntentError>;
}

/// Validates the utterance and delegates to `classifier`.
pub fn classify_intent(utterance: &str, classifier: &dyn IntentClassifier) -> Result<Intent, IntentError> {
    if utterance.trim().is_empty() {
        return Err(IntentError::EmptyUtterance);
    }
    classifier.classify(utterance)
}

const ROUTE_CUES: &[&str] = &[
    "route",
    "routes",
    "walk",
    "walking",
    "itinerary",
    "get to",
    "get from",
    "directions",
    "way to",
    "way from",
    "path from",
    "go from",
    "go to",
    "take me",
    "navigate",
    "stroll",
];

const PREFERENCE_KEYWORDS: &[(&str, PrefTarget)] = &[
    ("green", PrefTarget::Indicator(IndicatorKind::GreenArea)),
    ("greenery", PrefTarget::Indicator(IndicatorKind::GreenArea)),
    ("park", PrefTarget::Indicator(IndicatorKind::GreenArea)),
    ("parks", PrefTarget::Indicator(IndicatorKind::GreenArea)),
    ("trees", PrefTarget::Indicator(IndicatorKind::GreenArea)),
    ("nature", PrefTarget::Indicator(IndicatorKind::GreenArea)),
    ("gardens", PrefTarget::Indicator(IndicatorKind::GreenArea)),
    ("wheelchair", PrefTarget::Indicator(IndicatorKind::Accessibility)),
    ("accessible", PrefTarget::Indicator(IndicatorKind::Accessibility)),
    ("accessibility", PrefTarget::Indicator(IndicatorKind::Accessibility)),
    ("stroller", PrefTarget::Indicator(IndicatorKind::Accessibility)),
    ("sidewalk", PrefTarget::Indicator(IndicatorKind::Sidewalk)),
    ("sidewalks", PrefTarget::Indicator(IndicatorKind::Sidewalk)),
    ("footway", PrefTarget::Indicator(IndicatorKind::Sidewalk)),
    ("footways", PrefTarget::Indicator(IndicatorKind::Sidewalk)),
    ("pollution", PrefTarget::Indicator(IndicatorKind::Pollution)),
    ("polluted", PrefTarget::Indicator(IndicatorKind::Pollution)),
    ("clean air", PrefTarget::Indicator(IndicatorKind::Pollution)),
    ("air quality", PrefTarget::Indicator(IndicatorKind::Pollution)),
    ("museum", PrefTarget::Category("museum")),
    ("museums", PrefTarget::Category("museum")),
    ("gallery", PrefTarget::Category("gallery")),
    ("galleries", PrefTarget::Category("gallery")),
    ("artwork", PrefTarget::Category("artwork")),
    ("artworks", PrefTarget::Category("artwork")),
    ("viewpoint", PrefTarget::Category("viewpoint")),
    ("viewpoints", PrefTarget::Category("viewpoint")),
    ("views", PrefTarget::Category("viewpoint")),
    ("attractions", PrefTarget::Category("attraction")),
    ("sights", PrefTarget::Category("attraction")),
    ("cafe", PrefTarget::Category("cafe")),
    ("cafes", PrefTarget::Category("cafe")),
    ("coffee", PrefTarget::Category("cafe")),
    ("picnic", PrefTarget::Category("picnic_site")),
];

#[derive(Debug, Clone, Copy)]
enum PrefTarget {
    Indicator(IndicatorKind),
    Category(&'static str),
}

/// True when `needle` occurs in `hay` delimited by non-alphanumerics.
fn find_phrase(hay: &str, needle: &str, from: usize) -> Option<usize> {
    let mut start = from;
    while let Some(off) = hay.get(start..)?.find(needle) {
        let at = start + off;
        let end = at + needle.len();
        let before_ok = hay[..at].chars().next_back().is_none_or(|c| !c.is_alphanumeric());
        let after_ok = hay[end..].chars().next().is_none_or(|c| !c.is_alphanumeric());
        if before_ok && after_ok {
            return Some(at);
        }
        start = at + needle.len().max(1);
    }
    None
}

fn phrase_positions(hay: &str, needle: &str) -> Vec<usize> {
    let mut out = Vec::new();
    let mut from = 0;
    while let Some(at) = find_phrase(hay, needle, from) {
        out.push(at);
        from = at + needle.len();
    }
    out
}

/// Keyword extraction of indicator and POI-category preferences.
pub fn extract_preferences(text: &str) -> Vec<Preference> {
    let lower = text.to_lowercase();
    let mut out: Vec<Preference> = Vec::new();
    for (kw, target) in PREFERENCE_KEYWORDS {
        if find_phrase(&lower, kw, 0).is_none() {
            continue;
        }
        let pref = match target {
            PrefTarget::Indicator(k) => Preference::Indicator(*k),
            PrefTarget::Category(c) => Preference::Category(c.to_string()),
        };
        if !out.contains(&pref) {
            out.push(pref);
        }
    }
    out
}

/// Deterministic classifier: an utterance is spatial when it contains a
/// route cue plus a "from X to Y" or "to Y from X" pair whose places are
/// both in the gazetteer.
pub struct RuleClassifier<'a> {
    gazetteer: &'a Gazetteer,
}

/// A matched place: canonical gazetteer name and its byte span in the utterance.
struct PlaceMatch {
    name: String,
    span: (usize, usize),
}

impl<'a> RuleClassifier<'a> {
    pub fn new(gazetteer: &'a Gazetteer) -> Self {
        Self { gazetteer }
    }

    /// Longest run of words starting at byte `start` (after an optional
    /// leading "the") that names a gazetteer entry, not crossing `limit`.
    fn place_at(&self, text: &str, start: usize, limit: usize) -> Option<PlaceMatch> {
        let region = &text[start..limit];
        let mut words: Vec<(usize, usize)> = Vec::new();
        let mut cur: Option<usize> = None;
        for (i, ch) in region.char_indices() {
            let word_char = ch.is_alphanumeric() || ch == '\'' || ch == '-' || ch == '.' || ch == '&';
            match (word_char, cur) {
                (true, None) => cur = Some(i),
                (false, Some(s)) => {
                    words.push((s, i));
                    cur = None;
                }
                _ => {}
            }
            // Clause punctuation ends the place name.
            if matches!(ch, ',' | ';' | '?' | '!' | '(' | ')') {
                break;
            }
        }
        if let Some(s) = cur {
            words.push((s, region.len()));
        }
        let skip = usize::from(words.first().is_some_and(|&(s, e)| region[s..e].eq_ignore_ascii_case("the")));
        for first in (0..=skip).rev() {
            for last in (first..words.len()).rev() {
                let (s, _) = words[first];
                let (_, e) = words[last];
                let candidate = region[s..e].trim_end_matches('.');
                if let Some(entry) = self.gazetteer.lookup(candidate) {
                    return Some(PlaceMatch {
                        name: entry.name.clone(),
                        span: (start + s, start + s + candidate.len()),
                    });
                }
            }
        }
        None
    }

    fn slots(&self, text: &str, lower: &str) -> Option<(PlaceMatch, PlaceMatch)> {
        // "from X to Y"
        for from_at in phrase_positions(lower, "from") {
            let x_start = from_at + "from".len();
            for to_at in phrase_positions(lower, "to").into_iter().filter(|&t| t > x_start) {
                let Some(origin) = self.place_at(text, x_start, to_at) else {
                    continue;
                };
                if !text[origin.span.1..to_at].trim().is_empty() {
                    continue;
                }
                if let Some(dest) = self.place_at(text, to_at + "to".len(), text.len()) {
                    return Some((origin, dest));
                }
            }
        }
        // "to Y from X"
        for to_at in phrase_positions(lower, "to") {
            let y_start = to_at + "to".len();
            for from_at in phrase_positions(lower, "from").into_iter().filter(|&f| f > y_start) {
                let Some(dest) = self.place_at(text, y_start, from_at) else {
                    continue;
                };
                if !text[dest.span.1..from_at].trim().is_empty() {
                    continue;
                }
                if let Some(origin) = self.place_at(text, from_at + "from".len(), text.len()) {
                    return Some((origin, dest));
                }
            }
        }
        None
    }
}

impl IntentClassifier for RuleClassifier<'_> {
    fn classify(&self, utterance: &str) -> Result<Intent, IntentError> {
        if utterance.trim().is_empty() {
            return Err(IntentError::EmptyUtterance);
        }
        // ASCII lowering keeps byte offsets aligned with `utterance`.
        let lower = utterance.to_ascii_lowercase();
        let cued = ROUTE_CUES.iter().any(|cue| find_phrase(&lower, cue, 0).is_some());
        if cued {
            if let Some((origin, dest)) = self.slots(utterance, &lower) {
                let mut rest = String::with_capacity(utterance.len());
                let mut spans = [origin.span, dest.span];
                spans.sort_unstable();
                let mut at = 0;
                for (s, e) in spans {
                    rest.push_str(&utterance[at..s.max(at)]);
                    rest.push(' ');
                    at = e.max(at);
                }
                rest.push_str(&utterance[at..]);
                return Ok(Intent::Spatial {
                    origin: origin.name,
                    destination: dest.name,
                    preferences: extract_preferences(&rest),
                });
            }
        }
        Ok(Intent::Information { query: utterance.trim().to_string() })
    }
}

/// Convenience: rule-based classification against a gazetteer.
pub fn classify_with_rules(utterance: &str, gazetteer: &Gazetteer) -> Result<Intent, IntentError> {
    classify_intent(utterance, &RuleClassifier::new(gazetteer))
}
