//! Request handling: itinerary planning, passage retrieval and answer generation.

use std::fs::File;
use std::path::Path;
use std::time::Duration;

use serde::Serialize;
use walkrag_core::graph::GraphError;
use walkrag_core::intent::{IntentClassifier, IntentError, Preference};
use walkrag_core::retrieval::{EncoderError, IndexError, IndexMode, IvfParams};
use walkrag_core::routing::{alternative_routes, RoutingError};
use walkrag_core::spatial::{buffer_route, build_spatial_index, spatial_join, PreferenceFilter};
use walkrag_core::walkability::{pollution_count, score_route, select_best_route, WalkabilityParams};
use walkrag_core::{
    classify_intent, extract_features, AirQualityClient, Embedder, FeatureSet, Gazetteer, HashingEncoder,
    IndicatorWeights, Intent, Passage, PedestrianGraph, RouteCandidate, RuleClassifier, SearchResult, SpatialIndex,
    VectorIndex, WalkabilityScore,
};

use crate::config::{AirQualityKind, ClassifierKind, Config, ConfigError, EncoderKind, IndexModeKind, LlmKind};
use crate::corpus::{load_corpus, CorpusError, PassageStore};
use crate::data::{load_air_fixture, load_gazetteer, DataError};
use crate::index_file::{read_index, IndexFileError};
use crate::llm::{HttpEmbedder, HttpLlm, LlmClassifier, LlmClient, MockLlm, OpenWeatherMapAir};
use crate::osm::{parse_map_extract, OsmError};
use crate::payload::{build_answer, RouteAnswer, RoutePayload};
use crate::prompt::{information_prompt, route_prompt};
use crate::session::{ConversationState, TurnRecord};

#[derive(Debug, thiserror::Error)]
pub enum EngineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{what} is not configured")]
    Missing { what: &'static str },
    #[error("cannot open {path}: {source}")]
    Open { path: String, source: std::io::Error },
    #[error("map extract: {0}")]
    Osm(#[from] OsmError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("corpus: {0}")]
    Corpus(#[from] CorpusError),
    #[error("index file: {0}")]
    IndexFile(#[from] IndexFileError),
    #[error("index: {0}")]
    Index(#[from] IndexError),
    #[error("encoder: {0}")]
    Encoder(#[from] EncoderError),
    #[error("graph: {0}")]
    Graph(#[from] GraphError),
    #[error("index does not match the corpus: passage {0:?} is missing")]
    StaleIndex(String),
}

/// Why an itinerary request produced no route.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RouteError {
    #[error("unknown place {0:?}")]
    NotFound(String),
    #[error("{place} is {distance_m:.0} m from the nearest walkable street")]
    TooFar { place: String, distance_m: f64 },
    #[error("no walking route from {origin} to {destination}")]
    NoRoute { origin: String, destination: String },
}

impl RouteError {
    pub fn code(&self) -> &'static str {
        match self {
            RouteError::NotFound(_) => "not_found",
            RouteError::TooFar { .. } => "too_far",
            RouteError::NoRoute { .. } => "no_route",
        }
    }

    /// User-facing explanation; never contains a route.
    pub fn apology(&self) -> String {
        match self {
            RouteError::NotFound(name) => {
                format!("Sorry, I don't know where \"{name}\" is. Could you name a nearby landmark instead?")
            }
            RouteError::TooFar { place, .. } => {
                format!("Sorry, {place} is too far from any walkable street for me to plan a walk there.")
            }
            RouteError::NoRoute { origin, destination } => format!(
                "Sorry, I could not find a walking route from {origin} to {destination}. \
                 They do not seem to be connected by walkable streets."
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TurnError {
    #[error("empty utterance")]
    EmptyUtterance,
    /// The generator could not be reached; the turn is recorded with an error flag.
    #[error("{message}")]
    ClientFailure { message: String, detail: String },
}

pub const RETRY_MESSAGE: &str =
    "Sorry, I can't answer right now because the language model is unavailable. Please try again in a moment.";

/// Route selection details kept alongside the answer.
#[derive(Debug, Clone)]
pub struct SpatialOutcome {
    pub answer: RouteAnswer,
    pub candidates: Vec<(RouteCandidate, WalkabilityScore)>,
    pub selected: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RetrievedPassage {
    pub id: String,
    pub score: f64,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TurnOutcome {
    pub answer: String,
    pub intent: String,
    pub payload: Option<RoutePayload>,
    pub passages: Vec<RetrievedPassage>,
    /// False when an information answer had no retrieved context.
    pub grounded: bool,
    pub error: Option<String>,
}

pub struct Engine {
    pub config: Config,
    pub graph: PedestrianGraph,
    pub features: FeatureSet,
    pub feature_index: SpatialIndex,
    pub gazetteer: Gazetteer,
    pub air: Option<Box<dyn AirQualityClient>>,
    pub corpus: PassageStore,
    pub index: VectorIndex,
    pub encoder: Box<dyn Embedder>,
    pub llm: Box<dyn LlmClient>,
}

fn open(path: &Path) -> Result<File, EngineError> {
    File::open(path).map_err(|source| EngineError::Open { path: path.display().to_string(), source })
}

fn required<'a>(path: &'a Option<std::path::PathBuf>, what: &'static str) -> Result<&'a Path, EngineError> {
    path.as_deref().ok_or(EngineError::Missing { what })
}

/// Embeds every passage of `store` into a fresh index.
pub fn build_index(
    store: &PassageStore,
    encoder: &dyn Embedder,
    mode: IndexModeKind,
) -> Result<VectorIndex, EngineError> {
    let ids: Vec<String> = store.passages().iter().map(|p| p.id.clone()).collect();
    let vectors = store.passages().iter().map(|p| encoder.embed(&p.text)).collect::<Result<Vec<_>, _>>()?;
    let mode = match mode {
        IndexModeKind::Exact => IndexMode::Exact,
        IndexModeKind::Approximate => IndexMode::Approximate(IvfParams::for_size(ids.len())),
    };
    Ok(VectorIndex::build(encoder.dimension(), ids, &vectors, mode)?)
}

pub fn encoder_from_config(config: &Config) -> Box<dyn Embedder> {
    match (config.encoder, &config.encoder_url) {
        (EncoderKind::Http, Some(url)) => Box::new(HttpEmbedder::new(
            url,
            &config.encoder_model,
            config.encoder_dim,
            Duration::from_secs(config.timeout_s),
        )),
        _ => Box::new(HashingEncoder::new(config.encoder_dim)),
    }
}

impl Engine {
    /// Loads every resource named by `config`.
    pub fn from_config(config: Config) -> Result<Self, EngineError> {
        config.validate()?;
        let timeout = Duration::from_secs(config.timeout_s);
        let extract = parse_map_extract(open(required(&config.map_path, "map_path")?)?)?;
        let graph = PedestrianGraph::from_extract(&extract)?;
        let features = extract_features(&extract);
        let gazetteer = load_gazetteer(open(required(&config.gazetteer_path, "gazetteer_path")?)?)?;
        let corpus = load_corpus(open(required(&config.corpus_path, "corpus_path")?)?)?;
        let encoder = encoder_from_config(&config);
        let index = match &config.index_path {
            Some(p) => {
                let index = read_index(open(p)?)?;
                if let Some(id) = corpus.passages().iter().map(|p| &p.id).find(|id| !index.ids().contains(id)) {
                    return Err(EngineError::StaleIndex(id.clone()));
                }
                index
            }
            None => build_index(&corpus, encoder.as_ref(), config.index_mode)?,
        };
        if index.dimension() != encoder.dimension() {
            return Err(EncoderError::Dimension { expected: index.dimension(), got: encoder.dimension() }.into());
        }
        let air: Option<Box<dyn AirQualityClient>> = match config.air_quality {
            AirQualityKind::None => None,
            AirQualityKind::Fixture => {
                Some(Box::new(load_air_fixture(open(required(&config.air_quality_path, "air_quality_path")?)?)?))
            }
            AirQualityKind::Openweathermap => Some(Box::new(OpenWeatherMapAir::new(
                &config.air_quality_url,
                config.air_quality_api_key.as_deref().unwrap_or_default(),
                timeout,
            ))),
        };
        let llm: Box<dyn LlmClient> = match (config.llm, &config.llm_url) {
            (LlmKind::Http, Some(url)) => {
                Box::new(HttpLlm::new(url, &config.llm_model, config.llm_api_key.clone(), timeout))
            }
            _ => Box::new(MockLlm),
        };
        Ok(Self::assemble(config, graph, features, gazetteer, air, corpus, index, encoder, llm))
    }

    #[allow(clippy::too_many_arguments)]
    pub fn assemble(
        config: Config,
        graph: PedestrianGraph,
        features: FeatureSet,
        gazetteer: Gazetteer,
        air: Option<Box<dyn AirQualityClient>>,
        corpus: PassageStore,
        index: VectorIndex,
        encoder: Box<dyn Embedder>,
        llm: Box<dyn LlmClient>,
    ) -> Self {
        let feature_index = build_spatial_index(&features);
        Self { config, graph, features, feature_index, gazetteer, air, corpus, index, encoder, llm }
    }

    fn params(&self) -> WalkabilityParams {
        WalkabilityParams { tau: self.config.tau, indicator_buffer_m: self.config.indicator_buffer_m }
    }

    fn weights_for(&self, preferences: &[Preference]) -> IndicatorWeights {
        let preferred: Vec<_> = preferences
            .iter()
            .filter_map(|p| match p {
                Preference::Indicator(k) => Some(*k),
                Preference::Category(_) => None,
            })
            .collect();
        if preferred.is_empty() {
            self.config.weights().unwrap_or_default()
        } else {
            IndicatorWeights::with_preferences(&preferred)
        }
    }

    /// Pollution pseudo-count at the route midpoint, `None` when unavailable.
    fn pollution_at(&self, route: &RouteCandidate) -> Option<f64> {
        let air = self.air.as_ref()?;
        let at = route.midpoint()?;
        match air.fetch(at) {
            Ok(sample) => Some(pollution_count(sample.aqi, self.config.tau)),
            Err(e) => {
                tracing::warn!(error = %e, "air quality unavailable, using estimate");
                None
            }
        }
    }

    fn locate(&self, name: &str) -> Result<(String, i64), RouteError> {
        let entry = self.gazetteer.lookup(name).ok_or_else(|| RouteError::NotFound(name.trim().to_owned()))?;
        let node = self.graph.snap(entry.pos, self.config.max_snap_m).map_err(|e| match e {
            GraphError::TooFar { distance_m, .. } => RouteError::TooFar { place: entry.name.clone(), distance_m },
            _ => RouteError::NoRoute { origin: entry.name.clone(), destination: entry.name.clone() },
        })?;
        Ok((entry.name.clone(), node))
    }

    /// Geocode, snap, generate alternatives, score, select, enrich.
    pub fn plan_route(
        &self,
        origin: &str,
        destination: &str,
        preferences: &[Preference],
    ) -> Result<SpatialOutcome, RouteError> {
        let (origin, src) = self.locate(origin)?;
        let (destination, dst) = self.locate(destination)?;
        let no_route = || RouteError::NoRoute { origin: origin.clone(), destination: destination.clone() };
        let routes =
            match alternative_routes(&self.graph, src, dst, self.config.alternatives, self.config.penalty_factor) {
                Ok(r) => r,
                Err(RoutingError::NoRoute { .. }) => return Err(no_route()),
                Err(e) => {
                    tracing::error!(error = %e, "routing failed");
                    return Err(no_route());
                }
            };
        let weights = self.weights_for(preferences);
        let params = self.params();
        let mut candidates = Vec::with_capacity(routes.len());
        for route in routes {
            let pollution = self.pollution_at(&route);
            let score = score_route(&route, &self.features, &self.feature_index, pollution, weights, params)
                .expect("validated weights and tau");
            candidates.push((route, score));
        }
        let selected = select_best_route(&candidates).map_err(|_| no_route())?;
        let (route, score) = &candidates[selected];
        let categories: Vec<&str> = preferences
            .iter()
            .filter_map(|p| match p {
                Preference::Category(c) => Some(c.as_str()),
                Preference::Indicator(_) => None,
            })
            .collect();
        let filter =
            if categories.is_empty() { PreferenceFilter::general() } else { PreferenceFilter::categories(categories) };
        let corridor = buffer_route(route, self.config.poi_buffer_m);
        let pois = spatial_join(&corridor, &self.feature_index, &self.features, &filter);
        let answer = build_answer(&origin, &destination, route, score, &self.features, &pois);
        Ok(SpatialOutcome { answer, candidates, selected })
    }

    /// Top-k passages with positive similarity; encoder failures yield none.
    pub fn retrieve(&self, query: &str) -> Vec<(SearchResult, &Passage)> {
        match self.index.search(query, self.config.top_k, self.encoder.as_ref()) {
            Ok(results) => results
                .into_iter()
                .filter(|r| r.score > 0.0)
                .filter_map(|r| self.corpus.get(&r.passage_id).map(|p| (r, p)))
                .collect(),
            Err(e) => {
                tracing::warn!(error = %e, "query encoding failed");
                Vec::new()
            }
        }
    }

    pub fn classify(&self, utterance: &str) -> Result<Intent, IntentError> {
        let rules = RuleClassifier::new(&self.gazetteer);
        let llm = LlmClassifier::new(self.llm.as_ref(), &self.gazetteer);
        let classifier: &dyn IntentClassifier = match self.config.classifier {
            ClassifierKind::Rules => &rules,
            ClassifierKind::Llm => &llm,
        };
        classify_intent(utterance, classifier)
    }

    fn generate(&self, prompt: &str) -> Result<String, TurnError> {
        self.llm.generate(prompt).map_err(|e| {
            tracing::error!(error = %e, "generation failed");
            TurnError::ClientFailure { message: RETRY_MESSAGE.into(), detail: e.to_string() }
        })
    }

    /// Runs one conversational turn. The returned record has not been
    /// applied to any state yet.
    pub fn run_turn(&self, utterance: &str) -> (Result<TurnOutcome, TurnError>, Option<TurnRecord>) {
        let intent = match self.classify(utterance) {
            Ok(i) => i,
            Err(_) => return (Err(TurnError::EmptyUtterance), None),
        };
        let kind = intent.kind().as_str().to_owned();
        let record = |answer: &str, error: Option<&str>, route: Option<RouteAnswer>| TurnRecord {
            utterance: utterance.to_owned(),
            intent: Some(kind.clone()),
            answer: answer.to_owned(),
            error: error.map(str::to_owned),
            route,
        };
        match intent {
            Intent::Spatial { origin, destination, preferences } => {
                match self.plan_route(&origin, &destination, &preferences) {
                    Ok(outcome) => {
                        let prompt = route_prompt(utterance, &outcome.answer.payload);
                        match self.generate(&prompt) {
                            Ok(answer) => {
                                let out = TurnOutcome {
                                    answer: answer.clone(),
                                    intent: kind.clone(),
                                    payload: Some(outcome.answer.payload.clone()),
                                    passages: Vec::new(),
                                    grounded: true,
                                    error: None,
                                };
                                (Ok(out), Some(record(&answer, None, Some(outcome.answer))))
                            }
                            Err(e) => (Err(e), Some(record(RETRY_MESSAGE, Some("client_failure"), None))),
                        }
                    }
                    Err(err) => {
                        let answer = err.apology();
                        let out = TurnOutcome {
                            answer: answer.clone(),
                            intent: kind.clone(),
                            payload: None,
                            passages: Vec::new(),
                            grounded: false,
                            error: Some(err.code().into()),
                        };
                        (Ok(out), Some(record(&answer, Some(err.code()), None)))
                    }
                }
            }
            Intent::Information { query } => {
                let hits = self.retrieve(&query);
                let passages: Vec<&Passage> = hits.iter().map(|(_, p)| *p).collect();
                let prompt = information_prompt(utterance, &passages);
                match self.generate(&prompt) {
                    Ok(answer) => {
                        let out = TurnOutcome {
                            answer: answer.clone(),
                            intent: kind.clone(),
                            payload: None,
                            passages: hits
                                .iter()
                                .map(|(r, _)| RetrievedPassage {
                                    id: r.passage_id.clone(),
                                    score: r.score,
                                    rank: r.rank,
                                })
                                .collect(),
                            grounded: !hits.is_empty(),
                            error: None,
                        };
                        (Ok(out), Some(record(&answer, None, None)))
                    }
                    Err(e) => (Err(e), Some(record(RETRY_MESSAGE, Some("client_failure"), None))),
                }
            }
        }
    }

    /// [`Engine::run_turn`] applied to an in-memory conversation.
    pub fn respond(&self, state: &mut ConversationState, utterance: &str) -> Result<TurnOutcome, TurnError> {
        let (result, record) = self.run_turn(utterance);
        if let Some(r) = record {
            state.apply(r);
        }
        result
    }
}
