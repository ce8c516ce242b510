//! External model clients: answer generation, embeddings, air quality and
//! LLM-backed intent classification.

use std::time::Duration;

use serde_json::{json, Value};
use walkrag_core::air::{AirQualityError, AirQualitySample};
use walkrag_core::intent::{extract_preferences, IntentClassifier, IntentError, Preference};
use walkrag_core::retrieval::{Embedding, EncoderError};
use walkrag_core::{classify_intent, AirQualityClient, Aqi, Embedder, Gazetteer, Intent, LatLon, RuleClassifier};

use crate::payload::RoutePayload;
use crate::prompt::{fenced_block, parse_prompt, NO_CONTEXT, PASSAGE_CONTEXT, ROUTE_CONTEXT};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LlmError {
    #[error("generator request failed: {0}")]
    Transport(String),
    #[error("generator returned an unusable response: {0}")]
    BadResponse(String),
}

pub trait LlmClient: Send + Sync {
    fn generate(&self, prompt: &str) -> Result<String, LlmError>;
}

/// Deterministic generator for tests and offline use. The answer is a pure
/// function of the prompt and only restates what the context holds.
#[derive(Debug, Clone, Copy, Default)]
pub struct MockLlm;

fn first_sentence(text: &str) -> &str {
    let text = text.trim();
    match text.find(". ") {
        Some(i) => &text[..=i],
        None => text,
    }
}

fn route_answer(payload: &RoutePayload) -> String {
    let mut out = format!(
        "Here is the most walkable route from {} to {} (walkability score {:.2}).\n",
        payload.origin, payload.destination, payload.walkability.ws
    );
    for (i, ins) in payload.instructions.iter().enumerate() {
        out.push_str(&format!("{}. {}\n", i + 1, ins.text));
    }
    let mut any = false;
    for seg in &payload.segments {
        for poi in &seg.pois {
            if !any {
                out.push_str("Points of interest along the way:\n");
                any = true;
            }
            out.push_str(&format!("- {} ({}), segment {}\n", poi.name, poi.category, seg.index + 1));
        }
    }
    if !any {
        out.push_str("No points of interest were found along this route.\n");
    }
    out
}

impl LlmClient for MockLlm {
    fn generate(&self, prompt: &str) -> Result<String, LlmError> {
        let parts = parse_prompt(prompt).ok_or_else(|| LlmError::BadResponse("unrecognised prompt".into()))?;
        match parts.context_kind {
            ROUTE_CONTEXT => {
                let block = fenced_block(parts.context, "json")
                    .ok_or_else(|| LlmError::BadResponse("missing payload".into()))?;
                let payload: RoutePayload =
                    serde_json::from_str(block).map_err(|e| LlmError::BadResponse(e.to_string()))?;
                Ok(route_answer(&payload))
            }
            PASSAGE_CONTEXT => {
                let block = fenced_block(parts.context, "passages").unwrap_or("");
                let mut out = String::from("Here is what I found:\n");
                for chunk in block.split("\n\n") {
                    let Some((head, body)) = chunk.split_once('\n') else { continue };
                    let n = head.split(']').next().unwrap_or("[").trim_start_matches('[');
                    out.push_str(&format!("- {} [{n}]\n", first_sentence(body)));
                }
                Ok(out)
            }
            NO_CONTEXT => Ok("I could not find any information about this in my knowledge base.".into()),
            other => Err(LlmError::BadResponse(format!("unknown context kind {other:?}"))),
        }
    }
}

fn agent(timeout: Duration) -> ureq::Agent {
    ureq::AgentBuilder::new().timeout(timeout).build()
}

fn transport(err: ureq::Error) -> String {
    match err {
        ureq::Error::Status(code, _) => format!("HTTP {code}"),
        ureq::Error::Transport(t) => t.to_string(),
    }
}

/// OpenAI-compatible chat-completions client.
pub struct HttpLlm {
    agent: ureq::Agent,
    url: String,
    model: String,
    api_key: Option<String>,
}

impl HttpLlm {
    /// `base_url` is the API root, e.g. `http://localhost:8000/v1`.
    pub fn new(base_url: &str, model: &str, api_key: Option<String>, timeout: Duration) -> Self {
        Self {
            agent: agent(timeout),
            url: format!("{}/chat/completions", base_url.trim_end_matches('/')),
            model: model.into(),
            api_key,
        }
    }
}

impl LlmClient for HttpLlm {
    fn generate(&self, prompt: &str) -> Result<String, LlmError> {
        let mut req = self.agent.post(&self.url);
        if let Some(key) = &self.api_key {
            req = req.set("Authorization", &format!("Bearer {key}"));
        }
        let body = json!({
            "model": self.model,
            "temperature": 0,
            "messages": [{"role": "user", "content": prompt}],
        });
        let resp: Value = req
            .send_json(body)
            .map_err(|e| LlmError::Transport(transport(e)))?
            .into_json()
            .map_err(|e| LlmError::BadResponse(e.to_string()))?;
        resp["choices"][0]["message"]["content"]
            .as_str()
            .map(str::to_owned)
            .ok_or_else(|| LlmError::BadResponse("no choices[0].message.content".into()))
    }
}

/// OpenAI-compatible embeddings client; vectors are L2-normalised on receipt.
pub struct HttpEmbedder {
    agent: ureq::Agent,
    url: String,
    model: String,
    dimension: usize,
}

impl HttpEmbedder {
    pub fn new(base_url: &str, model: &str, dimension: usize, timeout: Duration) -> Self {
        Self {
            agent: agent(timeout),
            url: format!("{}/embeddings", base_url.trim_end_matches('/')),
            model: model.into(),
            dimension,
        }
    }
}

impl Embedder for HttpEmbedder {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn embed(&self, text: &str) -> Result<Embedding, EncoderError> {
        let resp: Value = self
            .agent
            .post(&self.url)
            .send_json(json!({"model": self.model, "input": text}))
            .map_err(|e| EncoderError::Failure(transport(e)))?
            .into_json()
            .map_err(|e| EncoderError::Failure(e.to_string()))?;
        let raw: Vec<f64> = resp["data"][0]["embedding"]
            .as_array()
            .ok_or_else(|| EncoderError::Failure("no data[0].embedding".into()))?
            .iter()
            .map(|x| x.as_f64().ok_or_else(|| EncoderError::Failure("non-numeric embedding".into())))
            .collect::<Result<_, _>>()?;
        if raw.len() != self.dimension {
            return Err(EncoderError::Dimension { expected: self.dimension, got: raw.len() });
        }
        Embedding::normalized(&raw).ok_or_else(|| EncoderError::Failure("zero embedding".into()))
    }
}

/// OpenWeatherMap air-pollution endpoint (grades 1..5).
pub struct OpenWeatherMapAir {
    agent: ureq::Agent,
    base_url: String,
    api_key: String,
}

impl OpenWeatherMapAir {
    pub const DEFAULT_URL: &'static str = "https://api.openweathermap.org/data/2.5/air_pollution";

    pub fn new(base_url: &str, api_key: &str, timeout: Duration) -> Self {
        Self { agent: agent(timeout), base_url: base_url.into(), api_key: api_key.into() }
    }
}

impl AirQualityClient for OpenWeatherMapAir {
    fn fetch(&self, location: LatLon) -> Result<AirQualitySample, AirQualityError> {
        let unavailable = |m: String| AirQualityError::Unavailable(m);
        let resp: Value = self
            .agent
            .get(&self.base_url)
            .query("lat", &location.lat.to_string())
            .query("lon", &location.lon.to_string())
            .query("appid", &self.api_key)
            .call()
            .map_err(|e| unavailable(transport(e)))?
            .into_json()
            .map_err(|e| unavailable(e.to_string()))?;
        let entry = &resp["list"][0];
        let aqi = entry["main"]["aqi"]
            .as_u64()
            .and_then(|g| u8::try_from(g).ok())
            .and_then(Aqi::new)
            .ok_or_else(|| unavailable("response has no valid list[0].main.aqi".into()))?;
        Ok(AirQualitySample { aqi, location, timestamp: entry["dt"].as_i64().unwrap_or(0) })
    }
}

const CLASSIFY_PROMPT: &str = "Classify the user message for a walking-tour assistant. Reply with JSON only: \
{\"kind\": \"spatial\", \"origin\": \"...\", \"destination\": \"...\"} when the user asks for a route between two \
places, otherwise {\"kind\": \"information\"}.\n\nMessage: ";

/// Asks the generator to classify, then checks the slots against the
/// gazetteer. Any failure or unknown place falls back to the rule classifier.
pub struct LlmClassifier<'a> {
    llm: &'a dyn LlmClient,
    gazetteer: &'a Gazetteer,
}

impl<'a> LlmClassifier<'a> {
    pub fn new(llm: &'a dyn LlmClient, gazetteer: &'a Gazetteer) -> Self {
        Self { llm, gazetteer }
    }

    fn ask(&self, utterance: &str) -> Option<Intent> {
        let raw = self.llm.generate(&format!("{CLASSIFY_PROMPT}{utterance}")).ok()?;
        let start = raw.find('{')?;
        let end = raw.rfind('}')?;
        let v: Value = serde_json::from_str(raw.get(start..=end)?).ok()?;
        match v["kind"].as_str()? {
            "information" => Some(Intent::Information { query: utterance.trim().to_owned() }),
            "spatial" => {
                let origin = self.gazetteer.lookup(v["origin"].as_str()?)?.name.clone();
                let destination = self.gazetteer.lookup(v["destination"].as_str()?)?.name.clone();
                let mut rest = utterance.to_lowercase();
                for name in [&origin, &destination] {
                    rest = rest.replace(&name.to_lowercase(), " ");
                }
                let preferences: Vec<Preference> = extract_preferences(&rest);
                Some(Intent::Spatial { origin, destination, preferences })
            }
            _ => None,
        }
    }
}

impl IntentClassifier for LlmClassifier<'_> {
    fn classify(&self, utterance: &str) -> Result<Intent, IntentError> {
        match self.ask(utterance) {
            Some(intent) => Ok(intent),
            None => classify_intent(utterance, &RuleClassifier::new(self.gazetteer)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prompt::{information_prompt, route_prompt};
    use std::io::{BufRead, BufReader, Read, Write};
    use std::net::TcpListener;
    use walkrag_core::{GazetteerEntry, Passage};

    /// One-shot HTTP server answering with `body`; returns its base URL and
    /// a handle yielding the raw request.
    fn stub(status: &str, body: &str) -> (String, std::thread::JoinHandle<String>) {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        let response = format!(
            "HTTP/1.1 {status}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
            body.len()
        );
        let handle = std::thread::spawn(move || {
            let (stream, _) = listener.accept().unwrap();
            let mut reader = BufReader::new(stream);
            let mut head = String::new();
            let mut len = 0;
            loop {
                let mut line = String::new();
                reader.read_line(&mut line).unwrap();
                if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
                    len = v.trim().parse().unwrap();
                }
                head.push_str(&line);
                if line == "\r\n" {
                    break;
                }
            }
            let mut body = vec![0; len];
            reader.read_exact(&mut body).unwrap();
            reader.get_mut().write_all(response.as_bytes()).unwrap();
            head + &String::from_utf8(body).unwrap()
        });
        (format!("http://{addr}"), handle)
    }

    #[test]
    fn mock_is_pure() {
        let p = Passage { id: "x".into(), text: "Pont Neuf is old. It has arches.".into(), source: None };
        let prompt = information_prompt("pont neuf?", &[&p]);
        let a = MockLlm.generate(&prompt).unwrap();
        assert_eq!(a, MockLlm.generate(&prompt).unwrap());
        assert_eq!(a, "Here is what I found:\n- Pont Neuf is old. [1]\n");
        assert!(MockLlm.generate(&information_prompt("?", &[])).unwrap().contains("could not find"));
        assert!(MockLlm.generate("hello").is_err());
    }

    #[test]
    fn mock_restates_route_payload() {
        let payload: RoutePayload = serde_json::from_value(json!({
            "payload_version": 1, "origin": "A", "destination": "B",
            "instructions": [
                {"kind": "depart", "text": "Head north on Rue X for 10 m", "distance_m": 10.0},
                {"kind": "arrive", "text": "Arrive at your destination", "distance_m": 0.0}
            ],
            "walkability": {"ws": 0.5, "tau": 5.0, "indicators": [], "flags": []},
            "segments": [{"index": 0, "length_m": 10.0, "pois": [{"name": "Musee", "category": "museum"}]}]
        }))
        .unwrap();
        let a = MockLlm.generate(&route_prompt("route from A to B", &payload)).unwrap();
        assert!(a.contains("1. Head north on Rue X for 10 m\n2. Arrive at your destination"), "{a}");
        assert!(a.contains("- Musee (museum), segment 1"));
    }

    #[test]
    fn http_llm_round_trip() {
        let (url, handle) = stub("200 OK", r#"{"choices":[{"message":{"role":"assistant","content":"hi there"}}]}"#);
        let llm = HttpLlm::new(&format!("{url}/v1"), "m", Some("k".into()), Duration::from_secs(5));
        assert_eq!(llm.generate("say hi").unwrap(), "hi there");
        let req = handle.join().unwrap();
        assert!(req.starts_with("POST /v1/chat/completions"));
        assert!(req.contains("Bearer k") && req.contains("say hi"));
    }

    #[test]
    fn http_llm_failures() {
        let (url, handle) = stub("500 Internal Server Error", "{}");
        let llm = HttpLlm::new(&url, "m", None, Duration::from_secs(5));
        assert_eq!(llm.generate("x"), Err(LlmError::Transport("HTTP 500".into())));
        handle.join().unwrap();
        let dead = HttpLlm::new("http://127.0.0.1:1", "m", None, Duration::from_secs(1));
        assert!(matches!(dead.generate("x"), Err(LlmError::Transport(_))));
    }

    #[test]
    fn http_embedder_normalises_and_checks_dimension() {
        let (url, handle) = stub("200 OK", r#"{"data":[{"embedding":[3.0,4.0]}]}"#);
        let e = HttpEmbedder::new(&url, "m", 2, Duration::from_secs(5)).embed("x").unwrap();
        assert_eq!(e.values(), &[0.6f32, 0.8]);
        handle.join().unwrap();
        let (url, handle) = stub("200 OK", r#"{"data":[{"embedding":[3.0,4.0]}]}"#);
        let err = HttpEmbedder::new(&url, "m", 3, Duration::from_secs(5)).embed("x").unwrap_err();
        assert_eq!(err, EncoderError::Dimension { expected: 3, got: 2 });
        handle.join().unwrap();
    }

    #[test]
    fn openweathermap_parses_grade() {
        let (url, handle) = stub("200 OK", r#"{"list":[{"main":{"aqi":4},"dt":1700000000}]}"#);
        let s = OpenWeatherMapAir::new(&url, "key", Duration::from_secs(5)).fetch(LatLon::new(48.85, 2.29)).unwrap();
        assert_eq!((s.aqi.get(), s.timestamp), (4, 1_700_000_000));
        assert!(handle.join().unwrap().contains("appid=key"));
        let (url, handle) = stub("200 OK", r#"{"list":[{"main":{"aqi":9}}]}"#);
        assert!(OpenWeatherMapAir::new(&url, "key", Duration::from_secs(5)).fetch(LatLon::new(0.0, 0.0)).is_err());
        handle.join().unwrap();
    }

    struct Canned(&'static str);

    impl LlmClient for Canned {
        fn generate(&self, _: &str) -> Result<String, LlmError> {
            Ok(self.0.into())
        }
    }

    fn gazetteer() -> Gazetteer {
        Gazetteer::new(vec![
            GazetteerEntry { name: "Louvre".into(), pos: LatLon::new(48.8606, 2.3376) },
            GazetteerEntry { name: "Pont Neuf".into(), pos: LatLon::new(48.8571, 2.3413) },
        ])
        .unwrap()
    }

    #[test]
    fn llm_classifier_validates_slots() {
        let g = gazetteer();
        let llm = Canned(r#"Sure: {"kind":"spatial","origin":"louvre","destination":"Pont Neuf"}"#);
        let intent = LlmClassifier::new(&llm, &g).classify("walk from the louvre to pont neuf via parks").unwrap();
        assert_eq!(intent.kind().as_str(), "spatial");
        assert_eq!(intent.indicator_preferences().len(), 1);
        let bad = Canned(r#"{"kind":"spatial","origin":"Atlantis","destination":"Pont Neuf"}"#);
        let intent = LlmClassifier::new(&bad, &g).classify("tell me about atlantis").unwrap();
        assert_eq!(intent, Intent::Information { query: "tell me about atlantis".into() });
    }
}
