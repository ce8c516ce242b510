//! Evaluation harness: automated verdicts over a JSONL query set.

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read};

use serde::{Deserialize, Serialize};
use walkrag_core::geo::point_polyline_distance;
use walkrag_core::{haversine, Intent, LatLon};

use crate::engine::Engine;
use crate::session::ConversationState;

/// Endpoint tolerance between the route ends and the geocoded places.
pub const ENDPOINT_TOLERANCE_M: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpectedKind {
    Spatial,
    Information,
}

impl ExpectedKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExpectedKind::Spatial => "spatial",
            ExpectedKind::Information => "information",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalRecord {
    pub query: String,
    pub kind: ExpectedKind,
    #[serde(default)]
    pub origin: Option<String>,
    #[serde(default)]
    pub destination: Option<String>,
    #[serde(default)]
    pub expected_pois: Vec<String>,
    #[serde(default)]
    pub expected_passage: Option<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("dataset line {line}: {reason}")]
    Schema { line: usize, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Correct,
    PartiallyCorrect,
    Incorrect,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Correct => "correct",
            Verdict::PartiallyCorrect => "partially_correct",
            Verdict::Incorrect => "incorrect",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryResult {
    pub query: String,
    pub kind: ExpectedKind,
    pub classified_as: Option<String>,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub total: usize,
    pub correct: usize,
    pub partially_correct: usize,
    pub incorrect: usize,
    pub classified: usize,
}

impl Counts {
    fn add(&mut self, r: &QueryResult) {
        self.total += 1;
        match r.verdict {
            Verdict::Correct => self.correct += 1,
            Verdict::PartiallyCorrect => self.partially_correct += 1,
            Verdict::Incorrect => self.incorrect += 1,
        }
        if r.classified_as.as_deref() == Some(r.kind.as_str()) {
            self.classified += 1;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub spatial: Counts,
    pub information: Counts,
    pub results: Vec<QueryResult>,
}

pub fn load_dataset(input: impl Read) -> Result<Vec<EvalRecord>, EvalError> {
    let mut out = Vec::new();
    for (i, line) in BufReader::new(input).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let schema = |reason: String| EvalError::Schema { line: i + 1, reason };
        let rec: EvalRecord = serde_json::from_str(&line).map_err(|e| schema(e.to_string()))?;
        if rec.query.trim().is_empty() {
            return Err(schema("empty query".into()));
        }
        if rec.kind == ExpectedKind::Spatial && (rec.origin.is_none() || rec.destination.is_none()) {
            return Err(schema("spatial records need `origin` and `destination`".into()));
        }
        out.push(rec);
    }
    Ok(out)
}

/// True when every instruction text occurs in `answer`, in order.
pub fn lists_all_in_order<'a>(answer: &str, instructions: impl IntoIterator<Item = &'a str>) -> bool {
    let mut at = 0;
    for text in instructions {
        match answer[at..].find(text) {
            Some(i) => at += i + text.len(),
            None => return false,
        }
    }
    true
}

fn same_place(engine: &Engine, a: &str, b: &str) -> bool {
    match (engine.gazetteer.lookup(a), engine.gazetteer.lookup(b)) {
        (Some(x), Some(y)) => x.name == y.name,
        _ => false,
    }
}

fn geocoded(engine: &Engine, name: &str) -> Option<LatLon> {
    engine.gazetteer.lookup(name).map(|e| e.pos)
}

fn judge_spatial(
    engine: &Engine,
    state: &mut ConversationState,
    rec: &EvalRecord,
    notes: &mut Vec<String>,
) -> (Option<String>, Verdict) {
    let intent = match engine.classify(&rec.query) {
        Ok(i) => i,
        Err(e) => {
            notes.push(format!("classification failed: {e}"));
            return (None, Verdict::Incorrect);
        }
    };
    let classified = Some(intent.kind().as_str().to_owned());
    let Intent::Spatial { origin, destination, preferences } = &intent else {
        notes.push("not routed to the spatial component".into());
        return (classified, Verdict::Incorrect);
    };
    let (want_o, want_d) = (rec.origin.as_deref().unwrap_or(""), rec.destination.as_deref().unwrap_or(""));
    if !same_place(engine, origin, want_o) || !same_place(engine, destination, want_d) {
        notes.push(format!("slots {origin:?} -> {destination:?} do not match the expected places"));
        return (classified, Verdict::Incorrect);
    }
    let outcome = match engine.plan_route(origin, destination, preferences) {
        Ok(o) => o,
        Err(e) => {
            notes.push(format!("{}: {e}", e.code()));
            let _ = engine.respond(state, &rec.query);
            return (classified, Verdict::Incorrect);
        }
    };
    let (route, _) = &outcome.candidates[outcome.selected];
    let mut verdict = Verdict::Correct;
    if !route.is_continuous() {
        notes.push("route is not continuous".into());
        verdict = Verdict::Incorrect;
    }
    let geometry = route.geometry();
    if let (Some(first), Some(last)) = (geometry.first(), geometry.last()) {
        let ends = [(*first, want_o), (*last, want_d)];
        for (at, name) in ends {
            match geocoded(engine, name) {
                Some(p) if haversine(at, p) <= ENDPOINT_TOLERANCE_M => {}
                _ => {
                    notes.push(format!("route end is more than {ENDPOINT_TOLERANCE_M} m from {name}"));
                    verdict = Verdict::Incorrect;
                }
            }
        }
    }
    for poi in &outcome.answer.pois {
        let d = point_polyline_distance(LatLon::new(poi.lat, poi.lon), &geometry);
        if d > engine.config.poi_buffer_m + 1e-6 {
            notes.push(format!("POI {} is {d:.0} m from the route", poi.name));
            verdict = Verdict::Incorrect;
        }
    }
    if verdict == Verdict::Incorrect {
        let _ = engine.respond(state, &rec.query);
        return (classified, verdict);
    }
    let payload = &outcome.answer.payload;
    for want in &rec.expected_pois {
        if !payload.poi_names().any(|n| n.eq_ignore_ascii_case(want)) {
            notes.push(format!("expected POI {want:?} not suggested"));
            verdict = Verdict::PartiallyCorrect;
        }
    }
    match engine.respond(state, &rec.query) {
        Ok(turn) => {
            if turn.payload.as_ref() != Some(payload) {
                notes.push("answered route differs from the evaluated route".into());
                verdict = Verdict::Incorrect;
            } else if !lists_all_in_order(&turn.answer, payload.instructions.iter().map(|i| i.text.as_str())) {
                notes.push("answer omits or reorders instructions".into());
                verdict = Verdict::PartiallyCorrect;
            }
        }
        Err(e) => {
            notes.push(format!("generation failed: {e}"));
            verdict = Verdict::Incorrect;
        }
    }
    (classified, verdict)
}

fn judge_information(
    engine: &Engine,
    state: &mut ConversationState,
    rec: &EvalRecord,
    notes: &mut Vec<String>,
) -> (Option<String>, Verdict) {
    let turn = match engine.respond(state, &rec.query) {
        Ok(t) => t,
        Err(e) => {
            notes.push(format!("turn failed: {e}"));
            return (None, Verdict::Incorrect);
        }
    };
    let classified = Some(turn.intent.clone());
    if turn.intent != ExpectedKind::Information.as_str() {
        notes.push("not routed to retrieval".into());
        return (classified, Verdict::Incorrect);
    }
    let verdict = match &rec.expected_passage {
        Some(want) if turn.passages.iter().any(|p| &p.id == want) => Verdict::Correct,
        Some(want) => {
            let got: Vec<&str> = turn.passages.iter().map(|p| p.id.as_str()).collect();
            notes.push(format!("expected passage {want} not in top-{}: {got:?}", engine.config.top_k));
            Verdict::Incorrect
        }
        None if turn.grounded => Verdict::Correct,
        None => {
            notes.push("no passages retrieved".into());
            Verdict::PartiallyCorrect
        }
    };
    (classified, verdict)
}

/// Runs every record through one conversation, in order.
pub fn run_eval(engine: &Engine, records: &[EvalRecord]) -> EvalReport {
    let mut state = ConversationState::default();
    let mut report = EvalReport { spatial: Counts::default(), information: Counts::default(), results: Vec::new() };
    for rec in records {
        let mut notes = Vec::new();
        let (classified_as, verdict) = match rec.kind {
            ExpectedKind::Spatial => judge_spatial(engine, &mut state, rec, &mut notes),
            ExpectedKind::Information => judge_information(engine, &mut state, rec, &mut notes),
        };
        let result = QueryResult { query: rec.query.clone(), kind: rec.kind, classified_as, verdict, notes };
        match rec.kind {
            ExpectedKind::Spatial => report.spatial.add(&result),
            ExpectedKind::Information => report.information.add(&result),
        }
        report.results.push(result);
    }
    report
}

impl EvalReport {
    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<4} {:<12} {:<18} query", "#", "kind", "verdict");
        for (i, r) in self.results.iter().enumerate() {
            let _ = writeln!(out, "{:<4} {:<12} {:<18} {}", i + 1, r.kind.as_str(), r.verdict.as_str(), r.query);
            for n in &r.notes {
                let _ = writeln!(out, "{:<36}   - {n}", "");
            }
        }
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "{:<12} {:>7} {:>9} {:>17} {:>9} {:>10}",
            "type", "total", "correct", "partially_correct", "incorrect", "classified"
        );
        for (name, c) in [("spatial", self.spatial), ("information", self.information)] {
            let _ = writeln!(
                out,
                "{:<12} {:>7} {:>9} {:>17} {:>9} {:>10}",
                name, c.total, c.correct, c.partially_correct, c.incorrect, c.classified
            );
        }
        out
    }
}
