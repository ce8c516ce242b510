mod common;

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn walkrag(args: &[&str]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_walkrag"));
    for (k, _) in std::env::vars().filter(|(k, _)| k.starts_with("WALKRAG_")) {
        cmd.env_remove(k);
    }
    cmd.arg("--config").arg(common::fixture_path("walkrag.toml")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn ingest_counts_match_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = walkrag(&[
        "ingest",
        "--map",
        path(&common::fixture_path("map.osm")),
        "--gazetteer",
        path(&common::fixture_path("gazetteer.csv")),
        "--out",
        path(dir.path()),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let manifest: Value =
        serde_json::from_str(&std::fs::read_to_string(common::fixture_path("manifest.json")).unwrap()).unwrap();
    let stats: Value = serde_json::from_slice(&std::fs::read(dir.path().join("stats.json")).unwrap()).unwrap();
    for key in ["extract_nodes", "extract_ways", "graph_nodes", "graph_edges", "gazetteer_entries", "features"] {
        assert_eq!(stats[key], manifest[key], "{key}");
    }
    assert!(stdout(&out).contains(&format!("graph: {} nodes", manifest["graph_nodes"])));
    assert!(dir.path().join("graph.json").exists() && dir.path().join("features.json").exists());
}

#[test]
fn ingest_missing_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = walkrag(&[
        "ingest",
        "--map",
        path(&dir.path().join("absent.osm")),
        "--gazetteer",
        path(&common::fixture_path("gazetteer.csv")),
        "--out",
        path(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("absent.osm"));
}

#[test]
fn ingest_corrupt_map_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let map = dir.path().join("bad.osm");
    std::fs::write(
        &map,
        "<osm>\n  <node id=\"1\" lat=\"48.85\" lon=\"2.29\"/>\n  <node id=\"2\" lat=\"oops\" lon=\"2.29\"/>\n</osm>\n",
    )
    .unwrap();
    let out = walkrag(&[
        "ingest",
        "--map",
        path(&map),
        "--gazetteer",
        path(&common::fixture_path("gazetteer.csv")),
        "--out",
        path(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));
}

#[test]
fn index_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = common::fixture_path("corpus.jsonl");
    let (a, b) = (dir.path().join("a.idx"), dir.path().join("b.idx"));
    for target in [&a, &b] {
        let out = walkrag(&["index", "--corpus", path(&corpus), "--out", path(target)]);
        assert!(out.status.success(), "{}", stderr(&out));
        assert_eq!(stdout(&out), "indexed 100 passages, dimension 256\n");
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn index_rejects_duplicate_ids() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("dup.jsonl");
    std::fs::write(&corpus, "{\"id\": \"a\", \"text\": \"one\"}\n{\"id\": \"a\", \"text\": \"two\"}\n").unwrap();
    let out = walkrag(&["index", "--corpus", path(&corpus), "--out", path(&dir.path().join("x.idx"))]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("duplicate"), "{}", stderr(&out));
}

#[test]
fn route_matches_golden() {
    let out = walkrag(&["route", "--from", "Notre Dame", "--to", "Eiffel Tower"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let golden = std::fs::read_to_string(common::fixture_path("golden/route_notre_dame_eiffel_tower.json")).unwrap();
    assert_eq!(stdout(&out), golden);
}

#[test]
fn route_geojson_is_lon_lat() {
    let out = walkrag(&["route", "--from", "Notre Dame", "--to", "Eiffel Tower", "--geojson"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let first = &v["features"][0]["geometry"]["coordinates"][0];
    assert!(first[0].as_f64().unwrap() < 3.0 && first[1].as_f64().unwrap() > 48.0);
}

#[test]
fn route_unknown_place_exits_3() {
    let out = walkrag(&["route", "--from", "Atlantis", "--to", "Eiffel Tower"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn route_to_island_exits_4() {
    let out = walkrag(&["route", "--from", "Notre Dame", "--to", "Isolated Pavilion"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn route_preference_reweights() {
    let out = walkrag(&["route", "--from", "Notre Dame", "--to", "Eiffel Tower", "--prefer", "green"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    for ind in v["walkability"]["indicators"].as_array().unwrap() {
        let want = if ind["kind"] == "green_area" { 0.4 } else { 0.2 };
        assert_eq!(ind["w"].as_f64().unwrap(), want, "{}", ind["kind"]);
    }
}

#[test]
fn ask_answers_information_query() {
    let out = walkrag(&["ask", "Tell me more about Eiffel Tower", "--json"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["intent"], "information");
    assert_eq!(v["passages"][0]["id"], "place-eiffel-tower");
}

#[test]
fn eval_fixture_all_correct() {
    let out = walkrag(&["eval", path(&common::fixture_path("eval.jsonl")), "--json"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["spatial"]["correct"], 10);
    assert_eq!(v["information"]["correct"], 30);
}

#[test]
fn eval_unreachable_destination_is_incorrect() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("island.jsonl");
    std::fs::write(
        &data,
        "{\"query\": \"I want a route from Notre Dame to Isolated Pavilion\", \"kind\": \"spatial\", \"origin\": \"Notre Dame\", \"destination\": \"Isolated Pavilion\"}\n",
    )
    .unwrap();
    let out = walkrag(&["eval", path(&data), "--json"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["spatial"]["incorrect"], 1);
    assert_eq!(v["results"][0]["verdict"], "incorrect");
}

#[test]
fn missing_config_file_exits_2() {
    let out = Command::new(env!("CARGO_BIN_EXE_walkrag"))
        .env_remove("WALKRAG_CONFIG")
        .args(["--config", "/nonexistent/walkrag.toml", "route", "--from", "a", "--to", "b"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("/nonexistent/walkrag.toml"));
}
