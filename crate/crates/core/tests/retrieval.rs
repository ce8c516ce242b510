use proptest::prelude::*;
use walkrag_core::retrieval::{embed, IndexMode, IvfParams, DEFAULT_TEST_DIMENSION, NORM_TOLERANCE};
use walkrag_core::{Embedder, Embedding, HashingEncoder, VectorIndex};

const WORDS: [&str; 24] = [
    "river", "bridge", "garden", "tower", "museum", "market", "square", "church", "fountain", "palace", "statue",
    "avenue", "quiet", "ancient", "modern", "glass", "stone", "painting", "opera", "library", "canal", "island",
    "terrace", "gallery",
];

fn texts() -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec(prop::collection::vec(0usize..WORDS.len(), 3..12), 1..80).prop_map(|docs| {
        docs.into_iter()
            .enumerate()
            .map(|(i, words)| {
                let body: Vec<&str> = words.iter().map(|&w| WORDS[w]).collect();
                format!("entry{i} {}", body.join(" "))
            })
            .collect()
    })
}

fn index_of(texts: &[String], mode: IndexMode) -> (VectorIndex, Vec<Embedding>) {
    let enc = HashingEncoder::default();
    let vectors: Vec<Embedding> = texts.iter().map(|t| embed(t, &enc).unwrap()).collect();
    let ids = (0..texts.len()).map(|i| format!("p{i:03}")).collect();
    (VectorIndex::build(DEFAULT_TEST_DIMENSION, ids, &vectors, mode).unwrap(), vectors)
}

/// Cosine against every row, sorted by score then id.
fn linear_scan(index: &VectorIndex, vectors: &[Embedding], query: &Embedding, k: usize) -> Vec<String> {
    let mut scored: Vec<(f64, &String)> =
        vectors.iter().zip(index.ids()).map(|(v, id)| (v.cosine(query), id)).collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(b.1)));
    scored.into_iter().take(k).map(|(_, id)| id.clone()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn embeddings_are_unit_norm_and_deterministic(text in "[a-z]{1,8}( [a-z]{1,8}){0,10}") {
        let enc = HashingEncoder::default();
        if let Ok(a) = enc.embed(&text) {
            prop_assert!((a.norm() - 1.0).abs() <= NORM_TOLERANCE);
            prop_assert_eq!(a.dimension(), DEFAULT_TEST_DIMENSION);
            prop_assert_eq!(enc.embed(&text).unwrap(), a);
        }
    }

    #[test]
    fn exact_search_matches_linear_scan(docs in texts(), queries in prop::collection::vec(prop::collection::vec(0usize..WORDS.len(), 1..6), 1..10), k in 1usize..8) {
        let (index, vectors) = index_of(&docs, IndexMode::Exact);
        let enc = HashingEncoder::default();
        for q in &queries {
            let text: Vec<&str> = q.iter().map(|&w| WORDS[w]).collect();
            let qv = embed(&text.join(" "), &enc).unwrap();
            let got: Vec<String> = index.search_vector(&qv, k).into_iter().map(|r| r.passage_id).collect();
            prop_assert_eq!(got, linear_scan(&index, &vectors, &qv, k));
        }
    }

    #[test]
    fn passages_retrieve_themselves(docs in texts()) {
        let (index, _) = index_of(&docs, IndexMode::Exact);
        let enc = HashingEncoder::default();
        for (i, text) in docs.iter().enumerate() {
            let top = index.search(text, 1, &enc).unwrap();
            prop_assert_eq!(&top[0].passage_id, &format!("p{i:03}"));
            prop_assert_eq!(top[0].rank, 1);
        }
    }

    #[test]
    fn ranks_are_ordered(docs in texts(), k in 1usize..10) {
        let (index, _) = index_of(&docs, IndexMode::Approximate(IvfParams::for_size(docs.len())));
        let hits = index.search("quiet garden by the river", k, &HashingEncoder::default()).unwrap();
        prop_assert!(hits.len() <= k.min(docs.len()));
        for (i, h) in hits.iter().enumerate() {
            prop_assert_eq!(h.rank, i + 1);
        }
        for w in hits.windows(2) {
            prop_assert!(w[0].score > w[1].score || (w[0].score == w[1].score && w[0].passage_id < w[1].passage_id));
        }
    }

    #[test]
    fn exact_search_ignores_index_mode(docs in texts()) {
        let (exact, _) = index_of(&docs, IndexMode::Exact);
        let (ivf, _) = index_of(&docs, IndexMode::Approximate(IvfParams::for_size(docs.len())));
        let q = embed("stone bridge over the canal", &HashingEncoder::default()).unwrap();
        prop_assert_eq!(exact.search_exact(&q, 5), ivf.search_exact(&q, 5));
    }
}

#[test]
fn full_probe_equals_exact() {
    let docs: Vec<String> = (0..200).map(|i| format!("entry{i} {} {}", WORDS[i % 24], WORDS[(i * 7) % 24])).collect();
    let params = IvfParams { nlist: 10, nprobe: 10, iterations: 5, seed: 7 };
    let (ivf, _) = index_of(&docs, IndexMode::Approximate(params));
    let q = embed("museum gallery", &HashingEncoder::default()).unwrap();
    assert_eq!(ivf.search_vector(&q, 10), ivf.search_exact(&q, 10));
}

#[test]
fn empty_index_returns_nothing() {
    let (index, _) = index_of(&[], IndexMode::Exact);
    assert!(index.search("anything", 3, &HashingEncoder::default()).unwrap().is_empty());
}
