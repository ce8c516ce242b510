//! Dense passage retrieval: encoder contract, token-hashing encoder and a
//! cosine-similarity vector index with exact and IVF search.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

pub const DEFAULT_TOP_K: usize = 3;
pub const DEFAULT_TEST_DIMENSION: usize = 256;
pub const REFERENCE_DIMENSION: usize = 1024;
pub const NORM_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct Passage {
    pub id: String,
    pub text: String,
    pub source: Option<String>,
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum EncoderError {
    #[error("encoder failure: {0}")]
    Failure(String),
    #[error("encoder returned dimension {got}, expected {expected}")]
    Dimension { expected: usize, got: usize },
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum IndexError {
    #[error("vector {index} has dimension {got}, expected {expected}")]
    DimensionMismatch { index: usize, expected: usize, got: usize },
    #[error("{ids} ids for {vectors} vectors")]
    LengthMismatch { ids: usize, vectors: usize },
    #[error("duplicate passage id {0}")]
    DuplicateId(String),
    #[error("dimension must be positive")]
    ZeroDimension,
}

/// Unit-norm dense vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding(Vec<f32>);

impl Embedding {
    /// L2-normalizes `raw`; `None` for a zero or non-finite vector.
    pub fn normalized(raw: &[f64]) -> Option<Self> {
        let norm = libm::sqrt(raw.iter().map(|x| x * x).sum::<f64>());
        if !(norm > 0.0 && norm.is_finite()) {
            return None;
        }
        Some(Self(raw.iter().map(|x| (x / norm) as f32).collect()))
    }

    /// Wraps values already known to be unit norm (e.g. read back from disk).
    pub fn from_unit(values: Vec<f32>) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[f32] {
        &self.0
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.0.iter().map(|&x| f64::from(x) * f64::from(x)).sum())
    }

    pub fn cosine(&self, other: &Embedding) -> f64 {
        dot(&self.0, &other.0)
    }
}

fn dot(a: &[f32], b: &[f32]) -> f64 {
    let s: f64 = a.iter().zip(b).map(|(&x, &y)| f64::from(x) * f64::from(y)).sum();
    s.clamp(-1.0, 1.0)
}

/// Text encoder contract. Implementations must be deterministic per text.
pub trait Embedder: Send + Sync {
    fn dimension(&self) -> usize;
    fn embed(&self, text: &str) -> Result<Embedding, EncoderError>;
}

/// Embeds `text`, checking the output dimension against the encoder's.
pub fn embed(text: &str, encoder: &dyn Embedder) -> Result<Embedding, EncoderError> {
    if text.trim().is_empty() {
        return Err(EncoderError::Failure(String::from("empty text")));
    }
    let e = encoder.embed(text)?;
    if e.dimension() != encoder.dimension() {
        return Err(EncoderError::Dimension { expected: encoder.dimension(), got: e.dimension() });
    }
    Ok(e)
}

const STOPWORDS: &[&str] = &[
    "a", "about", "an", "and", "any", "are", "as", "at", "be", "by", "can", "could", "do", "does", "for", "from",
    "how", "i", "in", "is", "it", "its", "me", "more", "my", "of", "on", "or", "tell", "than", "that", "the", "their",
    "there", "this", "to", "was", "we", "were", "what", "when", "where", "which", "who", "why", "with", "would", "you",
];

/// Lower-cased alphanumeric runs.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut cur = String::new();
    for ch in text.chars() {
        if ch.is_alphanumeric() {
            cur.extend(ch.to_lowercase());
        } else if !cur.is_empty() {
            tokens.push(core::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        tokens.push(cur);
    }
    tokens
}

fn fnv1a(seed: u64, parts: &[&str]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325_u64 ^ seed;
    for (i, part) in parts.iter().enumerate() {
        if i > 0 {
            h ^= 0x1f;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
        for b in part.bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    h
}

/// Signed feature hashing of content-word unigrams (weight 1) and adjacent
/// bigrams (weight 0.5) into `dimension` buckets, L2-normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HashingEncoder {
    dimension: usize,
    seed: u64,
}

impl HashingEncoder {
    pub fn new(dimension: usize) -> Self {
        Self::with_seed(dimension, 0)
    }

    pub fn with_seed(dimension: usize, seed: u64) -> Self {
        assert!(dimension > 0, "encoder dimension must be positive");
        Self { dimension, seed }
    }

    fn add(&self, v: &mut [f64], parts: &[&str], weight: f64) {
        let h = fnv1a(self.seed, parts);
        let bucket = (h % self.dimension as u64) as usize;
        let sign = if h >> 63 == 1 { -1.0 } else { 1.0 };
        v[bucket] += sign * weight;
    }
}

impl Default for HashingEncoder {
    fn default() -> Self {
        Self::new(DEFAULT_TEST_DIMENSION)
    }
}

impl Embedder for HashingEncoder {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn embed(&self, text: &str) -> Result<Embedding, EncoderError> {
        let all = tokenize(text);
        let content: Vec<&str> = all.iter().map(String::as_str).filter(|t| !STOPWORDS.contains(t)).collect();
        let tokens: Vec<&str> = if content.is_empty() { all.iter().map(String::as_str).collect() } else { content };
        if tokens.is_empty() {
            return Err(EncoderError::Failure(String::from("text has no tokens")));
        }
        let mut v = vec![0.0; self.dimension];
        for t in &tokens {
            self.add(&mut v, &[t], 1.0);
        }
        for pair in tokens.windows(2) {
            self.add(&mut v, pair, 0.5);
        }
        // Colliding signed buckets can cancel out completely.
        Embedding::normalized(&v).ok_or_else(|| EncoderError::Failure(String::from("degenerate hash vector")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub passage_id: String,
    pub score: f64,
    /// 1-based.
    pub rank: usize,
}

/// Build parameters of the inverted-file approximate search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IvfParams {
    pub nlist: u32,
    pub nprobe: u32,
    pub iterations: u32,
    pub seed: u64,
}

impl IvfParams {
    /// `nlist ≈ sqrt(n)`, probing three quarters of the lists.
    pub fn for_size(n: usize) -> Self {
        let nlist = (libm::round(libm::sqrt(n as f64)) as u32).max(1);
        Self { nlist, nprobe: (3 * nlist).div_ceil(4), iterations: 10, seed: 0x5eed }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexMode {
    Exact,
    Approximate(IvfParams),
}

#[derive(Debug, Clone, PartialEq)]
struct Ivf {
    centroids: Vec<Vec<f32>>,
    lists: Vec<Vec<u32>>,
}

/// Id-aligned unit vectors with exact or IVF cosine search.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorIndex {
    dimension: usize,
    ids: Vec<String>,
    data: Vec<f32>,
    mode: IndexMode,
    ivf: Option<Ivf>,
}

struct SplitMix(u64);

impl SplitMix {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
}

fn by_score_then_id(a: &(f64, &str), b: &(f64, &str)) -> Ordering {
    b.0.total_cmp(&a.0).then_with(|| a.1.cmp(b.1))
}

impl VectorIndex {
    pub fn build(
        dimension: usize,
        ids: Vec<String>,
        vectors: &[Embedding],
        mode: IndexMode,
    ) -> Result<Self, IndexError> {
        if ids.len() != vectors.len() {
            return Err(IndexError::LengthMismatch { ids: ids.len(), vectors: vectors.len() });
        }
        let mut data = Vec::with_capacity(dimension * vectors.len());
        for (index, v) in vectors.iter().enumerate() {
            if v.dimension() != dimension {
                return Err(IndexError::DimensionMismatch { index, expected: dimension, got: v.dimension() });
            }
            data.extend_from_slice(v.values());
        }
        Self::from_parts(dimension, ids, data, mode)
    }

    /// Reassembles an index from its stored table; IVF lists are rebuilt from the recorded parameters.
    pub fn from_parts(dimension: usize, ids: Vec<String>, data: Vec<f32>, mode: IndexMode) -> Result<Self, IndexError> {
        if dimension == 0 {
            return Err(IndexError::ZeroDimension);
        }
        if data.len() != ids.len() * dimension {
            return Err(IndexError::LengthMismatch { ids: ids.len(), vectors: data.len() / dimension });
        }
        let mut seen = BTreeSet::new();
        for id in &ids {
            if !seen.insert(id.as_str()) {
                return Err(IndexError::DuplicateId(id.clone()));
            }
        }
        let mut index = Self { dimension, ids, data, mode, ivf: None };
        if let IndexMode::Approximate(params) = mode {
            index.ivf = Some(index.train_ivf(params));
        }
        Ok(index)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn mode(&self) -> IndexMode {
        self.mode
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    /// Row-major vector table.
    pub fn data(&self) -> &[f32] {
        &self.data
    }

    fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.dimension..(i + 1) * self.dimension]
    }

    fn nearest_centroid(centroids: &[Vec<f32>], v: &[f32]) -> usize {
        let mut best = (0, f64::NEG_INFINITY);
        for (c, centroid) in centroids.iter().enumerate() {
            let s = dot(centroid, v);
            if s > best.1 {
                best = (c, s);
            }
        }
        best.0
    }

    /// Spherical k-means with seeded initial picks.
    fn train_ivf(&self, params: IvfParams) -> Ivf {
        let n = self.len();
        let nlist = (params.nlist as usize).clamp(1, n.max(1));
        let mut order: Vec<usize> = (0..n).collect();
        let mut rng = SplitMix(params.seed);
        for i in (1..n).rev() {
            let j = (rng.next() % (i as u64 + 1)) as usize;
            order.swap(i, j);
        }
        let mut centroids: Vec<Vec<f32>> = order.iter().take(nlist).map(|&i| self.row(i).to_vec()).collect();
        if centroids.is_empty() {
            centroids.push(vec![0.0; self.dimension]);
        }
        let mut assign = vec![0usize; n];
        for round in 0..=params.iterations {
            for (i, slot) in assign.iter_mut().enumerate() {
                *slot = Self::nearest_centroid(&centroids, self.row(i));
            }
            if round == params.iterations {
                break;
            }
            let mut sums = vec![vec![0.0f64; self.dimension]; centroids.len()];
            for (i, &c) in assign.iter().enumerate() {
                for (acc, &x) in sums[c].iter_mut().zip(self.row(i)) {
                    *acc += f64::from(x);
                }
            }
            for (c, sum) in sums.iter().enumerate() {
                // Empty clusters keep their previous centroid.
                if let Some(e) = Embedding::normalized(sum) {
                    centroids[c] = e.0;
                }
            }
        }
        let mut lists = vec![Vec::new(); centroids.len()];
        for (i, &c) in assign.iter().enumerate() {
            lists[c].push(i as u32);
        }
        Ivf { centroids, lists }
    }

    fn rank(&self, mut scored: Vec<(f64, &str)>, k: usize) -> Vec<SearchResult> {
        scored.sort_by(by_score_then_id);
        scored
            .into_iter()
            .take(k)
            .enumerate()
            .map(|(i, (score, id))| SearchResult { passage_id: String::from(id), score, rank: i + 1 })
            .collect()
    }

    /// Exact top-`k` regardless of the index mode.
    pub fn search_exact(&self, query: &Embedding, k: usize) -> Vec<SearchResult> {
        let scored = (0..self.len()).map(|i| (dot(self.row(i), query.values()), self.ids[i].as_str())).collect();
        self.rank(scored, k)
    }

    /// Top-`k` using the index mode; ties resolve by ascending passage id.
    pub fn search_vector(&self, query: &Embedding, k: usize) -> Vec<SearchResult> {
        let Some(ivf) = &self.ivf else {
            return self.search_exact(query, k);
        };
        let IndexMode::Approximate(params) = self.mode else {
            return self.search_exact(query, k);
        };
        let mut lists: Vec<(f64, usize)> =
            ivf.centroids.iter().enumerate().map(|(c, cen)| (dot(cen, query.values()), c)).collect();
        lists.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        let probe = (params.nprobe as usize).clamp(1, lists.len());
        let scored = lists[..probe]
            .iter()
            .flat_map(|&(_, c)| ivf.lists[c].iter())
            .map(|&i| {
                let i = i as usize;
                (dot(self.row(i), query.values()), self.ids[i].as_str())
            })
            .collect();
        self.rank(scored, k)
    }

    /// Encodes `query` and searches. An empty index yields an empty list.
    pub fn search(&self, query: &str, k: usize, encoder: &dyn Embedder) -> Result<Vec<SearchResult>, EncoderError> {
        if self.is_empty() || k == 0 {
            return Ok(Vec::new());
        }
        let q = embed(query, encoder)?;
        if q.dimension() != self.dimension {
            return Err(EncoderError::Dimension { expected: self.dimension, got: q.dimension() });
        }
        Ok(self.search_vector(&q, k))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;

    fn corpus(n: usize) -> (Vec<String>, Vec<Embedding>) {
        let enc = HashingEncoder::default();
        let words = ["river", "garden", "museum", "bridge", "tower", "market", "church", "square", "palace", "opera"];
        let ids: Vec<String> = (0..n).map(|i| format!("p{i:04}")).collect();
        let vecs = (0..n)
            .map(|i| {
                let text = format!("{} {} {} number {i}", words[i % 10], words[(i / 10) % 10], words[(i * 7) % 10]);
                enc.embed(&text).unwrap()
            })
            .collect();
        (ids, vecs)
    }

    #[test]
    fn encoder_is_deterministic_and_unit_norm() {
        let enc = HashingEncoder::default();
        let a = enc.embed("The Louvre is the world's largest art museum").unwrap();
        let b = enc.embed("The Louvre is the world's largest art museum").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.dimension(), 256);
        assert!((a.norm() - 1.0).abs() < NORM_TOLERANCE);
    }

    #[test]
    fn stopword_only_text_still_encodes() {
        let enc = HashingEncoder::default();
        assert!(enc.embed("what is it").is_ok());
        assert!(enc.embed("?!").is_err());
        assert!(embed("   ", &enc).is_err());
    }

    #[test]
    fn tokenizer_splits_on_non_alphanumerics() {
        assert_eq!(tokenize("Champ-de-Mars, Paris!"), vec!["champ", "de", "mars", "paris"]);
    }

    #[test]
    fn empty_index_returns_nothing() {
        let idx = VectorIndex::build(256, Vec::new(), &[], IndexMode::Exact).unwrap();
        assert!(idx.search("anything", 3, &HashingEncoder::default()).unwrap().is_empty());
    }

    #[test]
    fn mixed_dimensions_rejected() {
        let a = HashingEncoder::new(8).embed("one").unwrap();
        let b = HashingEncoder::new(16).embed("two").unwrap();
        let err = VectorIndex::build(8, vec!["a".into(), "b".into()], &[a, b], IndexMode::Exact).unwrap_err();
        assert_eq!(err, IndexError::DimensionMismatch { index: 1, expected: 8, got: 16 });
    }

    #[test]
    fn duplicate_ids_rejected() {
        let a = HashingEncoder::new(8).embed("one").unwrap();
        let err = VectorIndex::build(8, vec!["a".into(), "a".into()], &[a.clone(), a], IndexMode::Exact).unwrap_err();
        assert_eq!(err, IndexError::DuplicateId("a".into()));
    }

    #[test]
    fn exact_search_matches_brute_force() {
        let (ids, vecs) = corpus(100);
        let idx = VectorIndex::build(256, ids.clone(), &vecs, IndexMode::Exact).unwrap();
        let enc = HashingEncoder::default();
        for q in ["river garden", "opera palace square", "tower 17"] {
            let qv = enc.embed(q).unwrap();
            let mut oracle: Vec<(f64, String)> = vecs
                .iter()
                .zip(&ids)
                .map(|(v, id)| {
                    let s: f64 = v.values().iter().zip(qv.values()).map(|(a, b)| (*a as f64) * (*b as f64)).sum();
                    (s, id.clone())
                })
                .collect();
            oracle.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
            let got: Vec<String> = idx.search(q, 10, &enc).unwrap().into_iter().map(|r| r.passage_id).collect();
            let want: Vec<String> = oracle.into_iter().take(10).map(|(_, id)| id).collect();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn ranks_and_scores_are_ordered() {
        let (ids, vecs) = corpus(50);
        let idx = VectorIndex::build(256, ids, &vecs, IndexMode::Exact).unwrap();
        let res = idx.search("museum bridge", 5, &HashingEncoder::default()).unwrap();
        assert_eq!(res.len(), 5);
        for (i, r) in res.iter().enumerate() {
            assert_eq!(r.rank, i + 1);
        }
        assert!(res.windows(2).all(|w| w[0].score >= w[1].score));
    }

    #[test]
    fn self_retrieval_scores_one() {
        let enc = HashingEncoder::default();
        let texts = ["Champs de Mars is a large public green space", "The Louvre houses the Mona Lisa"];
        let vecs: Vec<Embedding> = texts.iter().map(|t| enc.embed(t).unwrap()).collect();
        let idx = VectorIndex::build(256, vec!["a".into(), "b".into()], &vecs, IndexMode::Exact).unwrap();
        let r = idx.search(texts[0], 3, &enc).unwrap();
        assert_eq!(r[0].passage_id, "a");
        assert!((r[0].score - 1.0).abs() < 1e-6);
    }

    #[test]
    fn ivf_rebuild_is_deterministic() {
        let (ids, vecs) = corpus(200);
        let mode = IndexMode::Approximate(IvfParams::for_size(200));
        let a = VectorIndex::build(256, ids.clone(), &vecs, mode).unwrap();
        let b = VectorIndex::from_parts(256, ids, a.data().to_vec(), mode).unwrap();
        assert_eq!(a, b);
    }
}
