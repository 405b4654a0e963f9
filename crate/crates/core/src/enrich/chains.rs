//! Story chaining: greedy single-pass TF-IDF clustering over a moving time
//! window.
//!
//! Each article joins the open chain whose centroid is most cosine-similar,
//! provided the similarity reaches `tau` and the chain was last extended no
//! longer than `window` ago; otherwise it opens a new chain. A centroid is the
//! L2-normalized sum of its members' TF-IDF vectors.

use std::collections::{BTreeMap, HashMap};

use super::{tokens, EnrichError};
use crate::corpus::Timestamp;

pub const DEFAULT_TAU: f64 = 0.5;
pub const DEFAULT_WINDOW_SECS: i64 = 3 * 24 * 3600;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainConfig {
    tau: f64,
    window_secs: i64,
}

impl ChainConfig {
    pub fn new(tau: f64, window_secs: i64) -> Result<Self, EnrichError> {
        if !(tau > 0.0 && tau <= 1.0) {
            return Err(EnrichError::InvalidTau(tau));
        }
        if window_secs < 0 {
            return Err(EnrichError::InvalidWindow(window_secs));
        }
        Ok(Self { tau, window_secs })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn window_secs(&self) -> i64 {
        self.window_secs
    }
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self {
            tau: DEFAULT_TAU,
            window_secs: DEFAULT_WINDOW_SECS,
        }
    }
}

/// Sparse vector sorted by term index.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparseVector(Vec<(usize, f64)>);

impl SparseVector {
    fn norm(&self) -> f64 {
        self.0.iter().map(|(_, w)| w * w).sum::<f64>().sqrt()
    }

    fn normalized(mut self) -> Self {
        let n = self.norm();
        if n > 0.0 {
            for (_, w) in &mut self.0 {
                *w /= n;
            }
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn dot(&self, other: &SparseVector) -> f64 {
        let (mut i, mut j, mut acc) = (0, 0, 0.0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += self.0[i].1 * other.0[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }
}

/// Vocabulary and smoothed inverse document frequencies fitted on a catalog.
#[derive(Debug, Clone, Default)]
pub struct TfIdf {
    vocabulary: HashMap<String, usize>,
    idf: Vec<f64>,
}

impl TfIdf {
    /// `idf(t) = ln((1 + N) / (1 + df(t))) + 1`.
    pub fn fit<'a>(documents: impl IntoIterator<Item = &'a str>) -> Self {
        let mut vocabulary: HashMap<String, usize> = HashMap::new();
        let mut df: Vec<usize> = Vec::new();
        let mut n_docs = 0usize;
        for doc in documents {
            n_docs += 1;
            let mut terms: Vec<String> = tokens(doc).collect();
            terms.sort_unstable();
            terms.dedup();
            for term in terms {
                let next = vocabulary.len();
                let idx = *vocabulary.entry(term).or_insert(next);
                if idx == df.len() {
                    df.push(0);
                }
                df[idx] += 1;
            }
        }
        let idf = df
            .iter()
            .map(|&d| ((1.0 + n_docs as f64) / (1.0 + d as f64)).ln() + 1.0)
            .collect();
        Self { vocabulary, idf }
    }

    /// L2-normalized TF-IDF vector; unknown terms are ignored.
    pub fn transform(&self, text: &str) -> SparseVector {
        let mut tf: BTreeMap<usize, f64> = BTreeMap::new();
        for term in tokens(text) {
            if let Some(&idx) = self.vocabulary.get(&term) {
                *tf.entry(idx).or_insert(0.0) += 1.0;
            }
        }
        SparseVector(tf.into_iter().map(|(i, c)| (i, c * self.idf[i])).collect()).normalized()
    }
}

#[derive(Debug, Clone)]
struct Chain {
    id: String,
    seq: usize,
    sum: BTreeMap<usize, f64>,
    centroid: SparseVector,
    last_seen: Timestamp,
}

impl Chain {
    fn absorb(&mut self, v: &SparseVector, time: Timestamp) {
        for &(i, w) in &v.0 {
            *self.sum.entry(i).or_insert(0.0) += w;
        }
        self.centroid = SparseVector(self.sum.iter().map(|(&i, &w)| (i, w)).collect()).normalized();
        self.last_seen = self.last_seen.max(time);
    }
}

/// Open chains ordered by `last_seen`.
#[derive(Debug, Clone, Default)]
pub struct ChainState {
    config: ChainConfig,
    open: Vec<Chain>,
    opened: usize,
}

impl ChainState {
    pub fn new(config: ChainConfig) -> Self {
        Self {
            config,
            open: Vec::new(),
            opened: 0,
        }
    }

    /// Assigns a chain to an article observed at `time`; calls must come in
    /// non-decreasing time order.
    pub fn observe(&mut self, vector: &SparseVector, time: Timestamp) -> String {
        let window = self.config.window_secs;
        let expired = self
            .open
            .iter()
            .take_while(|c| time.saturating_sub(c.last_seen) > window)
            .count();
        self.open.drain(..expired);

        let mut best: Option<(usize, f64)> = None;
        if !vector.is_zero() {
            for (pos, chain) in self.open.iter().enumerate() {
                let sim = vector.dot(&chain.centroid);
                if sim + 1e-12 < self.config.tau {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some((b, bs)) => sim > bs || (sim == bs && chain.seq < self.open[b].seq),
                };
                if better {
                    best = Some((pos, sim));
                }
            }
        }

        let mut chain = match best {
            Some((pos, _)) => self.open.remove(pos),
            None => {
                let seq = self.opened;
                self.opened += 1;
                Chain {
                    id: format!("chain_{seq}"),
                    seq,
                    sum: BTreeMap::new(),
                    centroid: SparseVector::default(),
                    last_seen: time,
                }
            }
        };
        chain.absorb(vector, time);
        let id = chain.id.clone();
        let at = self
            .open
            .partition_point(|c| c.last_seen <= chain.last_seen);
        self.open.insert(at, chain);
        id
    }

    pub fn open_chains(&self) -> usize {
        self.open.len()
    }
}

/// Article to be chained.
#[derive(Debug, Clone, Copy)]
pub struct ChainInput<'a> {
    pub id: &'a str,
    pub time: Timestamp,
    pub text: &'a str,
}

/// Chain ids for every input. IDF is fitted on all inputs; articles are
/// visited in time order, ties kept in input order.
pub fn chain_articles(inputs: &[ChainInput<'_>], config: ChainConfig) -> BTreeMap<String, String> {
    let tfidf = TfIdf::fit(inputs.iter().map(|a| a.text));
    let mut order: Vec<&ChainInput<'_>> = inputs.iter().collect();
    order.sort_by_key(|a| a.time);
    let mut state = ChainState::new(config);
    order
        .into_iter()
        .map(|a| {
            let v = tfidf.transform(a.text);
            (a.id.to_owned(), state.observe(&v, a.time))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const HOUR: i64 = 3600;
    const DAY: i64 = 24 * HOUR;

    fn chain(inputs: &[(&str, i64, &str)], config: ChainConfig) -> BTreeMap<String, String> {
        let inputs: Vec<ChainInput<'_>> = inputs
            .iter()
            .map(|&(id, time, text)| ChainInput { id, time, text })
            .collect();
        chain_articles(&inputs, config)
    }

    #[test]
    fn identical_texts_share_a_chain() {
        let text = "Storm floods coastal town overnight";
        let cfg = ChainConfig::new(0.5, DEFAULT_WINDOW_SECS).unwrap();
        let out = chain(
            &[
                ("a", 0, text),
                ("b", HOUR, text),
                ("c", 0, "Election results delayed"),
            ],
            cfg,
        );
        assert_eq!(out["a"], out["b"]);
        assert_ne!(out["a"], out["c"]);
    }

    #[test]
    fn disjoint_vocabularies_split() {
        let out = chain(
            &[
                ("a", 0, "central bank raises rates"),
                ("b", HOUR, "striker scores late winner"),
            ],
            ChainConfig::default(),
        );
        assert_ne!(out["a"], out["b"]);
    }

    #[test]
    fn window_expiry_splits_identical_texts() {
        let text = "Storm floods coastal town overnight";
        let out = chain(
            &[("a", 0, text), ("b", 4 * DAY, text)],
            ChainConfig::default(),
        );
        assert_ne!(out["a"], out["b"]);
        let out = chain(
            &[("a", 0, text), ("b", 2 * DAY, text)],
            ChainConfig::default(),
        );
        assert_eq!(out["a"], out["b"]);
    }

    #[test]
    fn window_slides_with_last_seen() {
        let text = "Storm floods coastal town overnight";
        let out = chain(
            &[("a", 0, text), ("b", 2 * DAY, text), ("c", 4 * DAY, text)],
            ChainConfig::default(),
        );
        assert_eq!(out["a"], out["c"]);
    }

    #[test]
    fn empty_text_opens_its_own_chain() {
        let out = chain(&[("a", 0, ""), ("b", 0, "")], ChainConfig::default());
        assert_ne!(out["a"], out["b"]);
    }

    #[test]
    fn tau_validation() {
        assert!(ChainConfig::new(0.0, DAY).is_err());
        assert!(ChainConfig::new(1.1, DAY).is_err());
        assert!(ChainConfig::new(1.0, DAY).is_ok());
        assert!(ChainConfig::new(0.5, -1).is_err());
    }

    #[test]
    fn tfidf_vectors_are_unit_length() {
        let model = TfIdf::fit(["a b c", "a d"]);
        let v = model.transform("a b b");
        assert!((v.dot(&v) - 1.0).abs() < 1e-12);
        assert!(model.transform("zzz").is_zero());
    }
}
