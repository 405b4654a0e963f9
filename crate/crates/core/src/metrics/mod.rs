//! The five normative diversity metrics as rank-aware divergences.
//!
//! Every metric compares a context distribution `P` with the distribution `Q`
//! of a ranked recommendation, after pairwise smoothing:
//!
//! | Metric | Context `P` | Keys |
//! |--------|-------------|------|
//! | Calibration (topic) | reading history, recency-discounted | subcategory |
//! | Calibration (complexity) | reading history, recency-discounted | complexity bin |
//! | Fragmentation | another user's recommendation, rank-discounted | story chain |
//! | Activation | candidate pool, undiscounted | activation bin |
//! | Representation | candidate pool, undiscounted | political actor |
//! | Alternative Voices | candidate pool, undiscounted | minority / majority mentions |
//!
//! The divergence is `D(P, Q) = Σ Q f(P/Q)`, i.e. `KL(P‖Q)` for KL. Fragmentation
//! with KL averages both argument orders. Cutoffs apply to recommendation
//! lists only; histories and pools are always used in full.

mod aggregate;
mod evaluate;
mod fragmentation;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Article, Corpus, ImpressionLog, RecommendationList};
use crate::distrib::{
    build_distribution, history_distribution, smooth_pair, Binning, Discount, DistribError,
    Distribution, KeyCounts, RankWeighting, Smoothing,
};
use crate::divergence::{divergence, kl, DivergenceError, DivergenceKind};

pub use aggregate::{aggregate, Aggregate, CI95_Z};
pub use evaluate::{evaluate, MetricReport, Sample, Skip, SupplyPools};
pub use fragmentation::{sample_fragmentation, sample_partners, FragmentationSample};

pub const MINORITY: &str = "Minority";
pub const MAJORITY: &str = "Majority";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error(transparent)]
    Distribution(#[from] DistribError),
    #[error(transparent)]
    Divergence(#[from] DivergenceError),
    #[error("unknown article '{0}'")]
    UnknownArticle(String),
    #[error("no recommendation for impression '{0}'")]
    MissingImpression(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    CalibrationTopic,
    CalibrationComplexity,
    Fragmentation,
    Activation,
    Representation,
    AlternativeVoices,
}

impl Metric {
    pub const ALL: [Metric; 6] = [
        Metric::CalibrationTopic,
        Metric::CalibrationComplexity,
        Metric::Fragmentation,
        Metric::Activation,
        Metric::Representation,
        Metric::AlternativeVoices,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::CalibrationTopic => "calibration_topic",
            Metric::CalibrationComplexity => "calibration_complexity",
            Metric::Fragmentation => "fragmentation",
            Metric::Activation => "activation",
            Metric::Representation => "representation",
            Metric::AlternativeVoices => "alternative_voices",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Metric::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown metric '{s}'"))
    }
}

/// Which articles form the pool `S` for Activation, Representation and
/// Alternative Voices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContextPool {
    /// The impression's own candidates.
    #[default]
    Impression,
    /// All candidates shown on the impression's UTC day.
    Daily,
}

impl FromStr for ContextPool {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "impression" => Ok(ContextPool::Impression),
            "daily" => Ok(ContextPool::Daily),
            other => Err(format!(
                "unknown pool '{other}' (expected impression or daily)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricConfig {
    pub divergence: DivergenceKind,
    pub weighting: RankWeighting,
    pub smoothing: Smoothing,
    pub complexity_bins: Binning,
    pub activation_bins: Binning,
    /// Partners drawn per recommendation list for Fragmentation.
    pub fragmentation_pairs: usize,
    pub seed: u64,
    pub pool: ContextPool,
}

impl Default for MetricConfig {
    fn default() -> Self {
        Self {
            divergence: DivergenceKind::Js,
            weighting: RankWeighting::uncut(Discount::Mrr),
            smoothing: Smoothing::default(),
            complexity_bins: Binning::complexity(Binning::DEFAULT_BINS)
                .expect("default complexity binning"),
            activation_bins: Binning::activation(Binning::DEFAULT_BINS)
                .expect("default activation binning"),
            fragmentation_pairs: 5,
            seed: 0,
            pool: ContextPool::Impression,
        }
    }
}

fn topic_key(a: &&Article) -> KeyCounts {
    if a.subcategory.is_empty() {
        Vec::new()
    } else {
        vec![(a.subcategory.clone(), 1.0)]
    }
}

fn chain_key(a: &&Article) -> KeyCounts {
    a.chain_id.iter().map(|c| (c.clone(), 1.0)).collect()
}

fn actor_keys(a: &&Article) -> KeyCounts {
    a.political_actors
        .iter()
        .map(|p| (p.clone(), 1.0))
        .collect()
}

fn voice_keys(a: &&Article) -> KeyCounts {
    vec![
        (MINORITY.to_owned(), a.minority_mentions as f64),
        (MAJORITY.to_owned(), a.majority_mentions as f64),
    ]
}

fn binned(value: Option<f64>, binning: &Binning) -> KeyCounts {
    value.map(|v| (binning.key(v), 1.0)).into_iter().collect()
}

fn resolve<I>(corpus: &Corpus, ids: I) -> Result<Vec<&Article>, MetricError>
where
    I: IntoIterator,
    I::Item: AsRef<str>,
{
    ids.into_iter()
        .map(|id| {
            let id = id.as_ref();
            corpus
                .get(id)
                .ok_or_else(|| MetricError::UnknownArticle(id.to_owned()))
        })
        .collect()
}

fn recommendation_distribution<F>(
    corpus: &Corpus,
    rec: &RecommendationList,
    key_fn: F,
    config: &MetricConfig,
) -> Result<Distribution, MetricError>
where
    F: Fn(&&Article) -> KeyCounts,
{
    let articles = resolve(corpus, &rec.ranked_items)?;
    let ranked = articles.into_iter().enumerate().map(|(i, a)| (a, i + 1));
    Ok(build_distribution(ranked, key_fn, &config.weighting)?)
}

fn pool_distribution<F>(
    corpus: &Corpus,
    supply: &[&str],
    key_fn: F,
) -> Result<Distribution, MetricError>
where
    F: Fn(&&Article) -> KeyCounts,
{
    let articles = resolve(corpus, supply)?;
    let items = articles.into_iter().enumerate().map(|(i, a)| (a, i + 1));
    Ok(build_distribution(
        items,
        key_fn,
        &RankWeighting::uncut(Discount::None),
    )?)
}

/// Smooths `(context, recommendation)` and applies the configured divergence.
pub fn rank_aware_divergence(
    context: &Distribution,
    recommendation: &Distribution,
    config: &MetricConfig,
) -> Result<f64, MetricError> {
    let (p, q) = smooth_pair(context, recommendation, config.smoothing);
    Ok(divergence(config.divergence, &p, &q)?)
}

fn calibration<F>(
    corpus: &Corpus,
    impression: &ImpressionLog,
    rec: &RecommendationList,
    key_fn: F,
    config: &MetricConfig,
) -> Result<f64, MetricError>
where
    F: Fn(&&Article) -> KeyCounts + Copy,
{
    let history = resolve(corpus, &impression.history)?;
    let context = history_distribution(&history, key_fn, &config.weighting.without_cutoff())?;
    let recommended = recommendation_distribution(corpus, rec, key_fn, config)?;
    rank_aware_divergence(&context, &recommended, config)
}

/// Divergence between history and recommendation subcategories.
pub fn calibration_topic(
    corpus: &Corpus,
    impression: &ImpressionLog,
    rec: &RecommendationList,
    config: &MetricConfig,
) -> Result<f64, MetricError> {
    calibration(corpus, impression, rec, topic_key, config)
}

/// Divergence between history and recommendation complexity bins.
pub fn calibration_complexity(
    corpus: &Corpus,
    impression: &ImpressionLog,
    rec: &RecommendationList,
    config: &MetricConfig,
) -> Result<f64, MetricError> {
    let bins = config.complexity_bins;
    calibration(
        corpus,
        impression,
        rec,
        move |a: &&Article| binned(a.complexity, &bins),
        config,
    )
}

/// Story-chain divergence between two users' recommendations. KL averages
/// both argument orders, so the result is symmetric for either kind.
pub fn fragmentation(
    corpus: &Corpus,
    rec_u: &RecommendationList,
    rec_v: &RecommendationList,
    config: &MetricConfig,
) -> Result<f64, MetricError> {
    let p = recommendation_distribution(corpus, rec_u, chain_key, config)?;
    let q = recommendation_distribution(corpus, rec_v, chain_key, config)?;
    let (p, q) = smooth_pair(&p, &q, config.smoothing);
    match config.divergence {
        DivergenceKind::Js => Ok(divergence(DivergenceKind::Js, &p, &q)?),
        DivergenceKind::Kl => Ok(0.5 * (kl(&p, &q)? + kl(&q, &p)?)),
    }
}

fn pool_metric<F>(
    corpus: &Corpus,
    supply: &[&str],
    rec: &RecommendationList,
    key_fn: F,
    config: &MetricConfig,
) -> Result<f64, MetricError>
where
    F: Fn(&&Article) -> KeyCounts + Copy,
{
    let context = pool_distribution(corpus, supply, key_fn)?;
    let recommended = recommendation_distribution(corpus, rec, key_fn, config)?;
    rank_aware_divergence(&context, &recommended, config)
}

/// Divergence of activation bins between the pool and the recommendation.
pub fn activation_metric(
    corpus: &Corpus,
    supply: &[&str],
    rec: &RecommendationList,
    config: &MetricConfig,
) -> Result<f64, MetricError> {
    let bins = config.activation_bins;
    pool_metric(
        corpus,
        supply,
        rec,
        move |a: &&Article| binned(a.activation, &bins),
        config,
    )
}

/// Divergence of political-actor mentions between pool and recommendation.
pub fn representation(
    corpus: &Corpus,
    supply: &[&str],
    rec: &RecommendationList,
    config: &MetricConfig,
) -> Result<f64, MetricError> {
    pool_metric(corpus, supply, rec, actor_keys, config)
}

/// Divergence of minority/majority mention shares between pool and
/// recommendation.
pub fn alternative_voices(
    corpus: &Corpus,
    supply: &[&str],
    rec: &RecommendationList,
    config: &MetricConfig,
) -> Result<f64, MetricError> {
    pool_metric(corpus, supply, rec, voice_keys, config)
}
