use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{fragmentation, MetricConfig, MetricError};
use crate::corpus::{Corpus, RecommendationList};

/// Draws, for each of `population` users in order, `min(pairs, population−1)`
/// distinct partners other than itself, uniformly without replacement.
///
/// Returns `(user, partner)` index pairs in draw order.
pub fn sample_partners(population: usize, pairs: usize, seed: u64) -> Vec<(usize, usize)> {
    if population < 2 {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = pairs.min(population - 1);
    let mut out = Vec::with_capacity(population * k);
    for u in 0..population {
        for j in index::sample(&mut rng, population - 1, k) {
            out.push((u, if j >= u { j + 1 } else { j }));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct FragmentationSample {
    /// `"<impression u>|<impression v>"`
    pub id: String,
    pub value: Result<f64, MetricError>,
}

/// Fragmentation over seeded random pairs of recommendation lists. Partner
/// draws happen up front; the divergences are then evaluated in parallel.
pub fn sample_fragmentation(
    corpus: &Corpus,
    recommendations: &[RecommendationList],
    config: &MetricConfig,
) -> Vec<FragmentationSample> {
    if recommendations.len() < 2 {
        log::warn!("fragmentation needs at least two recommendation lists; no samples drawn");
        return Vec::new();
    }
    let pairs = sample_partners(
        recommendations.len(),
        config.fragmentation_pairs.max(1),
        config.seed,
    );
    pairs
        .par_iter()
        .map(|&(u, v)| {
            let (ru, rv) = (&recommendations[u], &recommendations[v]);
            FragmentationSample {
                id: format!("{}|{}", ru.impression_id, rv.impression_id),
                value: fragmentation(corpus, ru, rv, config),
            }
        })
        .collect()
}
