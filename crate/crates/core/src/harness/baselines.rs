//! Reference recommenders that rank an impression's own candidates.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{ImpressionLog, RecommendationList, RecommendationSource};

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Per-impression stream seed, independent of evaluation order.
pub fn impression_seed(seed: u64, impression_id: &str) -> u64 {
    splitmix64(seed ^ fnv1a(impression_id.as_bytes()))
}

/// Uniform random permutation of the candidates, seeded by
/// `(seed, impression_id)`.
pub fn recommend_random(impression: &ImpressionLog, seed: u64) -> RecommendationList {
    let mut rng = ChaCha8Rng::seed_from_u64(impression_seed(seed, &impression.impression_id));
    let mut items: Vec<String> = impression.candidate_ids().map(str::to_owned).collect();
    items.shuffle(&mut rng);
    RecommendationList {
        impression_id: impression.impression_id.clone(),
        user_id: impression.user_id.clone(),
        ranked_items: items,
        source: RecommendationSource::Random,
    }
}

/// Clicks per article over the given impressions.
pub fn click_counts(impressions: &[ImpressionLog]) -> HashMap<String, u64> {
    let mut counts = HashMap::new();
    for c in impressions.iter().flat_map(|imp| &imp.candidates) {
        if c.clicked {
            *counts.entry(c.article_id.clone()).or_insert(0) += 1;
        }
    }
    counts
}

/// Candidates by click count, descending; ties by ascending article id.
/// Unseen articles count as zero.
pub fn recommend_popular(
    impression: &ImpressionLog,
    click_counts: &HashMap<String, u64>,
) -> RecommendationList {
    let mut items: Vec<(&str, u64)> = impression
        .candidate_ids()
        .map(|id| (id, click_counts.get(id).copied().unwrap_or(0)))
        .collect();
    items.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    RecommendationList {
        impression_id: impression.impression_id.clone(),
        user_id: impression.user_id.clone(),
        ranked_items: items.into_iter().map(|(id, _)| id.to_owned()).collect(),
        source: RecommendationSource::Popular,
    }
}
