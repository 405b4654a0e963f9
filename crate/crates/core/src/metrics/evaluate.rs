use std::collections::{HashMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    activation_metric, aggregate, alternative_voices, calibration_complexity, calibration_topic,
    representation, sample_fragmentation, Aggregate, ContextPool, Metric, MetricConfig,
    MetricError,
};
use crate::corpus::{Corpus, ImpressionLog, RecommendationList, Timestamp};

const DAY_SECS: Timestamp = 24 * 3600;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    /// Impression id, or `"<u>|<v>"` for Fragmentation.
    pub id: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Skip {
    pub id: String,
    pub reason: String,
}

/// Samples, skips and aggregate of one metric under one configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub metric: Metric,
    pub samples: Vec<Sample>,
    pub skips: Vec<Skip>,
    pub aggregate: Option<Aggregate>,
}

impl MetricReport {
    fn from_results(metric: Metric, results: Vec<(String, Result<f64, MetricError>)>) -> Self {
        let mut samples = Vec::new();
        let mut skips = Vec::new();
        for (id, result) in results {
            match result {
                Ok(value) if value.is_finite() => samples.push(Sample { id, value }),
                Ok(value) => skips.push(Skip {
                    id,
                    reason: format!("non-finite sample {value}"),
                }),
                Err(e) => skips.push(Skip {
                    id,
                    reason: e.to_string(),
                }),
            }
        }
        samples.sort_by(|a, b| a.id.cmp(&b.id).then(a.value.total_cmp(&b.value)));
        skips.sort_by(|a, b| a.id.cmp(&b.id).then_with(|| a.reason.cmp(&b.reason)));
        let values: Vec<f64> = samples.iter().map(|s| s.value).collect();
        Self {
            metric,
            aggregate: aggregate(&values),
            samples,
            skips,
        }
    }
}

/// Candidate pools per impression, either the impression's own candidates or
/// every candidate shown that UTC day.
#[derive(Debug, Clone)]
pub struct SupplyPools {
    pool: ContextPool,
    daily: HashMap<Timestamp, Vec<String>>,
}

impl SupplyPools {
    pub fn new(impressions: &[ImpressionLog], pool: ContextPool) -> Self {
        let mut daily: HashMap<Timestamp, Vec<String>> = HashMap::new();
        if pool == ContextPool::Daily {
            let mut seen: HashMap<Timestamp, HashSet<&str>> = HashMap::new();
            for imp in impressions {
                let day = imp.time.div_euclid(DAY_SECS);
                let seen_today = seen.entry(day).or_default();
                let pool_today = daily.entry(day).or_default();
                for id in imp.candidate_ids() {
                    if seen_today.insert(id) {
                        pool_today.push(id.to_owned());
                    }
                }
            }
        }
        Self { pool, daily }
    }

    pub fn supply<'a>(&'a self, impression: &'a ImpressionLog) -> Vec<&'a str> {
        match self.pool {
            ContextPool::Impression => impression.candidate_ids().collect(),
            ContextPool::Daily => self
                .daily
                .get(&impression.time.div_euclid(DAY_SECS))
                .map(|ids| ids.iter().map(String::as_str).collect())
                .unwrap_or_else(|| impression.candidate_ids().collect()),
        }
    }
}

/// All six metric reports for one set of recommendation lists, in
/// [`Metric::ALL`] order.
pub fn evaluate(
    corpus: &Corpus,
    impressions: &[ImpressionLog],
    recommendations: &[RecommendationList],
    config: &MetricConfig,
) -> Vec<MetricReport> {
    let by_id: HashMap<&str, &ImpressionLog> = impressions
        .iter()
        .map(|imp| (imp.impression_id.as_str(), imp))
        .collect();
    let pools = SupplyPools::new(impressions, config.pool);

    let per_impression: Vec<[Result<f64, MetricError>; 5]> = recommendations
        .par_iter()
        .map(|rec| {
            let Some(imp) = by_id.get(rec.impression_id.as_str()) else {
                let missing = MetricError::MissingImpression(rec.impression_id.clone());
                return std::array::from_fn(|_| Err(missing.clone()));
            };
            let supply = pools.supply(imp);
            [
                calibration_topic(corpus, imp, rec, config),
                calibration_complexity(corpus, imp, rec, config),
                activation_metric(corpus, &supply, rec, config),
                representation(corpus, &supply, rec, config),
                alternative_voices(corpus, &supply, rec, config),
            ]
        })
        .collect();

    let mut columns: [Vec<(String, Result<f64, MetricError>)>; 5] = Default::default();
    for (rec, results) in recommendations.iter().zip(per_impression) {
        for (column, result) in columns.iter_mut().zip(results) {
            column.push((rec.impression_id.clone(), result));
        }
    }
    let [topic, complexity, activation, representation, voices] = columns;

    let fragmentation = sample_fragmentation(corpus, recommendations, config)
        .into_iter()
        .map(|s| (s.id, s.value))
        .collect();

    vec![
        MetricReport::from_results(Metric::CalibrationTopic, topic),
        MetricReport::from_results(Metric::CalibrationComplexity, complexity),
        MetricReport::from_results(Metric::Fragmentation, fragmentation),
        MetricReport::from_results(Metric::Activation, activation),
        MetricReport::from_results(Metric::Representation, representation),
        MetricReport::from_results(Metric::AlternativeVoices, voices),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Article, Candidate, RecommendationSource};

    fn imp(id: &str, time: Timestamp, candidates: &[&str]) -> ImpressionLog {
        ImpressionLog {
            impression_id: id.into(),
            user_id: format!("U{id}"),
            time,
            candidates: candidates
                .iter()
                .map(|c| Candidate {
                    article_id: c.to_string(),
                    clicked: false,
                })
                .collect(),
            history: vec!["a".into()],
        }
    }

    #[test]
    fn daily_pool_unions_candidates_per_day() {
        let imps = [
            imp("1", 10, &["a", "b"]),
            imp("2", 20, &["b", "c"]),
            imp("3", DAY_SECS + 5, &["d"]),
        ];
        let pools = SupplyPools::new(&imps, ContextPool::Daily);
        assert_eq!(pools.supply(&imps[1]), vec!["a", "b", "c"]);
        assert_eq!(pools.supply(&imps[2]), vec!["d"]);
        let own = SupplyPools::new(&imps, ContextPool::Impression);
        assert_eq!(own.supply(&imps[1]), vec!["b", "c"]);
    }

    #[test]
    fn evaluate_reports_every_metric_and_skips() {
        let mut a = Article::new("a", "news", "X");
        a.complexity = Some(50.0);
        a.chain_id = Some("c1".into());
        let mut b = Article::new("b", "news", "Y");
        b.chain_id = Some("c2".into());
        let corpus = Corpus::from_articles([a, b]).unwrap();
        let imps = [imp("1", 0, &["a", "b"]), imp("2", 0, &["b", "a"])];
        let recs: Vec<RecommendationList> = imps
            .iter()
            .map(|i| RecommendationList {
                impression_id: i.impression_id.clone(),
                user_id: i.user_id.clone(),
                ranked_items: i.candidate_ids().map(str::to_owned).collect(),
                source: RecommendationSource::Random,
            })
            .chain([RecommendationList {
                impression_id: "404".into(),
                user_id: "U".into(),
                ranked_items: vec!["a".into()],
                source: RecommendationSource::Random,
            }])
            .collect();
        let reports = evaluate(&corpus, &imps, &recs, &MetricConfig::default());
        let metrics: Vec<Metric> = reports.iter().map(|r| r.metric).collect();
        assert_eq!(metrics, Metric::ALL);
        let topic = &reports[0];
        assert_eq!(topic.samples.len(), 2);
        assert_eq!(topic.skips.len(), 1);
        assert!(topic.skips[0].reason.contains("404"));
        // activation absent everywhere
        assert!(reports[3].samples.is_empty());
        assert_eq!(reports[3].aggregate, None);
        let frag = &reports[2];
        assert_eq!(frag.samples.len() + frag.skips.len(), 3 * 2);
    }
}
