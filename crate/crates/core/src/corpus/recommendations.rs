use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CorpusError, ImpressionLog, RecommendationList, RecommendationSource};

#[derive(Debug, Serialize, Deserialize)]
struct Record {
    impression_id: String,
    #[serde(default)]
    user_id: String,
    ranked_item_ids: Vec<String>,
}

pub fn load_recommendations(
    path: &Path,
    source: RecommendationSource,
) -> Result<Vec<RecommendationList>, CorpusError> {
    let file = File::open(path).map_err(|e| CorpusError::io(path, e))?;
    read_recommendations(BufReader::new(file), source)
}

/// Parses JSON lines `{impression_id, user_id, ranked_item_ids}`.
pub fn read_recommendations<R: BufRead>(
    reader: R,
    source: RecommendationSource,
) -> Result<Vec<RecommendationList>, CorpusError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line =
            line.map_err(|e| CorpusError::malformed("recommendations", lineno, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: Record = serde_json::from_str(&line)
            .map_err(|e| CorpusError::malformed("recommendations", lineno, e.to_string()))?;
        let mut seen = HashSet::new();
        for item in &record.ranked_item_ids {
            if !seen.insert(item.as_str()) {
                return Err(CorpusError::DuplicateItem {
                    impression: record.impression_id,
                    item: item.clone(),
                });
            }
        }
        out.push(RecommendationList {
            impression_id: record.impression_id,
            user_id: record.user_id,
            ranked_items: record.ranked_item_ids,
            source: source.clone(),
        });
    }
    Ok(out)
}

pub fn write_recommendations<W: Write>(
    recommendations: &[RecommendationList],
    mut out: W,
) -> std::io::Result<()> {
    for rec in recommendations {
        let record = Record {
            impression_id: rec.impression_id.clone(),
            user_id: rec.user_id.clone(),
            ranked_item_ids: rec.ranked_items.clone(),
        };
        serde_json::to_writer(&mut out, &record)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Checks each list against its impression: the impression exists, items are
/// unique, and every item belongs to the candidate pool.
pub fn validate_recommendations(
    recommendations: &[RecommendationList],
    impressions: &[ImpressionLog],
) -> Result<(), CorpusError> {
    let by_id: HashMap<&str, &ImpressionLog> = impressions
        .iter()
        .map(|imp| (imp.impression_id.as_str(), imp))
        .collect();
    for rec in recommendations {
        let imp = by_id
            .get(rec.impression_id.as_str())
            .ok_or_else(|| CorpusError::UnknownImpression(rec.impression_id.clone()))?;
        let mut seen = HashSet::new();
        for item in &rec.ranked_items {
            if !seen.insert(item.as_str()) {
                return Err(CorpusError::DuplicateItem {
                    impression: rec.impression_id.clone(),
                    item: item.clone(),
                });
            }
        }
        let pool: HashSet<&str> = imp.candidate_ids().collect();
        let outside: Vec<String> = rec
            .ranked_items
            .iter()
            .filter(|id| !pool.contains(id.as_str()))
            .cloned()
            .collect();
        if !outside.is_empty() {
            return Err(CorpusError::OutOfPool {
                impression: rec.impression_id.clone(),
                ids: outside,
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::Candidate;
    use super::*;

    fn impression(id: &str, candidates: &[&str]) -> ImpressionLog {
        ImpressionLog {
            impression_id: id.into(),
            user_id: "U1".into(),
            time: 0,
            candidates: candidates
                .iter()
                .map(|c| Candidate {
                    article_id: c.to_string(),
                    clicked: false,
                })
                .collect(),
            history: vec![],
        }
    }

    fn parse(line: &str) -> Result<Vec<RecommendationList>, CorpusError> {
        read_recommendations(
            line.as_bytes(),
            RecommendationSource::External("nrms".into()),
        )
    }

    #[test]
    fn accepts_subset_ranking() {
        let recs = parse(r#"{"impression_id":"I1","user_id":"U1","ranked_item_ids":["N2","N1"]}"#)
            .unwrap();
        assert_eq!(recs[0].ranked().next(), Some(("N2", 1)));
        validate_recommendations(&recs, &[impression("I1", &["N1", "N2", "N3"])]).unwrap();
    }

    #[test]
    fn duplicate_item_is_rejected() {
        let err = parse(r#"{"impression_id":"I1","ranked_item_ids":["N2","N2"]}"#).unwrap_err();
        assert!(matches!(err, CorpusError::DuplicateItem { ref item, .. } if item == "N2"));
    }

    #[test]
    fn out_of_pool_names_offenders() {
        let recs = parse(r#"{"impression_id":"I1","ranked_item_ids":["N9"]}"#).unwrap();
        let err = validate_recommendations(&recs, &[impression("I1", &["N1", "N2"])]).unwrap_err();
        assert!(matches!(err, CorpusError::OutOfPool { ref ids, .. } if ids == &["N9"]));
        assert!(err.to_string().contains("N9"));
    }

    #[test]
    fn unknown_impression_is_rejected() {
        let recs = parse(r#"{"impression_id":"I7","ranked_item_ids":["N1"]}"#).unwrap();
        let err = validate_recommendations(&recs, &[impression("I1", &["N1"])]).unwrap_err();
        assert!(matches!(err, CorpusError::UnknownImpression(ref id) if id == "I7"));
    }
}
