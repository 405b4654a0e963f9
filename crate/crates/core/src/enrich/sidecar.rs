//! Externally computed enrichment fields, applied over computed ones.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::Deserialize;

use super::EnrichError;
use crate::corpus::Corpus;

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SidecarRecord {
    pub id: String,
    #[serde(default)]
    pub complexity: Option<f64>,
    #[serde(default)]
    pub activation: Option<f64>,
    #[serde(default)]
    pub chain_id: Option<String>,
    #[serde(default)]
    pub political_actors: Option<Vec<String>>,
    #[serde(default)]
    pub minority_mentions: Option<u64>,
    #[serde(default)]
    pub majority_mentions: Option<u64>,
}

impl SidecarRecord {
    fn check(&self) -> Result<(), String> {
        if let Some(c) = self.complexity {
            if !(0.0..=100.0).contains(&c) {
                return Err(format!("complexity {c} outside [0, 100]"));
            }
        }
        if let Some(a) = self.activation {
            if !(0.0..=1.0).contains(&a) {
                return Err(format!("activation {a} outside [0, 1]"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SidecarReport {
    pub applied: usize,
    pub unknown_ids: Vec<String>,
    /// `(line, reason)` for records that failed validation.
    pub rejected: Vec<(usize, String)>,
}

impl SidecarReport {
    pub fn warnings(&self) -> Vec<String> {
        self.unknown_ids
            .iter()
            .map(|id| format!("sidecar: unknown article id '{id}'"))
            .chain(
                self.rejected
                    .iter()
                    .map(|(line, why)| format!("sidecar:{line}: record rejected: {why}")),
            )
            .collect()
    }
}

pub fn load_sidecar(path: &Path, corpus: &mut Corpus) -> Result<SidecarReport, EnrichError> {
    let file = File::open(path).map_err(|e| EnrichError::io(path, e))?;
    apply_sidecar(BufReader::new(file), corpus)
}

/// Present fields override the article's; absent fields are left alone.
/// Records that do not parse or hold out-of-range values are rejected
/// individually.
pub fn apply_sidecar<R: BufRead>(
    reader: R,
    corpus: &mut Corpus,
) -> Result<SidecarReport, EnrichError> {
    let mut report = SidecarReport::default();
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| EnrichError::malformed("sidecar", lineno, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: SidecarRecord = match serde_json::from_str(&line) {
            Ok(r) => r,
            Err(e) => {
                report.rejected.push((lineno, e.to_string()));
                continue;
            }
        };
        if let Err(why) = record.check() {
            report.rejected.push((lineno, why));
            continue;
        }
        let Some(article) = corpus.get_mut(&record.id) else {
            report.unknown_ids.push(record.id);
            continue;
        };
        if let Some(c) = record.complexity {
            article.complexity = Some(c);
        }
        if let Some(a) = record.activation {
            article.activation = Some(a);
        }
        if let Some(chain) = record.chain_id {
            article.chain_id = Some(chain);
        }
        if let Some(actors) = record.political_actors {
            article.political_actors = actors.into_iter().collect();
        }
        if let Some(n) = record.minority_mentions {
            article.minority_mentions = n;
        }
        if let Some(n) = record.majority_mentions {
            article.majority_mentions = n;
        }
        report.applied += 1;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Article;

    fn corpus() -> Corpus {
        let mut a = Article::new("N1", "news", "world");
        a.activation = Some(0.1);
        a.complexity = Some(55.0);
        Corpus::from_articles([a]).unwrap()
    }

    #[test]
    fn overrides_present_fields_only() {
        let mut c = corpus();
        let report = apply_sidecar(r#"{"id":"N1","activation":0.9}"#.as_bytes(), &mut c).unwrap();
        assert_eq!(report.applied, 1);
        let a = c.get("N1").unwrap();
        assert_eq!(a.activation, Some(0.9));
        assert_eq!(a.complexity, Some(55.0));
    }

    #[test]
    fn out_of_range_record_is_rejected() {
        let mut c = corpus();
        let report = apply_sidecar(r#"{"id":"N1","activation":1.4}"#.as_bytes(), &mut c).unwrap();
        assert_eq!(report.applied, 0);
        assert_eq!(report.rejected.len(), 1);
        assert_eq!(c.get("N1").unwrap().activation, Some(0.1));
    }

    #[test]
    fn negative_counts_are_rejected() {
        let mut c = corpus();
        let report =
            apply_sidecar(r#"{"id":"N1","minority_mentions":-2}"#.as_bytes(), &mut c).unwrap();
        assert_eq!(report.rejected.len(), 1);
    }

    #[test]
    fn unknown_id_is_skipped() {
        let mut c = corpus();
        let report = apply_sidecar(r#"{"id":"N9","activation":0.2}"#.as_bytes(), &mut c).unwrap();
        assert_eq!(report.unknown_ids, vec!["N9"]);
        assert_eq!(c, corpus());
    }

    #[test]
    fn empty_sidecar_changes_nothing() {
        let mut c = corpus();
        let report = apply_sidecar("".as_bytes(), &mut c).unwrap();
        assert_eq!(report, SidecarReport::default());
        assert_eq!(c, corpus());
    }
}
