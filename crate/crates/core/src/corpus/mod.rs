//! Article catalog, impression logs and recommendation lists.
//!
//! Input layouts follow the MIND release: a tab-separated `news.tsv`, a
//! tab-separated `behaviors.tsv`, plus JSON-lines files for article bodies and
//! externally produced rankings.

mod behaviors;
mod news;
mod recommendations;

use std::collections::{BTreeSet, HashMap};
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use behaviors::{
    format_timestamp, load_behaviors, parse_timestamp, read_behaviors, write_behaviors,
};
pub use news::{
    load_catalog, load_enriched, read_catalog, write_bodies, write_enriched, write_news,
};
pub use recommendations::{
    load_recommendations, read_recommendations, validate_recommendations, write_recommendations,
};

/// UTC seconds since the epoch.
pub type Timestamp = i64;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("duplicate article id '{0}'")]
    DuplicateId(String),
    #[error("{source_name}:{line}: {message}")]
    Malformed {
        source_name: String,
        line: usize,
        message: String,
    },
    #[error("article '{id}': {message}")]
    InvalidField { id: String, message: String },
    #[error("unknown impression_id '{0}'")]
    UnknownImpression(String),
    #[error("impression '{impression}': duplicate item '{item}' in ranking")]
    DuplicateItem { impression: String, item: String },
    #[error("impression '{impression}': items not in candidate pool: {}", .ids.join(", "))]
    OutOfPool {
        impression: String,
        ids: Vec<String>,
    },
}

impl CorpusError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CorpusError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn malformed(source_name: &str, line: usize, message: impl Into<String>) -> Self {
        CorpusError::Malformed {
            source_name: source_name.to_owned(),
            line,
            message: message.into(),
        }
    }
}

/// Non-fatal issues encountered while loading.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub warnings: Vec<String>,
}

impl LoadReport {
    pub fn warn(&mut self, message: impl Into<String>) {
        self.warnings.push(message.into());
    }

    pub fn warning_count(&self) -> usize {
        self.warnings.len()
    }

    pub fn extend(&mut self, other: LoadReport) {
        self.warnings.extend(other.warnings);
    }
}

/// One news item with its raw fields and enrichment annotations.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Article {
    pub id: String,
    pub category: String,
    pub subcategory: String,
    pub title: String,
    #[serde(rename = "abstract", default)]
    pub abstract_text: String,
    #[serde(default)]
    pub url: String,
    /// Full text when available, otherwise the abstract.
    #[serde(default)]
    pub body: String,
    #[serde(default)]
    pub published_at: Option<Timestamp>,
    /// Flesch reading ease, in `[0, 100]`.
    #[serde(default)]
    pub complexity: Option<f64>,
    /// Absolute sentiment polarity, in `[0, 1]`.
    #[serde(default)]
    pub activation: Option<f64>,
    #[serde(default)]
    pub chain_id: Option<String>,
    #[serde(default)]
    pub political_actors: BTreeSet<String>,
    #[serde(default)]
    pub minority_mentions: u64,
    #[serde(default)]
    pub majority_mentions: u64,
}

impl Article {
    pub fn new(
        id: impl Into<String>,
        category: impl Into<String>,
        subcategory: impl Into<String>,
    ) -> Self {
        Self {
            id: id.into(),
            category: category.into(),
            subcategory: subcategory.into(),
            ..Self::default()
        }
    }

    /// Title and body joined, for tasks that use all available text.
    pub fn full_text(&self) -> String {
        match (self.title.trim().is_empty(), self.body.trim().is_empty()) {
            (false, false) => format!("{}\n{}", self.title, self.body),
            (false, true) => self.title.clone(),
            (true, _) => self.body.clone(),
        }
    }

    pub fn validate(&self) -> Result<(), CorpusError> {
        let invalid = |message: String| CorpusError::InvalidField {
            id: self.id.clone(),
            message,
        };
        if self.id.is_empty() {
            return Err(invalid("empty id".into()));
        }
        if let Some(c) = self.complexity {
            if !(0.0..=100.0).contains(&c) {
                return Err(invalid(format!("complexity {c} outside [0, 100]")));
            }
        }
        if let Some(a) = self.activation {
            if !(0.0..=1.0).contains(&a) {
                return Err(invalid(format!("activation {a} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

/// Articles keyed by id, in input order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    articles: Vec<Article>,
    index: HashMap<String, usize>,
}

impl Corpus {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_articles(articles: impl IntoIterator<Item = Article>) -> Result<Self, CorpusError> {
        let mut corpus = Self::new();
        for a in articles {
            corpus.insert(a)?;
        }
        Ok(corpus)
    }

    pub fn insert(&mut self, article: Article) -> Result<(), CorpusError> {
        article.validate()?;
        if self.index.contains_key(&article.id) {
            return Err(CorpusError::DuplicateId(article.id));
        }
        self.index.insert(article.id.clone(), self.articles.len());
        self.articles.push(article);
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<&Article> {
        self.index.get(id).map(|&i| &self.articles[i])
    }

    pub fn get_mut(&mut self, id: &str) -> Option<&mut Article> {
        self.index.get(id).map(|&i| &mut self.articles[i])
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    pub fn len(&self) -> usize {
        self.articles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.articles.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Article> {
        self.articles.iter()
    }

    pub fn iter_mut(&mut self) -> std::slice::IterMut<'_, Article> {
        self.articles.iter_mut()
    }

    pub fn articles(&self) -> &[Article] {
        &self.articles
    }

    /// Fills `published_at` for undated articles with the time of the first
    /// impression that shows them, either as candidate or in the history.
    /// Returns the number of articles updated.
    pub fn assign_first_seen(&mut self, impressions: &[ImpressionLog]) -> usize {
        let mut first_seen: HashMap<&str, Timestamp> = HashMap::new();
        for imp in impressions {
            let ids = imp
                .candidates
                .iter()
                .map(|c| c.article_id.as_str())
                .chain(imp.history.iter().map(String::as_str));
            for id in ids {
                first_seen
                    .entry(id)
                    .and_modify(|t| *t = (*t).min(imp.time))
                    .or_insert(imp.time);
            }
        }
        let mut updated = 0;
        for a in &mut self.articles {
            if a.published_at.is_none() {
                if let Some(&t) = first_seen.get(a.id.as_str()) {
                    a.published_at = Some(t);
                    updated += 1;
                }
            }
        }
        updated
    }
}

impl<'a> IntoIterator for &'a Corpus {
    type Item = &'a Article;
    type IntoIter = std::slice::Iter<'a, Article>;

    fn into_iter(self) -> Self::IntoIter {
        self.articles.iter()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub article_id: String,
    pub clicked: bool,
}

/// One user/time slice: the candidate pool shown and the reading history.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImpressionLog {
    pub impression_id: String,
    pub user_id: String,
    pub time: Timestamp,
    pub candidates: Vec<Candidate>,
    /// Most recent first.
    pub history: Vec<String>,
}

impl ImpressionLog {
    pub fn candidate_ids(&self) -> impl Iterator<Item = &str> {
        self.candidates.iter().map(|c| c.article_id.as_str())
    }

    /// Referenced article ids that the corpus cannot resolve.
    pub fn unresolved<'a>(&'a self, corpus: &Corpus) -> Vec<&'a str> {
        self.candidate_ids()
            .chain(self.history.iter().map(String::as_str))
            .filter(|id| !corpus.contains(id))
            .collect()
    }
}

/// Where a ranking came from.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum RecommendationSource {
    Random,
    Popular,
    External(String),
}

impl std::fmt::Display for RecommendationSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RecommendationSource::Random => f.write_str("random"),
            RecommendationSource::Popular => f.write_str("popular"),
            RecommendationSource::External(name) => write!(f, "external:{name}"),
        }
    }
}

impl std::str::FromStr for RecommendationSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random" => Ok(RecommendationSource::Random),
            "popular" => Ok(RecommendationSource::Popular),
            _ => match s.strip_prefix("external:") {
                Some(name) if !name.is_empty() => Ok(RecommendationSource::External(name.into())),
                _ => Err(format!("unknown recommendation source '{s}'")),
            },
        }
    }
}

impl From<RecommendationSource> for String {
    fn from(s: RecommendationSource) -> String {
        s.to_string()
    }
}

impl TryFrom<String> for RecommendationSource {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

/// Ranked article ids issued for one impression; rank 1 first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecommendationList {
    pub impression_id: String,
    pub user_id: String,
    pub ranked_items: Vec<String>,
    pub source: RecommendationSource,
}

impl RecommendationList {
    /// `(article_id, rank)` pairs, rank starting at 1.
    pub fn ranked(&self) -> impl Iterator<Item = (&str, usize)> {
        self.ranked_items
            .iter()
            .enumerate()
            .map(|(i, id)| (id.as_str(), i + 1))
    }
}
