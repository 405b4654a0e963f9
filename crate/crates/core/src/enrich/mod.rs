//! Per-article metadata: reading-ease complexity, activation from lexicon
//! polarity, story-chain ids, and gazetteer-derived entity fields.
//!
//! All methods are deterministic and need no model downloads. A sidecar file
//! can override any field with the output of a stronger pipeline.

pub mod chains;
pub mod complexity;
pub mod entities;
pub mod sentiment;
pub mod sidecar;

use std::path::PathBuf;

use rayon::prelude::*;
use thiserror::Error;

use crate::corpus::Corpus;

pub use chains::{chain_articles, ChainConfig, ChainInput, ChainState, TfIdf};
pub use complexity::{complexity, flesch_reading_ease, syllables, text_stats, TextStats};
pub use entities::{tag_entities, tag_text, EntityKind, EntityTags, Gazetteer, GazetteerEntry};
pub use sentiment::{activation, polarity, Lexicon};
pub use sidecar::{apply_sidecar, load_sidecar, SidecarRecord, SidecarReport};

#[derive(Debug, Error)]
pub enum EnrichError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{source_name}:{line}: {message}")]
    Malformed {
        source_name: String,
        line: usize,
        message: String,
    },
    #[error("polarity {value} for '{token}' outside [-1, 1]")]
    InvalidPolarity { token: String, value: f64 },
    #[error("duplicate gazetteer id '{0}'")]
    DuplicateEntity(String),
    #[error("gazetteer entry '{0}' has no aliases")]
    EmptyAliases(String),
    #[error("chaining threshold tau must lie in (0, 1], got {0}")]
    InvalidTau(f64),
    #[error("chaining window must be non-negative, got {0}s")]
    InvalidWindow(i64),
}

impl EnrichError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        EnrichError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn malformed(source_name: &str, line: usize, message: impl Into<String>) -> Self {
        EnrichError::Malformed {
            source_name: source_name.to_owned(),
            line,
            message: message.into(),
        }
    }
}

/// Lower-cased alphanumeric runs.
pub(crate) fn tokens(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
}

/// Optional resources for [`enrich_corpus`].
#[derive(Debug, Clone, Default)]
pub struct Resources {
    pub lexicon: Option<Lexicon>,
    pub gazetteer: Option<Gazetteer>,
    pub chaining: ChainConfig,
}

/// Recomputes every enrichment field from the raw article fields.
///
/// Complexity and activation use the body (absent when it is empty, or, for
/// activation, when no lexicon is given). Chaining uses title and body;
/// undated articles are placed at the earliest known time. Entity fields are
/// cleared when no gazetteer is given.
pub fn enrich_corpus(corpus: &mut Corpus, resources: &Resources) {
    corpus.iter_mut().par_bridge().for_each(|article| {
        let has_body = !article.body.trim().is_empty();
        article.complexity = if has_body {
            complexity(&article.body)
        } else {
            None
        };
        article.activation = match (&resources.lexicon, has_body) {
            (Some(lexicon), true) => Some(activation(&article.body, lexicon)),
            _ => None,
        };
        let tags = match &resources.gazetteer {
            Some(g) => tag_entities(article, g),
            None => EntityTags::default(),
        };
        article.political_actors = tags.political_actors;
        article.minority_mentions = tags.minority_mentions;
        article.majority_mentions = tags.majority_mentions;
    });

    let fallback = corpus
        .iter()
        .filter_map(|a| a.published_at)
        .min()
        .unwrap_or(0);
    let texts: Vec<String> = corpus.iter().map(|a| a.full_text()).collect();
    let inputs: Vec<ChainInput<'_>> = corpus
        .iter()
        .zip(&texts)
        .map(|(a, text)| ChainInput {
            id: &a.id,
            time: a.published_at.unwrap_or(fallback),
            text,
        })
        .collect();
    let assignment = chain_articles(&inputs, resources.chaining);
    for article in corpus.iter_mut() {
        article.chain_id = assignment.get(&article.id).cloned();
    }
}
