//! Gazetteer matching for political actors and minority/majority voices.
//!
//! A person that the gazetteer marks as absent from the knowledge base counts
//! as a minority voice; any other person counts as a majority voice.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{tokens, EnrichError};
use crate::corpus::Article;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntityKind {
    Person,
    Party,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GazetteerEntry {
    pub canonical_id: String,
    pub kind: EntityKind,
    pub aliases: Vec<String>,
    #[serde(default)]
    pub is_political: bool,
    #[serde(default)]
    pub in_knowledge_base: bool,
}

#[derive(Debug, Clone, Default)]
pub struct Gazetteer {
    entries: Vec<GazetteerEntry>,
    /// first alias token → (alias tokens, entry index)
    index: HashMap<String, Vec<(Vec<String>, usize)>>,
}

impl Gazetteer {
    pub fn new(entries: Vec<GazetteerEntry>) -> Result<Self, EnrichError> {
        let mut seen = HashSet::new();
        let mut index: HashMap<String, Vec<(Vec<String>, usize)>> = HashMap::new();
        let mut normalized = Vec::with_capacity(entries.len());
        for (idx, mut entry) in entries.into_iter().enumerate() {
            if !seen.insert(entry.canonical_id.clone()) {
                return Err(EnrichError::DuplicateEntity(entry.canonical_id));
            }
            entry.aliases = entry
                .aliases
                .iter()
                .map(|a| a.trim().to_lowercase())
                .filter(|a| !a.is_empty())
                .collect();
            if entry.aliases.is_empty() {
                return Err(EnrichError::EmptyAliases(entry.canonical_id));
            }
            for alias in &entry.aliases {
                let alias_tokens: Vec<String> = tokens(alias).collect();
                if let Some(first) = alias_tokens.first() {
                    index
                        .entry(first.clone())
                        .or_default()
                        .push((alias_tokens, idx));
                }
            }
            normalized.push(entry);
        }
        Ok(Self {
            entries: normalized,
            index,
        })
    }

    pub fn load(path: &Path) -> Result<Self, EnrichError> {
        let file = File::open(path).map_err(|e| EnrichError::io(path, e))?;
        Self::read(BufReader::new(file))
    }

    pub fn read<R: BufRead>(reader: R) -> Result<Self, EnrichError> {
        let mut entries = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let lineno = i + 1;
            let line =
                line.map_err(|e| EnrichError::malformed("gazetteer", lineno, e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let entry: GazetteerEntry = serde_json::from_str(&line)
                .map_err(|e| EnrichError::malformed("gazetteer", lineno, e.to_string()))?;
            entries.push(entry);
        }
        Self::new(entries)
    }

    pub fn entries(&self) -> &[GazetteerEntry] {
        &self.entries
    }

    /// Occurrences of every alias, as `(entry index, count)`, in entry order.
    fn mention_counts(&self, text: &str) -> Vec<(usize, u64)> {
        let mut counts = vec![0u64; self.entries.len()];
        for segment in segments(text) {
            let toks: Vec<String> = tokens(segment).collect();
            for start in 0..toks.len() {
                let Some(candidates) = self.index.get(&toks[start]) else {
                    continue;
                };
                for (alias, entry) in candidates {
                    if toks[start..].starts_with(alias) {
                        counts[*entry] += 1;
                    }
                }
            }
        }
        counts
            .into_iter()
            .enumerate()
            .filter(|&(_, c)| c > 0)
            .collect()
    }
}

/// Text spans that a multi-word alias may not cross: lines, and sentences
/// ended by `.`, `!` or `?` followed by whitespace.
fn segments(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        let boundary = match c {
            '\n' | '\r' => true,
            '.' | '!' | '?' => chars.peek().is_none_or(|&(_, next)| next.is_whitespace()),
            _ => false,
        };
        if boundary {
            out.push(&text[start..i]);
            start = i + c.len_utf8();
        }
    }
    out.push(&text[start..]);
    out
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EntityTags {
    pub political_actors: BTreeSet<String>,
    pub minority_mentions: u64,
    pub majority_mentions: u64,
}

/// Case-insensitive alias matching over raw text; every occurrence counts.
pub fn tag_text(text: &str, gazetteer: &Gazetteer) -> EntityTags {
    let mut tags = EntityTags::default();
    for (idx, count) in gazetteer.mention_counts(text) {
        let entry = &gazetteer.entries[idx];
        if entry.is_political {
            tags.political_actors.insert(entry.canonical_id.clone());
        }
        if entry.kind == EntityKind::Person {
            if entry.in_knowledge_base {
                tags.majority_mentions += count;
            } else {
                tags.minority_mentions += count;
            }
        }
    }
    tags
}

/// Tags over an article's title and body.
pub fn tag_entities(article: &Article, gazetteer: &Gazetteer) -> EntityTags {
    tag_text(&article.full_text(), gazetteer)
}
