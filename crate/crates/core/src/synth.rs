//! Seeded synthetic catalogs and impression logs.
//!
//! One subcategory is "hot": users read mostly from it and click its articles
//! far more often, so click popularity correlates with a single topic.
//! Articles belong to short-lived story events that share vocabulary, bodies
//! mix sentiment-bearing words with gazetteer aliases, and every artifact can
//! be written in the formats the CLI reads.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{
    write_behaviors, write_bodies, write_news, Article, Candidate, Corpus, ImpressionLog, Timestamp,
};
use crate::enrich::{EntityKind, Gazetteer, GazetteerEntry, Lexicon};

/// 2019-11-09 00:00:00 UTC.
pub const START_TIME: Timestamp = 1_573_257_600;

const DAY: Timestamp = 86_400;

/// `(category, subcategory, topic words)`; the first row is the hot one.
const TOPICS: [(&str, &str, [&str; 6]); 8] = [
    (
        "news",
        "politics",
        [
            "election", "senate", "vote", "policy", "minister", "campaign",
        ],
    ),
    (
        "sports",
        "football",
        ["match", "goal", "league", "coach", "striker", "season"],
    ),
    (
        "finance",
        "markets",
        [
            "stocks",
            "investors",
            "rates",
            "earnings",
            "trading",
            "bonds",
        ],
    ),
    (
        "lifestyle",
        "food",
        ["recipe", "kitchen", "dinner", "flavor", "baking", "chef"],
    ),
    (
        "travel",
        "europe",
        ["flight", "hotel", "museum", "coast", "train", "village"],
    ),
    (
        "health",
        "fitness",
        ["workout", "running", "muscle", "sleep", "diet", "training"],
    ),
    (
        "weather",
        "forecast",
        ["storm", "rain", "snow", "temperature", "wind", "clouds"],
    ),
    (
        "tech",
        "gadgets",
        ["phone", "laptop", "battery", "screen", "software", "camera"],
    ),
];

const FILLER: [&str; 24] = [
    "the",
    "a",
    "of",
    "and",
    "to",
    "in",
    "on",
    "for",
    "with",
    "after",
    "new",
    "local",
    "report",
    "people",
    "city",
    "today",
    "week",
    "said",
    "officials",
    "many",
    "plan",
    "news",
    "year",
    "group",
];

const LEXICON: [(&str, f64); 16] = [
    ("crisis", -0.9),
    ("disaster", -0.8),
    ("attack", -0.7),
    ("furious", -0.8),
    ("worry", -0.5),
    ("decline", -0.4),
    ("quiet", 0.1),
    ("calm", 0.2),
    ("steady", 0.2),
    ("hope", 0.5),
    ("win", 0.6),
    ("great", 0.7),
    ("celebrate", 0.8),
    ("triumph", 0.9),
    ("fine", 0.3),
    ("mild", 0.1),
];

/// `(id, kind, alias, political, in knowledge base)`.
const ENTITIES: [(&str, EntityKind, &str, bool, bool); 8] = [
    ("Q_john_smith", EntityKind::Person, "John Smith", true, true),
    (
        "Q_maria_lopez",
        EntityKind::Person,
        "Maria Lopez",
        true,
        false,
    ),
    (
        "Q_kofi_mensah",
        EntityKind::Person,
        "Kofi Mensah",
        true,
        false,
    ),
    (
        "Q_helen_brooks",
        EntityKind::Person,
        "Helen Brooks",
        true,
        true,
    ),
    ("Q_anna_berg", EntityKind::Person, "Anna Berg", false, true),
    ("Q_li_wei", EntityKind::Person, "Li Wei", false, false),
    (
        "Q_green_party",
        EntityKind::Party,
        "Green Party",
        true,
        true,
    ),
    (
        "Q_unity_party",
        EntityKind::Party,
        "Unity Party",
        true,
        true,
    ),
];

const SYLLABLES: [&str; 12] = [
    "ka", "lo", "mir", "ten", "vos", "dra", "pel", "qui", "zan", "ru", "bex", "to",
];

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub seed: u64,
    pub articles: usize,
    pub users: usize,
    pub impressions: usize,
    pub candidates: usize,
    pub history_len: usize,
    pub days: usize,
    /// Story events per subcategory.
    pub events_per_topic: usize,
    /// Share of each history drawn from the hot subcategory.
    pub hot_history_share: f64,
    pub hot_click_prob: f64,
    pub cold_click_prob: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            seed: 7,
            articles: 240,
            users: 120,
            impressions: 600,
            candidates: 20,
            history_len: 8,
            days: 6,
            events_per_topic: 6,
            hot_history_share: 0.7,
            hot_click_prob: 0.5,
            cold_click_prob: 0.04,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthData {
    pub corpus: Corpus,
    pub impressions: Vec<ImpressionLog>,
    /// Subcategory favoured by histories and clicks.
    pub hot_subcategory: String,
}

/// Paths written by [`SynthData::write_to`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthPaths {
    pub news: PathBuf,
    pub bodies: PathBuf,
    pub behaviors: PathBuf,
    pub lexicon: PathBuf,
    pub gazetteer: PathBuf,
}

pub fn lexicon() -> Lexicon {
    Lexicon::from_pairs(LEXICON).expect("built-in lexicon is valid")
}

pub fn gazetteer_entries() -> Vec<GazetteerEntry> {
    ENTITIES
        .iter()
        .map(|&(id, kind, alias, political, kb)| GazetteerEntry {
            canonical_id: id.to_owned(),
            kind,
            aliases: vec![alias.to_owned()],
            is_political: political,
            in_knowledge_base: kb,
        })
        .collect()
}

pub fn gazetteer() -> Gazetteer {
    Gazetteer::new(gazetteer_entries()).expect("built-in gazetteer is valid")
}

fn pseudo_word(rng: &mut ChaCha8Rng) -> String {
    let len = rng.gen_range(2..=3);
    (0..len).map(|_| *SYLLABLES.choose(rng).unwrap()).collect()
}

fn capitalize(word: &str) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

fn sentence(rng: &mut ChaCha8Rng, topic: &[&str], event: &[String], political: bool) -> String {
    let len = rng.gen_range(6..=14);
    let mut words: Vec<String> = Vec::with_capacity(len + 2);
    for _ in 0..len {
        let roll: f64 = rng.gen();
        let word = if roll < 0.25 {
            topic.choose(rng).unwrap().to_string()
        } else if roll < 0.40 {
            event.choose(rng).unwrap().clone()
        } else if roll < 0.55 {
            LEXICON.choose(rng).unwrap().0.to_owned()
        } else {
            FILLER.choose(rng).unwrap().to_string()
        };
        words.push(word);
    }
    let mention_prob = if political { 0.6 } else { 0.15 };
    if rng.gen_bool(mention_prob) {
        let pool: Vec<_> = ENTITIES.iter().filter(|e| e.3 == political).collect();
        let alias = pool.choose(rng).unwrap().2;
        let at = rng.gen_range(0..=words.len());
        words.insert(at, alias.to_owned());
    }
    let mut text = words.join(" ");
    text = capitalize(&text);
    text.push('.');
    text
}

pub fn generate(cfg: &SynthConfig) -> SynthData {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let span = (cfg.days.max(1) as Timestamp) * DAY;

    // story events: vocabulary and a start time per (topic, event)
    let events: Vec<Vec<(Vec<String>, Timestamp)>> = TOPICS
        .iter()
        .map(|_| {
            (0..cfg.events_per_topic.max(1))
                .map(|_| {
                    let words = (0..3).map(|_| pseudo_word(&mut rng)).collect();
                    (words, START_TIME + rng.gen_range(0..span))
                })
                .collect()
        })
        .collect();

    let mut articles = Vec::with_capacity(cfg.articles);
    let mut by_topic: Vec<Vec<usize>> = vec![Vec::new(); TOPICS.len()];
    for i in 0..cfg.articles {
        let t = i % TOPICS.len();
        let (category, subcategory, topic_words) = TOPICS[t];
        let (event_words, event_start) = events[t].choose(&mut rng).unwrap();
        let political = t == 0;
        let mut article = Article::new(format!("N{}", 1000 + i), category, subcategory);
        let title_words: Vec<String> = (0..rng.gen_range(4..=7))
            .map(|k| match k % 3 {
                0 => topic_words.choose(&mut rng).unwrap().to_string(),
                1 => event_words.choose(&mut rng).unwrap().clone(),
                _ => FILLER.choose(&mut rng).unwrap().to_string(),
            })
            .collect();
        article.title = capitalize(&title_words.join(" "));
        article.abstract_text = sentence(&mut rng, &topic_words, event_words, political);
        let sentences = rng.gen_range(3..=7);
        article.body = (0..sentences)
            .map(|_| sentence(&mut rng, &topic_words, event_words, political))
            .collect::<Vec<_>>()
            .join(" ");
        article.url = format!("https://example.org/{subcategory}/{}", article.id);
        article.published_at = Some(event_start + rng.gen_range(0..DAY));
        by_topic[t].push(i);
        articles.push(article);
    }

    let histories: Vec<Vec<String>> = (0..cfg.users)
        .map(|_| {
            (0..cfg.history_len)
                .map(|_| {
                    let t = if rng.gen_bool(cfg.hot_history_share) || TOPICS.len() == 1 {
                        0
                    } else {
                        rng.gen_range(1..TOPICS.len())
                    };
                    let pool = if by_topic[t].is_empty() {
                        &by_topic[0]
                    } else {
                        &by_topic[t]
                    };
                    articles[*pool.choose(&mut rng).unwrap()].id.clone()
                })
                .collect()
        })
        .collect();

    let per_impression = cfg.candidates.min(articles.len());
    let impressions = (0..cfg.impressions)
        .map(|i| {
            let user = rng.gen_range(0..cfg.users.max(1));
            let time = START_TIME + (i as Timestamp * span) / cfg.impressions.max(1) as Timestamp;
            let candidates = sample(&mut rng, articles.len(), per_impression)
                .into_iter()
                .map(|idx| {
                    let a: &Article = &articles[idx];
                    let p = if idx % TOPICS.len() == 0 {
                        cfg.hot_click_prob
                    } else {
                        cfg.cold_click_prob
                    };
                    Candidate {
                        article_id: a.id.clone(),
                        clicked: rng.gen_bool(p),
                    }
                })
                .collect();
            ImpressionLog {
                impression_id: format!("{}", i + 1),
                user_id: format!("U{user}"),
                time,
                candidates,
                history: histories.get(user).cloned().unwrap_or_default(),
            }
        })
        .collect();

    SynthData {
        corpus: Corpus::from_articles(articles).expect("synthetic ids are unique"),
        impressions,
        hot_subcategory: TOPICS[0].1.to_owned(),
    }
}

fn write_file<F>(path: &Path, write: F) -> io::Result<()>
where
    F: FnOnce(&mut BufWriter<File>) -> io::Result<()>,
{
    let mut out = BufWriter::new(File::create(path)?);
    write(&mut out)?;
    out.flush()
}

impl SynthData {
    /// Writes `news.tsv`, `bodies.jsonl`, `behaviors.tsv`, `lexicon.tsv` and
    /// `gazetteer.jsonl` into `dir`.
    pub fn write_to(&self, dir: &Path) -> io::Result<SynthPaths> {
        fs::create_dir_all(dir)?;
        let paths = SynthPaths {
            news: dir.join("news.tsv"),
            bodies: dir.join("bodies.jsonl"),
            behaviors: dir.join("behaviors.tsv"),
            lexicon: dir.join("lexicon.tsv"),
            gazetteer: dir.join("gazetteer.jsonl"),
        };
        write_file(&paths.news, |out| write_news(&self.corpus, out))?;
        write_file(&paths.bodies, |out| write_bodies(&self.corpus, out))?;
        write_file(&paths.behaviors, |out| {
            write_behaviors(&self.impressions, out)
        })?;
        write_file(&paths.lexicon, |out| {
            for (token, polarity) in LEXICON {
                writeln!(out, "{token}\t{polarity}")?;
            }
            Ok(())
        })?;
        write_file(&paths.gazetteer, |out| {
            for entry in gazetteer_entries() {
                serde_json::to_writer(&mut *out, &entry)?;
                out.write_all(b"\n")?;
            }
            Ok(())
        })?;
        Ok(paths)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_data() {
        let cfg = SynthConfig {
            articles: 40,
            impressions: 30,
            ..SynthConfig::default()
        };
        let a = generate(&cfg);
        let b = generate(&cfg);
        assert_eq!(a.impressions, b.impressions);
        assert_eq!(a.corpus.articles(), b.corpus.articles());
        let c = generate(&SynthConfig { seed: 8, ..cfg });
        assert_ne!(a.impressions, c.impressions);
    }

    #[test]
    fn histories_favour_the_hot_topic() {
        let data = generate(&SynthConfig::default());
        let (hot, total) = data.impressions.iter().flat_map(|imp| &imp.history).fold(
            (0, 0),
            |(hot, total), id| {
                let is_hot = data.corpus.get(id).unwrap().subcategory == data.hot_subcategory;
                (hot + usize::from(is_hot), total + 1)
            },
        );
        let share = hot as f64 / total as f64;
        assert!(share > 0.6, "{share}");
    }

    #[test]
    fn hot_articles_collect_more_clicks() {
        let data = generate(&SynthConfig::default());
        let mut hot = (0u64, 0u64);
        let mut cold = (0u64, 0u64);
        for c in data.impressions.iter().flat_map(|imp| &imp.candidates) {
            let slot =
                if data.corpus.get(&c.article_id).unwrap().subcategory == data.hot_subcategory {
                    &mut hot
                } else {
                    &mut cold
                };
            slot.0 += u64::from(c.clicked);
            slot.1 += 1;
        }
        assert!(hot.0 as f64 / hot.1 as f64 > 5.0 * cold.0 as f64 / cold.1 as f64);
    }
}
