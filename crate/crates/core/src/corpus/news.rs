use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{parse_timestamp, Article, Corpus, CorpusError, LoadReport, Timestamp};

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawTimestamp {
    Seconds(i64),
    Text(String),
}

#[derive(Debug, Deserialize)]
struct BodyRecord {
    id: String,
    #[serde(default)]
    body: Option<String>,
    #[serde(default)]
    published_at: Option<RawTimestamp>,
}

#[derive(Debug, Serialize)]
struct BodyRecordOut<'a> {
    id: &'a str,
    body: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    published_at: Option<Timestamp>,
}

fn open(path: &Path) -> Result<BufReader<File>, CorpusError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CorpusError::io(path, e))
}

/// Loads `news.tsv` and, optionally, a JSON-lines bodies file.
pub fn load_catalog(
    news_path: &Path,
    bodies_path: Option<&Path>,
) -> Result<(Corpus, LoadReport), CorpusError> {
    let news = open(news_path)?;
    match bodies_path {
        Some(p) => read_catalog(news, Some(open(p)?)),
        None => read_catalog(news, None::<&[u8]>),
    }
}

/// Parses the tab-separated catalog: `id, category, subcategory, title,
/// abstract[, url, ...]`. Further columns are ignored.
pub fn read_catalog<R: BufRead, B: BufRead>(
    news: R,
    bodies: Option<B>,
) -> Result<(Corpus, LoadReport), CorpusError> {
    let mut corpus = Corpus::new();
    let mut report = LoadReport::default();
    for (i, line) in news.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| CorpusError::malformed("news", lineno, e.to_string()))?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() < 5 {
            return Err(CorpusError::malformed(
                "news",
                lineno,
                format!(
                    "expected at least 5 tab-separated columns, found {}",
                    cols.len()
                ),
            ));
        }
        let id = cols[0].trim();
        if id.is_empty() {
            return Err(CorpusError::malformed("news", lineno, "empty article id"));
        }
        let article = Article {
            id: id.to_owned(),
            category: cols[1].to_owned(),
            subcategory: cols[2].to_owned(),
            title: cols[3].to_owned(),
            abstract_text: cols[4].to_owned(),
            url: cols.get(5).copied().unwrap_or_default().to_owned(),
            body: cols[4].to_owned(),
            ..Article::default()
        };
        corpus.insert(article)?;
    }

    if let Some(bodies) = bodies {
        for (i, line) in bodies.lines().enumerate() {
            let lineno = i + 1;
            let line = line.map_err(|e| CorpusError::malformed("bodies", lineno, e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let record: BodyRecord = serde_json::from_str(&line)
                .map_err(|e| CorpusError::malformed("bodies", lineno, e.to_string()))?;
            let published_at = match record.published_at {
                None => None,
                Some(RawTimestamp::Seconds(s)) => Some(s),
                Some(RawTimestamp::Text(t)) => Some(
                    parse_timestamp(&t).map_err(|e| CorpusError::malformed("bodies", lineno, e))?,
                ),
            };
            let Some(article) = corpus.get_mut(&record.id) else {
                report.warn(format!(
                    "bodies:{lineno}: unknown article id '{}'",
                    record.id
                ));
                continue;
            };
            if let Some(body) = record.body.filter(|b| !b.trim().is_empty()) {
                article.body = body;
            }
            if published_at.is_some() {
                article.published_at = published_at;
            }
        }
    }
    Ok((corpus, report))
}

/// Writes the canonical `news.tsv` layout (six columns).
pub fn write_news<W: Write>(corpus: &Corpus, mut out: W) -> std::io::Result<()> {
    for a in corpus {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            a.id, a.category, a.subcategory, a.title, a.abstract_text, a.url
        )?;
    }
    Ok(())
}

/// Writes body records for articles whose body differs from the abstract or
/// which carry a publication time.
pub fn write_bodies<W: Write>(corpus: &Corpus, mut out: W) -> std::io::Result<()> {
    for a in corpus {
        if a.body == a.abstract_text && a.published_at.is_none() {
            continue;
        }
        let record = BodyRecordOut {
            id: &a.id,
            body: &a.body,
            published_at: a.published_at,
        };
        serde_json::to_writer(&mut out, &record)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Writes enriched articles as JSON lines.
pub fn write_enriched<W: Write>(corpus: &Corpus, mut out: W) -> std::io::Result<()> {
    for a in corpus {
        serde_json::to_writer(&mut out, a)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Loads a catalog previously written by [`write_enriched`].
pub fn load_enriched(path: &Path) -> Result<Corpus, CorpusError> {
    let reader = open(path)?;
    let mut corpus = Corpus::new();
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| CorpusError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let article: Article = serde_json::from_str(&line)
            .map_err(|e| CorpusError::malformed("enriched", lineno, e.to_string()))?;
        corpus.insert(article)?;
    }
    Ok(corpus)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(news: &str, bodies: Option<&str>) -> Result<(Corpus, LoadReport), CorpusError> {
        read_catalog(news.as_bytes(), bodies.map(str::as_bytes))
    }

    #[test]
    fn maps_fields() {
        let (corpus, report) = parse("N1\tsports\tsoccer\tTitle\tAbs\turl\n", None).unwrap();
        let a = corpus.get("N1").unwrap();
        assert_eq!(a.category, "sports");
        assert_eq!(a.subcategory, "soccer");
        assert_eq!(a.title, "Title");
        assert_eq!(a.body, "Abs");
        assert_eq!(a.url, "url");
        assert_eq!(report.warning_count(), 0);
    }

    #[test]
    fn ignores_extra_columns() {
        let (corpus, _) = parse("N1\ta\tb\tT\tA\tu\t[]\t[]\n", None).unwrap();
        assert_eq!(corpus.len(), 1);
    }

    #[test]
    fn duplicate_id_is_fatal() {
        let err = parse("N1\ta\tb\tT\tA\tu\nN1\tc\td\tT\tA\tu\n", None).unwrap_err();
        assert!(err.to_string().contains("N1"));
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let err = parse("N1\ta\tb\tT\tA\tu\nN2\tonly-two\n", None).unwrap_err();
        match err {
            CorpusError::Malformed { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn bodies_override_and_orphans_warn() {
        let bodies = concat!(
            r#"{"id":"N1","body":"Full text.","published_at":1573779600}"#,
            "\n",
            r#"{"id":"N9","body":"orphan"}"#,
            "\n"
        );
        let (corpus, report) = parse("N1\ta\tb\tT\tAbs\tu\n", Some(bodies)).unwrap();
        let a = corpus.get("N1").unwrap();
        assert_eq!(a.body, "Full text.");
        assert_eq!(a.abstract_text, "Abs");
        assert_eq!(a.published_at, Some(1_573_779_600));
        assert_eq!(report.warning_count(), 1);
    }

    #[test]
    fn textual_publication_time() {
        let bodies = r#"{"id":"N1","published_at":"11/15/2019 1:00:00 AM"}"#;
        let (corpus, _) = parse("N1\ta\tb\tT\tAbs\tu\n", Some(bodies)).unwrap();
        assert_eq!(corpus.get("N1").unwrap().published_at, Some(1_573_779_600));
        assert_eq!(corpus.get("N1").unwrap().body, "Abs");
    }
}
