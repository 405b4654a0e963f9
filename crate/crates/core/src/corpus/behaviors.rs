use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use chrono::{DateTime, NaiveDateTime};

use super::{Candidate, CorpusError, ImpressionLog, Timestamp};

const MIND_TIME_FORMAT: &str = "%m/%d/%Y %I:%M:%S %p";

/// Accepts MIND's `11/15/2019 8:55:22 AM` (UTC), RFC 3339, or integer seconds.
pub fn parse_timestamp(raw: &str) -> Result<Timestamp, String> {
    let raw = raw.trim();
    if let Ok(secs) = raw.parse::<i64>() {
        return Ok(secs);
    }
    if let Ok(t) = NaiveDateTime::parse_from_str(raw, MIND_TIME_FORMAT) {
        return Ok(t.and_utc().timestamp());
    }
    DateTime::parse_from_rfc3339(raw)
        .map(|t| t.timestamp())
        .map_err(|_| format!("unrecognized timestamp '{raw}'"))
}

pub fn format_timestamp(t: Timestamp) -> String {
    match DateTime::from_timestamp(t, 0) {
        Some(dt) => dt.naive_utc().format(MIND_TIME_FORMAT).to_string(),
        None => t.to_string(),
    }
}

pub fn load_behaviors(path: &Path) -> Result<Vec<ImpressionLog>, CorpusError> {
    let file = File::open(path).map_err(|e| CorpusError::io(path, e))?;
    read_behaviors(BufReader::new(file))
}

/// Parses `impression_id, user_id, time, history, impressions` rows.
///
/// The source lists history oldest first; the result holds it most recent
/// first.
pub fn read_behaviors<R: BufRead>(reader: R) -> Result<Vec<ImpressionLog>, CorpusError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| CorpusError::malformed("behaviors", lineno, e.to_string()))?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        out.push(parse_row(line, lineno)?);
    }
    Ok(out)
}

fn parse_row(line: &str, lineno: usize) -> Result<ImpressionLog, CorpusError> {
    let cols: Vec<&str> = line.split('\t').collect();
    if cols.len() < 5 {
        return Err(CorpusError::malformed(
            "behaviors",
            lineno,
            format!("expected 5 tab-separated columns, found {}", cols.len()),
        ));
    }
    let impression_id = cols[0].trim().to_owned();
    if impression_id.is_empty() {
        return Err(CorpusError::malformed(
            "behaviors",
            lineno,
            "empty impression id",
        ));
    }
    let row_err = |message: String| {
        CorpusError::malformed(
            "behaviors",
            lineno,
            format!("impression '{impression_id}': {message}"),
        )
    };
    let time = parse_timestamp(cols[2]).map_err(row_err)?;
    let mut history: Vec<String> = cols[3].split_whitespace().map(str::to_owned).collect();
    history.reverse();

    let candidates = cols[4]
        .split_whitespace()
        .map(|token| {
            let parsed = token.rsplit_once('-').and_then(|(id, flag)| match flag {
                "0" if !id.is_empty() => Some((id, false)),
                "1" if !id.is_empty() => Some((id, true)),
                _ => None,
            });
            match parsed {
                Some((id, clicked)) => Ok(Candidate {
                    article_id: id.to_owned(),
                    clicked,
                }),
                None => Err(row_err(format!(
                    "candidate token '{token}' lacks a -0/-1 click suffix"
                ))),
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    if candidates.is_empty() {
        return Err(row_err("no candidates".into()));
    }

    Ok(ImpressionLog {
        impression_id,
        user_id: cols[1].trim().to_owned(),
        time,
        candidates,
        history,
    })
}

/// Writes impressions in the source layout (history oldest first).
pub fn write_behaviors<W: Write>(impressions: &[ImpressionLog], mut out: W) -> std::io::Result<()> {
    for imp in impressions {
        let history: Vec<&str> = imp.history.iter().rev().map(String::as_str).collect();
        let candidates: Vec<String> = imp
            .candidates
            .iter()
            .map(|c| format!("{}-{}", c.article_id, u8::from(c.clicked)))
            .collect();
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            imp.impression_id,
            imp.user_id,
            format_timestamp(imp.time),
            history.join(" "),
            candidates.join(" ")
        )?;
    }
    Ok(())
}
