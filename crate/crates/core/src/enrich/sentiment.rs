//! Lexicon-based polarity and activation.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use super::{tokens, EnrichError};

/// Lower-cased token → polarity in `[-1, 1]`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Lexicon {
    polarity: HashMap<String, f64>,
}

impl Lexicon {
    pub fn from_pairs<K: AsRef<str>>(
        pairs: impl IntoIterator<Item = (K, f64)>,
    ) -> Result<Self, EnrichError> {
        let mut polarity = HashMap::new();
        for (token, value) in pairs {
            let token = token.as_ref().trim().to_lowercase();
            if !(-1.0..=1.0).contains(&value) {
                return Err(EnrichError::InvalidPolarity { token, value });
            }
            polarity.insert(token, value);
        }
        Ok(Self { polarity })
    }

    pub fn load(path: &Path) -> Result<Self, EnrichError> {
        let file = File::open(path).map_err(|e| EnrichError::io(path, e))?;
        Self::read(BufReader::new(file))
    }

    /// `token \t polarity` rows; blank lines and `#` comments are skipped.
    pub fn read<R: BufRead>(reader: R) -> Result<Self, EnrichError> {
        let mut pairs = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let lineno = i + 1;
            let line =
                line.map_err(|e| EnrichError::malformed("lexicon", lineno, e.to_string()))?;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (token, value) = line.split_once('\t').ok_or_else(|| {
                EnrichError::malformed("lexicon", lineno, "expected `token<TAB>polarity`")
            })?;
            let value: f64 = value.trim().parse().map_err(|_| {
                EnrichError::malformed("lexicon", lineno, format!("bad polarity '{value}'"))
            })?;
            pairs.push((token.to_owned(), value));
        }
        Self::from_pairs(pairs)
    }

    pub fn get(&self, token: &str) -> Option<f64> {
        self.polarity.get(token).copied()
    }

    pub fn len(&self) -> usize {
        self.polarity.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polarity.is_empty()
    }
}

/// Mean polarity over matched token occurrences, 0 when nothing matches.
pub fn polarity(text: &str, lexicon: &Lexicon) -> f64 {
    let (sum, n) = tokens(text)
        .filter_map(|t| lexicon.get(&t))
        .fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Absolute polarity, in `[0, 1]`.
pub fn activation(text: &str, lexicon: &Lexicon) -> f64 {
    polarity(text, lexicon).abs().min(1.0)
}
