//! Flesch reading ease with a vowel-group syllable heuristic.

/// Word, sentence and syllable counts of a text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TextStats {
    pub words: usize,
    pub sentences: usize,
    pub syllables: usize,
}

fn is_word(token: &str) -> bool {
    token.chars().any(char::is_alphanumeric)
}

/// Maximal runs of `aeiouy`, minus one for a trailing `e`, at least 1.
pub fn syllables(word: &str) -> usize {
    let letters: Vec<char> = word
        .chars()
        .filter(|c| c.is_alphabetic())
        .flat_map(char::to_lowercase)
        .collect();
    let is_vowel = |c: char| matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y');
    let mut groups = 0usize;
    let mut in_group = false;
    for &c in &letters {
        let v = is_vowel(c);
        if v && !in_group {
            groups += 1;
        }
        in_group = v;
    }
    if letters.last() == Some(&'e') {
        groups = groups.saturating_sub(1);
    }
    groups.max(1)
}

/// `None` when the text holds no words.
pub fn text_stats(text: &str) -> Option<TextStats> {
    let words: Vec<&str> = text.split_whitespace().filter(|t| is_word(t)).collect();
    if words.is_empty() {
        return None;
    }
    let sentences = text
        .split(['.', '!', '?'])
        .filter(|segment| segment.split_whitespace().any(is_word))
        .count()
        .max(1);
    Some(TextStats {
        words: words.len(),
        sentences,
        syllables: words.iter().map(|w| syllables(w)).sum(),
    })
}

/// Unclamped score `206.835 − 1.015·(words/sentences) − 84.6·(syllables/words)`.
pub fn flesch_reading_ease(stats: TextStats) -> f64 {
    let words = stats.words as f64;
    206.835 - 1.015 * (words / stats.sentences as f64) - 84.6 * (stats.syllables as f64 / words)
}

/// Reading ease clamped to `[0, 100]`; `None` for empty text.
pub fn complexity(text: &str) -> Option<f64> {
    text_stats(text).map(|s| flesch_reading_ease(s).clamp(0.0, 100.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn syllable_heuristic() {
        assert_eq!(syllables("cat"), 1);
        assert_eq!(syllables("the"), 1);
        assert_eq!(syllables("valley"), 2);
        assert_eq!(syllables("ancient"), 2);
        assert_eq!(syllables("house"), 1);
        assert_eq!(syllables("beautiful"), 3);
        assert_eq!(syllables("2019"), 1);
        assert_eq!(syllables("mat."), 1);
    }

    #[test]
    fn short_sentence_clamps_to_100() {
        let stats = text_stats("The cat sat on the mat.").unwrap();
        assert_eq!(
            stats,
            TextStats {
                words: 6,
                sentences: 1,
                syllables: 6
            }
        );
        assert!((flesch_reading_ease(stats) - 116.145).abs() < 1e-9);
        assert_eq!(complexity("The cat sat on the mat."), Some(100.0));
    }

    #[test]
    fn ten_words_thirteen_syllables() {
        let text = "The dog ran over the valley to an ancient house.";
        let stats = text_stats(text).unwrap();
        assert_eq!(
            stats,
            TextStats {
                words: 10,
                sentences: 1,
                syllables: 13
            }
        );
        assert!((complexity(text).unwrap() - 86.705).abs() < 1e-9);
    }

    #[test]
    fn sentence_runs_count_once() {
        let stats = text_stats("Really?! Yes... it is. ").unwrap();
        assert_eq!(stats.sentences, 3);
        assert_eq!(stats.words, 4);
    }

    #[test]
    fn empty_text_is_absent() {
        assert_eq!(complexity(""), None);
        assert_eq!(complexity("   \n "), None);
        assert_eq!(complexity("... !!"), None);
    }

    #[test]
    fn dense_text_clamps_to_zero() {
        let text = "Institutionalization notwithstanding, intergovernmental organizational \
                    representatives characteristically overcomplicate administrative \
                    communication responsibilities unnecessarily";
        assert_eq!(complexity(text), Some(0.0));
    }
}
