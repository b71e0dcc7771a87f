use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Boundary marker for character n-grams.
pub const PAD: char = '#';

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TokenizerMode {
    /// Case-folded words.
    WordLower,
    /// Character n-grams of each case-folded word, padded with `#` on both
    /// sides. Words whose padded form is shorter than `n` yield that form.
    CharNgram(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tokenizer {
    mode: TokenizerMode,
    strip_punctuation: bool,
}

impl Default for Tokenizer {
    fn default() -> Self {
        Self { mode: TokenizerMode::WordLower, strip_punctuation: true }
    }
}

impl Tokenizer {
    pub fn word_lower(strip_punctuation: bool) -> Self {
        Self { mode: TokenizerMode::WordLower, strip_punctuation }
    }

    pub fn char_ngram(n: usize, strip_punctuation: bool) -> Result<Self> {
        if !(3..=5).contains(&n) {
            return Err(Error::invalid(format!("character n-gram size must be 3..=5, got {n}")));
        }
        Ok(Self { mode: TokenizerMode::CharNgram(n), strip_punctuation })
    }

    pub fn mode(&self) -> TokenizerMode {
        self.mode
    }

    pub fn strips_punctuation(&self) -> bool {
        self.strip_punctuation
    }

    fn words<'a>(&self, text: &'a str) -> Vec<&'a str> {
        if self.strip_punctuation {
            text.split(|c: char| !c.is_alphanumeric()).filter(|w| !w.is_empty()).collect()
        } else {
            text.split_whitespace().collect()
        }
    }

    pub fn tokenize(&self, text: &str) -> Vec<String> {
        let words = self.words(text);
        match self.mode {
            TokenizerMode::WordLower => words.into_iter().map(str::to_lowercase).collect(),
            TokenizerMode::CharNgram(n) => {
                let mut out = Vec::new();
                for word in words {
                    let padded: Vec<char> = std::iter::once(PAD).chain(word.to_lowercase().chars()).chain(std::iter::once(PAD)).collect();
                    if padded.len() <= n {
                        out.push(padded.iter().collect());
                    } else {
                        out.extend(padded.windows(n).map(|w| w.iter().collect::<String>()));
                    }
                }
                out
            }
        }
    }

    /// Short description for reports, e.g. `word_lower+strip`.
    pub fn describe(&self) -> String {
        let mode = match self.mode {
            TokenizerMode::WordLower => "word_lower".to_string(),
            TokenizerMode::CharNgram(n) => format!("char{n}"),
        };
        if self.strip_punctuation {
            format!("{mode}+strip")
        } else {
            mode
        }
    }
}

impl FromStr for Tokenizer {
    type Err = Error;

    /// Accepts `word`, `word-raw`, `char3`..`char5` (optionally `-raw` to keep
    /// punctuation).
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        let (base, strip) = match lower.strip_suffix("-raw") {
            Some(b) => (b, false),
            None => (lower.as_str(), true),
        };
        match base {
            "word" | "word_lower" => Ok(Tokenizer::word_lower(strip)),
            other => match other.strip_prefix("char").and_then(|n| n.parse().ok()) {
                Some(n) => Tokenizer::char_ngram(n, strip),
                None => Err(Error::invalid(format!("unknown tokenizer `{s}`"))),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn word_lower_strips_punctuation() {
        let t = Tokenizer::word_lower(true);
        assert_eq!(t.tokenize("Attendance for dental check-ups"), ["attendance", "for", "dental", "check", "ups"]);
        assert!(t.tokenize("").is_empty());
        assert_eq!(Tokenizer::word_lower(false).tokenize("Check-ups, now"), ["check-ups,", "now"]);
    }

    #[test]
    fn char_ngrams_padded() {
        let t = Tokenizer::char_ngram(3, true).unwrap();
        assert_eq!(t.tokenize("ab"), ["#ab", "ab#"]);
        assert_eq!(t.tokenize("a"), ["#a#"]);
        assert_eq!(t.tokenize("Ab c"), ["#ab", "ab#", "#c#"]);
        assert!(t.tokenize("").is_empty());
        assert!(Tokenizer::char_ngram(2, true).is_err());
    }

    #[test]
    fn parse_names() {
        assert_eq!("word".parse::<Tokenizer>().unwrap(), Tokenizer::default());
        assert_eq!("char4-raw".parse::<Tokenizer>().unwrap().mode(), TokenizerMode::CharNgram(4));
        assert!("bpe".parse::<Tokenizer>().is_err());
    }
}
