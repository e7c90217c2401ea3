use std::ops::Deref;

use serde::Serialize;

const TERMINAL_PUNCT: &[char] = &['.', ',', '!', '?', ';', ':'];

/// Lowercase tokens from [`TokenSeq::tokenize`]. Never contains empty tokens.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize)]
pub struct TokenSeq(Vec<String>);

impl TokenSeq {
    /// Lowercases, splits on Unicode whitespace, and peels trailing
    /// `. , ! ? ; :` off each word into standalone tokens. Apostrophes and
    /// inner punctuation stay in the word.
    pub fn tokenize(text: &str) -> Self {
        let mut out = Vec::new();
        for word in text.to_lowercase().split_whitespace() {
            let stem = word.trim_end_matches(TERMINAL_PUNCT);
            if !stem.is_empty() {
                out.push(stem.to_string());
            }
            out.extend(word[stem.len()..].chars().map(String::from));
        }
        TokenSeq(out)
    }

    pub fn tokens(&self) -> &[String] {
        &self.0
    }
}

impl Deref for TokenSeq {
    type Target = [String];

    fn deref(&self) -> &[String] {
        &self.0
    }
}

pub fn tokenize(text: &str) -> TokenSeq {
    TokenSeq::tokenize(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        tokenize(s).tokens().to_vec()
    }

    #[test]
    fn examples() {
        assert_eq!(toks("The cat sat."), ["the", "cat", "sat", "."]);
        assert!(toks("").is_empty());
        assert_eq!(toks("Don't stop"), ["don't", "stop"]);
    }

    #[test]
    fn punctuation_runs_and_unicode_space() {
        assert_eq!(toks("Really?!  Yes..."), ["really", "?", "!", "yes", ".", ".", "."]);
        assert_eq!(toks("a\u{00a0}b\u{2003}c"), ["a", "b", "c"]);
        assert_eq!(toks("e.g. 3.5, ok"), ["e.g", ".", "3.5", ",", "ok"]);
        assert_eq!(toks(" ! "), ["!"]);
        assert_eq!(toks("ÉCOLE."), ["école", "."]);
    }
}
