//! Request text normalization.
//!
//! The rule set: NFC, lowercase, collapse whitespace, split the punctuation
//! marks `. , ! ? ; :` into their own tokens, expand integer literals below one
//! million into cardinal words and drop every other symbol. Non-ASCII letters
//! are folded to ASCII (German umlauts to their two-letter spellings, other
//! accented letters to their base letter) so word tokens always match
//! `[a-z']+`.

use std::fmt;

use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

use super::numbers::cardinal_words;

/// Upper bound on raw request text, in Unicode scalar values.
pub const MAX_TEXT_CHARS: usize = 1000;

const PUNCTUATION: [char; 6] = ['.', ',', '!', '?', ';', ':'];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalizeError {
    #[error("text contains no pronounceable words")]
    EmptyAfterNormalization,
    #[error("text is {chars} characters long, limit is {MAX_TEXT_CHARS}")]
    TooLong { chars: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Word,
    Punctuation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub kind: TokenKind,
}

impl Token {
    fn word(s: impl Into<String>) -> Self {
        Token { surface: s.into(), kind: TokenKind::Word }
    }

    fn punct(c: char) -> Self {
        Token { surface: c.to_string(), kind: TokenKind::Punctuation }
    }
}

/// Ordered word and punctuation tokens. Always contains at least one word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedText {
    tokens: Vec<Token>,
}

impl NormalizedText {
    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().filter(|t| t.kind == TokenKind::Word).map(|t| t.surface.as_str())
    }
}

/// Space-joined tokens. Normalizing this string yields the same tokens again.
impl fmt::Display for NormalizedText {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.tokens.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(&t.surface)?;
        }
        Ok(())
    }
}

pub fn normalize_text(raw: &str) -> Result<NormalizedText, NormalizeError> {
    let chars = raw.chars().count();
    if chars > MAX_TEXT_CHARS {
        return Err(NormalizeError::TooLong { chars });
    }
    let nfc: Vec<char> = raw.nfc().collect();
    let mut tokens = Vec::new();
    let mut word = String::new();
    let mut i = 0;

    while i < nfc.len() {
        let c = nfc[i];
        if c.is_ascii_digit() {
            flush(&mut word, &mut tokens);
            let (end, value) = scan_number(&nfc, i);
            if let Some(words) = value.and_then(cardinal_words) {
                tokens.extend(words.into_iter().map(Token::word));
            }
            i = end;
            continue;
        }
        if PUNCTUATION.contains(&c) {
            flush(&mut word, &mut tokens);
            tokens.push(Token::punct(c));
        } else if c == '\'' || c == '\u{2019}' {
            // Kept only between letters: "don't" but not "'quoted'".
            let next_is_letter = nfc.get(i + 1).is_some_and(|n| n.is_alphabetic());
            if !word.is_empty() && next_is_letter {
                word.push('\'');
            }
        } else if c.is_alphabetic() {
            if !fold_letter(c, &mut word) {
                flush(&mut word, &mut tokens);
            }
        } else {
            flush(&mut word, &mut tokens);
        }
        i += 1;
    }
    flush(&mut word, &mut tokens);

    if !tokens.iter().any(|t| t.kind == TokenKind::Word) {
        return Err(NormalizeError::EmptyAfterNormalization);
    }
    Ok(NormalizedText { tokens })
}

fn flush(word: &mut String, tokens: &mut Vec<Token>) {
    if !word.is_empty() {
        tokens.push(Token::word(std::mem::take(word)));
    }
}

/// Appends the ASCII spelling of `c`; returns false when it has none.
fn fold_letter(c: char, word: &mut String) -> bool {
    let before = word.len();
    for l in c.to_lowercase() {
        match l {
            'a'..='z' => word.push(l),
            'ä' => word.push_str("ae"),
            'ö' => word.push_str("oe"),
            'ü' => word.push_str("ue"),
            'ß' => word.push_str("ss"),
            _ => word
                .extend(std::iter::once(l).nfd().filter(|d| d.is_ascii_alphabetic()).map(|d| d.to_ascii_lowercase())),
        }
    }
    word.len() > before
}

/// Scans a numeric literal `[0-9]+([.,][0-9]+)*` starting at `start`.
///
/// Returns the end index and the integer value when the literal is a plain
/// integer of at most six digits or uses comma thousands separators.
fn scan_number(chars: &[char], start: usize) -> (usize, Option<u32>) {
    let mut groups: Vec<(Option<char>, String)> = Vec::new();
    let mut i = start;
    let mut sep = None;
    loop {
        let mut digits = String::new();
        while i < chars.len() && chars[i].is_ascii_digit() {
            digits.push(chars[i]);
            i += 1;
        }
        groups.push((sep, digits));
        if i + 1 < chars.len() && matches!(chars[i], '.' | ',') && chars[i + 1].is_ascii_digit() {
            sep = Some(chars[i]);
            i += 1;
        } else {
            break;
        }
    }

    let value = if groups.len() == 1 {
        let d = &groups[0].1;
        (d.len() <= 6).then(|| d.parse().ok()).flatten()
    } else {
        let first_ok = (1..=3).contains(&groups[0].1.len());
        let rest_ok = groups[1..].iter().all(|(s, d)| *s == Some(',') && d.len() == 3);
        if first_ok && rest_ok {
            let joined: String = groups.iter().map(|(_, d)| d.as_str()).collect();
            joined.parse::<u32>().ok().filter(|v| *v <= super::numbers::MAX_CARDINAL)
        } else {
            None
        }
    };
    (i, value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn surfaces(raw: &str) -> Vec<String> {
        normalize_text(raw).unwrap().tokens().iter().map(|t| t.surface.clone()).collect()
    }

    #[test]
    fn splits_punctuation_and_collapses_whitespace() {
        assert_eq!(surfaces("Hello,  world!"), ["hello", ",", "world", "!"]);
        assert_eq!(surfaces("  a\t\nb  "), ["a", "b"]);
    }

    #[test]
    fn expands_small_integers() {
        assert_eq!(surfaces("42"), ["forty", "two"]);
        assert_eq!(surfaces("in 1905."), ["in", "one", "thousand", "nine", "hundred", "five", "."]);
        assert_eq!(surfaces("1,200 cats"), ["one", "thousand", "two", "hundred", "cats"]);
    }

    #[test]
    fn drops_other_numerics() {
        assert_eq!(surfaces("pi is 3.14"), ["pi", "is"]);
        assert_eq!(surfaces("1000000 stars"), ["stars"]);
    }

    #[test]
    fn german_words_pass_through() {
        assert_eq!(surfaces("Guten Tag?"), ["guten", "tag", "?"]);
        assert_eq!(surfaces("Schöne Grüße"), ["schoene", "gruesse"]);
        assert_eq!(surfaces("café"), ["cafe"]);
    }

    #[test]
    fn apostrophes_inside_words_only() {
        assert_eq!(surfaces("Don't 'quote' me"), ["don't", "quote", "me"]);
        assert_eq!(surfaces("it’s"), ["it's"]);
    }

    #[test]
    fn symbols_are_dropped() {
        assert_eq!(surfaces("e-mail & $5"), ["e", "mail", "five"]);
    }

    #[test]
    fn empty_after_normalization() {
        for raw in ["", "   ", "!!!", "3.14", "$%&"] {
            assert_eq!(normalize_text(raw), Err(NormalizeError::EmptyAfterNormalization), "{raw:?}");
        }
    }

    #[test]
    fn rejects_over_long_text() {
        let raw = "a".repeat(MAX_TEXT_CHARS + 1);
        assert_eq!(normalize_text(&raw), Err(NormalizeError::TooLong { chars: 1001 }));
        assert!(normalize_text(&"a ".repeat(500)).is_ok());
    }
}
