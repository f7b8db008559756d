//! Rule-based grapheme-to-phoneme fallback for out-of-vocabulary words.
//!
//! An ordered table of letter-context rewrite rules. At each position the
//! longest matching letter string wins, ties go to the earlier rule. Stress
//! is assigned afterwards: primary on the first vowel, unstressed elsewhere.

use std::collections::HashMap;

use thiserror::Error;

use super::arpabet::Phone;

const BUILTIN_RULES: &str = include_str!("../../data/g2p_rules.tsv");
const ALPHABET: &str = "abcdefghijklmnopqrstuvwxyz'";

#[derive(Debug, Error)]
pub enum RuleError {
    #[error("rule line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("rule table has no context-free rule for letter {0:?}")]
    Incomplete(char),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ctx {
    Boundary,
    Vowel,
    Consonant,
    Front,
    Letter(u8),
}

impl Ctx {
    fn parse(c: char) -> Option<Ctx> {
        Some(match c {
            '#' => Ctx::Boundary,
            'V' => Ctx::Vowel,
            'C' => Ctx::Consonant,
            'E' => Ctx::Front,
            'a'..='z' | '\'' => Ctx::Letter(c as u8),
            _ => return None,
        })
    }

    /// Matches a letter position; `None` is the word boundary.
    fn accepts(self, letter: Option<u8>) -> bool {
        match (self, letter) {
            (Ctx::Boundary, None) => true,
            (_, None) | (Ctx::Boundary, Some(_)) => false,
            (Ctx::Vowel, Some(l)) => b"aeiouy".contains(&l),
            (Ctx::Consonant, Some(l)) => l.is_ascii_lowercase() && !b"aeiou".contains(&l),
            (Ctx::Front, Some(l)) => b"eiy".contains(&l),
            (Ctx::Letter(c), Some(l)) => c == l,
        }
    }
}

#[derive(Debug, Clone)]
struct Rule {
    left: Vec<Ctx>,
    letters: Vec<u8>,
    right: Vec<Ctx>,
    phones: Vec<Phone>,
}

impl Rule {
    fn matches(&self, word: &[u8], pos: usize) -> bool {
        let end = pos + self.letters.len();
        if end > word.len() || word[pos..end] != self.letters[..] {
            return false;
        }
        let mut j = pos as isize - 1;
        for c in self.left.iter().rev() {
            let letter = (j >= 0).then(|| word[j as usize]);
            if !c.accepts(letter) {
                return false;
            }
            if letter.is_none() {
                break;
            }
            j -= 1;
        }
        for (j, c) in (end..).zip(&self.right) {
            let letter = word.get(j).copied();
            if !c.accepts(letter) {
                return false;
            }
            if letter.is_none() {
                break;
            }
        }
        true
    }
}

/// Ordered rewrite rules, indexed by their first letter.
#[derive(Debug, Clone)]
pub struct RuleTable {
    by_letter: HashMap<u8, Vec<Rule>>,
    len: usize,
}

impl RuleTable {
    /// The rule table bundled with the crate.
    pub fn builtin() -> Self {
        Self::parse(BUILTIN_RULES).expect("bundled g2p rules are valid")
    }

    pub fn parse(text: &str) -> Result<Self, RuleError> {
        let mut by_letter: HashMap<u8, Vec<Rule>> = HashMap::new();
        let mut len = 0;
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            if line.trim().is_empty() || line.starts_with(";;") {
                continue;
            }
            let err = |message: String| RuleError::Parse { line: line_no, message };
            let cols: Vec<&str> = line.split('\t').collect();
            let [left, letters, right, phones] = cols[..] else {
                return Err(err(format!("expected 4 tab-separated columns, found {}", cols.len())));
            };
            let ctx = |s: &str| -> Result<Vec<Ctx>, RuleError> {
                if s == "." {
                    return Ok(Vec::new());
                }
                s.chars().map(|c| Ctx::parse(c).ok_or_else(|| err(format!("bad context symbol {c:?}")))).collect()
            };
            if letters.is_empty() || !letters.chars().all(|c| ALPHABET.contains(c)) {
                return Err(err(format!("bad letter string {letters:?}")));
            }
            let phones = if phones == "-" {
                Vec::new()
            } else {
                phones
                    .split_whitespace()
                    .map(|p| Phone::from_base(p).map_err(|e| err(e.to_string())))
                    .collect::<Result<_, _>>()?
            };
            let rule = Rule { left: ctx(left)?, letters: letters.as_bytes().to_vec(), right: ctx(right)?, phones };
            by_letter.entry(rule.letters[0]).or_default().push(rule);
            len += 1;
        }
        for c in ALPHABET.bytes() {
            let total = by_letter.get(&c).is_some_and(|rules| {
                rules.iter().any(|r| r.letters.len() == 1 && r.left.is_empty() && r.right.is_empty())
            });
            if !total {
                return Err(RuleError::Incomplete(c as char));
            }
        }
        Ok(Self { by_letter, len })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Converts a word matching `[a-z']+` to phones. Never returns an empty list.
    pub fn convert(&self, word: &str) -> Vec<Phone> {
        let bytes = word.as_bytes();
        let mut out = Vec::new();
        let mut pos = 0;
        while pos < bytes.len() {
            let best = self.by_letter.get(&bytes[pos]).and_then(|rules| {
                rules.iter().filter(|r| r.matches(bytes, pos)).fold(None::<&Rule>, |best, r| match best {
                    Some(b) if b.letters.len() >= r.letters.len() => Some(b),
                    _ => Some(r),
                })
            });
            match best {
                Some(rule) => {
                    out.extend_from_slice(&rule.phones);
                    pos += rule.letters.len();
                }
                // Only reachable for characters outside [a-z'].
                None => pos += 1,
            }
        }
        if out.is_empty() {
            out.push(Phone::from_base("AH").expect("AH is a vowel"));
        }
        assign_stress(&mut out);
        out
    }
}

fn assign_stress(phones: &mut [Phone]) {
    let mut first = true;
    for p in phones.iter_mut().filter(|p| p.is_vowel()) {
        *p = p.with_stress(if first { 1 } else { 0 });
        first = false;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::arpabet::parse_phones;

    fn g2p(word: &str) -> String {
        RuleTable::builtin().convert(word).iter().map(|p| p.symbol()).collect::<Vec<_>>().join(" ")
    }

    #[test]
    fn ships_about_two_hundred_rules() {
        let table = RuleTable::builtin();
        assert!(table.len() >= 200, "{}", table.len());
    }

    #[test]
    fn cat() {
        assert_eq!(g2p("cat"), "K AE1 T");
    }

    #[test]
    fn open_syllable_ends_in_vowel() {
        let phones = RuleTable::builtin().convert("bo");
        assert_eq!(phones, parse_phones("B OW1").unwrap());
        assert!(phones.last().unwrap().is_vowel());
    }

    #[test]
    fn representative_words() {
        assert_eq!(g2p("make"), "M EY1 K");
        assert_eq!(g2p("ship"), "SH IH1 P");
        assert_eq!(g2p("night"), "N AY1 T");
        assert_eq!(g2p("station"), "S T EY1 SH AH0 N");
        assert_eq!(g2p("knee"), "N IY1");
        assert_eq!(g2p("city"), "S IH1 T IY0");
    }

    #[test]
    fn deterministic_and_non_empty() {
        assert_eq!(g2p("zzz"), g2p("zzz"));
        assert!(!g2p("zzz").is_empty());
        assert_eq!(g2p("'"), "AH1");
        assert_eq!(g2p("h"), "HH");
    }

    #[test]
    fn rejects_incomplete_table() {
        let err = RuleTable::parse(".\ta\t.\tAE\n").unwrap_err();
        assert!(matches!(err, RuleError::Incomplete('b')));
    }

    #[test]
    fn rejects_malformed_rule() {
        assert!(matches!(RuleTable::parse(".\ta\t.\n"), Err(RuleError::Parse { line: 1, .. })));
        assert!(matches!(RuleTable::parse(".\ta\t.\tQQ\n"), Err(RuleError::Parse { line: 1, .. })));
        assert!(matches!(RuleTable::parse("%\ta\t.\tAE\n"), Err(RuleError::Parse { line: 1, .. })));
    }
}
