//! The 39-phoneme ARPAbet inventory used by the CMU dictionary.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Vowel bases; every vowel carries a stress digit 0, 1 or 2.
pub const VOWELS: [&str; 15] =
    ["AA", "AE", "AH", "AO", "AW", "AY", "EH", "ER", "EY", "IH", "IY", "OW", "OY", "UH", "UW"];

/// Consonants never carry a stress digit.
pub const CONSONANTS: [&str; 24] = [
    "B", "CH", "D", "DH", "F", "G", "HH", "JH", "K", "L", "M", "N", "NG", "P", "R", "S", "SH", "T", "TH", "V", "W",
    "Y", "Z", "ZH",
];

const N_VOWEL_SYMBOLS: usize = VOWELS.len() * 3;

/// Every valid phone symbol: stressed vowels first (`AA0 AA1 AA2 AE0 ...`), then consonants.
pub static SYMBOLS: [&str; 69] = [
    "AA0", "AA1", "AA2", "AE0", "AE1", "AE2", "AH0", "AH1", "AH2", "AO0", "AO1", "AO2", "AW0", "AW1", "AW2", "AY0",
    "AY1", "AY2", "EH0", "EH1", "EH2", "ER0", "ER1", "ER2", "EY0", "EY1", "EY2", "IH0", "IH1", "IH2", "IY0", "IY1",
    "IY2", "OW0", "OW1", "OW2", "OY0", "OY1", "OY2", "UH0", "UH1", "UH2", "UW0", "UW1", "UW2", "B", "CH", "D", "DH",
    "F", "G", "HH", "JH", "K", "L", "M", "N", "NG", "P", "R", "S", "SH", "T", "TH", "V", "W", "Y", "Z", "ZH",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid phoneme {0:?}")]
pub struct PhoneError(pub String);

/// A single validated ARPAbet phone, e.g. `AH0` or `K`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Phone(u8);

impl Phone {
    /// All 69 phone symbols in table order.
    pub fn all() -> impl Iterator<Item = Phone> {
        (0..SYMBOLS.len() as u8).map(Phone)
    }

    pub fn symbol(self) -> &'static str {
        SYMBOLS[self.0 as usize]
    }

    pub fn is_vowel(self) -> bool {
        (self.0 as usize) < N_VOWEL_SYMBOLS
    }

    /// Stress digit for vowels, `None` for consonants.
    pub fn stress(self) -> Option<u8> {
        self.is_vowel().then_some(self.0 % 3)
    }

    /// Vowel base without its stress digit, or the consonant itself.
    pub fn base(self) -> &'static str {
        if self.is_vowel() {
            VOWELS[self.0 as usize / 3]
        } else {
            self.symbol()
        }
    }

    /// Same vowel with a different stress digit; consonants are returned unchanged.
    pub fn with_stress(self, stress: u8) -> Phone {
        assert!(stress <= 2, "stress digit out of range");
        if self.is_vowel() {
            Phone(self.0 - self.0 % 3 + stress)
        } else {
            self
        }
    }

    /// Parses a base symbol that may lack a stress digit (`AE` → `AE0`).
    pub fn from_base(base: &str) -> Result<Phone, PhoneError> {
        if let Some(i) = VOWELS.iter().position(|v| *v == base) {
            return Ok(Phone((i * 3) as u8));
        }
        base.parse()
    }
}

impl FromStr for Phone {
    type Err = PhoneError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SYMBOLS.iter().position(|sym| *sym == s).map(|i| Phone(i as u8)).ok_or_else(|| PhoneError(s.to_string()))
    }
}

impl fmt::Display for Phone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl fmt::Debug for Phone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Parses a whitespace-separated pronunciation such as `HH AH0 L OW1`.
pub fn parse_phones(s: &str) -> Result<Vec<Phone>, PhoneError> {
    s.split_whitespace().map(str::parse).collect()
}
