//! Text frontend: raw request text to an ARPAbet phoneme sequence.
//!
//! Words are resolved through a [`LexiconStack`] whose layers are consulted
//! strictly in order: custom lexicon, CMU dictionary, then the rule-based
//! grapheme-to-phoneme fallback.

pub mod arpabet;
pub mod g2p;
pub mod lexicon;
pub mod normalize;
pub mod numbers;
pub mod phonemize;

pub use arpabet::{Phone, PhoneError};
pub use g2p::RuleTable;
pub use lexicon::{LexiconError, LexiconLayer, LexiconStack, Pronunciation};
pub use normalize::{normalize_text, NormalizeError, NormalizedText, Token, TokenKind, MAX_TEXT_CHARS};
pub use phonemize::{phonemize, PhonemeSequence, ResolvedWord, Source, Unit, UnitKind};
