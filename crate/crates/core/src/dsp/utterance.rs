use std::fmt;

use super::Waveform;

pub const MIN_UTTERANCE_SECS: f64 = 0.1;
pub const MAX_UTTERANCE_SECS: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RejectReason {
    TooShort,
    TooLong,
}

impl RejectReason {
    pub fn as_str(self) -> &'static str {
        match self {
            RejectReason::TooShort => "too_short",
            RejectReason::TooLong => "too_long",
        }
    }
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UtteranceVerdict {
    Accept,
    Reject(RejectReason),
}

/// Keeps utterances lasting 0.1 s to 40 s, both bounds inclusive.
///
/// Compared in integer sample counts so the bounds are exact.
pub fn filter_utterance(wave: &Waveform) -> UtteranceVerdict {
    let n = wave.len() as u64;
    let sr = wave.sample_rate() as u64;
    if n * 10 < sr {
        UtteranceVerdict::Reject(RejectReason::TooShort)
    } else if n > 40 * sr {
        UtteranceVerdict::Reject(RejectReason::TooLong)
    } else {
        UtteranceVerdict::Accept
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn verdict(n: usize) -> UtteranceVerdict {
        filter_utterance(&Waveform::silence(n, 24_000))
    }

    #[test]
    fn inclusive_bounds() {
        assert_eq!(verdict(2_376), UtteranceVerdict::Reject(RejectReason::TooShort));
        assert_eq!(verdict(2_399), UtteranceVerdict::Reject(RejectReason::TooShort));
        assert_eq!(verdict(2_400), UtteranceVerdict::Accept);
        assert_eq!(verdict(960_000), UtteranceVerdict::Accept);
        assert_eq!(verdict(960_001), UtteranceVerdict::Reject(RejectReason::TooLong));
        assert_eq!(verdict(960_300), UtteranceVerdict::Reject(RejectReason::TooLong));
        assert_eq!(verdict(0), UtteranceVerdict::Reject(RejectReason::TooShort));
    }
}
