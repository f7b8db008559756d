//! Core building blocks of the voxsync text-to-speech server.
//!
//! - [`text`]: normalization, lexicon layers and phonemization.
//! - [`dsp`]: framing, log-mel features, voice activity, pitch and energy.
//! - [`synth`]: deterministic synthesizer backends behind a two-stage interface.
//! - [`wav`]: PCM16 RIFF encoding and decoding.
//!
//! Frame-level loops run on rayon when the `parallel` feature is enabled (the
//! default). Every parallel path has a sequential twin selected through
//! [`Exec`], and both produce bit-identical results.

pub mod dsp;
pub mod exec;
pub mod synth;
pub mod text;
pub mod wav;

pub use exec::Exec;
