//! Voice lookup for local commands.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use voxsync_core::synth::{Backend, Voice};
use voxsync_core::text::LexiconStack;
use voxsync_core::Exec;
use voxsync_service::{ServiceConfig, VoiceConfig};

use crate::CliError;

/// Voices available without a config file; both use the bundled lexicons.
pub const BUILTIN_VOICES: [(&str, Backend); 2] =
    [("einstein", Backend::MockGlim), ("einstein_fast", Backend::MockFast)];

pub fn registry(config: Option<&Path>) -> Result<BTreeMap<String, VoiceConfig>, CliError> {
    match config {
        Some(path) => Ok(ServiceConfig::load(path).map_err(|e| CliError::Usage(e.to_string()))?.voices),
        None => Ok(BUILTIN_VOICES
            .iter()
            .map(|(id, backend)| {
                (id.to_string(), VoiceConfig { backend: *backend, cmudict: None, custom_lexicon: None })
            })
            .collect()),
    }
}

pub fn load_voice(id: &str, config: Option<&Path>) -> Result<Voice, CliError> {
    let voices = registry(config)?;
    let Some(vc) = voices.get(id) else {
        let known: Vec<&str> = voices.keys().map(String::as_str).collect();
        return Err(CliError::Usage(format!("unknown voice {id:?} (available: {})", known.join(", "))));
    };
    let lexicon = LexiconStack::from_paths(vc.custom_lexicon.as_deref(), vc.cmudict.as_deref())
        .map_err(|e| CliError::Runtime(e.into()))?;
    Voice::new(id, vc.backend, Arc::new(lexicon), Exec::default()).map_err(|e| CliError::Runtime(e.into()))
}
