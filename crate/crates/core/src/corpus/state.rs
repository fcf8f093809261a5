use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcher::HashtagProfile;
use crate::ranker::{LogisticModel, ScoredPair};

pub const STATE_FORMAT_VERSION: u32 = 1;

/// Derived state persisted between pipeline stages.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub profiles: Vec<HashtagProfile>,
    pub model: Option<LogisticModel>,
    pub scored_pairs: Vec<ScoredPair>,
}

#[derive(Serialize)]
struct StateFileOut<'a> {
    format_version: u32,
    #[serde(flatten)]
    state: &'a State,
}

#[derive(Deserialize)]
struct Header {
    format_version: u32,
}

#[derive(Deserialize)]
struct StateFileIn {
    #[allow(dead_code)]
    format_version: u32,
    profiles: Vec<HashtagProfile>,
    model: Option<LogisticModel>,
    scored_pairs: Vec<ScoredPair>,
}

pub fn save_state(path: impl AsRef<Path>, state: &State) -> Result<()> {
    let path = path.as_ref();
    let json = serde_json::to_string(&StateFileOut {
        format_version: STATE_FORMAT_VERSION,
        state,
    })
    .map_err(|e| Error::Validation(format!("state is not serializable: {e}")))?;
    fs::write(path, json + "\n").map_err(|e| Error::io(path, e))
}

pub fn load_state(path: impl AsRef<Path>) -> Result<State> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let header: Header = serde_json::from_str(&text).map_err(|e| Error::parse(path, e.line(), e.to_string()))?;
    if header.format_version != STATE_FORMAT_VERSION {
        return Err(Error::IncompatibleVersion {
            found: header.format_version,
            expected: STATE_FORMAT_VERSION,
        });
    }
    let file: StateFileIn = serde_json::from_str(&text).map_err(|e| Error::parse(path, e.line(), e.to_string()))?;
    Ok(State {
        profiles: file.profiles,
        model: file.model,
        scored_pairs: file.scored_pairs,
    })
}
