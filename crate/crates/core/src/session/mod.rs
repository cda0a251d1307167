//! The live performance loop as a persistent, replayable state machine.
//!
//! A session starts at the root of a plot tree. Each request either
//! advances to the child that best matches the context (the current
//! platform, or an actor prompt) or draws a tilt from the nearest plot
//! tropes. Every outcome is appended to the transcript; nothing earlier is
//! ever rewritten.

mod clock;
mod engine;
mod store;

use chrono::{DateTime, Utc};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embedding::EmbeddingError;
use crate::story::{NameMap, PlotTreeNode, StoryError, TiltResult};

pub use clock::{Clock, FixedClock, SystemClock};
pub use engine::Engine;
pub use store::SessionStore;

pub const ENDED_TEXT: &str = "The story has ended.";

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("session has ended; only tilts can be requested")]
    Ended,
    #[error("unknown session {0:?}")]
    UnknownSession(String),
    #[error("{what} hash mismatch: session expects {expected}, loaded artifacts hash to {actual}")]
    HashMismatch {
        what: &'static str,
        expected: String,
        actual: String,
    },
    #[error("corrupt session record: {0}")]
    Corrupt(String),
    #[error("replay diverged at entry {seq}")]
    ReplayDivergence { seq: u64 },
    #[error(transparent)]
    Story(#[from] StoryError),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RequestKind {
    Platform,
    Tilt,
}

impl std::str::FromStr for RequestKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "platform" => Ok(Self::Platform),
            "tilt" => Ok(Self::Tilt),
            other => Err(format!("unknown request {other:?}; expected \"platform\" or \"tilt\"")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EntryPayload {
    Platform { fragment_id: String, text: String },
    Tilt { text: String, tilt: TiltResult },
    Ended { text: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub seq: u64,
    #[serde(flatten)]
    pub payload: EntryPayload,
    pub prompt_used: Option<String>,
    pub timestamp: DateTime<Utc>,
}

impl TranscriptEntry {
    pub fn text(&self) -> &str {
        match &self.payload {
            EntryPayload::Platform { text, .. } | EntryPayload::Tilt { text, .. } | EntryPayload::Ended { text } => {
                text
            }
        }
    }

    pub fn fragment_id(&self) -> Option<&str> {
        match &self.payload {
            EntryPayload::Platform { fragment_id, .. } => Some(fragment_id),
            _ => None,
        }
    }

    pub fn tilt(&self) -> Option<&TiltResult> {
        match &self.payload {
            EntryPayload::Tilt { tilt, .. } => Some(tilt),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionConfig {
    pub seed: Option<u64>,
    pub root: Option<String>,
    pub max_depth: Option<usize>,
}

/// One line of `events.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum SessionEvent {
    Created {
        id: String,
        seed: u64,
        requested_root: Option<String>,
        max_depth: usize,
        names: NameMap,
        corpus_hash: String,
        model_hash: String,
        entry: TranscriptEntry,
    },
    Request {
        request: RequestKind,
        prompt: Option<String>,
        entry: TranscriptEntry,
    },
}

/// Everything needed to resume a session except the plot tree, which is
/// rebuilt from the root fragment and depth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionSnapshot {
    pub id: String,
    pub seed: u64,
    pub requested_root: Option<String>,
    pub root_fragment: String,
    pub max_depth: usize,
    pub names: NameMap,
    pub cursor: Vec<usize>,
    pub ended: bool,
    pub rng_state: ChaCha8Rng,
    pub corpus_hash: String,
    pub model_hash: String,
    pub created: DateTime<Utc>,
    pub updated: DateTime<Utc>,
    pub transcript: Vec<TranscriptEntry>,
}

#[derive(Debug, Clone)]
pub struct Session {
    state: SessionSnapshot,
    tree: PlotTreeNode,
    pending: Vec<SessionEvent>,
}

impl Session {
    pub fn id(&self) -> &str {
        &self.state.id
    }

    pub fn seed(&self) -> u64 {
        self.state.seed
    }

    pub fn transcript(&self) -> &[TranscriptEntry] {
        &self.state.transcript
    }

    pub fn last_entry(&self) -> &TranscriptEntry {
        self.state.transcript.last().expect("transcript starts with the root beat")
    }

    /// Sequence number of the latest entry.
    pub fn seq(&self) -> u64 {
        self.last_entry().seq
    }

    pub fn is_ended(&self) -> bool {
        self.state.ended
    }

    pub fn tree(&self) -> &PlotTreeNode {
        &self.tree
    }

    pub fn names(&self) -> &NameMap {
        &self.state.names
    }

    /// The platform the story currently stands on (the last one presented
    /// before an ending).
    pub fn current(&self) -> &PlotTreeNode {
        self.tree.descend(&self.state.cursor).expect("cursor stays inside the tree")
    }

    pub fn snapshot(&self) -> &SessionSnapshot {
        &self.state
    }

    /// Transcript as canonical JSON bytes.
    pub fn transcript_json(&self) -> String {
        serde_json::to_string(&self.state.transcript).expect("transcript serializes")
    }

    /// Events recorded since the last save.
    pub fn pending_events(&self) -> &[SessionEvent] {
        &self.pending
    }
}
