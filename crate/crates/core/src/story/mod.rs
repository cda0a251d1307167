//! Plot trees, platform selection, character naming and contextual tilts.

mod names;
mod platform;
mod render;
mod subs;
mod tilt;
mod tree;
mod walk;

use thiserror::Error;

use crate::embedding::EmbeddingError;

pub use names::NameMap;
pub use platform::{context_vector, next_platform, Context};
pub use render::{render_fragment, Rendered};
pub use subs::SubstitutionMap;
pub use tilt::{
    redundancy_filter, select_tilt, tilt_candidates, FilterDecision, FilteredTrope, RedundancyFilter,
    TiltCandidate, TiltResult, MIN_SHARED_WORD_LEN, TILT_CANDIDATES,
};
pub use tree::{generate_plot_tree, PlotTreeNode, RootChoice};
pub use walk::{generate_story, Beat, Story, DEFAULT_STORY_LENGTH};

/// Default plot-tree depth: a five-beat story plus one level of lookahead.
pub const DEFAULT_MAX_DEPTH: usize = 6;

#[derive(Debug, Error)]
pub enum StoryError {
    #[error("unknown root fragment {0:?}")]
    UnknownRoot(String),
    #[error("every fragment is terminal; no random root available")]
    NoNonTerminalFragment,
    #[error("depth and length limits must be at least 1")]
    InvalidDepth,
    #[error("context text is empty")]
    EmptyContext,
    #[error("model has no vector for {0:?}")]
    MissingVector(String),
    #[error("the trope corpus has no plot tropes")]
    NoPlotTropes,
    #[error("every plot trope was filtered out as redundant")]
    EmptyTiltPool,
    #[error("invalid name map: {0}")]
    InvalidNames(String),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
}
