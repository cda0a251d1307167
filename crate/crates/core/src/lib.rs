//! Story engine for improvised performance.
//!
//! Plot fragments form a directed graph whose edges rename character
//! symbols. A session walks a tree expanded from that graph, choosing each
//! next platform by paragraph-vector similarity to the current scene or an
//! actor's prompt, and offers trope "tilts" drawn from the nearest plot
//! tropes after discarding ones that merely repeat the platform.

pub mod corpus;
pub mod embedding;
pub mod eval;
pub mod session;
pub mod story;
pub mod text;

pub use corpus::{PlotGraph, TropeCorpus};
pub use embedding::{Embedder, EmbeddingModel, TrainingConfig};
pub use session::{Engine, Session};
