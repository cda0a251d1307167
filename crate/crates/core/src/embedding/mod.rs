//! Paragraph-vector embeddings over fragment texts and trope descriptions.

mod config;
mod distance;
mod model;
mod persist;
mod tokenize;
mod vocab;

use std::collections::HashMap;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::corpus::{PlotGraph, TropeCorpus};

pub use config::TrainingConfig;
pub use distance::{cosine_distance, cosine_distance_flagged, nearest_documents, Neighbour};
pub use model::{train, EmbeddingModel};
pub use persist::{MODEL_MAGIC, MODEL_VERSION};
pub use tokenize::tokenize;
pub use vocab::Vocab;

#[derive(Debug, Error)]
pub enum EmbeddingError {
    #[error("invalid training config: {0}")]
    InvalidConfig(String),
    #[error("no training documents")]
    NoDocuments,
    #[error("at least two training documents are required, got {0}")]
    TooFewDocuments(usize),
    #[error("document {0:?} has no tokens")]
    EmptyDocument(String),
    #[error("duplicate document id {0:?}")]
    DuplicateDocument(String),
    #[error("token {0:?} contains whitespace")]
    WhitespaceToken(String),
    #[error("vocabulary is empty after dropping words seen fewer than {min_count} times")]
    EmptyVocabulary { min_count: u64 },
    #[error("no tokens to embed")]
    EmptyInput,
    #[error("candidate pool is empty")]
    EmptyPool,
    #[error("no vector for document {0:?}")]
    UnknownDocument(String),
    #[error("model file: {0}")]
    Format(String),
    #[error("model was trained on corpus {expected}, but the loaded corpus hashes to {actual}")]
    CorpusMismatch { expected: String, actual: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A training document: namespaced id plus lowercase tokens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizedDoc {
    pub doc_id: String,
    pub tokens: Vec<String>,
}

impl TokenizedDoc {
    pub fn new(doc_id: impl Into<String>, tokens: Vec<String>) -> Result<Self, EmbeddingError> {
        let doc_id = doc_id.into();
        if tokens.is_empty() {
            return Err(EmbeddingError::EmptyDocument(doc_id));
        }
        if let Some(t) = tokens.iter().find(|t| t.is_empty() || t.contains(char::is_whitespace)) {
            return Err(EmbeddingError::WhitespaceToken(t.clone()));
        }
        Ok(Self { doc_id, tokens })
    }

    pub fn from_text(doc_id: impl Into<String>, text: &str) -> Result<Self, EmbeddingError> {
        Self::new(doc_id, tokenize(text))
    }
}

pub const FRAGMENT_PREFIX: &str = "frag:";
pub const TROPE_PREFIX: &str = "trope:";

pub fn fragment_doc_id(fragment_id: &str) -> String {
    format!("{FRAGMENT_PREFIX}{fragment_id}")
}

pub fn trope_doc_id(name: &str) -> String {
    format!("{TROPE_PREFIX}{name}")
}

/// Fragment texts followed by trope descriptions, in corpus order.
/// Trope names are not trained on; only descriptions are.
pub fn training_docs(graph: &PlotGraph, tropes: &TropeCorpus) -> Result<Vec<TokenizedDoc>, EmbeddingError> {
    let mut docs = Vec::with_capacity(graph.len() + tropes.len());
    for f in graph.fragments() {
        docs.push(TokenizedDoc::from_text(fragment_doc_id(&f.id), &f.text)?);
    }
    for t in tropes.tropes() {
        docs.push(TokenizedDoc::from_text(trope_doc_id(&t.name), &t.description)?);
    }
    Ok(docs)
}

/// Content hash of a training set: ids and tokens, in order.
pub fn corpus_hash(docs: &[TokenizedDoc]) -> String {
    let mut h = Sha256::new();
    for d in docs {
        h.update(d.doc_id.as_bytes());
        h.update([0u8]);
        for t in &d.tokens {
            h.update(t.as_bytes());
            h.update(b" ");
        }
        h.update(b"\n");
    }
    hex::encode(h.finalize())
}

/// A vector inferred for unseen text.
#[derive(Debug, Clone, PartialEq)]
pub struct Inferred {
    pub vector: Vec<f32>,
    /// Set when no input token was in the vocabulary, so the vector carries
    /// no information about the text.
    pub low_confidence: bool,
}

/// Read-only access to document vectors and text inference.
pub trait Embedder {
    fn dim(&self) -> usize;

    fn doc_vector(&self, doc_id: &str) -> Option<&[f32]>;

    /// Deterministic vector for free text.
    fn infer_text(&self, text: &str) -> Result<Inferred, EmbeddingError>;
}

/// Fixed vectors keyed by doc id and by exact text. Used for oracle and
/// random embeddings in evaluation and tests.
#[derive(Debug, Clone, Default)]
pub struct StaticEmbedder {
    dim: usize,
    docs: HashMap<String, Vec<f32>>,
    texts: HashMap<String, Vec<f32>>,
}

impl StaticEmbedder {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            ..Default::default()
        }
    }

    pub fn insert(&mut self, doc_id: impl Into<String>, vector: Vec<f32>) {
        assert_eq!(vector.len(), self.dim);
        self.docs.insert(doc_id.into(), vector);
    }

    pub fn insert_text(&mut self, text: impl Into<String>, vector: Vec<f32>) {
        assert_eq!(vector.len(), self.dim);
        self.texts.insert(text.into(), vector);
    }
}

impl Embedder for StaticEmbedder {
    fn dim(&self) -> usize {
        self.dim
    }

    fn doc_vector(&self, doc_id: &str) -> Option<&[f32]> {
        self.docs.get(doc_id).map(Vec::as_slice)
    }

    fn infer_text(&self, text: &str) -> Result<Inferred, EmbeddingError> {
        if tokenize(text).is_empty() {
            return Err(EmbeddingError::EmptyInput);
        }
        Ok(match self.texts.get(text) {
            Some(v) => Inferred {
                vector: v.clone(),
                low_confidence: false,
            },
            None => Inferred {
                vector: vec![0.0; self.dim],
                low_confidence: true,
            },
        })
    }
}
