use std::collections::HashMap;

use super::{EmbeddingError, TokenizedDoc};

/// Words kept for training, ordered by descending count then spelling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocab {
    words: Vec<String>,
    counts: Vec<u64>,
    index: HashMap<String, u32>,
    total: u64,
}

impl Vocab {
    pub fn build(docs: &[TokenizedDoc], min_count: u64) -> Result<Self, EmbeddingError> {
        if docs.is_empty() {
            return Err(EmbeddingError::NoDocuments);
        }
        let mut counts: HashMap<&str, u64> = HashMap::new();
        for doc in docs {
            for t in &doc.tokens {
                *counts.entry(t.as_str()).or_default() += 1;
            }
        }
        let mut kept: Vec<(&str, u64)> = counts.into_iter().filter(|&(_, c)| c >= min_count).collect();
        if kept.is_empty() {
            return Err(EmbeddingError::EmptyVocabulary { min_count });
        }
        kept.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        Ok(Self::from_entries(kept.into_iter().map(|(w, c)| (w.to_string(), c))))
    }

    pub(crate) fn from_entries(entries: impl IntoIterator<Item = (String, u64)>) -> Self {
        let mut words = Vec::new();
        let mut counts = Vec::new();
        let mut index = HashMap::new();
        for (w, c) in entries {
            index.insert(w.clone(), words.len() as u32);
            words.push(w);
            counts.push(c);
        }
        let total = counts.iter().sum();
        Self {
            words,
            counts,
            index,
            total,
        }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn index_of(&self, word: &str) -> Option<u32> {
        self.index.get(word).copied()
    }

    pub fn count(&self, word: &str) -> Option<u64> {
        self.index_of(word).map(|i| self.counts[i as usize])
    }

    /// Total occurrences of retained words.
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = (&str, u64)> {
        self.words.iter().map(String::as_str).zip(self.counts.iter().copied())
    }

    pub(crate) fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn word(&self, index: usize) -> &str {
        &self.words[index]
    }
}
