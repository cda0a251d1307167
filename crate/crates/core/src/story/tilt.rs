use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::StoryError;
use crate::corpus::TropeCorpus;
use crate::embedding::{nearest_documents, tokenize, trope_doc_id, Embedder, TROPE_PREFIX};

/// Words must be longer than this to count towards redundancy.
pub const MIN_SHARED_WORD_LEN: usize = 3;

/// How many nearest tropes a tilt is drawn from.
pub const TILT_CANDIDATES: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterDecision {
    pub keep: bool,
    pub shared: Vec<String>,
}

/// Long-word token set of a platform, reusable across many trope names.
#[derive(Debug, Clone)]
pub struct RedundancyFilter {
    platform_words: BTreeSet<String>,
}

fn long_words(text: &str) -> BTreeSet<String> {
    tokenize(text)
        .into_iter()
        .filter(|t| t.chars().count() > MIN_SHARED_WORD_LEN)
        .collect()
}

impl RedundancyFilter {
    pub fn new(platform_text: &str) -> Self {
        Self {
            platform_words: long_words(platform_text),
        }
    }

    pub fn check(&self, trope_name: &str) -> FilterDecision {
        let shared: Vec<String> = long_words(trope_name)
            .intersection(&self.platform_words)
            .cloned()
            .collect();
        FilterDecision {
            keep: shared.is_empty(),
            shared,
        }
    }
}

/// Discards a trope whose name shares a word longer than three letters with
/// the platform text.
pub fn redundancy_filter(platform_text: &str, trope_name: &str) -> FilterDecision {
    RedundancyFilter::new(platform_text).check(trope_name)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TiltCandidate {
    pub name: String,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilteredTrope {
    pub name: String,
    pub shared: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TiltResult {
    pub chosen: String,
    pub candidates: Vec<TiltCandidate>,
    pub filtered_out: Vec<FilteredTrope>,
}

/// The ranked candidates a tilt would be drawn from, with the filtered-out
/// tropes. The filter runs over the whole plot-trope pool before the top-n
/// cut, so n candidates come back whenever n survive.
pub fn tilt_candidates<E: Embedder + ?Sized>(
    embedder: &E,
    corpus: &TropeCorpus,
    query: &[f32],
    platform_text: &str,
    n: usize,
) -> Result<(Vec<TiltCandidate>, Vec<FilteredTrope>), StoryError> {
    let plot = corpus.plot_trope_subset();
    if plot.is_empty() {
        return Err(StoryError::NoPlotTropes);
    }
    let filter = RedundancyFilter::new(platform_text);
    let mut pool = Vec::with_capacity(plot.len());
    let mut filtered_out = Vec::new();
    for name in plot {
        let decision = filter.check(name);
        if decision.keep {
            pool.push(trope_doc_id(name));
        } else {
            filtered_out.push(FilteredTrope {
                name: name.to_string(),
                shared: decision.shared,
            });
        }
    }
    if pool.is_empty() {
        return Err(StoryError::EmptyTiltPool);
    }
    let candidates = nearest_documents(embedder, query, &pool, n)?
        .into_iter()
        .map(|nb| TiltCandidate {
            name: nb.doc_id[TROPE_PREFIX.len()..].to_string(),
            distance: nb.distance,
        })
        .collect();
    Ok((candidates, filtered_out))
}

/// Picks a tilt uniformly from the five nearest surviving plot tropes.
pub fn select_tilt<E: Embedder + ?Sized, R: Rng + ?Sized>(
    embedder: &E,
    corpus: &TropeCorpus,
    query: &[f32],
    platform_text: &str,
    rng: &mut R,
) -> Result<TiltResult, StoryError> {
    let (candidates, filtered_out) = tilt_candidates(embedder, corpus, query, platform_text, TILT_CANDIDATES)?;
    let chosen = candidates[rng.random_range(0..candidates.len())].name.clone();
    Ok(TiltResult {
        chosen,
        candidates,
        filtered_out,
    })
}
