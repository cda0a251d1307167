//! Tilt retrieval accuracy against labelled fragment/trope pairs, and
//! link-graph distances between predicted and annotated tropes.

mod linkdist;
mod stats;

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::TropeCorpus;
use crate::embedding::{Embedder, EmbeddingError};
use crate::story::{tilt_candidates, StoryError, TiltCandidate};

pub use linkdist::{distances_from, trope_link_distance};
pub use stats::{baseline_stats, distance_stats, DistanceStats};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("unknown trope {0:?}")]
    UnknownTrope(String),
    #[error("every pair was excluded as an exact match")]
    AllPairsExcluded,
    #[error("no pair has a defined link distance")]
    NoReachablePairs,
    #[error("no pairs to evaluate")]
    NoPairs,
    #[error("pairs file line {line}: {message}")]
    Dataset { line: usize, message: String },
    #[error(transparent)]
    Story(#[from] StoryError),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One annotated example. Stored as one JSON object per line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelledPair {
    pub fragment_id: String,
    pub fragment_text: String,
    pub gold_trope: String,
}

pub fn parse_pairs(source: &str) -> Result<Vec<LabelledPair>, EvalError> {
    let mut out = Vec::new();
    for (i, line) in source.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let pair = serde_json::from_str(line).map_err(|e| EvalError::Dataset {
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(pair);
    }
    Ok(out)
}

pub fn load_pairs(path: &Path) -> Result<Vec<LabelledPair>, EvalError> {
    parse_pairs(&std::fs::read_to_string(path)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MissReason {
    /// Gold trope ranked outside the top n.
    NotRetrieved,
    /// Gold trope was removed by the redundancy filter.
    Filtered,
    /// Gold trope is not a plot trope, so never a tilt candidate.
    NotPlotTrope,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub fragment_id: String,
    pub gold: String,
    pub predicted: Vec<TiltCandidate>,
    /// 1-based rank of the gold trope, `None` on a miss.
    pub hit_rank: Option<usize>,
    pub miss_reason: Option<MissReason>,
    /// Link distance from the top prediction to the gold trope when they
    /// differ; `None` also covers unreachable.
    pub link_distance: Option<usize>,
    pub low_confidence: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectedPair {
    pub fragment_id: String,
    pub gold: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub schema_version: u32,
    pub n: usize,
    pub evaluated: usize,
    pub top1_error: f64,
    pub topn_error: f64,
    pub records: Vec<PairRecord>,
    pub rejected: Vec<RejectedPair>,
    /// Distances between top-1 prediction and gold, exact matches excluded.
    pub distance_stats: Option<DistanceStats>,
    pub baseline: Option<DistanceStats>,
}

/// Runs the tilt candidate computation on each pair's fragment text and
/// scores whether the gold trope is among the top `n`.
pub fn evaluate_topn<E: Embedder + ?Sized>(
    embedder: &E,
    corpus: &TropeCorpus,
    pairs: &[LabelledPair],
    n: usize,
) -> Result<EvalReport, EvalError> {
    if pairs.is_empty() || n == 0 {
        return Err(EvalError::NoPairs);
    }
    let mut records = Vec::with_capacity(pairs.len());
    let mut rejected = Vec::new();
    for pair in pairs {
        let Some(gold) = corpus.get(&pair.gold_trope) else {
            rejected.push(RejectedPair {
                fragment_id: pair.fragment_id.clone(),
                gold: pair.gold_trope.clone(),
                reason: "gold trope not in corpus".into(),
            });
            continue;
        };
        let inferred = embedder.infer_text(&pair.fragment_text)?;
        let (predicted, filtered) =
            match tilt_candidates(embedder, corpus, &inferred.vector, &pair.fragment_text, n) {
                Ok(r) => r,
                Err(StoryError::EmptyTiltPool) => (Vec::new(), Vec::new()),
                Err(e) => return Err(e.into()),
            };
        let hit_rank = predicted.iter().position(|c| c.name == gold.name).map(|i| i + 1);
        let miss_reason = match hit_rank {
            Some(_) => None,
            None if !gold.is_plot_trope => Some(MissReason::NotPlotTrope),
            None if filtered.iter().any(|f| f.name == gold.name) || predicted.is_empty() => {
                Some(MissReason::Filtered)
            }
            None => Some(MissReason::NotRetrieved),
        };
        let link_distance = match predicted.first() {
            Some(top) if top.name != gold.name => trope_link_distance(corpus, &top.name, &gold.name)?,
            _ => None,
        };
        records.push(PairRecord {
            fragment_id: pair.fragment_id.clone(),
            gold: gold.name.clone(),
            predicted,
            hit_rank,
            miss_reason,
            link_distance,
            low_confidence: inferred.low_confidence,
        });
    }
    if records.is_empty() {
        return Err(EvalError::NoPairs);
    }

    let total = records.len() as f64;
    let top1_misses = records.iter().filter(|r| r.hit_rank != Some(1)).count();
    let topn_misses = records.iter().filter(|r| r.hit_rank.is_none()).count();
    let top1_pairs: Vec<(String, String)> = records
        .iter()
        .filter_map(|r| r.predicted.first().map(|p| (p.name.clone(), r.gold.clone())))
        .collect();
    let distance_stats = if top1_pairs.is_empty() {
        None
    } else {
        match distance_stats(corpus, &top1_pairs, true) {
            Ok(s) => Some(s),
            Err(EvalError::AllPairsExcluded | EvalError::NoReachablePairs) => None,
            Err(e) => return Err(e),
        }
    };

    Ok(EvalReport {
        schema_version: REPORT_SCHEMA_VERSION,
        n,
        evaluated: records.len(),
        top1_error: top1_misses as f64 / total,
        topn_error: topn_misses as f64 / total,
        records,
        rejected,
        distance_stats,
        baseline: None,
    })
}

/// Recomputes link distances and their statistics over `links`, typically
/// the plot-trope subgraph. Pairs with a trope outside `links` count as
/// unreachable.
pub fn relink(report: &mut EvalReport, links: &TropeCorpus) -> Result<(), EvalError> {
    let mut inside = Vec::new();
    let mut outside = 0;
    for r in &mut report.records {
        r.link_distance = None;
        let Some(top) = r.predicted.first() else { continue };
        if links.contains(&top.name) && links.contains(&r.gold) {
            if top.name != r.gold {
                r.link_distance = trope_link_distance(links, &top.name, &r.gold)?;
            }
            inside.push((top.name.clone(), r.gold.clone()));
        } else {
            outside += 1;
        }
    }
    report.distance_stats = if inside.is_empty() {
        None
    } else {
        match distance_stats(links, &inside, true) {
            Ok(mut s) => {
                s.pairs += outside;
                s.unreachable += outside;
                Some(s)
            }
            Err(EvalError::AllPairsExcluded | EvalError::NoReachablePairs) => None,
            Err(e) => return Err(e),
        }
    };
    Ok(())
}
