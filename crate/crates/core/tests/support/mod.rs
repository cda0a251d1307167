#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::OnceLock;

use dairector_core::corpus::{load_plot_corpus, load_trope_corpus, PlotGraph, SymbolAlphabet, TropeCorpus};
use dairector_core::embedding::{train, training_docs, TokenizedDoc};
use dairector_core::{EmbeddingModel, TrainingConfig};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

pub fn three_node() -> PlotGraph {
    load_plot_corpus(&data("three_node.plotto"), SymbolAlphabet::default()).unwrap()
}

pub fn excerpt() -> PlotGraph {
    load_plot_corpus(&data("plotto_excerpt.plotto"), SymbolAlphabet::default()).unwrap()
}

pub fn tropes() -> TropeCorpus {
    load_trope_corpus(&data("tropes.json")).unwrap().0
}

pub fn fixture_docs() -> Vec<TokenizedDoc> {
    training_docs(&excerpt(), &tropes()).unwrap()
}

/// Model over the fixture corpora with default settings, trained once per test binary.
pub fn fixture_model() -> &'static EmbeddingModel {
    static MODEL: OnceLock<EmbeddingModel> = OnceLock::new();
    MODEL.get_or_init(|| train(&fixture_docs(), &TrainingConfig::default()).unwrap())
}

/// Three topics with disjoint vocabularies, `per_cluster` documents each.
/// Returns the docs and each doc's cluster.
pub fn clustered_corpus(per_cluster: usize, seed: u64) -> (Vec<TokenizedDoc>, Vec<usize>) {
    const TOPICS: [&[&str]; 3] = [
        &[
            "ship", "sail", "storm", "harbour", "captain", "anchor", "wave", "mast", "crew", "island", "tide",
            "compass", "deck", "rope", "gull", "reef", "lantern", "voyage",
        ],
        &[
            "court", "judge", "prison", "witness", "verdict", "lawyer", "trial", "evidence", "guilty", "cell",
            "guard", "jury", "appeal", "sentence", "warden", "alibi", "bail", "oath",
        ],
        &[
            "wedding", "bride", "ring", "dance", "kiss", "lover", "letter", "garden", "rose", "waltz", "veil",
            "suitor", "vow", "sweetheart", "chapel", "bouquet", "ballroom", "promise",
        ],
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut docs = Vec::new();
    let mut labels = Vec::new();
    for (c, words) in TOPICS.iter().enumerate() {
        for i in 0..per_cluster {
            let len = rng.random_range(25..40);
            let mut tokens: Vec<String> = (0..len).map(|_| words[rng.random_range(0..words.len())].to_string()).collect();
            tokens.shuffle(&mut rng);
            docs.push(TokenizedDoc::new(format!("c{c}:{i}"), tokens).unwrap());
            labels.push(c);
        }
    }
    (docs, labels)
}
