use std::path::{Path, PathBuf};

use anyhow::{Context as _, Result};
use dairector_core::corpus::{load_plot_corpus, load_trope_corpus, LoadReport, PlotGraph, SymbolAlphabet, TropeCorpus};
use dairector_core::story::NameMap;
use dairector_core::{EmbeddingModel, Engine};

/// Files an engine is built from.
#[derive(Debug, Clone)]
pub struct ArtifactPaths {
    pub plot_corpus: PathBuf,
    pub trope_corpus: PathBuf,
    pub model: PathBuf,
}

pub fn load_plot(path: &Path) -> Result<PlotGraph> {
    load_plot_corpus(path, SymbolAlphabet::default())
        .with_context(|| format!("loading plot corpus {}", path.display()))
}

pub fn load_tropes(path: &Path) -> Result<(TropeCorpus, LoadReport)> {
    load_trope_corpus(path).with_context(|| format!("loading trope corpus {}", path.display()))
}

pub fn load_model(path: &Path) -> Result<EmbeddingModel> {
    EmbeddingModel::load(path).with_context(|| format!("loading model {}", path.display()))
}

/// Loads both corpora and the model and checks the model was trained on them.
pub fn load_engine(paths: &ArtifactPaths) -> Result<Engine> {
    let graph = load_plot(&paths.plot_corpus)?;
    let (tropes, report) = load_tropes(&paths.trope_corpus)?;
    if report.dropped_count() > 0 {
        eprintln!("warning: dropped {} dangling trope links", report.dropped_count());
    }
    let model = load_model(&paths.model)?;
    Engine::new(graph, tropes, model).context("model does not match the corpora")
}

/// The names file when given, built-in defaults otherwise.
pub fn load_names(path: Option<&Path>) -> Result<NameMap> {
    match path {
        Some(p) => NameMap::load(p).with_context(|| format!("loading names {}", p.display())),
        None => Ok(NameMap::default()),
    }
}
