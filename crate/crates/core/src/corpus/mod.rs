//! Plot-fragment graph and trope corpus ingestion.

mod dsl;
mod plot;
mod symbols;
mod trope;
mod validate;

use std::path::Path;

use thiserror::Error;

pub use dsl::parse_plotto;
pub use plot::{
    FragmentJson, PlotCorpusJson, PlotFragment, PlotGraph, Substitution, SubstitutionEdge,
};
pub use symbols::SymbolAlphabet;
pub use trope::{DanglingLink, LoadReport, Trope, TropeCorpus, TropeCorpusJson, TropeRecord};
pub use validate::{validate_graph, SubstitutionWarning, ValidationReport};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("no fragments")]
    NoFragments,
    #[error("empty fragment id{}", at_line(*.line))]
    EmptyFragmentId { line: Option<usize> },
    #[error("duplicate fragment id {id:?}{}", at_line(*.line))]
    DuplicateFragment { id: String, line: Option<usize> },
    #[error("edge {from:?} -> {to:?} references unknown fragment {id:?}{}", at_line(*.line))]
    UnknownFragment {
        id: String,
        from: String,
        to: String,
        line: Option<usize>,
    },
    #[error("edge {from:?} -> {to:?} substitutes {symbol:?} more than once{}", at_line(*.line))]
    DuplicateSubstitution {
        symbol: String,
        from: String,
        to: String,
        line: Option<usize>,
    },
    #[error("malformed trope record{}: {message}", .index.map(|i| format!(" #{i}")).unwrap_or_default())]
    MalformedTrope {
        index: Option<usize>,
        message: String,
    },
    #[error("duplicate trope name {0:?}")]
    DuplicateTrope(String),
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn at_line(line: Option<usize>) -> String {
    line.map(|l| format!(" (line {l})")).unwrap_or_default()
}

fn read(path: &Path) -> Result<String, CorpusError> {
    std::fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Loads a plot corpus, choosing JSON for `.json` files and the DSL otherwise.
pub fn load_plot_corpus(path: &Path, alphabet: SymbolAlphabet) -> Result<PlotGraph, CorpusError> {
    let source = read(path)?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        PlotGraph::from_json(&source, alphabet)
    } else {
        parse_plotto(&source, alphabet)
    }
}

pub fn load_trope_corpus(path: &Path) -> Result<(TropeCorpus, LoadReport), CorpusError> {
    TropeCorpus::from_json(&read(path)?)
}
