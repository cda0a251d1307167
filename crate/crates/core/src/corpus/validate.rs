use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::PlotGraph;

/// A substitution whose `old` symbol never appears in the edge's target fragment.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SubstitutionWarning {
    pub from: String,
    pub to: String,
    pub symbol: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub fragments: usize,
    pub edges: usize,
    /// Fragments with in-degree zero.
    pub roots: Vec<String>,
    /// Fragments not reachable from any root. Pure cycles count here.
    pub unreachable: usize,
    pub terminal: Vec<String>,
    pub warnings: Vec<SubstitutionWarning>,
}

/// Structural report over a parsed graph. Never fails.
pub fn validate_graph(graph: &PlotGraph) -> ValidationReport {
    let mut in_degree: indexmap::IndexMap<&str, usize> =
        graph.fragments().map(|f| (f.id.as_str(), 0)).collect();
    for e in graph.edges() {
        in_degree[e.to.as_str()] += 1;
    }
    let roots: Vec<String> = in_degree
        .iter()
        .filter(|(_, &d)| d == 0)
        .map(|(id, _)| id.to_string())
        .collect();

    let mut seen: BTreeSet<&str> = BTreeSet::new();
    let mut queue: VecDeque<&str> = VecDeque::new();
    for r in &roots {
        if seen.insert(r.as_str()) {
            queue.push_back(r.as_str());
        }
    }
    while let Some(id) = queue.pop_front() {
        for e in graph.successors(id) {
            if seen.insert(e.to.as_str()) {
                queue.push_back(e.to.as_str());
            }
        }
    }

    let terminal = graph
        .fragments()
        .filter(|f| graph.is_terminal(&f.id))
        .map(|f| f.id.clone())
        .collect();

    let mut warnings = Vec::new();
    for e in graph.edges() {
        let target = graph.fragment(&e.to).expect("edges resolve");
        for s in &e.substitutions {
            if !target.symbols.contains(&s.old) {
                warnings.push(SubstitutionWarning {
                    from: e.from.clone(),
                    to: e.to.clone(),
                    symbol: s.old.clone(),
                });
            }
        }
    }

    let unreachable = graph.len() - seen.len();
    ValidationReport {
        fragments: graph.len(),
        edges: graph.edges().len(),
        roots,
        unreachable,
        terminal,
        warnings,
    }
}
