use std::collections::{BTreeMap, BTreeSet};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::{CorpusError, SymbolAlphabet};

/// A plot point: prose with symbolic character codes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlotFragment {
    pub id: String,
    pub text: String,
    pub symbols: BTreeSet<String>,
}

impl PlotFragment {
    pub fn new(id: impl Into<String>, text: impl Into<String>, alphabet: &SymbolAlphabet) -> Self {
        let text = text.into();
        let symbols = alphabet.extract(&text);
        Self {
            id: id.into(),
            text,
            symbols,
        }
    }
}

/// One "ch OLD to NEW" instruction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Substitution {
    pub old: String,
    pub new: String,
}

impl Substitution {
    pub fn new(old: impl Into<String>, new: impl Into<String>) -> Self {
        Self {
            old: old.into(),
            new: new.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubstitutionEdge {
    pub from: String,
    pub to: String,
    #[serde(rename = "subs", default)]
    pub substitutions: Vec<Substitution>,
}

/// Directed graph of plot fragments. Cycles are allowed.
///
/// Fragment order and per-node successor order follow the source, so two
/// parses of the same bytes compare equal, adjacency included.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlotGraph {
    fragments: IndexMap<String, PlotFragment>,
    edges: Vec<SubstitutionEdge>,
    /// fragment id -> indices into `edges`, in edge order.
    adjacency: IndexMap<String, Vec<usize>>,
    alphabet: SymbolAlphabet,
}

/// Canonical JSON form of a plot corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlotCorpusJson {
    pub fragments: Vec<FragmentJson>,
    #[serde(default)]
    pub edges: Vec<SubstitutionEdge>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FragmentJson {
    pub id: String,
    pub text: String,
}

/// A raw edge with the source line it came from, when known.
#[derive(Debug, Clone)]
pub(crate) struct PendingEdge {
    pub edge: SubstitutionEdge,
    pub line: Option<usize>,
}

impl PlotGraph {
    pub(crate) fn build(
        fragments: Vec<(String, String, Option<usize>)>,
        edges: Vec<PendingEdge>,
        alphabet: SymbolAlphabet,
    ) -> Result<Self, CorpusError> {
        if fragments.is_empty() {
            return Err(CorpusError::NoFragments);
        }
        let mut map = IndexMap::with_capacity(fragments.len());
        for (id, text, line) in fragments {
            if id.is_empty() {
                return Err(CorpusError::EmptyFragmentId { line });
            }
            if map.contains_key(&id) {
                return Err(CorpusError::DuplicateFragment { id, line });
            }
            let frag = PlotFragment::new(id.clone(), text, &alphabet);
            map.insert(id, frag);
        }

        let mut adjacency: IndexMap<String, Vec<usize>> =
            map.keys().map(|k| (k.clone(), Vec::new())).collect();
        let mut out = Vec::with_capacity(edges.len());
        for PendingEdge { edge, line } in edges {
            for end in [&edge.from, &edge.to] {
                if !map.contains_key(end) {
                    return Err(CorpusError::UnknownFragment {
                        id: end.clone(),
                        from: edge.from.clone(),
                        to: edge.to.clone(),
                        line,
                    });
                }
            }
            let mut seen = BTreeSet::new();
            for sub in &edge.substitutions {
                if !seen.insert(sub.old.as_str()) {
                    return Err(CorpusError::DuplicateSubstitution {
                        symbol: sub.old.clone(),
                        from: edge.from.clone(),
                        to: edge.to.clone(),
                        line,
                    });
                }
            }
            adjacency[&edge.from].push(out.len());
            out.push(edge);
        }

        Ok(Self {
            fragments: map,
            edges: out,
            adjacency,
            alphabet,
        })
    }

    /// Parses the canonical JSON representation.
    pub fn from_json(source: &str, alphabet: SymbolAlphabet) -> Result<Self, CorpusError> {
        let doc: PlotCorpusJson = serde_json::from_str(source)?;
        Self::from_json_doc(doc, alphabet)
    }

    pub fn from_json_doc(doc: PlotCorpusJson, alphabet: SymbolAlphabet) -> Result<Self, CorpusError> {
        let fragments = doc
            .fragments
            .into_iter()
            .map(|f| (f.id, f.text, None))
            .collect();
        let edges = doc
            .edges
            .into_iter()
            .map(|edge| PendingEdge { edge, line: None })
            .collect();
        Self::build(fragments, edges, alphabet)
    }

    pub fn to_json_doc(&self) -> PlotCorpusJson {
        PlotCorpusJson {
            fragments: self
                .fragments
                .values()
                .map(|f| FragmentJson {
                    id: f.id.clone(),
                    text: f.text.clone(),
                })
                .collect(),
            edges: self.edges.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_doc()).expect("plot corpus serializes")
    }

    pub fn alphabet(&self) -> &SymbolAlphabet {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.fragments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fragments.is_empty()
    }

    pub fn fragment(&self, id: &str) -> Option<&PlotFragment> {
        self.fragments.get(id)
    }

    pub fn fragments(&self) -> impl ExactSizeIterator<Item = &PlotFragment> {
        self.fragments.values()
    }

    pub fn edges(&self) -> &[SubstitutionEdge] {
        &self.edges
    }

    /// Outgoing edges of `id` in source order. Empty for unknown ids.
    pub fn successors<'a>(&'a self, id: &str) -> impl Iterator<Item = &'a SubstitutionEdge> + 'a {
        self.adjacency
            .get(id)
            .map(|v| v.as_slice())
            .unwrap_or(&[])
            .iter()
            .map(move |&i| &self.edges[i])
    }

    pub fn out_degree(&self, id: &str) -> usize {
        self.adjacency.get(id).map_or(0, Vec::len)
    }

    pub fn is_terminal(&self, id: &str) -> bool {
        self.out_degree(id) == 0
    }

    /// Fragments with at least one successor, in graph order.
    pub fn non_terminal_ids(&self) -> Vec<&str> {
        self.fragments
            .keys()
            .filter(|id| !self.is_terminal(id))
            .map(String::as_str)
            .collect()
    }

    /// Adjacency as fragment id -> successor ids, for inspection and tests.
    pub fn adjacency_ids(&self) -> BTreeMap<&str, Vec<&str>> {
        self.adjacency
            .iter()
            .map(|(k, v)| {
                (
                    k.as_str(),
                    v.iter().map(|&i| self.edges[i].to.as_str()).collect(),
                )
            })
            .collect()
    }
}
