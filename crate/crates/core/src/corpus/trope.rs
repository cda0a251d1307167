use std::collections::{BTreeMap, BTreeSet};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::CorpusError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trope {
    pub name: String,
    pub description: String,
    pub links: BTreeSet<String>,
    pub is_plot_trope: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TropeRecord {
    pub name: String,
    pub description: String,
    #[serde(default)]
    pub links: Vec<String>,
    #[serde(default)]
    pub plot: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TropeCorpusJson {
    pub tropes: Vec<TropeRecord>,
}

/// A link that named a trope absent from the corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DanglingLink {
    pub from: String,
    pub to: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadReport {
    pub dropped_links: Vec<DanglingLink>,
}

impl LoadReport {
    pub fn dropped_count(&self) -> usize {
        self.dropped_links.len()
    }
}

/// Tropes keyed by name plus the undirected link graph between them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TropeCorpus {
    tropes: IndexMap<String, Trope>,
    link_graph: BTreeMap<String, BTreeSet<String>>,
}

impl TropeCorpus {
    pub fn from_json(source: &str) -> Result<(Self, LoadReport), CorpusError> {
        let value: serde_json::Value = serde_json::from_str(source)?;
        let records = value
            .get("tropes")
            .and_then(|t| t.as_array())
            .ok_or_else(|| CorpusError::MalformedTrope {
                index: None,
                message: "expected an object with a \"tropes\" array".into(),
            })?;
        let mut parsed = Vec::with_capacity(records.len());
        for (i, rec) in records.iter().enumerate() {
            let r: TropeRecord =
                serde_json::from_value(rec.clone()).map_err(|e| CorpusError::MalformedTrope {
                    index: Some(i),
                    message: e.to_string(),
                })?;
            parsed.push(r);
        }
        Self::from_records(parsed)
    }

    pub fn from_records(records: Vec<TropeRecord>) -> Result<(Self, LoadReport), CorpusError> {
        let mut tropes: IndexMap<String, Trope> = IndexMap::with_capacity(records.len());
        for (i, r) in records.iter().enumerate() {
            if r.name.trim().is_empty() {
                return Err(CorpusError::MalformedTrope {
                    index: Some(i),
                    message: "trope name is empty".into(),
                });
            }
            if tropes.contains_key(&r.name) {
                return Err(CorpusError::DuplicateTrope(r.name.clone()));
            }
            tropes.insert(
                r.name.clone(),
                Trope {
                    name: r.name.clone(),
                    description: r.description.clone(),
                    links: BTreeSet::new(),
                    is_plot_trope: r.plot,
                },
            );
        }

        let mut report = LoadReport::default();
        for r in &records {
            for link in &r.links {
                if tropes.contains_key(link) {
                    tropes[&r.name].links.insert(link.clone());
                } else {
                    report.dropped_links.push(DanglingLink {
                        from: r.name.clone(),
                        to: link.clone(),
                    });
                }
            }
        }

        let link_graph = build_link_graph(&tropes);
        Ok((Self { tropes, link_graph }, report))
    }

    pub fn to_json_doc(&self) -> TropeCorpusJson {
        TropeCorpusJson {
            tropes: self
                .tropes
                .values()
                .map(|t| TropeRecord {
                    name: t.name.clone(),
                    description: t.description.clone(),
                    links: t.links.iter().cloned().collect(),
                    plot: t.is_plot_trope,
                })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.tropes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tropes.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&Trope> {
        self.tropes.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.tropes.contains_key(name)
    }

    pub fn tropes(&self) -> impl ExactSizeIterator<Item = &Trope> {
        self.tropes.values()
    }

    /// Undirected neighbours of `name`; empty for unknown names.
    pub fn neighbours(&self, name: &str) -> impl Iterator<Item = &str> {
        self.link_graph
            .get(name)
            .into_iter()
            .flat_map(|s| s.iter().map(String::as_str))
    }

    pub fn link_graph(&self) -> &BTreeMap<String, BTreeSet<String>> {
        &self.link_graph
    }

    /// Names flagged as plot tropes, in corpus order. These form the tilt pool.
    pub fn plot_trope_subset(&self) -> Vec<&str> {
        self.tropes
            .values()
            .filter(|t| t.is_plot_trope)
            .map(|t| t.name.as_str())
            .collect()
    }

    /// The corpus restricted to plot tropes, with links between them kept.
    pub fn plot_subcorpus(&self) -> TropeCorpus {
        let tropes: IndexMap<String, Trope> = self
            .tropes
            .values()
            .filter(|t| t.is_plot_trope)
            .map(|t| {
                let mut t = t.clone();
                t.links.retain(|l| self.tropes.get(l).is_some_and(|o| o.is_plot_trope));
                (t.name.clone(), t)
            })
            .collect();
        let link_graph = build_link_graph(&tropes);
        TropeCorpus { tropes, link_graph }
    }
}

fn build_link_graph(tropes: &IndexMap<String, Trope>) -> BTreeMap<String, BTreeSet<String>> {
    let mut graph: BTreeMap<String, BTreeSet<String>> =
        tropes.keys().map(|k| (k.clone(), BTreeSet::new())).collect();
    for t in tropes.values() {
        for l in &t.links {
            graph.get_mut(&t.name).unwrap().insert(l.clone());
            graph.get_mut(l).unwrap().insert(t.name.clone());
        }
    }
    graph
}
