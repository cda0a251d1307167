use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::StoryError;

/// Display names for character symbols. Names are non-empty and distinct.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct NameMap(BTreeMap<String, String>);

impl NameMap {
    pub fn new(map: BTreeMap<String, String>) -> Result<Self, StoryError> {
        let mut seen = BTreeSet::new();
        for (symbol, name) in &map {
            if name.trim().is_empty() {
                return Err(StoryError::InvalidNames(format!("empty name for {symbol:?}")));
            }
            if !seen.insert(name.as_str()) {
                return Err(StoryError::InvalidNames(format!("name {name:?} is used twice")));
            }
        }
        Ok(Self(map))
    }

    pub fn empty() -> Self {
        Self(BTreeMap::new())
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<Self, StoryError> {
        Self::new(pairs.into_iter().map(|(a, b)| (a.to_string(), b.to_string())).collect())
    }

    /// Flat JSON object, e.g. `{"A": "Alfred", "B": "Beatrice"}`.
    pub fn from_json(source: &str) -> Result<Self, StoryError> {
        let map: BTreeMap<String, String> =
            serde_json::from_str(source).map_err(|e| StoryError::InvalidNames(e.to_string()))?;
        Self::new(map)
    }

    pub fn load(path: &Path) -> Result<Self, StoryError> {
        let s = std::fs::read_to_string(path)
            .map_err(|e| StoryError::InvalidNames(format!("{}: {e}", path.display())))?;
        Self::from_json(&s)
    }

    pub fn get(&self, symbol: &str) -> Option<&str> {
        self.0.get(symbol).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(a, b)| (a.as_str(), b.as_str()))
    }
}

impl Default for NameMap {
    fn default() -> Self {
        Self::from_pairs([
            ("A", "Alfred"),
            ("B", "Beatrice"),
            ("AUX", "Aunt Augusta"),
            ("BX", "Barnaby"),
            ("AX", "Adelaide"),
            ("CN", "Cornelius"),
            ("SR", "the Stranger"),
        ])
        .expect("default names are valid")
    }
}

impl<'de> Deserialize<'de> for NameMap {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let map = BTreeMap::<String, String>::deserialize(d)?;
        NameMap::new(map).map_err(serde::de::Error::custom)
    }
}
