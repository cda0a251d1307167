use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::Substitution;

/// A total symbol-to-symbol function; symbols without an entry map to themselves.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SubstitutionMap(BTreeMap<String, String>);

impl SubstitutionMap {
    pub fn identity() -> Self {
        Self::default()
    }

    /// The map described by one edge label. Clauses act simultaneously, so
    /// `ch A to B, ch B to A` swaps the two symbols.
    pub fn from_edge(subs: &[Substitution]) -> Self {
        Self(
            subs.iter()
                .filter(|s| s.old != s.new)
                .map(|s| (s.old.clone(), s.new.clone()))
                .collect(),
        )
    }

    pub fn apply<'a>(&'a self, symbol: &'a str) -> &'a str {
        self.0.get(symbol).map_or(symbol, String::as_str)
    }

    /// `s -> outer(inner(s))`.
    ///
    /// A fragment reached through edges e1 .. ek from the root is read in
    /// the root's frame by applying ek first and e1 last, so a child's map is
    /// `compose(edge, parent)`.
    pub fn compose(inner: &Self, outer: &Self) -> Self {
        let mut out = BTreeMap::new();
        for s in inner.0.keys().chain(outer.0.keys()) {
            let image = outer.apply(inner.apply(s));
            if image != s {
                out.insert(s.clone(), image.to_string());
            }
        }
        Self(out)
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(a, b)| (a.as_str(), b.as_str()))
    }
}
