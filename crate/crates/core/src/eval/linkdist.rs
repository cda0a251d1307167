use std::collections::{HashMap, VecDeque};

use super::EvalError;
use crate::corpus::TropeCorpus;

/// Hop counts from `source` to every trope reachable in the undirected link graph.
pub fn distances_from<'c>(corpus: &'c TropeCorpus, source: &str) -> Result<HashMap<&'c str, usize>, EvalError> {
    let start = corpus
        .get(source)
        .ok_or_else(|| EvalError::UnknownTrope(source.to_string()))?;
    let mut dist: HashMap<&str, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    dist.insert(start.name.as_str(), 0);
    queue.push_back(start.name.as_str());
    while let Some(u) = queue.pop_front() {
        let d = dist[u];
        for v in corpus.neighbours(u) {
            if !dist.contains_key(v) {
                dist.insert(v, d + 1);
                queue.push_back(v);
            }
        }
    }
    Ok(dist)
}

/// Shortest-path hop count between two tropes, `None` if unreachable.
pub fn trope_link_distance(corpus: &TropeCorpus, a: &str, b: &str) -> Result<Option<usize>, EvalError> {
    if !corpus.contains(b) {
        return Err(EvalError::UnknownTrope(b.to_string()));
    }
    if a == b {
        return if corpus.contains(a) {
            Ok(Some(0))
        } else {
            Err(EvalError::UnknownTrope(a.to_string()))
        };
    }
    Ok(distances_from(corpus, a)?.get(b).copied())
}
