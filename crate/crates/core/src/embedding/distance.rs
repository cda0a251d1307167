use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::{Embedder, EmbeddingError};

/// `1 - a·b / (|a||b|)`, clamped to `[0, 2]`, with a flag set when either
/// vector has zero norm (the distance is then defined as 1).
pub fn cosine_distance_flagged(a: &[f32], b: &[f32]) -> (f64, bool) {
    assert_eq!(a.len(), b.len(), "cosine distance on vectors of different length");
    let mut dot = 0.0f64;
    let mut aa = 0.0f64;
    let mut bb = 0.0f64;
    for (&x, &y) in a.iter().zip(b) {
        let (x, y) = (x as f64, y as f64);
        dot += x * y;
        aa += x * x;
        bb += y * y;
    }
    if aa == 0.0 || bb == 0.0 {
        return (1.0, true);
    }
    // sqrt(aa * bb) rather than sqrt(aa) * sqrt(bb) keeps d(x, x) exactly 0.
    let d = 1.0 - dot / (aa * bb).sqrt();
    (d.clamp(0.0, 2.0), false)
}

pub fn cosine_distance(a: &[f32], b: &[f32]) -> f64 {
    cosine_distance_flagged(a, b).0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Neighbour {
    pub doc_id: String,
    pub distance: f64,
}

struct Ranked<'a> {
    distance: f64,
    doc_id: &'a str,
}

impl Ord for Ranked<'_> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.distance
            .total_cmp(&other.distance)
            .then_with(|| self.doc_id.cmp(other.doc_id))
    }
}

impl PartialOrd for Ranked<'_> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Ranked<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Ranked<'_> {}

/// The `n` pool members closest to `query`, ascending by distance and then
/// by doc id. Keeps a bounded max-heap, so the pool is scanned once.
pub fn nearest_documents<E, S>(
    embedder: &E,
    query: &[f32],
    pool: &[S],
    n: usize,
) -> Result<Vec<Neighbour>, EmbeddingError>
where
    E: Embedder + ?Sized,
    S: AsRef<str>,
{
    if pool.is_empty() {
        return Err(EmbeddingError::EmptyPool);
    }
    if n == 0 {
        return Err(EmbeddingError::InvalidConfig("n must be at least 1".into()));
    }
    let mut heap: BinaryHeap<Ranked<'_>> = BinaryHeap::with_capacity(n + 1);
    for id in pool {
        let id = id.as_ref();
        let v = embedder
            .doc_vector(id)
            .ok_or_else(|| EmbeddingError::UnknownDocument(id.to_string()))?;
        let r = Ranked {
            distance: cosine_distance(query, v),
            doc_id: id,
        };
        if heap.len() < n {
            heap.push(r);
        } else if r < *heap.peek().expect("heap is full") {
            heap.pop();
            heap.push(r);
        }
    }
    Ok(heap
        .into_sorted_vec()
        .into_iter()
        .map(|r| Neighbour {
            doc_id: r.doc_id.to_string(),
            distance: r.distance,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::StaticEmbedder;

    #[test]
    fn formula_identities() {
        let a = [0.3f32, -1.2, 4.0];
        assert_eq!(cosine_distance(&a, &a), 0.0);
        assert!((cosine_distance(&[1.0, 0.0], &[0.0, 1.0]) - 1.0).abs() < 1e-15);
        assert!((cosine_distance(&[1.0, 0.0], &[-1.0, 0.0]) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn zero_norm_is_flagged() {
        assert_eq!(cosine_distance_flagged(&[0.0, 0.0], &[1.0, 2.0]), (1.0, true));
        assert_eq!(cosine_distance_flagged(&[1.0, 2.0], &[0.0, 0.0]), (1.0, true));
        assert!(!cosine_distance_flagged(&[1.0, 2.0], &[2.0, 1.0]).1);
    }

    fn store() -> StaticEmbedder {
        let mut e = StaticEmbedder::new(2);
        e.insert("c", vec![1.0, 0.0]);
        e.insert("a", vec![0.0, 1.0]);
        e.insert("b", vec![0.0, 2.0]);
        e
    }

    #[test]
    fn self_query_first_and_ties_by_id() {
        let e = store();
        let got = nearest_documents(&e, &[0.0, 1.0], &["c", "b", "a"], 2).unwrap();
        assert_eq!(got[0].doc_id, "a");
        assert_eq!(got[0].distance, 0.0);
        assert_eq!(got[1].doc_id, "b");
    }

    #[test]
    fn small_pool_returns_all() {
        let e = store();
        let got = nearest_documents(&e, &[1.0, 0.0], &["a", "b", "c"], 5).unwrap();
        assert_eq!(got.len(), 3);
        assert_eq!(got[0].doc_id, "c");
    }

    #[test]
    fn errors() {
        let e = store();
        let empty: [&str; 0] = [];
        assert!(matches!(nearest_documents(&e, &[1.0, 0.0], &empty, 5), Err(EmbeddingError::EmptyPool)));
        assert!(matches!(
            nearest_documents(&e, &[1.0, 0.0], &["zzz"], 5),
            Err(EmbeddingError::UnknownDocument(_))
        ));
    }
}
