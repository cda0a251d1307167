use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{distances_from, EvalError};
use crate::corpus::TropeCorpus;

/// Moments of link distances. Unreachable pairs are counted, not averaged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceStats {
    pub pairs: usize,
    pub excluded_exact: usize,
    pub unreachable: usize,
    pub count: usize,
    pub median: f64,
    pub mean: f64,
    /// Population standard deviation.
    pub stddev: f64,
}

fn summarize(distances: &mut [usize]) -> (f64, f64, f64) {
    distances.sort_unstable();
    let n = distances.len();
    let median = if n % 2 == 1 {
        distances[n / 2] as f64
    } else {
        (distances[n / 2 - 1] + distances[n / 2]) as f64 / 2.0
    };
    let mean = distances.iter().sum::<usize>() as f64 / n as f64;
    let var = distances.iter().map(|&d| (d as f64 - mean).powi(2)).sum::<f64>() / n as f64;
    (median, mean, var.sqrt())
}

/// Link-distance statistics over `(predicted, gold)` pairs.
pub fn distance_stats(
    corpus: &TropeCorpus,
    pairs: &[(String, String)],
    exclude_exact: bool,
) -> Result<DistanceStats, EvalError> {
    let mut cache: HashMap<&str, HashMap<&str, usize>> = HashMap::new();
    let mut distances = Vec::with_capacity(pairs.len());
    let mut excluded_exact = 0;
    let mut unreachable = 0;
    for (predicted, gold) in pairs {
        for name in [predicted, gold] {
            if !corpus.contains(name) {
                return Err(EvalError::UnknownTrope(name.clone()));
            }
        }
        if exclude_exact && predicted == gold {
            excluded_exact += 1;
            continue;
        }
        if !cache.contains_key(predicted.as_str()) {
            cache.insert(predicted.as_str(), distances_from(corpus, predicted)?);
        }
        match cache[predicted.as_str()].get(gold.as_str()) {
            Some(&d) => distances.push(d),
            None => unreachable += 1,
        }
    }
    if excluded_exact == pairs.len() {
        return Err(EvalError::AllPairsExcluded);
    }
    if distances.is_empty() {
        return Err(EvalError::NoReachablePairs);
    }
    let (median, mean, stddev) = summarize(&mut distances);
    Ok(DistanceStats {
        pairs: pairs.len(),
        excluded_exact,
        unreachable,
        count: distances.len(),
        median,
        mean,
        stddev,
    })
}

/// The same statistics over `samples` uniformly drawn pairs of distinct tropes.
pub fn baseline_stats<R: Rng + ?Sized>(
    corpus: &TropeCorpus,
    samples: usize,
    rng: &mut R,
) -> Result<DistanceStats, EvalError> {
    let names: Vec<&str> = corpus.tropes().map(|t| t.name.as_str()).collect();
    if names.len() < 2 || samples == 0 {
        return Err(EvalError::NoPairs);
    }
    let pairs: Vec<(String, String)> = (0..samples)
        .map(|_| {
            let a = rng.random_range(0..names.len());
            let mut b = rng.random_range(0..names.len() - 1);
            if b >= a {
                b += 1;
            }
            (names[a].to_string(), names[b].to_string())
        })
        .collect();
    distance_stats(corpus, &pairs, false)
}
