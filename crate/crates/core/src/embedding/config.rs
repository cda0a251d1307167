use serde::{Deserialize, Serialize};

use super::EmbeddingError;

/// Paragraph-vector (PV-DM, mean combination) training knobs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingConfig {
    pub dim: usize,
    pub initial_lr: f64,
    /// Learning-rate floor reached at the end of training.
    pub min_lr: f64,
    /// Context words taken on each side of the predicted word. Not randomized.
    pub window: usize,
    pub min_count: u64,
    pub negative_samples: usize,
    /// Exponent applied to unigram counts for the noise distribution.
    pub unigram_exponent: f64,
    /// Frequent-word downsampling threshold; 0 disables it.
    pub sample: f64,
    pub epochs: usize,
    /// Passes over a single document when inferring a new vector.
    pub infer_epochs: usize,
    pub seed: u64,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self {
            dim: 410,
            initial_lr: 0.03,
            min_lr: 1e-4,
            window: 4,
            min_count: 2,
            negative_samples: 4,
            unigram_exponent: 0.75,
            sample: 0.0,
            epochs: 100,
            infer_epochs: 100,
            seed: 1,
        }
    }
}

impl TrainingConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_epochs(mut self, epochs: usize) -> Self {
        self.epochs = epochs;
        self.infer_epochs = epochs;
        self
    }

    pub fn validate(&self) -> Result<(), EmbeddingError> {
        let bad = |m: &str| Err(EmbeddingError::InvalidConfig(m.to_string()));
        if self.dim == 0 {
            return bad("dim must be positive");
        }
        if self.window == 0 {
            return bad("window must be at least 1");
        }
        if self.negative_samples == 0 {
            return bad("negative_samples must be at least 1");
        }
        if !(self.initial_lr > 0.0 && self.initial_lr.is_finite()) {
            return bad("initial_lr must be positive");
        }
        if !(self.min_lr >= 0.0 && self.min_lr <= self.initial_lr) {
            return bad("min_lr must lie in [0, initial_lr]");
        }
        if self.epochs == 0 || self.infer_epochs == 0 {
            return bad("epochs must be at least 1");
        }
        if self.min_count == 0 {
            return bad("min_count must be at least 1");
        }
        if !(self.unigram_exponent.is_finite() && self.unigram_exponent >= 0.0) {
            return bad("unigram_exponent must be non-negative");
        }
        if !(self.sample.is_finite() && self.sample >= 0.0) {
            return bad("sample must be non-negative");
        }
        Ok(())
    }
}
