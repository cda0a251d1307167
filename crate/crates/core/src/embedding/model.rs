use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use super::{
    corpus_hash, tokenize, Embedder, EmbeddingError, Inferred, TokenizedDoc, TrainingConfig, Vocab,
};

/// Trained paragraph-vector model. Immutable after training; all vectors
/// share one dimensionality.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingModel {
    pub(crate) config: TrainingConfig,
    pub(crate) vocab: Vocab,
    pub(crate) doc_ids: Vec<String>,
    pub(crate) doc_index: HashMap<String, usize>,
    pub(crate) doc_vectors: Vec<f32>,
    pub(crate) word_vectors: Vec<f32>,
    pub(crate) output_weights: Vec<f32>,
    pub(crate) corpus_hash: String,
    pub(crate) epoch_losses: Vec<f64>,
    pub(crate) noise: NoiseTable,
    pub(crate) keep: Vec<f64>,
}

/// Cumulative unigram^exponent weights for negative sampling.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct NoiseTable {
    cumulative: Vec<f64>,
}

impl NoiseTable {
    pub(crate) fn new(counts: &[u64], exponent: f64) -> Self {
        let mut acc = 0.0;
        let cumulative = counts
            .iter()
            .map(|&c| {
                acc += (c as f64).powf(exponent);
                acc
            })
            .collect();
        Self { cumulative }
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> u32 {
        let total = *self.cumulative.last().expect("non-empty vocabulary");
        let u = rng.random::<f64>() * total;
        let i = self.cumulative.partition_point(|&c| c <= u);
        i.min(self.cumulative.len() - 1) as u32
    }
}

/// Probability of keeping each vocabulary word during a pass, discarding
/// very frequent words more often.
pub(crate) fn keep_probabilities(counts: &[u64], sample: f64) -> Vec<f64> {
    let total: u64 = counts.iter().sum();
    counts
        .iter()
        .map(|&c| {
            if sample <= 0.0 {
                return 1.0;
            }
            let f = c as f64 / total as f64;
            ((f / sample).sqrt() + 1.0) * sample / f
        })
        .map(|p| p.min(1.0))
        .collect()
}

fn downsample<R: Rng>(words: &[u32], keep: &[f64], rng: &mut R, out: &mut Vec<u32>) {
    out.clear();
    for &w in words {
        let p = keep[w as usize];
        if p >= 1.0 || rng.random::<f64>() < p {
            out.push(w);
        }
    }
}

fn dot(a: &[f32], b: &[f32]) -> f32 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// y += alpha * x
fn axpy(y: &mut [f32], alpha: f32, x: &[f32]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn sigmoid(x: f32) -> f32 {
    1.0 / (1.0 + (-x).exp())
}

/// ln(1 + e^x), computed without overflow.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn init_vector<R: Rng>(rng: &mut R, out: &mut [f32]) {
    let dim = out.len() as f32;
    for v in out {
        *v = (rng.random::<f32>() - 0.5) / dim;
    }
}

fn lr_at(config: &TrainingConfig, progress: f64) -> f32 {
    (config.initial_lr - (config.initial_lr - config.min_lr) * progress) as f32
}

/// Bounds of the context window around `pos`, excluding `pos` itself.
fn context_range(len: usize, pos: usize, window: usize) -> (usize, usize) {
    (pos.saturating_sub(window), (pos + window + 1).min(len))
}

/// Draws the center word plus `k` noise words, skipping draws equal to the center.
fn targets<R: Rng>(noise: &NoiseTable, center: u32, k: usize, rng: &mut R, out: &mut Vec<(u32, f32)>) {
    out.clear();
    out.push((center, 1.0));
    for _ in 0..k {
        let w = noise.sample(rng);
        if w != center {
            out.push((w, 0.0));
        }
    }
}

struct Scratch {
    h: Vec<f32>,
    grad: Vec<f32>,
    targets: Vec<(u32, f32)>,
}

impl Scratch {
    fn new(dim: usize) -> Self {
        Self {
            h: vec![0.0; dim],
            grad: vec![0.0; dim],
            targets: Vec::new(),
        }
    }

    /// Mean of the doc vector and the context word vectors.
    fn combine(&mut self, doc: &[f32], words: &[f32], context: &[u32]) {
        let dim = self.h.len();
        self.h.copy_from_slice(doc);
        for &w in context {
            let row = &words[w as usize * dim..(w as usize + 1) * dim];
            axpy(&mut self.h, 1.0, row);
        }
        let inv = 1.0 / (1 + context.len()) as f32;
        self.h.iter_mut().for_each(|x| *x *= inv);
    }
}

/// Trains a distributed-memory paragraph-vector model with negative
/// sampling. Single-threaded; identical inputs and seed give an identical
/// model.
pub fn train(docs: &[TokenizedDoc], config: &TrainingConfig) -> Result<EmbeddingModel, EmbeddingError> {
    config.validate()?;
    if docs.len() < 2 {
        return Err(EmbeddingError::TooFewDocuments(docs.len()));
    }
    let mut doc_index = HashMap::with_capacity(docs.len());
    for (i, d) in docs.iter().enumerate() {
        if d.tokens.is_empty() {
            return Err(EmbeddingError::EmptyDocument(d.doc_id.clone()));
        }
        if doc_index.insert(d.doc_id.clone(), i).is_some() {
            return Err(EmbeddingError::DuplicateDocument(d.doc_id.clone()));
        }
    }
    let vocab = Vocab::build(docs, config.min_count)?;
    let noise = NoiseTable::new(vocab.counts(), config.unigram_exponent);
    let keep = keep_probabilities(vocab.counts(), config.sample);
    let dim = config.dim;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut word_vectors = vec![0.0f32; vocab.len() * dim];
    for row in word_vectors.chunks_exact_mut(dim) {
        init_vector(&mut rng, row);
    }
    let mut doc_vectors = vec![0.0f32; docs.len() * dim];
    for row in doc_vectors.chunks_exact_mut(dim) {
        init_vector(&mut rng, row);
    }
    let mut output_weights = vec![0.0f32; vocab.len() * dim];

    let indexed: Vec<Vec<u32>> = docs
        .iter()
        .map(|d| d.tokens.iter().filter_map(|t| vocab.index_of(t)).collect())
        .collect();

    let total_steps = (config.epochs * docs.len()) as f64;
    let mut step = 0usize;
    let mut scratch = Scratch::new(dim);
    let mut context: Vec<u32> = Vec::with_capacity(2 * config.window);
    let mut epoch_losses = Vec::with_capacity(config.epochs);
    let mut words = Vec::new();

    for _ in 0..config.epochs {
        let mut loss = 0.0f64;
        let mut predictions = 0usize;
        for (d, all_words) in indexed.iter().enumerate() {
            let lr = lr_at(config, step as f64 / total_steps);
            step += 1;
            downsample(all_words, &keep, &mut rng, &mut words);
            for pos in 0..words.len() {
                let (lo, hi) = context_range(words.len(), pos, config.window);
                context.clear();
                context.extend((lo..hi).filter(|&j| j != pos).map(|j| words[j]));

                let doc = &mut doc_vectors[d * dim..(d + 1) * dim];
                scratch.combine(doc, &word_vectors, &context);
                scratch.grad.fill(0.0);
                targets(&noise, words[pos], config.negative_samples, &mut rng, &mut scratch.targets);

                for &(t, label) in &scratch.targets {
                    let row = &mut output_weights[t as usize * dim..(t as usize + 1) * dim];
                    let score = dot(&scratch.h, row);
                    loss += if label > 0.5 {
                        softplus(-score as f64)
                    } else {
                        softplus(score as f64)
                    };
                    let g = (label - sigmoid(score)) * lr;
                    axpy(&mut scratch.grad, g, row);
                    axpy(row, g, &scratch.h);
                }

                axpy(doc, 1.0, &scratch.grad);
                for &w in &context {
                    let row = &mut word_vectors[w as usize * dim..(w as usize + 1) * dim];
                    axpy(row, 1.0, &scratch.grad);
                }
                predictions += 1;
            }
        }
        epoch_losses.push(if predictions == 0 { 0.0 } else { loss / predictions as f64 });
    }

    Ok(EmbeddingModel {
        config: config.clone(),
        vocab,
        doc_ids: docs.iter().map(|d| d.doc_id.clone()).collect(),
        doc_index,
        doc_vectors,
        word_vectors,
        output_weights,
        corpus_hash: corpus_hash(docs),
        epoch_losses,
        noise,
        keep,
    })
}

impl EmbeddingModel {
    pub fn config(&self) -> &TrainingConfig {
        &self.config
    }

    pub fn vocab(&self) -> &Vocab {
        &self.vocab
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    pub fn corpus_hash(&self) -> &str {
        &self.corpus_hash
    }

    /// Mean negative-sampling loss per predicted word, one entry per epoch.
    pub fn epoch_losses(&self) -> &[f64] {
        &self.epoch_losses
    }

    pub fn word_vector(&self, word: &str) -> Option<&[f32]> {
        let dim = self.config.dim;
        self.vocab
            .index_of(word)
            .map(|i| &self.word_vectors[i as usize * dim..(i as usize + 1) * dim])
    }

    /// Fails unless `docs` hash to the corpus this model was trained on.
    pub fn check_corpus(&self, docs: &[TokenizedDoc]) -> Result<(), EmbeddingError> {
        let actual = corpus_hash(docs);
        if actual != self.corpus_hash {
            return Err(EmbeddingError::CorpusMismatch {
                expected: self.corpus_hash.clone(),
                actual,
            });
        }
        Ok(())
    }

    /// Infers a vector for unseen tokens: word and output weights stay
    /// frozen while a fresh doc vector is fitted by gradient descent.
    /// Out-of-vocabulary tokens are skipped; if none remain the untouched
    /// initial vector is returned with `low_confidence` set.
    pub fn infer_vector<R: Rng>(&self, tokens: &[String], rng: &mut R) -> Result<Inferred, EmbeddingError> {
        if tokens.is_empty() {
            return Err(EmbeddingError::EmptyInput);
        }
        let dim = self.config.dim;
        let mut doc = vec![0.0f32; dim];
        init_vector(rng, &mut doc);
        let all_words: Vec<u32> = tokens.iter().filter_map(|t| self.vocab.index_of(t)).collect();
        if all_words.is_empty() {
            return Ok(Inferred {
                vector: doc,
                low_confidence: true,
            });
        }

        let mut scratch = Scratch::new(dim);
        let mut context = Vec::with_capacity(2 * self.config.window);
        let epochs = self.config.infer_epochs;
        let mut words = Vec::with_capacity(all_words.len());
        for epoch in 0..epochs {
            let lr = lr_at(&self.config, epoch as f64 / epochs as f64);
            downsample(&all_words, &self.keep, rng, &mut words);
            for pos in 0..words.len() {
                let (lo, hi) = context_range(words.len(), pos, self.config.window);
                context.clear();
                context.extend((lo..hi).filter(|&j| j != pos).map(|j| words[j]));
                scratch.combine(&doc, &self.word_vectors, &context);
                scratch.grad.fill(0.0);
                targets(&self.noise, words[pos], self.config.negative_samples, rng, &mut scratch.targets);
                for &(t, label) in &scratch.targets {
                    let row = &self.output_weights[t as usize * dim..(t as usize + 1) * dim];
                    let g = (label - sigmoid(dot(&scratch.h, row))) * lr;
                    axpy(&mut scratch.grad, g, row);
                }
                axpy(&mut doc, 1.0, &scratch.grad);
            }
        }
        Ok(Inferred {
            vector: doc,
            low_confidence: false,
        })
    }

    /// Inference seeded from the model seed and the token sequence, so equal
    /// inputs always map to equal vectors.
    pub fn infer_tokens(&self, tokens: &[String]) -> Result<Inferred, EmbeddingError> {
        let mut h = Sha256::new();
        for t in tokens {
            h.update(t.as_bytes());
            h.update([0u8]);
        }
        let digest = h.finalize();
        let mut seed = [0u8; 8];
        seed.copy_from_slice(&digest[..8]);
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed ^ u64::from_le_bytes(seed));
        self.infer_vector(tokens, &mut rng)
    }
}

impl Embedder for EmbeddingModel {
    fn dim(&self) -> usize {
        self.config.dim
    }

    fn doc_vector(&self, doc_id: &str) -> Option<&[f32]> {
        let dim = self.config.dim;
        self.doc_index
            .get(doc_id)
            .map(|&i| &self.doc_vectors[i * dim..(i + 1) * dim])
    }

    fn infer_text(&self, text: &str) -> Result<Inferred, EmbeddingError> {
        self.infer_tokens(&tokenize(text))
    }
}
