//! Binary model file.
//!
//! Little-endian layout:
//!
//! ```text
//! magic "DAIRPV\r\n" | version u32
//! config: dim u32, window u32, min_count u64, negative u32, epochs u32,
//!         infer_epochs u32, seed u64, initial_lr f64, min_lr f64, exponent f64
//! corpus hash: 32 raw bytes
//! vocab:  n u32, then n x (len u32, utf-8 bytes, count u64)
//! docs:   n u32, then n x (len u32, utf-8 bytes)
//! losses: n u32, then n x f64
//! word vectors, output weights, doc vectors: f32 arrays, row-major
//! ```

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use byteorder::{LittleEndian as LE, ReadBytesExt, WriteBytesExt};

use super::model::{keep_probabilities, NoiseTable};
use super::{EmbeddingError, EmbeddingModel, TrainingConfig, Vocab};

pub const MODEL_MAGIC: &[u8; 8] = b"DAIRPV\r\n";
pub const MODEL_VERSION: u32 = 1;

fn write_str<W: Write>(w: &mut W, s: &str) -> std::io::Result<()> {
    w.write_u32::<LE>(s.len() as u32)?;
    w.write_all(s.as_bytes())
}

fn read_str<R: Read>(r: &mut R) -> Result<String, EmbeddingError> {
    let len = r.read_u32::<LE>()? as usize;
    let mut buf = vec![0u8; len];
    r.read_exact(&mut buf)?;
    String::from_utf8(buf).map_err(|_| EmbeddingError::Format("string is not UTF-8".into()))
}

fn write_f32s<W: Write>(w: &mut W, xs: &[f32]) -> std::io::Result<()> {
    for &x in xs {
        w.write_f32::<LE>(x)?;
    }
    Ok(())
}

fn read_f32s<R: Read>(r: &mut R, n: usize) -> Result<Vec<f32>, EmbeddingError> {
    let mut out = vec![0.0f32; n];
    r.read_f32_into::<LE>(&mut out)?;
    Ok(out)
}

impl EmbeddingModel {
    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<(), EmbeddingError> {
        let c = &self.config;
        w.write_all(MODEL_MAGIC)?;
        w.write_u32::<LE>(MODEL_VERSION)?;
        w.write_u32::<LE>(c.dim as u32)?;
        w.write_u32::<LE>(c.window as u32)?;
        w.write_u64::<LE>(c.min_count)?;
        w.write_u32::<LE>(c.negative_samples as u32)?;
        w.write_u32::<LE>(c.epochs as u32)?;
        w.write_u32::<LE>(c.infer_epochs as u32)?;
        w.write_u64::<LE>(c.seed)?;
        w.write_f64::<LE>(c.initial_lr)?;
        w.write_f64::<LE>(c.min_lr)?;
        w.write_f64::<LE>(c.unigram_exponent)?;
        w.write_f64::<LE>(c.sample)?;

        let hash = hex::decode(&self.corpus_hash).map_err(|e| EmbeddingError::Format(e.to_string()))?;
        if hash.len() != 32 {
            return Err(EmbeddingError::Format("corpus hash must be 32 bytes".into()));
        }
        w.write_all(&hash)?;

        w.write_u32::<LE>(self.vocab.len() as u32)?;
        for (word, count) in self.vocab.iter() {
            write_str(w, word)?;
            w.write_u64::<LE>(count)?;
        }
        w.write_u32::<LE>(self.doc_ids.len() as u32)?;
        for id in &self.doc_ids {
            write_str(w, id)?;
        }
        w.write_u32::<LE>(self.epoch_losses.len() as u32)?;
        for &l in &self.epoch_losses {
            w.write_f64::<LE>(l)?;
        }
        write_f32s(w, &self.word_vectors)?;
        write_f32s(w, &self.output_weights)?;
        write_f32s(w, &self.doc_vectors)?;
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory");
        buf
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self, EmbeddingError> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MODEL_MAGIC {
            return Err(EmbeddingError::Format("bad magic bytes".into()));
        }
        let version = r.read_u32::<LE>()?;
        if version != MODEL_VERSION {
            return Err(EmbeddingError::Format(format!("unsupported version {version}")));
        }
        let config = TrainingConfig {
            dim: r.read_u32::<LE>()? as usize,
            window: r.read_u32::<LE>()? as usize,
            min_count: r.read_u64::<LE>()?,
            negative_samples: r.read_u32::<LE>()? as usize,
            epochs: r.read_u32::<LE>()? as usize,
            infer_epochs: r.read_u32::<LE>()? as usize,
            seed: r.read_u64::<LE>()?,
            initial_lr: r.read_f64::<LE>()?,
            min_lr: r.read_f64::<LE>()?,
            unigram_exponent: r.read_f64::<LE>()?,
            sample: r.read_f64::<LE>()?,
        };
        config.validate()?;

        let mut hash = [0u8; 32];
        r.read_exact(&mut hash)?;

        let n_words = r.read_u32::<LE>()? as usize;
        let mut entries = Vec::with_capacity(n_words);
        for _ in 0..n_words {
            let w = read_str(r)?;
            let c = r.read_u64::<LE>()?;
            entries.push((w, c));
        }
        if entries.is_empty() {
            return Err(EmbeddingError::Format("empty vocabulary".into()));
        }
        let vocab = Vocab::from_entries(entries);

        let n_docs = r.read_u32::<LE>()? as usize;
        let mut doc_ids = Vec::with_capacity(n_docs);
        let mut doc_index = HashMap::with_capacity(n_docs);
        for i in 0..n_docs {
            let id = read_str(r)?;
            if doc_index.insert(id.clone(), i).is_some() {
                return Err(EmbeddingError::Format(format!("duplicate doc id {id:?}")));
            }
            doc_ids.push(id);
        }
        let n_losses = r.read_u32::<LE>()? as usize;
        let mut epoch_losses = Vec::with_capacity(n_losses);
        for _ in 0..n_losses {
            epoch_losses.push(r.read_f64::<LE>()?);
        }

        let dim = config.dim;
        let word_vectors = read_f32s(r, n_words * dim)?;
        let output_weights = read_f32s(r, n_words * dim)?;
        let doc_vectors = read_f32s(r, n_docs * dim)?;
        let mut rest = [0u8; 1];
        if r.read(&mut rest)? != 0 {
            return Err(EmbeddingError::Format("trailing bytes after model".into()));
        }

        let noise = NoiseTable::new(vocab.counts(), config.unigram_exponent);
        let keep = keep_probabilities(vocab.counts(), config.sample);
        Ok(Self {
            config,
            vocab,
            doc_ids,
            doc_index,
            doc_vectors,
            word_vectors,
            output_weights,
            corpus_hash: hex::encode(hash),
            epoch_losses,
            noise,
            keep,
        })
    }

    pub fn from_bytes(mut bytes: &[u8]) -> Result<Self, EmbeddingError> {
        Self::read_from(&mut bytes)
    }

    pub fn save(&self, path: &Path) -> Result<(), EmbeddingError> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_to(&mut f)?;
        f.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, EmbeddingError> {
        let mut f = std::io::BufReader::new(std::fs::File::open(path)?);
        Self::read_from(&mut f)
    }
}
