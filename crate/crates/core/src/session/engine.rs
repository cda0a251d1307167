use std::sync::Arc;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use super::{
    Clock, EntryPayload, RequestKind, Session, SessionConfig, SessionError, SessionEvent, SessionSnapshot,
    TranscriptEntry, ENDED_TEXT,
};
use crate::corpus::{PlotGraph, TropeCorpus};
use crate::embedding::{training_docs, Embedder, EmbeddingModel};
use crate::story::{
    context_vector, generate_plot_tree, next_platform, render_fragment, select_tilt, Context, NameMap,
    PlotTreeNode, RootChoice, DEFAULT_MAX_DEPTH,
};

/// Loaded corpora plus embedder, shared read-only by every session.
#[derive(Clone)]
pub struct Engine {
    graph: Arc<PlotGraph>,
    tropes: Arc<TropeCorpus>,
    embedder: Arc<dyn Embedder + Send + Sync>,
    corpus_hash: String,
    model_hash: String,
}

impl std::fmt::Debug for Engine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Engine")
            .field("fragments", &self.graph.len())
            .field("tropes", &self.tropes.len())
            .field("corpus_hash", &self.corpus_hash)
            .field("model_hash", &self.model_hash)
            .finish()
    }
}

impl Engine {
    /// Checks that `model` was trained on exactly these corpora.
    pub fn new(graph: PlotGraph, tropes: TropeCorpus, model: EmbeddingModel) -> Result<Self, SessionError> {
        let docs = training_docs(&graph, &tropes)?;
        model.check_corpus(&docs)?;
        let corpus_hash = model.corpus_hash().to_string();
        let model_hash = hex::encode(Sha256::digest(model.to_bytes()));
        Ok(Self {
            graph: Arc::new(graph),
            tropes: Arc::new(tropes),
            embedder: Arc::new(model),
            corpus_hash,
            model_hash,
        })
    }

    /// An engine over any embedder, with caller-supplied artifact hashes.
    pub fn with_embedder(
        graph: PlotGraph,
        tropes: TropeCorpus,
        embedder: Arc<dyn Embedder + Send + Sync>,
        corpus_hash: impl Into<String>,
        model_hash: impl Into<String>,
    ) -> Self {
        Self {
            graph: Arc::new(graph),
            tropes: Arc::new(tropes),
            embedder,
            corpus_hash: corpus_hash.into(),
            model_hash: model_hash.into(),
        }
    }

    pub fn graph(&self) -> &PlotGraph {
        &self.graph
    }

    pub fn tropes(&self) -> &TropeCorpus {
        &self.tropes
    }

    pub fn embedder(&self) -> &(dyn Embedder + Send + Sync) {
        self.embedder.as_ref()
    }

    pub fn corpus_hash(&self) -> &str {
        &self.corpus_hash
    }

    pub fn model_hash(&self) -> &str {
        &self.model_hash
    }

    fn render(&self, node: &PlotTreeNode, names: &NameMap) -> String {
        let fragment = self.graph.fragment(&node.fragment_id).expect("tree nodes come from the graph");
        render_fragment(fragment, &node.accumulated_subs, names).text
    }

    /// Builds the plot tree and presents its root as the first beat.
    pub fn create_session(
        &self,
        names: NameMap,
        config: &SessionConfig,
        clock: &dyn Clock,
    ) -> Result<Session, SessionError> {
        let seed = config.seed.unwrap_or_else(|| rand::rng().next_u64());
        let max_depth = config.max_depth.unwrap_or(DEFAULT_MAX_DEPTH);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let root = match &config.root {
            Some(id) => RootChoice::Id(id.clone()),
            None => RootChoice::Random,
        };
        let tree = generate_plot_tree(&self.graph, &root, max_depth, &mut rng)?;
        let now = clock.now();
        let entry = TranscriptEntry {
            seq: 0,
            payload: EntryPayload::Platform {
                fragment_id: tree.fragment_id.clone(),
                text: self.render(&tree, &names),
            },
            prompt_used: None,
            timestamp: now,
        };
        let id = uuid::Uuid::new_v4().to_string();
        let created = SessionEvent::Created {
            id: id.clone(),
            seed,
            requested_root: config.root.clone(),
            max_depth,
            names: names.clone(),
            corpus_hash: self.corpus_hash.clone(),
            model_hash: self.model_hash.clone(),
            entry: entry.clone(),
        };
        let state = SessionSnapshot {
            id,
            seed,
            requested_root: config.root.clone(),
            root_fragment: tree.fragment_id.clone(),
            max_depth,
            names,
            cursor: Vec::new(),
            ended: false,
            rng_state: rng,
            corpus_hash: self.corpus_hash.clone(),
            model_hash: self.model_hash.clone(),
            created: now,
            updated: now,
            transcript: vec![entry],
        };
        Ok(Session {
            state,
            tree,
            pending: vec![created],
        })
    }

    /// One turn of the performance loop. The context is the prompt when one
    /// is given (blank prompts count as absent), otherwise the current
    /// platform. A failed request leaves the session untouched.
    pub fn handle_request(
        &self,
        session: &mut Session,
        request: RequestKind,
        prompt: Option<&str>,
        clock: &dyn Clock,
    ) -> Result<TranscriptEntry, SessionError> {
        let prompt = prompt.filter(|p| !p.trim().is_empty());
        let current = session.current();
        let context = match prompt {
            Some(p) => Context::Prompt(p),
            None => Context::Fragment(&current.fragment_id),
        };

        let (payload, step) = match request {
            RequestKind::Platform => {
                if session.state.ended {
                    return Err(SessionError::Ended);
                }
                match next_platform(self.embedder.as_ref(), current, context)? {
                    Some((i, child)) => (
                        EntryPayload::Platform {
                            fragment_id: child.fragment_id.clone(),
                            text: self.render(child, &session.state.names),
                        },
                        Some(i),
                    ),
                    None => (
                        EntryPayload::Ended {
                            text: ENDED_TEXT.to_string(),
                        },
                        None,
                    ),
                }
            }
            RequestKind::Tilt => {
                let query = context_vector(self.embedder.as_ref(), context)?;
                let platform_text = self.render(current, &session.state.names);
                let mut rng = session.state.rng_state.clone();
                let tilt = select_tilt(self.embedder.as_ref(), &self.tropes, &query, &platform_text, &mut rng)?;
                session.state.rng_state = rng;
                (
                    EntryPayload::Tilt {
                        text: tilt.chosen.clone(),
                        tilt,
                    },
                    None,
                )
            }
        };

        match (&payload, step) {
            (EntryPayload::Platform { .. }, Some(i)) => session.state.cursor.push(i),
            (EntryPayload::Ended { .. }, _) => session.state.ended = true,
            _ => {}
        }
        let now = clock.now();
        let entry = TranscriptEntry {
            seq: session.state.transcript.len() as u64,
            payload,
            prompt_used: prompt.map(str::to_string),
            timestamp: now,
        };
        session.state.transcript.push(entry.clone());
        session.state.updated = now;
        session.pending.push(SessionEvent::Request {
            request,
            prompt: prompt.map(str::to_string),
            entry: entry.clone(),
        });
        Ok(entry)
    }

    fn check_hashes(&self, corpus_hash: &str, model_hash: &str) -> Result<(), SessionError> {
        if corpus_hash != self.corpus_hash {
            return Err(SessionError::HashMismatch {
                what: "corpus",
                expected: corpus_hash.to_string(),
                actual: self.corpus_hash.clone(),
            });
        }
        if model_hash != self.model_hash {
            return Err(SessionError::HashMismatch {
                what: "model",
                expected: model_hash.to_string(),
                actual: self.model_hash.clone(),
            });
        }
        Ok(())
    }

    /// Rebuilds a live session from a snapshot, validating it against the
    /// loaded artifacts.
    pub fn restore(&self, state: SessionSnapshot) -> Result<Session, SessionError> {
        self.check_hashes(&state.corpus_hash, &state.model_hash)?;
        // An explicit root never touches the RNG.
        let mut unused = ChaCha8Rng::seed_from_u64(0);
        let tree = generate_plot_tree(
            &self.graph,
            &RootChoice::Id(state.root_fragment.clone()),
            state.max_depth,
            &mut unused,
        )?;
        let Some(node) = tree.descend(&state.cursor) else {
            return Err(SessionError::Corrupt("cursor points outside the plot tree".into()));
        };
        let platforms: Vec<&str> = state.transcript.iter().filter_map(TranscriptEntry::fragment_id).collect();
        let mut walk = vec![tree.fragment_id.as_str()];
        let mut n = &tree;
        for &i in &state.cursor {
            n = &n.children[i];
            walk.push(n.fragment_id.as_str());
        }
        if platforms != walk || node.fragment_id != *walk.last().unwrap() {
            return Err(SessionError::Corrupt("transcript platforms disagree with cursor".into()));
        }
        if state.transcript.iter().enumerate().any(|(i, e)| e.seq != i as u64) {
            return Err(SessionError::Corrupt("transcript sequence numbers are not contiguous".into()));
        }
        Ok(Session {
            state,
            tree,
            pending: Vec::new(),
        })
    }

    /// Re-executes a recorded event log from scratch and checks every entry
    /// matches the recording. Timestamps are taken from the log.
    pub fn replay(&self, events: &[SessionEvent]) -> Result<Session, SessionError> {
        let Some(SessionEvent::Created {
            id,
            seed,
            requested_root,
            max_depth,
            names,
            corpus_hash,
            model_hash,
            entry,
        }) = events.first()
        else {
            return Err(SessionError::Corrupt("event log must start with a creation event".into()));
        };
        self.check_hashes(corpus_hash, model_hash)?;
        let config = SessionConfig {
            seed: Some(*seed),
            root: requested_root.clone(),
            max_depth: Some(*max_depth),
        };
        let mut session = self.create_session(names.clone(), &config, &super::FixedClock(entry.timestamp))?;
        if session.last_entry() != entry {
            return Err(SessionError::ReplayDivergence { seq: 0 });
        }
        session.state.id = id.clone();
        for ev in &events[1..] {
            let SessionEvent::Request { request, prompt, entry } = ev else {
                return Err(SessionError::Corrupt("duplicate creation event".into()));
            };
            let got = self.handle_request(&mut session, *request, prompt.as_deref(), &super::FixedClock(entry.timestamp))?;
            if &got != entry {
                return Err(SessionError::ReplayDivergence { seq: entry.seq });
            }
        }
        session.pending.clear();
        Ok(session)
    }
}
