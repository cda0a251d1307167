use std::io::{self, BufWriter, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context as _, Result};
use clap::{Args, Parser, Subcommand};
use dairector::artifacts::{load_engine, load_model, load_names, load_plot, load_tropes, ArtifactPaths};
use dairector::console::run_console;
use dairector::service::{serve, AppState};
use dairector_core::corpus::validate_graph;
use dairector_core::embedding::{training_docs, train};
use dairector_core::eval::{baseline_stats, evaluate_topn, load_pairs, relink};
use dairector_core::session::{SessionConfig, SessionStore, SystemClock};
use dairector_core::story::{generate_story, DEFAULT_STORY_LENGTH};
use dairector_core::TrainingConfig;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(name = "dairector", version, about = "Improv story director: plot platforms and trope tilts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ArtifactArgs {
    /// Plot corpus (.json, or the line-oriented fragment format otherwise)
    #[arg(long, env = "DAIRECTOR_PLOT_CORPUS")]
    plot_corpus: PathBuf,
    #[arg(long, env = "DAIRECTOR_TROPE_CORPUS")]
    trope_corpus: PathBuf,
    #[arg(long, env = "DAIRECTOR_MODEL")]
    model: PathBuf,
}

impl ArtifactArgs {
    fn paths(&self) -> ArtifactPaths {
        ArtifactPaths {
            plot_corpus: self.plot_corpus.clone(),
            trope_corpus: self.trope_corpus.clone(),
            model: self.model.clone(),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the HTTP service
    Serve {
        #[command(flatten)]
        artifacts: ArtifactArgs,
        #[arg(long, env = "DAIRECTOR_NAMES")]
        names: Option<PathBuf>,
        #[arg(long, env = "DAIRECTOR_SESSIONS", default_value = "sessions")]
        sessions: PathBuf,
        #[arg(long, default_value = "127.0.0.1:8080")]
        listen: SocketAddr,
    },
    /// Interactive session on stdin/stdout
    Console {
        #[command(flatten)]
        artifacts: ArtifactArgs,
        #[arg(long, env = "DAIRECTOR_NAMES")]
        names: Option<PathBuf>,
        /// Persist the session to this store
        #[arg(long, env = "DAIRECTOR_SESSIONS")]
        sessions: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Start from this fragment instead of a random one
        #[arg(long)]
        root: Option<String>,
        #[arg(long)]
        max_depth: Option<usize>,
    },
    /// Print complete stories by always following the current platform
    Story {
        #[command(flatten)]
        artifacts: ArtifactArgs,
        #[arg(long, env = "DAIRECTOR_NAMES")]
        names: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_STORY_LENGTH)]
        length: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Train a paragraph-vector model on both corpora
    Train {
        #[arg(long, env = "DAIRECTOR_PLOT_CORPUS")]
        plot_corpus: PathBuf,
        #[arg(long, env = "DAIRECTOR_TROPE_CORPUS")]
        trope_corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        dim: Option<usize>,
    },
    /// Score tilt retrieval against labelled fragment/trope pairs
    Eval {
        #[arg(long, env = "DAIRECTOR_MODEL")]
        model: PathBuf,
        #[arg(long, env = "DAIRECTOR_TROPE_CORPUS")]
        tropes: PathBuf,
        #[arg(long)]
        pairs: PathBuf,
        #[arg(long, default_value_t = 5)]
        n: usize,
        /// Write the full JSON report here
        #[arg(long)]
        report: Option<PathBuf>,
        /// Measure link distances on the plot-trope subgraph only
        #[arg(long)]
        subset: bool,
        /// Random trope pairs for the baseline distance statistics
        #[arg(long, default_value_t = 1000)]
        baseline_samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Report structure and substitution warnings for a plot corpus
    Validate {
        #[arg(long, env = "DAIRECTOR_PLOT_CORPUS")]
        plot_corpus: PathBuf,
    },
    /// Re-run a stored session's event log and check it reproduces
    Replay {
        #[command(flatten)]
        artifacts: ArtifactArgs,
        #[arg(long, env = "DAIRECTOR_SESSIONS", default_value = "sessions")]
        sessions: PathBuf,
        id: String,
    },
}

fn pick_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let s = rand::rng().next_u64();
        eprintln!("seed: {s}");
        s
    })
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let mut f = BufWriter::new(std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?);
    serde_json::to_writer_pretty(&mut f, value)?;
    f.write_all(b"\n")?;
    f.flush()?;
    Ok(())
}

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        if let Ok(mut s) = tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            s.recv().await;
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {},
        _ = term => {},
    }
    tracing::info!("shutting down");
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Serve {
            artifacts,
            names,
            sessions,
            listen,
        } => {
            tracing_subscriber::fmt()
                .with_env_filter(
                    tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
                )
                .with_writer(io::stderr)
                .init();
            let engine = load_engine(&artifacts.paths())?;
            let names = load_names(names.as_deref())?;
            let store = SessionStore::open(&sessions)?;
            let state = Arc::new(AppState::new(engine, store, names, Arc::new(SystemClock)));
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(async move {
                let listener = tokio::net::TcpListener::bind(listen)
                    .await
                    .with_context(|| format!("binding {listen}"))?;
                tracing::info!(addr = %listener.local_addr()?, sessions = %sessions.display(), "listening");
                serve(listener, state, shutdown_signal()).await
            })?;
        }
        Command::Console {
            artifacts,
            names,
            sessions,
            seed,
            root,
            max_depth,
        } => {
            let engine = load_engine(&artifacts.paths())?;
            let names = load_names(names.as_deref())?;
            let store = sessions.map(SessionStore::open).transpose()?;
            let config = SessionConfig {
                seed: Some(pick_seed(seed)),
                root,
                max_depth,
            };
            let session = engine.create_session(names, &config, &SystemClock)?;
            if store.is_some() {
                eprintln!("session: {}", session.id());
            }
            let stdin = io::stdin().lock();
            let stdout = io::stdout().lock();
            run_console(&engine, session, store.as_ref(), stdin, stdout, &SystemClock)?;
        }
        Command::Story {
            artifacts,
            names,
            seed,
            length,
            count,
        } => {
            let engine = load_engine(&artifacts.paths())?;
            let names = load_names(names.as_deref())?;
            let mut rng = ChaCha8Rng::seed_from_u64(pick_seed(seed));
            let mut out = io::stdout().lock();
            for i in 0..count {
                if i > 0 {
                    writeln!(out)?;
                }
                let story = generate_story(engine.graph(), engine.embedder(), &names, length, &mut rng)?;
                out.write_all(story.to_text().as_bytes())?;
            }
        }
        Command::Train {
            plot_corpus,
            trope_corpus,
            out,
            seed,
            epochs,
            dim,
        } => {
            let graph = load_plot(&plot_corpus)?;
            let (tropes, _) = load_tropes(&trope_corpus)?;
            let docs = training_docs(&graph, &tropes)?;
            let mut config = TrainingConfig::default().with_seed(seed);
            if let Some(e) = epochs {
                config = config.with_epochs(e);
            }
            if let Some(d) = dim {
                config.dim = d;
            }
            let model = train(&docs, &config)?;
            model.save(&out).with_context(|| format!("writing {}", out.display()))?;
            let losses = model.epoch_losses();
            println!(
                "trained {} docs, {} words, dim {}, {} epochs; loss {:.4} -> {:.4}",
                model.doc_ids().len(),
                model.vocab().len(),
                config.dim,
                config.epochs,
                losses.first().copied().unwrap_or(0.0),
                losses.last().copied().unwrap_or(0.0),
            );
            println!("corpus hash {}", model.corpus_hash());
        }
        Command::Eval {
            model,
            tropes,
            pairs,
            n,
            report,
            subset,
            baseline_samples,
            seed,
        } => {
            let model = load_model(&model)?;
            let (tropes, _) = load_tropes(&tropes)?;
            let pairs = load_pairs(&pairs)?;
            let mut result = evaluate_topn(&model, &tropes, &pairs, n)?;
            let links = if subset { tropes.plot_subcorpus() } else { tropes.clone() };
            if subset {
                relink(&mut result, &links)?;
            }
            if baseline_samples > 0 {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                result.baseline = baseline_stats(&links, baseline_samples, &mut rng).ok();
            }
            println!("pairs evaluated: {} (rejected {})", result.evaluated, result.rejected.len());
            println!("top-1 error: {:.3}", result.top1_error);
            println!("top-{n} error: {:.3}", result.topn_error);
            for (label, stats) in [("predicted vs gold", &result.distance_stats), ("random baseline", &result.baseline)] {
                match stats {
                    Some(s) => println!(
                        "{label}: median {:.2}, mean {:.3}, stddev {:.3} over {} pairs ({} unreachable, {} exact)",
                        s.median, s.mean, s.stddev, s.count, s.unreachable, s.excluded_exact
                    ),
                    None => println!("{label}: no defined distances"),
                }
            }
            if let Some(path) = report {
                write_json(&path, &result)?;
            }
        }
        Command::Validate { plot_corpus } => {
            let graph = load_plot(&plot_corpus)?;
            let report = validate_graph(&graph);
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        Command::Replay {
            artifacts,
            sessions,
            id,
        } => {
            let engine = load_engine(&artifacts.paths())?;
            let store = SessionStore::open(&sessions)?;
            let events = store.load_events(&id)?;
            let replayed = engine.replay(&events)?;
            let stored = store.load(&engine, &id)?;
            if replayed.transcript_json() != stored.transcript_json() {
                bail!("replayed transcript differs from the stored snapshot");
            }
            println!("replayed {} entries: identical", replayed.transcript().len());
        }
    }
    Ok(())
}
