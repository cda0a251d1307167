#![allow(dead_code)]

use std::io::{Read, Write};
use std::net::{SocketAddr, TcpStream};
use std::path::{Path, PathBuf};
use std::sync::{Arc, OnceLock};

use dairector::artifacts::{load_engine, ArtifactPaths};
use dairector::service::{serve, AppState};
use dairector_core::embedding::{train, training_docs};
use dairector_core::session::{Clock, SessionStore};
use dairector_core::story::NameMap;
use dairector_core::{Engine, TrainingConfig};

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

/// Fixture corpora plus a model trained on them with default settings,
/// written once per test binary.
pub fn artifacts() -> &'static ArtifactPaths {
    static DIR: OnceLock<(tempfile::TempDir, ArtifactPaths)> = OnceLock::new();
    &DIR.get_or_init(|| {
        let dir = tempfile::tempdir().unwrap();
        let plot_corpus = data("plotto_excerpt.plotto");
        let trope_corpus = data("tropes.json");
        let graph = dairector::artifacts::load_plot(&plot_corpus).unwrap();
        let (tropes, _) = dairector::artifacts::load_tropes(&trope_corpus).unwrap();
        let model = train(&training_docs(&graph, &tropes).unwrap(), &TrainingConfig::default()).unwrap();
        let model_path = dir.path().join("model.bin");
        model.save(&model_path).unwrap();
        let paths = ArtifactPaths {
            plot_corpus,
            trope_corpus,
            model: model_path,
        };
        (dir, paths)
    })
    .1
}

pub fn engine() -> Engine {
    load_engine(artifacts()).unwrap()
}

pub fn names() -> NameMap {
    NameMap::load(&data("names.json")).unwrap()
}

/// A live server on an ephemeral port. Dropping it shuts the server down
/// and waits for it to persist its sessions.
pub struct Server {
    pub addr: SocketAddr,
    stop: Option<tokio::sync::oneshot::Sender<()>>,
    thread: Option<std::thread::JoinHandle<()>>,
}

impl Server {
    pub fn start(engine: Engine, sessions: &Path, clock: Arc<dyn Clock>) -> Self {
        let store = SessionStore::open(sessions).unwrap();
        let state = Arc::new(AppState::new(engine, store, names(), clock));
        let (stop, stopped) = tokio::sync::oneshot::channel::<()>();
        let (ready_tx, ready_rx) = std::sync::mpsc::channel();
        let thread = std::thread::spawn(move || {
            let rt = tokio::runtime::Runtime::new().unwrap();
            rt.block_on(async move {
                let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
                ready_tx.send(listener.local_addr().unwrap()).unwrap();
                serve(listener, state, async {
                    let _ = stopped.await;
                })
                .await
                .unwrap();
            });
        });
        let addr = ready_rx.recv().unwrap();
        Self {
            addr,
            stop: Some(stop),
            thread: Some(thread),
        }
    }

    pub fn request(&self, method: &str, path: &str, body: Option<&str>) -> (u16, serde_json::Value) {
        http(self.addr, method, path, body)
    }
}

impl Drop for Server {
    fn drop(&mut self) {
        if let Some(s) = self.stop.take() {
            let _ = s.send(());
        }
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }
}

/// Minimal HTTP/1.1 client: one request per connection.
pub fn http(addr: SocketAddr, method: &str, path: &str, body: Option<&str>) -> (u16, serde_json::Value) {
    let mut stream = TcpStream::connect(addr).unwrap();
    let body = body.unwrap_or("");
    let req = format!(
        "{method} {path} HTTP/1.1\r\nHost: {addr}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
        body.len()
    );
    stream.write_all(req.as_bytes()).unwrap();
    let mut raw = Vec::new();
    stream.read_to_end(&mut raw).unwrap();
    let text = String::from_utf8(raw).unwrap();
    let (head, rest) = text.split_once("\r\n\r\n").expect("response has a header block");
    let status: u16 = head.split(' ').nth(1).unwrap().parse().unwrap();
    let chunked = head.lines().any(|l| l.eq_ignore_ascii_case("transfer-encoding: chunked"));
    let payload = if chunked { dechunk(rest) } else { rest.to_string() };
    let json = if payload.trim().is_empty() {
        serde_json::Value::Null
    } else {
        serde_json::from_str(&payload).unwrap_or_else(|e| panic!("{e}: {payload:?}"))
    };
    (status, json)
}

fn dechunk(mut s: &str) -> String {
    let mut out = String::new();
    loop {
        let (size, rest) = s.split_once("\r\n").unwrap();
        let n = usize::from_str_radix(size.trim(), 16).unwrap();
        if n == 0 {
            return out;
        }
        out.push_str(&rest[..n]);
        s = &rest[n + 2..];
    }
}
