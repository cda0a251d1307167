//! Line-driven performance loop: one keyword per line, beats printed as
//! they are produced.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use anyhow::Result;
use dairector_core::session::{Clock, EntryPayload, RequestKind, SessionError, SessionStore, TranscriptEntry};
use dairector_core::{Engine, Session};

pub const HELP: &str = "commands: platform | tilt | platform: <prompt> | tilt: <prompt> | quit";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    Request(RequestKind, Option<String>),
    Quit,
    Blank,
}

pub fn parse_command(line: &str) -> Option<Command> {
    let line = line.trim();
    if line.is_empty() {
        return Some(Command::Blank);
    }
    let (word, prompt) = match line.split_once(':') {
        Some((w, p)) => (w.trim(), Some(p.trim().to_string()).filter(|p| !p.is_empty())),
        None => (line, None),
    };
    match word.to_ascii_lowercase().as_str() {
        "platform" => Some(Command::Request(RequestKind::Platform, prompt)),
        "tilt" => Some(Command::Request(RequestKind::Tilt, prompt)),
        "quit" | "exit" if prompt.is_none() && !line.contains(':') => Some(Command::Quit),
        _ => None,
    }
}

/// Human-readable rendering of one transcript entry.
pub fn format_entry(entry: &TranscriptEntry) -> String {
    let mut out = String::new();
    match &entry.payload {
        EntryPayload::Platform { fragment_id, text } => {
            let _ = writeln!(out, "[{}] PLATFORM ({fragment_id})", entry.seq);
            let _ = writeln!(out, "    {text}");
        }
        EntryPayload::Tilt { tilt, .. } => {
            let _ = writeln!(out, "[{}] TILT: {}", entry.seq, tilt.chosen);
            for (i, c) in tilt.candidates.iter().enumerate() {
                let mark = if c.name == tilt.chosen { '*' } else { ' ' };
                let _ = writeln!(out, "   {mark}{}. {} ({:.4})", i + 1, c.name, c.distance);
            }
            for f in &tilt.filtered_out {
                let _ = writeln!(out, "    filtered: {} (shares {})", f.name, f.shared.join(", "));
            }
        }
        EntryPayload::Ended { text } => {
            let _ = writeln!(out, "[{}] {text}", entry.seq);
        }
    }
    if let Some(p) = &entry.prompt_used {
        let _ = writeln!(out, "    prompt: {p}");
    }
    out
}

/// Runs the loop until `quit` or end of input. Tilts remain available after
/// the story ends. When `store` is given the session is saved after every
/// request.
pub fn run_console<R: BufRead, W: Write>(
    engine: &Engine,
    mut session: Session,
    store: Option<&SessionStore>,
    input: R,
    mut output: W,
    clock: &dyn Clock,
) -> Result<Session> {
    if let Some(store) = store {
        store.save(&mut session)?;
    }
    for entry in session.transcript() {
        output.write_all(format_entry(entry).as_bytes())?;
    }
    output.flush()?;

    for line in input.lines() {
        let line = line?;
        match parse_command(&line) {
            Some(Command::Blank) => continue,
            Some(Command::Quit) => break,
            None => writeln!(output, "{HELP}")?,
            Some(Command::Request(kind, prompt)) => {
                match engine.handle_request(&mut session, kind, prompt.as_deref(), clock) {
                    Ok(entry) => {
                        if let Some(store) = store {
                            store.save(&mut session)?;
                        }
                        output.write_all(format_entry(&entry).as_bytes())?;
                    }
                    Err(SessionError::Ended) => writeln!(output, "the story has ended; only tilts are available")?,
                    Err(e) => writeln!(output, "error: {e}")?,
                }
            }
        }
        output.flush()?;
    }
    Ok(session)
}
