//! Front-ends for the story engine: an interactive console, an HTTP
//! service, and artifact loading shared by the command line.

pub mod artifacts;
pub mod console;
pub mod service;
