//! Network and persistence shell: wire protocol, session engine, headless
//! scripted runs with archive/replay, and the socket server.

mod agent;
mod engine;
mod headless;
mod joypad;
pub mod protocol;
mod server;

use thiserror::Error;

pub use agent::ScriptedAgent;
pub use engine::{Delivery, Engine, FinishedSession, Outgoing, CAMERA_RANGE};
pub use headless::{
    replay, run_headless, run_headless_with, ArchivedSession, ReplayReport, SessionArchive,
    TraceEntry,
};
pub use joypad::{joypad_arrows, joypad_button};
pub use server::{serve, Client, ServeConfig, ServerHandle};

#[derive(Debug, Error)]
pub enum GatewayError {
    #[error("cannot bind {addr}: {reason}")]
    BindFailure { addr: String, reason: String },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("session {session} of {subject} did not finish within {steps} steps")]
    ScriptStalled {
        subject: String,
        session: String,
        steps: u64,
    },
    #[error("replay of session {session} diverged: {detail}")]
    ReplayDivergence { session: String, detail: String },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
