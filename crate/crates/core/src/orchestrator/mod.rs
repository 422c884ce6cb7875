//! Counterbalanced study plans and the timed session protocol.

mod plan;
mod session;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use plan::{latin_plan, SessionPlan, StudyPlan, Which, CONDITION_SEQUENCES};
pub use session::{
    start_session, task_done, Notification, NotificationChannel, Phase, SecondaryTask,
    SessionConfig, SessionState,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Modality {
    MrReplica,
    Joypad,
}

impl Modality {
    pub fn label(self) -> &'static str {
        match self {
            Modality::MrReplica => "mr_replica",
            Modality::Joypad => "joypad",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    AgvRoute,
    DroneLift,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OrchestratorError {
    #[error("scene not ready: {0}")]
    SceneNotReady(String),
    #[error("no secondary task is waiting for activation")]
    NotPending,
    #[error("invalid study plan: {0}")]
    InvalidPlan(String),
}
