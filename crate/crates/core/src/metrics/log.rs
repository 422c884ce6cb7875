//! Append-only session event log, stored as newline-delimited JSON.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::MetricsError;
use crate::interaction::SimCommand;
use crate::orchestrator::{Modality, NotificationChannel, TaskKind, Which};

/// One timestamped record. `t` is simulation time in seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogEvent {
    pub t: f64,
    #[serde(flatten)]
    pub kind: EventKind,
}

impl LogEvent {
    pub fn new(t: f64, kind: EventKind) -> Self {
        Self { t, kind }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommandSource {
    Panel,
    Joypad,
    PrimaryTask,
}

/// A single questionnaire answer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Answer {
    Score(u8),
    Choice(Modality),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EventKind {
    SessionStart {
        subject: String,
        session: Which,
        modality: Modality,
    },
    TaskNotified {
        task: usize,
        task_kind: TaskKind,
        channel: NotificationChannel,
    },
    InteractionActivated {
        task: usize,
    },
    TaskCompleted {
        task: usize,
    },
    /// A robot command accepted by the engine, or a primary-task move.
    Command {
        source: CommandSource,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        command: Option<SimCommand>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        item: Option<u32>,
    },
    /// `entity` is a robot id or `controller`.
    StateChange {
        entity: String,
        from: String,
        to: String,
    },
    /// Items `q1`..`q10` (SUS for this session's modality), `c1`..`c3`
    /// (comparative choice) and `c1_comment`..`c3_comment`.
    QuestionnaireAnswer {
        item: String,
        answer: Answer,
    },
    SessionEnd,
}

impl EventKind {
    pub fn name(&self) -> &'static str {
        match self {
            EventKind::SessionStart { .. } => "session_start",
            EventKind::TaskNotified { .. } => "task_notified",
            EventKind::InteractionActivated { .. } => "interaction_activated",
            EventKind::TaskCompleted { .. } => "task_completed",
            EventKind::Command { .. } => "command",
            EventKind::StateChange { .. } => "state_change",
            EventKind::QuestionnaireAnswer { .. } => "questionnaire_answer",
            EventKind::SessionEnd => "session_end",
        }
    }
}

/// One JSON object per line, each line terminated by `\n`.
pub fn to_ndjson(events: &[LogEvent]) -> String {
    let mut out = String::new();
    for e in events {
        out.push_str(&serde_json::to_string(e).expect("log event serializes"));
        out.push('\n');
    }
    out
}

/// Blank lines are skipped. Line numbers in errors are 1-based.
pub fn parse_ndjson(text: &str) -> Result<Vec<LogEvent>, MetricsError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| MetricsError::Parse {
                line: i + 1,
                reason: e.to_string(),
            })
        })
        .collect()
}

pub fn read_log(path: impl AsRef<Path>) -> Result<Vec<LogEvent>, MetricsError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| MetricsError::Io(format!("{}: {e}", path.display())))?;
    parse_ndjson(&text)
}

/// `S01_first_mr_replica.ndjson`
pub fn log_file_name(subject: &str, which: Which, modality: Modality) -> String {
    let session = match which {
        Which::First => "first",
        Which::Second => "second",
    };
    format!("{subject}_{session}_{}.ndjson", modality.label())
}
