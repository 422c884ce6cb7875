use serde::{Deserialize, Serialize};

use super::log::{EventKind, LogEvent};
use super::MetricsError;
use crate::orchestrator::{Modality, TaskKind, Which};

/// Timing metrics of one session, in seconds. Per-task lists are indexed by
/// task position within the session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionTimings {
    /// First notification to second completion.
    pub total_time: f64,
    /// Activation to completion.
    pub robot_time: Vec<f64>,
    /// Notification to activation.
    pub reaction_time: Vec<f64>,
}

#[derive(Debug, Default, Clone, Copy)]
struct TaskMarks {
    notified: Option<(usize, f64)>,
    activated: Option<(usize, f64)>,
    completed: Option<(usize, f64)>,
}

fn malformed<T>(msg: impl Into<String>) -> Result<T, MetricsError> {
    Err(MetricsError::MalformedLog(msg.into()))
}

fn set_once(
    slot: &mut Option<(usize, f64)>,
    pos: usize,
    t: f64,
    what: &str,
    task: usize,
) -> Result<(), MetricsError> {
    if slot.is_some() {
        return malformed(format!("task {task} {what} twice"));
    }
    *slot = Some((pos, t));
    Ok(())
}

/// Derives the timing metrics from an ordered session log.
///
/// Requires exactly one notification, activation and completion for each of
/// the two tasks, in that order, with the second task notified after the
/// first completed.
pub fn derive_timings(log: &[LogEvent]) -> Result<SessionTimings, MetricsError> {
    let mut marks = [TaskMarks::default(); 2];
    let mut last_t = f64::NEG_INFINITY;
    for (pos, e) in log.iter().enumerate() {
        if !e.t.is_finite() || e.t < last_t {
            return malformed(format!(
                "timestamp {} at record {pos} is not nondecreasing",
                e.t
            ));
        }
        last_t = e.t;
        let (task, slot, what) = match &e.kind {
            EventKind::TaskNotified { task, .. } => (*task, 0, "notified"),
            EventKind::InteractionActivated { task } => (*task, 1, "activated"),
            EventKind::TaskCompleted { task } => (*task, 2, "completed"),
            _ => continue,
        };
        let Some(m) = marks.get_mut(task) else {
            return malformed(format!("task index {task} out of range"));
        };
        let slot = match slot {
            0 => &mut m.notified,
            1 => &mut m.activated,
            _ => &mut m.completed,
        };
        set_once(slot, pos, e.t, what, task)?;
    }

    let mut spans = Vec::with_capacity(2);
    for (k, m) in marks.iter().enumerate() {
        let (Some(n), Some(a), Some(c)) = (m.notified, m.activated, m.completed) else {
            return malformed(format!(
                "task {k} lacks a notification, activation or completion"
            ));
        };
        if !(n.0 < a.0 && a.0 < c.0) {
            return malformed(format!("task {k} events out of order"));
        }
        spans.push((n.1, a.1, c.1));
    }
    if marks[1].notified.unwrap().0 < marks[0].completed.unwrap().0 {
        return malformed("second task notified before the first completed");
    }

    Ok(SessionTimings {
        total_time: spans[1].2 - spans[0].0,
        robot_time: spans.iter().map(|(_, a, c)| c - a).collect(),
        reaction_time: spans.iter().map(|(n, a, _)| a - n).collect(),
    })
}

/// A session's timings together with who ran it and under which condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionRecord {
    pub subject: String,
    pub session: Which,
    pub modality: Modality,
    /// Kind of each task, by task index.
    pub tasks: Vec<TaskKind>,
    pub timings: SessionTimings,
}

impl SessionRecord {
    pub fn from_log(log: &[LogEvent]) -> Result<Self, MetricsError> {
        let timings = derive_timings(log)?;
        let Some((subject, session, modality)) = log.iter().find_map(|e| match &e.kind {
            EventKind::SessionStart {
                subject,
                session,
                modality,
            } => Some((subject.clone(), *session, *modality)),
            _ => None,
        }) else {
            return malformed("no session_start record");
        };
        let mut tasks = [None; 2];
        for e in log {
            if let EventKind::TaskNotified {
                task, task_kind, ..
            } = e.kind
            {
                tasks[task] = Some(task_kind);
            }
        }
        let tasks = tasks
            .into_iter()
            .map(|k| k.expect("checked by derive_timings"))
            .collect();
        Ok(Self {
            subject,
            session,
            modality,
            tasks,
            timings,
        })
    }

    /// Robot time of the task of the given kind.
    pub fn robot_time(&self, kind: TaskKind) -> Option<f64> {
        self.tasks
            .iter()
            .position(|k| *k == kind)
            .map(|i| self.timings.robot_time[i])
    }

    pub fn mean_reaction(&self) -> f64 {
        let r = &self.timings.reaction_time;
        r.iter().sum::<f64>() / r.len() as f64
    }
}
