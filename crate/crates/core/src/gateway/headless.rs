//! Client-free sessions driven by the scripted agent, stored as archives
//! that replay to byte-identical logs.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::agent::ScriptedAgent;
use super::engine::Engine;
use super::protocol::{Inbound, InboundBody, Outbound, SessionControl};
use super::GatewayError;
use crate::metrics::{
    parse_ndjson, to_ndjson, LogEvent, MetricsError, Questionnaire, SessionRecord,
};
use crate::orchestrator::{Modality, SessionConfig, SessionPlan, StudyPlan, Which};
use crate::sim::Scene;

/// An inbound message and the simulation step at which it was handled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub step: u64,
    pub msg: Inbound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchivedSession {
    pub which: Which,
    pub modality: Modality,
    /// The session log, NDJSON.
    pub log: String,
    pub trace: Vec<TraceEntry>,
}

/// Everything needed to re-run a subject's two sessions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionArchive {
    pub plan: SessionPlan,
    pub seed: u64,
    pub config_hash: String,
    pub scene: Scene,
    pub session_config: SessionConfig,
    pub sessions: Vec<ArchivedSession>,
    /// Questionnaire answers in the questionnaire file format.
    pub questionnaire: String,
}

impl SessionArchive {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("archive serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self, GatewayError> {
        serde_json::from_str(s).map_err(|e| GatewayError::InvalidConfig(format!("archive: {e}")))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, GatewayError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), GatewayError> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn logs(&self) -> Result<Vec<Vec<LogEvent>>, MetricsError> {
        self.sessions.iter().map(|s| parse_ndjson(&s.log)).collect()
    }

    pub fn records(&self) -> Result<Vec<SessionRecord>, MetricsError> {
        self.logs()?
            .iter()
            .map(|l| SessionRecord::from_log(l))
            .collect()
    }

    pub fn questionnaire(&self) -> Result<Questionnaire, MetricsError> {
        Questionnaire::from_toml_str(&self.questionnaire)
    }
}

fn which_name(w: Which) -> &'static str {
    match w {
        Which::First => "first",
        Which::Second => "second",
    }
}

fn single_plan(plan: &SessionPlan) -> StudyPlan {
    StudyPlan {
        seed: plan.seed,
        subjects: vec![plan.clone()],
    }
}

/// Runs both sessions of `plan` with the scripted agent. The result depends
/// only on (plan, scene, agent, seed).
pub fn run_headless(
    plan: &SessionPlan,
    scene: &Scene,
    agent: &ScriptedAgent,
    seed: u64,
) -> Result<SessionArchive, GatewayError> {
    run_headless_with(plan, scene, agent, seed, &SessionConfig::default())
}

/// [`run_headless`] with a non-default session timing.
pub fn run_headless_with(
    plan: &SessionPlan,
    scene: &Scene,
    agent: &ScriptedAgent,
    seed: u64,
    session_config: &SessionConfig,
) -> Result<SessionArchive, GatewayError> {
    let session_config = session_config.clone();
    let mut sessions = Vec::with_capacity(2);
    let mut logs = Vec::with_capacity(2);
    for which in Which::BOTH {
        let mut engine = Engine::new(scene.clone(), single_plan(plan), session_config.clone())?;
        let mut run = agent
            .begin(seed ^ plan.seed ^ (which.index() as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let mut trace = Vec::new();
        let mut send = |engine: &mut Engine, body: InboundBody| {
            let msg = Inbound {
                id: trace.len() as u64 + 1,
                body,
            };
            trace.push(TraceEntry {
                step: engine.steps(),
                msg: msg.clone(),
            });
            engine.handle(msg)
        };
        let control = SessionControl::Start {
            subject: plan.subject_id.clone(),
            session: which,
        };
        if let (_, Outbound::Err { reason, .. }) =
            &send(&mut engine, InboundBody::SessionControl { control })[0]
        {
            return Err(GatewayError::InvalidConfig(reason.clone()));
        }
        let finished = loop {
            for body in run.act(&engine) {
                send(&mut engine, body);
            }
            if let Some(f) = engine.take_finished().pop() {
                break f;
            }
            if engine.steps() >= agent.max_steps {
                return Err(GatewayError::ScriptStalled {
                    subject: plan.subject_id.clone(),
                    session: which_name(which).into(),
                    steps: engine.steps(),
                });
            }
            engine.advance();
        };
        sessions.push(ArchivedSession {
            which,
            modality: finished.modality,
            log: to_ndjson(&finished.log),
            trace,
        });
        logs.push(finished.log);
    }
    let questionnaire = Questionnaire::from_logs(&[&logs[0], &logs[1]])
        .map_err(|e| GatewayError::InvalidConfig(e.to_string()))?
        .to_toml_string();
    Ok(SessionArchive {
        plan: plan.clone(),
        seed,
        config_hash: scene.config_hash(),
        scene: scene.clone(),
        session_config,
        sessions,
        questionnaire,
    })
}

/// Outcome of a successful replay: every log was reproduced byte for byte.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplayReport {
    pub records: Vec<SessionRecord>,
}

fn first_difference(a: &str, b: &str) -> String {
    for (i, (x, y)) in a.lines().zip(b.lines()).enumerate() {
        if x != y {
            return format!("line {}: archived `{x}`, replayed `{y}`", i + 1);
        }
    }
    format!(
        "archived {} lines, replayed {}",
        a.lines().count(),
        b.lines().count()
    )
}

/// Re-simulates every session from its inbound trace and checks that the
/// regenerated log matches the archived one exactly.
pub fn replay(archive: &SessionArchive) -> Result<ReplayReport, GatewayError> {
    if archive.scene.config_hash() != archive.config_hash {
        return Err(GatewayError::ReplayDivergence {
            session: "all".into(),
            detail: "scene does not match the recorded configuration hash".into(),
        });
    }
    let mut records = Vec::new();
    for s in &archive.sessions {
        let name = which_name(s.which).to_owned();
        let diverged = |detail: String| GatewayError::ReplayDivergence {
            session: name.clone(),
            detail,
        };
        let mut engine = Engine::new(
            archive.scene.clone(),
            single_plan(&archive.plan),
            archive.session_config.clone(),
        )?;
        for entry in &s.trace {
            if entry.step < engine.steps() {
                return Err(diverged(format!(
                    "trace step {} goes backwards",
                    entry.step
                )));
            }
            while engine.steps() < entry.step {
                engine.advance();
            }
            engine.handle(entry.msg.clone());
        }
        let mut finished = engine.take_finished();
        if finished.len() != 1 {
            return Err(diverged(format!(
                "{} sessions closed during replay",
                finished.len()
            )));
        }
        let log = finished.pop().unwrap().log;
        let text = to_ndjson(&log);
        if text != s.log {
            return Err(diverged(first_difference(&s.log, &text)));
        }
        records.push(SessionRecord::from_log(&log).map_err(|e| diverged(e.to_string()))?);
    }
    Ok(ReplayReport { records })
}
