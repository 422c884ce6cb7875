use serde::{Deserialize, Serialize};

use super::plan::{SessionPlan, Which};
use super::{Modality, OrchestratorError, TaskKind};
use crate::sim::{BoxId, RobotId, RouteId, TaskDefs, WorldState, ZoneId};

/// Slack applied when comparing elapsed time against the notification delay,
/// so that accumulated step sums like 1500 × 0.02 still trigger at 30 s.
const TIME_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SecondaryTask {
    AgvRoute {
        agv: RobotId,
        route: RouteId,
        entry_zone: ZoneId,
    },
    DroneLift {
        #[serde(rename = "box")]
        box_id: BoxId,
        takeoff: ZoneId,
        landing: ZoneId,
    },
}

impl SecondaryTask {
    pub fn kind(&self) -> TaskKind {
        match self {
            SecondaryTask::AgvRoute { .. } => TaskKind::AgvRoute,
            SecondaryTask::DroneLift { .. } => TaskKind::DroneLift,
        }
    }

    pub fn from_defs(kind: TaskKind, defs: &TaskDefs) -> Self {
        match kind {
            TaskKind::AgvRoute => SecondaryTask::AgvRoute {
                agv: defs.agv_route.agv.clone(),
                route: defs.agv_route.route.clone(),
                entry_zone: defs.agv_route.entry_zone.clone(),
            },
            TaskKind::DroneLift => SecondaryTask::DroneLift {
                box_id: defs.drone_lift.box_id.clone(),
                takeoff: defs.drone_lift.takeoff.clone(),
                landing: defs.drone_lift.landing.clone(),
            },
        }
    }

    fn check_resolves(&self, world: &WorldState) -> Result<(), OrchestratorError> {
        let missing = |what: &str| Err(OrchestratorError::SceneNotReady(format!("missing {what}")));
        match self {
            SecondaryTask::AgvRoute {
                agv,
                route,
                entry_zone,
            } => {
                if !world.agvs.contains_key(agv) {
                    return missing(&format!("AGV {agv}"));
                }
                if !world.routes.contains_key(route) {
                    return missing(&format!("route {route}"));
                }
                if !world.zones.contains_key(entry_zone) {
                    return missing(&format!("zone {entry_zone}"));
                }
            }
            SecondaryTask::DroneLift {
                box_id,
                takeoff,
                landing,
            } => {
                if !world.boxes.contains_key(box_id) {
                    return missing(&format!("box {box_id}"));
                }
                for z in [takeoff, landing] {
                    if !world.zones.contains_key(z) {
                        return missing(&format!("zone {z}"));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Completion predicate for a secondary task.
///
/// The AGV task counts as done once the task's route has been assigned to the
/// AGV (assignment itself requires being at the route entry); route
/// completion is not awaited. The drone task is done when the box rests,
/// released, inside the landing pad.
pub fn task_done(task: &SecondaryTask, world: &WorldState) -> bool {
    match task {
        SecondaryTask::AgvRoute { agv, route, .. } => world
            .agvs
            .get(agv)
            .is_some_and(|a| a.last_assigned_route.as_ref() == Some(route)),
        SecondaryTask::DroneLift {
            box_id, landing, ..
        } => match (world.boxes.get(box_id), world.zones.get(landing)) {
            (Some(b), Some(zone)) => {
                b.carried_by.is_none() && b.pose.position.planar_distance(zone.center) < zone.radius
            }
            _ => false,
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NotificationChannel {
    /// Screen on the work table, used with the joypad.
    WorkTableScreen,
    /// Alert inside the mixed-reality headset.
    HeadsetOverlay,
}

impl NotificationChannel {
    pub fn for_modality(m: Modality) -> Self {
        match m {
            Modality::Joypad => NotificationChannel::WorkTableScreen,
            Modality::MrReplica => NotificationChannel::HeadsetOverlay,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Notification {
    pub task: SecondaryTask,
    pub task_index: usize,
    pub channel: NotificationChannel,
    pub issued_at: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "phase", content = "task", rename_all = "snake_case")]
pub enum Phase {
    PrimaryOnly,
    SecondaryPending(usize),
    SecondaryActive(usize),
    Done,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SessionConfig {
    /// Primary-task time before each secondary task is notified.
    pub notify_after: f64,
}

impl Default for SessionConfig {
    fn default() -> Self {
        Self { notify_after: 30.0 }
    }
}

/// Live progress of one experimental session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionState {
    pub phase: Phase,
    pub modality: Modality,
    pub which: Which,
    pub tasks: [SecondaryTask; 2],
    pub notified_at: [Option<f64>; 2],
    pub activated_at: [Option<f64>; 2],
    pub completed_at: [Option<f64>; 2],
    /// When the current primary-only stretch began.
    pub primary_since: f64,
    pub last_tick: f64,
    pub notify_after: f64,
}

pub fn start_session(
    plan: &SessionPlan,
    which: Which,
    tasks: &TaskDefs,
    world: &WorldState,
    config: &SessionConfig,
) -> Result<SessionState, OrchestratorError> {
    plan.validate()?;
    let tasks = plan.task_order.map(|k| SecondaryTask::from_defs(k, tasks));
    for t in &tasks {
        t.check_resolves(world)?;
    }
    Ok(SessionState {
        phase: Phase::PrimaryOnly,
        modality: plan.modality(which),
        which,
        tasks,
        notified_at: [None; 2],
        activated_at: [None; 2],
        completed_at: [None; 2],
        primary_since: world.sim_time,
        last_tick: world.sim_time,
        notify_after: config.notify_after,
    })
}

impl SessionState {
    pub fn is_done(&self) -> bool {
        self.phase == Phase::Done
    }

    /// Task currently notified or being worked on.
    pub fn current_task(&self) -> Option<(usize, &SecondaryTask)> {
        match self.phase {
            Phase::SecondaryPending(k) | Phase::SecondaryActive(k) => Some((k, &self.tasks[k])),
            _ => None,
        }
    }

    /// Advances the protocol to time `now`. Returns the notification issued
    /// at this tick, if any. Ticks that go back in time are ignored.
    pub fn tick(&mut self, world: &WorldState, now: f64) -> Option<Notification> {
        if now < self.last_tick {
            return None;
        }
        self.last_tick = now;
        match self.phase {
            Phase::PrimaryOnly => {
                if now - self.primary_since + TIME_EPS < self.notify_after {
                    return None;
                }
                let k = if self.completed_at[0].is_some() { 1 } else { 0 };
                self.phase = Phase::SecondaryPending(k);
                self.notified_at[k] = Some(now);
                Some(Notification {
                    task: self.tasks[k].clone(),
                    task_index: k,
                    channel: NotificationChannel::for_modality(self.modality),
                    issued_at: now,
                })
            }
            Phase::SecondaryActive(k) => {
                if task_done(&self.tasks[k], world) {
                    self.completed_at[k] = Some(now);
                    if k == 0 {
                        self.phase = Phase::PrimaryOnly;
                        self.primary_since = now;
                    } else {
                        self.phase = Phase::Done;
                    }
                }
                None
            }
            Phase::SecondaryPending(_) | Phase::Done => None,
        }
    }

    /// The operator engaged the interaction system (panel opened or first
    /// joypad input) for the pending task.
    pub fn record_activation(&mut self, now: f64) -> Result<usize, OrchestratorError> {
        match self.phase {
            Phase::SecondaryPending(k) => {
                self.activated_at[k] = Some(now);
                self.phase = Phase::SecondaryActive(k);
                Ok(k)
            }
            _ => Err(OrchestratorError::NotPending),
        }
    }
}
