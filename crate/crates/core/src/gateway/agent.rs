//! Deterministic stand-in for the operator, used by headless runs.
//!
//! The agent keeps the primary task going, waits a reaction delay (fixed,
//! plus optional seeded jitter) after each notification, activates the interaction system of the
//! session's modality and then steers the robot with quantised proportional
//! commands, sending a message only when the command changes. On the replica
//! panel only one arrow can be held, so it moves one axis at a time; the
//! joypad drives all axes at once.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::engine::Engine;
use super::protocol::{InboundBody, JoyAxes, JoyButton, QuestionnaireForm, SessionControl};
use crate::interaction::{
    drone_op_state, robot_affordances, Arrow, ButtonId, ControllerState, DroneOpState,
    GestureEvent, PanelAction,
};
use crate::orchestrator::{Modality, Phase, SecondaryTask};
use crate::sim::{angle_diff, RobotId, Vec3, WorldState};

/// Drone position tolerance per axis, m.
const DRONE_TOL: f64 = 0.03;
/// AGV stopping distance from the route entry centre, m.
const AGV_TOL: f64 = 0.1;
/// Heading error that ends an in-place turn, rad.
const AIM_TOL: f64 = 0.005;
/// Heading error that interrupts driving to re-aim, rad.
const REAIM_TOL: f64 = 0.03;
/// Below this distance the AGV no longer re-aims, m.
const REAIM_MIN_DIST: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct ScriptedAgent {
    /// Seconds between a notification and activation, MR session.
    pub reaction_delay_mr: f64,
    /// Seconds between a notification and activation, joypad session.
    pub reaction_delay_joypad: f64,
    /// Extra delay per task, drawn uniformly from [0, jitter) seconds.
    pub reaction_jitter: f64,
    /// Seconds between primary-task moves.
    pub primary_move_period: f64,
    /// Each session must end within this many simulation steps.
    pub max_steps: u64,
}

impl Default for ScriptedAgent {
    fn default() -> Self {
        Self::reference()
    }
}

impl ScriptedAgent {
    /// Reaction delays of 2 s (MR) and 5 s (joypad). These only exercise the
    /// pipeline and say nothing about human operators.
    pub fn reference() -> Self {
        Self {
            reaction_delay_mr: 2.0,
            reaction_delay_joypad: 5.0,
            reaction_jitter: 0.0,
            primary_move_period: 3.0,
            max_steps: 60_000,
        }
    }

    /// The reference agent with up to `jitter` seconds of per-task delay.
    pub fn jittered(jitter: f64) -> Self {
        Self {
            reaction_jitter: jitter,
            ..Self::reference()
        }
    }

    /// An agent that ignores every notification.
    pub fn never_activates() -> Self {
        Self {
            reaction_delay_mr: f64::INFINITY,
            reaction_delay_joypad: f64::INFINITY,
            ..Self::reference()
        }
    }

    pub fn reaction_delay(&self, m: Modality) -> f64 {
        match m {
            Modality::MrReplica => self.reaction_delay_mr,
            Modality::Joypad => self.reaction_delay_joypad,
        }
    }

    pub(crate) fn begin(&self, seed: u64) -> AgentRun<'_> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let jitter = if self.reaction_jitter > 0.0 {
            [0, 1].map(|_| rng.random::<f64>() * self.reaction_jitter)
        } else {
            [0.0; 2]
        };
        AgentRun {
            cfg: self,
            rng,
            jitter,
            motion: Motion::Still,
            next_primary: self.primary_move_period,
            primary_item: 0,
            aligned: false,
            turning: true,
            sent_sus: false,
            sent_comparative: false,
        }
    }
}

/// Last motion command the agent issued.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Motion {
    Still,
    Arrow(Arrow, f64),
    Axes(JoyAxes),
}

pub(crate) struct AgentRun<'a> {
    cfg: &'a ScriptedAgent,
    rng: ChaCha8Rng,
    jitter: [f64; 2],
    motion: Motion,
    next_primary: f64,
    primary_item: u32,
    aligned: bool,
    turning: bool,
    sent_sus: bool,
    sent_comparative: bool,
}

/// Magnitude for an error `e`, linear inside `slow` and saturated outside,
/// rounded up to multiples of `quantum`, at least `min`.
fn magnitude(e: f64, slow: f64, min: f64, quantum: f64) -> f64 {
    let m = (e.abs() / slow).clamp(min, 1.0);
    ((m / quantum).ceil() * quantum).min(1.0)
}

fn task_robot(task: &SecondaryTask, world: &WorldState) -> Option<RobotId> {
    match task {
        SecondaryTask::AgvRoute { agv, .. } => Some(agv.clone()),
        SecondaryTask::DroneLift { .. } => world.drones.keys().next().cloned(),
    }
}

impl AgentRun<'_> {
    /// Messages to send at the engine's current step.
    pub(crate) fn act(&mut self, engine: &Engine) -> Vec<InboundBody> {
        let Some(state) = engine.session() else {
            return Vec::new();
        };
        let now = engine.now();
        let modality = state.modality;
        let mut out = Vec::new();
        match state.phase {
            Phase::PrimaryOnly => {
                self.aligned = false;
                self.turning = true;
                self.motion = Motion::Still;
                if engine.controller().open_panel().is_some() {
                    out.push(InboundBody::Gesture {
                        event: GestureEvent::StowDevice,
                    });
                }
                if now >= self.next_primary {
                    self.primary_item += 1;
                    self.next_primary += self.cfg.primary_move_period;
                    let control = SessionControl::PrimaryTaskMove {
                        item: self.primary_item,
                    };
                    out.push(InboundBody::SessionControl { control });
                }
            }
            Phase::SecondaryPending(k) => {
                let notified = state.notified_at[k].unwrap_or(now);
                if now < notified + self.cfg.reaction_delay(modality) + self.jitter[k] {
                    return out;
                }
                let Some(robot) = task_robot(&state.tasks[k], engine.world()) else {
                    return out;
                };
                match modality {
                    Modality::MrReplica => {
                        if *engine.controller() == ControllerState::Hidden {
                            out.push(InboundBody::Gesture {
                                event: GestureEvent::PalmUp,
                            });
                        }
                        out.push(InboundBody::Gesture {
                            event: GestureEvent::GrabDevice {
                                robot: robot.clone(),
                            },
                        });
                        out.push(InboundBody::Gesture {
                            event: GestureEvent::ReleaseDevice,
                        });
                        out.push(InboundBody::Gesture {
                            event: GestureEvent::HandNearRobot { robot, near: true },
                        });
                    }
                    Modality::Joypad => {
                        self.motion = Motion::Axes(JoyAxes::default());
                        out.push(InboundBody::JoypadInput {
                            robot,
                            axes: JoyAxes::default(),
                            pressed: vec![],
                        });
                    }
                }
            }
            Phase::SecondaryActive(k) => {
                let task = state.tasks[k].clone();
                let Some(robot) = task_robot(&task, engine.world()) else {
                    return out;
                };
                match &task {
                    SecondaryTask::DroneLift {
                        box_id, landing, ..
                    } => {
                        let world = engine.world();
                        let target = world.zones.get(landing).map(|z| z.center);
                        let box_pos = world.boxes.get(box_id).map(|b| b.pose.position);
                        if let (Some(target), Some(box_pos)) = (target, box_pos) {
                            self.drone_step(engine, modality, &robot, target, box_pos, &mut out);
                        }
                    }
                    SecondaryTask::AgvRoute {
                        route, entry_zone, ..
                    } => {
                        if let Some(target) = engine.world().zones.get(entry_zone).map(|z| z.center)
                        {
                            self.agv_step(
                                engine,
                                modality,
                                &robot,
                                route.clone(),
                                target,
                                &mut out,
                            );
                        }
                    }
                }
            }
            Phase::Done => {
                let Some((sus, comparative)) = engine.awaiting_questionnaire() else {
                    return out;
                };
                if sus && !self.sent_sus {
                    self.sent_sus = true;
                    let items = (0..10).map(|_| self.rng.random_range(1..=5)).collect();
                    out.push(InboundBody::QuestionnaireSubmit {
                        form: QuestionnaireForm::Sus { items },
                    });
                }
                if comparative && !self.sent_comparative {
                    self.sent_comparative = true;
                    let mut pick = || {
                        if self.rng.random_bool(0.5) {
                            Modality::MrReplica
                        } else {
                            Modality::Joypad
                        }
                    };
                    let choices = [pick(), pick(), pick()];
                    out.push(InboundBody::QuestionnaireSubmit {
                        form: QuestionnaireForm::Comparative {
                            choices,
                            comments: Default::default(),
                        },
                    });
                }
            }
        }
        out
    }

    fn press(
        &self,
        modality: Modality,
        robot: &RobotId,
        button: ButtonId,
        joy: JoyButton,
    ) -> InboundBody {
        match modality {
            Modality::MrReplica => InboundBody::PanelAction {
                action: PanelAction::Button(button),
                magnitude: 1.0,
            },
            Modality::Joypad => InboundBody::JoypadInput {
                robot: robot.clone(),
                axes: match self.motion {
                    Motion::Axes(a) => a,
                    _ => JoyAxes::default(),
                },
                pressed: vec![joy],
            },
        }
    }

    fn set_motion(&mut self, m: Motion, robot: &RobotId, out: &mut Vec<InboundBody>) {
        let m = match m {
            Motion::Arrow(_, 0.0) => Motion::Still,
            Motion::Axes(a) if a == JoyAxes::default() => Motion::Still,
            other => other,
        };
        let prev = std::mem::replace(&mut self.motion, m);
        let prev_still = matches!(prev, Motion::Still) || prev == Motion::Axes(JoyAxes::default());
        if prev == m || (prev_still && m == Motion::Still) {
            return;
        }
        out.push(match (m, prev) {
            (Motion::Arrow(a, mag), _) => InboundBody::PanelAction {
                action: PanelAction::Arrow(a),
                magnitude: mag,
            },
            (Motion::Axes(axes), _) => InboundBody::JoypadInput {
                robot: robot.clone(),
                axes,
                pressed: vec![],
            },
            (Motion::Still, Motion::Arrow(a, _)) => InboundBody::PanelAction {
                action: PanelAction::Arrow(a),
                magnitude: 0.0,
            },
            (Motion::Still, _) => InboundBody::JoypadInput {
                robot: robot.clone(),
                axes: JoyAxes::default(),
                pressed: vec![],
            },
        });
    }

    fn drone_step(
        &mut self,
        engine: &Engine,
        modality: Modality,
        robot: &RobotId,
        pad: Vec3,
        box_pos: Vec3,
        out: &mut Vec<InboundBody>,
    ) {
        let world = engine.world();
        let Some(drone) = world.drones.get(robot) else {
            return;
        };
        let Ok(op) = drone_op_state(world, robot) else {
            return;
        };
        let pos = drone.pose.position;
        let target = if drone.carried.is_some() {
            Vec3::new(pad.x, pad.y, pos.z)
        } else {
            Vec3::new(box_pos.x, box_pos.y, box_pos.z + world.config.grasp_offset)
        };
        let err = target - pos;
        let arrived = [err.x, err.y, err.z].iter().all(|e| e.abs() < DRONE_TOL);

        if drone.carried.is_none() && op == DroneOpState::ReadyToPick {
            self.set_motion(Motion::Still, robot, out);
            out.push(self.press(modality, robot, ButtonId::Grasp, JoyButton::A));
            return;
        }
        if !arrived || drone.carried.is_none() {
            let q = |e: f64| magnitude(e, 1.0, 0.05, 0.05);
            let m = match modality {
                Modality::MrReplica => {
                    let axes = [
                        (err.x, Arrow::PlusX, Arrow::MinusX),
                        (err.y, Arrow::PlusY, Arrow::MinusY),
                        (err.z, Arrow::PlusZ, Arrow::MinusZ),
                    ];
                    match axes.iter().find(|(e, _, _)| e.abs() >= DRONE_TOL) {
                        Some((e, pos, neg)) => {
                            Motion::Arrow(if *e > 0.0 { *pos } else { *neg }, q(*e))
                        }
                        None => Motion::Still,
                    }
                }
                Modality::Joypad => {
                    let s = |e: f64| {
                        if e.abs() < DRONE_TOL {
                            0.0
                        } else {
                            e.signum() * q(e)
                        }
                    };
                    Motion::Axes(JoyAxes {
                        left_x: s(err.x),
                        left_y: s(err.y),
                        right_x: 0.0,
                        right_y: s(err.z),
                    })
                }
            };
            self.set_motion(m, robot, out);
            return;
        }
        self.set_motion(Motion::Still, robot, out);
        if op != DroneOpState::ReadyToRelease || drone.yaw_target.is_some() {
            return;
        }
        let can_align =
            robot_affordances(world, robot).is_ok_and(|a| a.allows_button(&ButtonId::Align));
        if !self.aligned && can_align {
            self.aligned = true;
            out.push(self.press(modality, robot, ButtonId::Align, JoyButton::Y));
        } else {
            out.push(self.press(modality, robot, ButtonId::Release, JoyButton::B));
        }
    }

    fn agv_step(
        &mut self,
        engine: &Engine,
        modality: Modality,
        robot: &RobotId,
        route: crate::sim::RouteId,
        target: Vec3,
        out: &mut Vec<InboundBody>,
    ) {
        let Some(agv) = engine.world().agvs.get(robot) else {
            return;
        };
        if agv.on_autopilot() {
            return;
        }
        let pos = agv.pose.position;
        let dist = pos.planar_distance(target);
        if dist < AGV_TOL {
            self.set_motion(Motion::Still, robot, out);
            out.push(self.press(modality, robot, ButtonId::Route(route), JoyButton::A));
            return;
        }
        let bearing = (target.y - pos.y).atan2(target.x - pos.x);
        let e = angle_diff(bearing, agv.pose.yaw);
        if self.turning && e.abs() < AIM_TOL {
            self.turning = false;
        } else if !self.turning && e.abs() > REAIM_TOL && dist > REAIM_MIN_DIST {
            self.turning = true;
        }
        let m = if self.turning {
            let mag = magnitude(e, 1.0, 0.02, 0.01);
            let arrow = if e > 0.0 { Arrow::YawCcw } else { Arrow::YawCw };
            match modality {
                Modality::MrReplica => Motion::Arrow(arrow, mag),
                Modality::Joypad => Motion::Axes(JoyAxes {
                    right_x: if e > 0.0 { -mag } else { mag },
                    ..Default::default()
                }),
            }
        } else {
            let mag = magnitude(dist, 1.0, 0.05, 0.05);
            match modality {
                Modality::MrReplica => Motion::Arrow(Arrow::Forward, mag),
                Modality::Joypad => Motion::Axes(JoyAxes {
                    left_y: mag,
                    ..Default::default()
                }),
            }
        };
        self.set_motion(m, robot, out);
    }
}
