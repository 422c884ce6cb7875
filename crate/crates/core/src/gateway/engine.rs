//! The session engine: one owner for the world, the controller, the running
//! session and its event log. The socket server and the headless runner both
//! drive it through [`Engine::handle`] and [`Engine::advance`], so a recorded
//! inbound trace replays to the same log.

use std::collections::BTreeMap;

use super::joypad::{joypad_arrows, joypad_button};
use super::protocol::{
    CameraObject, CameraObjectKind, HelloInfo, Inbound, InboundBody, JoyAxes, JoyButton, Outbound,
    PanelView, QuestionnaireForm, SceneSummary, SessionControl, PROTOCOL_VERSION,
};
use super::GatewayError;
use crate::interaction::{
    avatar_color, camera_toggle, dispatch, dispatch_arrows, drone_op_state, lifecycle_step,
    robot_affordances, ControllerState, DroneOpState, GestureEvent, PanelAction, SimCommand,
};
use crate::metrics::{Answer, CommandSource, EventKind, LogEvent, SusResponse};
use crate::orchestrator::{
    start_session, Modality, Phase, SessionConfig, SessionPlan, SessionState, StudyPlan, Which,
};
use crate::sim::{wrap_angle, Pose, RobotId, Scene, WorldState};

/// Objects farther than this from the drone are not in its camera frame.
pub const CAMERA_RANGE: f64 = 10.0;

/// Log timestamps are kept to the microsecond.
fn round_time(t: f64) -> f64 {
    (t * 1e6).round() / 1e6
}

/// Who receives an outbound message.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Delivery {
    /// The client whose message is being handled.
    Sender,
    Broadcast,
}

pub type Outgoing = Vec<(Delivery, Outbound)>;

/// A session whose log is closed.
#[derive(Debug, Clone, PartialEq)]
pub struct FinishedSession {
    pub subject: String,
    pub which: Which,
    pub modality: Modality,
    pub aborted: bool,
    pub log: Vec<LogEvent>,
}

#[derive(Debug, Clone)]
struct ActiveSession {
    plan: SessionPlan,
    state: SessionState,
    log: Vec<LogEvent>,
    sus_done: bool,
    comparative_done: bool,
}

#[derive(Debug, Clone)]
pub struct Engine {
    scene: Scene,
    plan: StudyPlan,
    session_cfg: SessionConfig,
    world: WorldState,
    ctrl: ControllerState,
    camera_view: bool,
    hand_near: Option<RobotId>,
    steps: u64,
    session: Option<ActiveSession>,
    finished: Vec<FinishedSession>,
    colors: BTreeMap<RobotId, DroneOpState>,
    last_affordance: Option<Outbound>,
}

fn op_state_name(s: DroneOpState) -> String {
    serde_json::to_value(s)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_default()
}

impl Engine {
    pub fn new(
        scene: Scene,
        plan: StudyPlan,
        session_cfg: SessionConfig,
    ) -> Result<Self, GatewayError> {
        let world = scene
            .build_world()
            .map_err(|e| GatewayError::InvalidConfig(e.to_string()))?;
        for p in &plan.subjects {
            p.validate()
                .map_err(|e| GatewayError::InvalidConfig(e.to_string()))?;
        }
        let mut engine = Self {
            scene,
            plan,
            session_cfg,
            world,
            ctrl: ControllerState::Hidden,
            camera_view: false,
            hand_near: None,
            steps: 0,
            session: None,
            finished: Vec::new(),
            colors: BTreeMap::new(),
            last_affordance: None,
        };
        engine.colors = engine.current_colors();
        engine.last_affordance = Some(engine.affordance_update());
        Ok(engine)
    }

    pub fn world(&self) -> &WorldState {
        &self.world
    }

    pub fn scene(&self) -> &Scene {
        &self.scene
    }

    pub fn controller(&self) -> &ControllerState {
        &self.ctrl
    }

    pub fn camera_view(&self) -> bool {
        self.camera_view
    }

    /// Steps advanced since the engine was created.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Simulation time, rounded as it appears in logs.
    pub fn now(&self) -> f64 {
        round_time(self.world.sim_time)
    }

    pub fn session(&self) -> Option<&SessionState> {
        self.session.as_ref().map(|s| &s.state)
    }

    pub fn session_log(&self) -> Option<&[LogEvent]> {
        self.session.as_ref().map(|s| s.log.as_slice())
    }

    /// Whether the running session is waiting for its questionnaire forms.
    pub fn awaiting_questionnaire(&self) -> Option<(bool, bool)> {
        let s = self.session.as_ref()?;
        s.state.is_done().then_some((
            !s.sus_done,
            s.state.which == Which::Second && !s.comparative_done,
        ))
    }

    pub fn take_finished(&mut self) -> Vec<FinishedSession> {
        std::mem::take(&mut self.finished)
    }

    pub fn scene_summary(&self) -> SceneSummary {
        SceneSummary {
            name: self.scene.name.clone(),
            config_hash: self.scene.config_hash(),
            dt: self.world.config.dt,
            drones: self.world.drones.keys().cloned().collect(),
            agvs: self.world.agvs.keys().cloned().collect(),
            routes: self.world.routes.keys().cloned().collect(),
        }
    }

    pub fn snapshot(&self) -> Outbound {
        Outbound::Snapshot {
            sim_time: self.now(),
            drones: self.world.drones.values().cloned().collect(),
            agvs: self.world.agvs.values().cloned().collect(),
            boxes: self.world.boxes.values().cloned().collect(),
        }
    }

    /// Scene geometry seen from the drone, while the camera view is on.
    pub fn camera_frame(&self) -> Option<Outbound> {
        if !self.camera_view {
            return None;
        }
        let drone = match self
            .ctrl
            .open_panel()
            .and_then(|r| self.world.drones.get(r))
        {
            Some(d) => d,
            None => self.world.drones.values().next()?,
        };
        let origin = drone.pose;
        let (s, c) = origin.yaw.sin_cos();
        let relative = |p: Pose| {
            let d = p.position - origin.position;
            let mut local = d;
            local.x = c * d.x + s * d.y;
            local.y = -s * d.x + c * d.y;
            Pose::new(local, wrap_angle(p.yaw - origin.yaw))
        };
        let mut objects = Vec::new();
        let mut add = |id: String, kind, pose: Pose| {
            if pose.position.distance(origin.position) <= CAMERA_RANGE {
                objects.push(CameraObject {
                    id,
                    kind,
                    relative: relative(pose),
                });
            }
        };
        for b in self.world.boxes.values() {
            add(b.id.to_string(), CameraObjectKind::Box, b.pose);
        }
        for a in self.world.agvs.values() {
            add(a.id.to_string(), CameraObjectKind::Agv, a.pose);
        }
        for z in self.world.zones.values() {
            add(
                z.id.to_string(),
                CameraObjectKind::Zone,
                Pose::new(z.center, z.pad_yaw),
            );
        }
        Some(Outbound::CameraFrame {
            sim_time: self.now(),
            robot: drone.id.clone(),
            objects,
        })
    }

    pub fn affordance_update(&self) -> Outbound {
        let hand_near =
            self.ctrl.open_panel().is_some() && self.ctrl.open_panel() == self.hand_near.as_ref();
        let panel = self.ctrl.open_panel().map(|robot| {
            let affordances = robot_affordances(&self.world, robot).unwrap_or_default();
            PanelView {
                robot: robot.clone(),
                arrows_shown: affordances.arrows_shown(hand_near),
                affordances,
            }
        });
        Outbound::AffordanceUpdate {
            controller: self.ctrl.clone(),
            camera_view: self.camera_view,
            hand_near,
            panel,
        }
    }

    fn current_colors(&self) -> BTreeMap<RobotId, DroneOpState> {
        self.world
            .drones
            .keys()
            .filter_map(|id| {
                drone_op_state(&self.world, id)
                    .ok()
                    .map(|s| (id.clone(), s))
            })
            .collect()
    }

    fn log(&mut self, kind: EventKind, out: &mut Outgoing) {
        let t = self.now();
        if let Some(s) = &mut self.session {
            let event = LogEvent::new(t, kind);
            s.log.push(event.clone());
            out.push((Delivery::Broadcast, Outbound::SessionEvent { event }));
        }
    }

    /// Broadcasts avatar colour and affordance changes since the last call.
    fn push_changes(&mut self, out: &mut Outgoing) {
        for (id, state) in self.current_colors() {
            let prev = self.colors.insert(id.clone(), state);
            if prev != Some(state) {
                if let Some(prev) = prev {
                    let kind = EventKind::StateChange {
                        entity: id.to_string(),
                        from: op_state_name(prev),
                        to: op_state_name(state),
                    };
                    self.log(kind, out);
                }
                out.push((
                    Delivery::Broadcast,
                    Outbound::StateColor {
                        robot: id,
                        state,
                        color: avatar_color(state),
                    },
                ));
            }
        }
        let update = self.affordance_update();
        if self.last_affordance.as_ref() != Some(&update) {
            self.last_affordance = Some(update.clone());
            out.push((Delivery::Broadcast, update));
        }
    }

    /// Advances the simulation by one fixed step and the session protocol
    /// to the new time.
    pub fn advance(&mut self) -> Outgoing {
        self.world.step(self.world.config.dt);
        self.steps += 1;
        let now = self.now();
        let mut out = Vec::new();
        let mut events = Vec::new();
        let mut note = None;
        if let Some(s) = &mut self.session {
            if !s.state.is_done() {
                let before = s.state.completed_at;
                note = s.state.tick(&self.world, now);
                for (k, (b, a)) in before.iter().zip(s.state.completed_at).enumerate() {
                    if b.is_none() && a.is_some() {
                        events.push(EventKind::TaskCompleted { task: k });
                    }
                }
            }
        }
        for e in events {
            self.log(e, &mut out);
        }
        if let Some(n) = note {
            let kind = EventKind::TaskNotified {
                task: n.task_index,
                task_kind: n.task.kind(),
                channel: n.channel,
            };
            self.log(kind, &mut out);
            out.push((
                Delivery::Broadcast,
                Outbound::NotificationMsg { notification: n },
            ));
        }
        self.push_changes(&mut out);
        out
    }

    pub fn handle(&mut self, msg: Inbound) -> Outgoing {
        let mut out = Vec::new();
        let reply = match self.handle_body(msg.body, &mut out) {
            Ok(hello) => Outbound::Ack {
                corr: msg.id,
                hello,
            },
            Err(reason) => Outbound::Err {
                corr: Some(msg.id),
                reason,
            },
        };
        out.insert(0, (Delivery::Sender, reply));
        self.push_changes(&mut out);
        out
    }

    fn session_modality(&self) -> Option<Modality> {
        self.session.as_ref().map(|s| s.state.modality)
    }

    fn require_modality(&self, m: Modality, what: &str) -> Result<(), String> {
        match self.session_modality() {
            Some(active) if active != m => Err(format!(
                "{what} is not used in the {} session",
                active.label()
            )),
            _ => Ok(()),
        }
    }

    /// Marks the pending secondary task as activated, if there is one.
    fn activate_if_pending(&mut self, out: &mut Outgoing) {
        let now = self.now();
        let Some(s) = &mut self.session else { return };
        if matches!(s.state.phase, Phase::SecondaryPending(_)) {
            if let Ok(task) = s.state.record_activation(now) {
                self.log(EventKind::InteractionActivated { task }, out);
            }
        }
    }

    fn apply(
        &mut self,
        cmd: SimCommand,
        source: CommandSource,
        out: &mut Outgoing,
    ) -> Result<(), String> {
        cmd.apply(&mut self.world).map_err(|e| e.to_string())?;
        self.log(
            EventKind::Command {
                source,
                command: Some(cmd),
                item: None,
            },
            out,
        );
        Ok(())
    }

    fn handle_body(
        &mut self,
        body: InboundBody,
        out: &mut Outgoing,
    ) -> Result<Option<HelloInfo>, String> {
        match body {
            InboundBody::Hello { .. } => {
                return Ok(Some(HelloInfo {
                    protocol_version: PROTOCOL_VERSION,
                    scene: self.scene_summary(),
                }))
            }
            InboundBody::Gesture { event } => self.gesture(event, out)?,
            InboundBody::PanelAction { action, magnitude } => {
                self.panel_action(action, magnitude, out)?
            }
            InboundBody::JoypadInput {
                robot,
                axes,
                pressed,
            } => self.joypad(robot, axes, pressed, out)?,
            InboundBody::QuestionnaireSubmit { form } => self.questionnaire(form, out)?,
            InboundBody::SessionControl { control } => self.session_control(control, out)?,
        }
        Ok(None)
    }

    fn known_robot(&self, robot: &RobotId) -> Result<(), String> {
        if self.world.drones.contains_key(robot) || self.world.agvs.contains_key(robot) {
            Ok(())
        } else {
            Err(format!("unknown robot `{robot}`"))
        }
    }

    fn gesture(&mut self, event: GestureEvent, out: &mut Outgoing) -> Result<(), String> {
        self.require_modality(Modality::MrReplica, "the replica controller")?;
        match &event {
            GestureEvent::HandNearRobot { robot, near } => {
                self.known_robot(robot)?;
                if *near {
                    self.hand_near = Some(robot.clone());
                } else if self.hand_near.as_ref() == Some(robot) {
                    self.hand_near = None;
                }
                return Ok(());
            }
            GestureEvent::ThumbUp => {
                self.camera_view = camera_toggle(self.camera_view, &event);
                return Ok(());
            }
            GestureEvent::GrabDevice { robot } => self.known_robot(robot)?,
            _ => {}
        }
        let next = lifecycle_step(&self.ctrl, &event).map_err(|e| e.to_string())?;
        let from = self.ctrl.name().to_owned();
        self.ctrl = next;
        let kind = EventKind::StateChange {
            entity: "controller".into(),
            from,
            to: self.ctrl.name().into(),
        };
        self.log(kind, out);
        if self.ctrl.open_panel().is_some() {
            self.activate_if_pending(out);
        }
        Ok(())
    }

    fn panel_action(
        &mut self,
        action: PanelAction,
        magnitude: f64,
        out: &mut Outgoing,
    ) -> Result<(), String> {
        self.require_modality(Modality::MrReplica, "the replica panel")?;
        let cmd =
            dispatch(&self.ctrl, &self.world, &action, magnitude).map_err(|e| e.to_string())?;
        let mut trial = self.world.clone();
        cmd.apply(&mut trial).map_err(|e| e.to_string())?;
        self.activate_if_pending(out);
        self.apply(cmd, CommandSource::Panel, out)
    }

    fn joypad(
        &mut self,
        robot: RobotId,
        axes: JoyAxes,
        pressed: Vec<JoyButton>,
        out: &mut Outgoing,
    ) -> Result<(), String> {
        self.require_modality(Modality::Joypad, "the joypad")?;
        self.known_robot(&robot)?;
        let arrows = joypad_arrows(self.world.is_drone(&robot), &axes)?;
        self.activate_if_pending(out);
        let ctrl = ControllerState::PanelOpen {
            robot: robot.clone(),
        };
        let visible = robot_affordances(&self.world, &robot)
            .map_err(|e| e.to_string())?
            .arrows_visible;
        if !arrows.is_empty() || visible {
            let cmd = dispatch_arrows(&ctrl, &self.world, &arrows).map_err(|e| e.to_string())?;
            self.apply(cmd, CommandSource::Joypad, out)?;
        }
        for b in pressed {
            let button = joypad_button(&self.world, &robot, b)?;
            let cmd = dispatch(&ctrl, &self.world, &PanelAction::Button(button), 1.0)
                .map_err(|e| e.to_string())?;
            self.apply(cmd, CommandSource::Joypad, out)?;
        }
        Ok(())
    }

    fn questionnaire(&mut self, form: QuestionnaireForm, out: &mut Outgoing) -> Result<(), String> {
        let s = self.session.as_ref().ok_or("no session is running")?;
        if !s.state.is_done() {
            return Err("questionnaires are answered after both secondary tasks".into());
        }
        let second = s.state.which == Which::Second;
        let mut answers = Vec::new();
        match form {
            QuestionnaireForm::Sus { items } => {
                if s.sus_done {
                    return Err("SUS form already submitted".into());
                }
                let r = SusResponse::from_scores(&items).map_err(|e| e.to_string())?;
                for (i, v) in r.items().iter().enumerate() {
                    answers.push((format!("q{}", i + 1), Answer::Score(*v)));
                }
                self.session.as_mut().unwrap().sus_done = true;
            }
            QuestionnaireForm::Comparative { choices, comments } => {
                if !second {
                    return Err("the comparative block follows the second session".into());
                }
                if s.comparative_done {
                    return Err("comparative form already submitted".into());
                }
                for (i, (choice, comment)) in choices.iter().zip(comments).enumerate() {
                    answers.push((format!("c{}", i + 1), Answer::Choice(*choice)));
                    if let Some(text) = comment {
                        answers.push((format!("c{}_comment", i + 1), Answer::Text(text)));
                    }
                }
                self.session.as_mut().unwrap().comparative_done = true;
            }
        }
        for (item, answer) in answers {
            self.log(EventKind::QuestionnaireAnswer { item, answer }, out);
        }
        let s = self.session.as_ref().unwrap();
        if s.sus_done && (!second || s.comparative_done) {
            self.finish(false, out);
        }
        Ok(())
    }

    fn finish(&mut self, aborted: bool, out: &mut Outgoing) {
        self.log(EventKind::SessionEnd, out);
        if let Some(s) = self.session.take() {
            self.finished.push(FinishedSession {
                subject: s.plan.subject_id,
                which: s.state.which,
                modality: s.state.modality,
                aborted,
                log: s.log,
            });
        }
    }

    fn session_control(
        &mut self,
        control: SessionControl,
        out: &mut Outgoing,
    ) -> Result<(), String> {
        match control {
            SessionControl::Start { subject, session } => {
                if self.session.is_some() {
                    return Err("a session is already running".into());
                }
                let plan = self
                    .plan
                    .subject(&subject)
                    .ok_or_else(|| format!("subject `{subject}` is not in the plan"))?
                    .clone();
                // bodies reset, the clock keeps running
                let mut world = self.scene.build_world().map_err(|e| e.to_string())?;
                world.sim_time = self.world.sim_time;
                let state =
                    start_session(&plan, session, &self.scene.tasks, &world, &self.session_cfg)
                        .map_err(|e| e.to_string())?;
                self.world = world;
                self.ctrl = ControllerState::Hidden;
                self.camera_view = false;
                self.hand_near = None;
                self.colors.clear();
                let modality = state.modality;
                self.session = Some(ActiveSession {
                    plan,
                    state,
                    log: Vec::new(),
                    sus_done: false,
                    comparative_done: false,
                });
                self.log(
                    EventKind::SessionStart {
                        subject,
                        session,
                        modality,
                    },
                    out,
                );
            }
            SessionControl::Abort => {
                if self.session.is_none() {
                    return Err("no session is running".into());
                }
                self.finish(true, out);
            }
            SessionControl::PrimaryTaskMove { item } => {
                self.log(
                    EventKind::Command {
                        source: CommandSource::PrimaryTask,
                        command: None,
                        item: Some(item),
                    },
                    out,
                );
            }
        }
        Ok(())
    }
}
