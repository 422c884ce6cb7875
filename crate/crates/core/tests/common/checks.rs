//! One function per acceptance criterion. Each returns a short summary on
//! success and the first failures otherwise; the acceptance target prints
//! them and the per-area test files assert on them.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_rational::Ratio;
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::{Config, TestRunner};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use replica::gateway::protocol::{
    decode_inbound, decode_payload, encode_frame, FrameDecoder, Inbound, InboundBody, JoyAxes,
    JoyButton, Outbound, SessionControl,
};
use replica::gateway::{replay, run_headless, Engine, ScriptedAgent};
use replica::interaction::fixture::{conformance_fixture_json, ConformanceFixture};
use replica::interaction::{
    affordances_for, avatar_color, camera_toggle, dispatch, dispatch_arrows, drone_op_state,
    lifecycle_step, robot_affordances, AffordanceSet, Arrow, AvatarColor, ButtonId,
    ControllerState, DroneOpState, GestureEvent, PanelAction, SimCommand,
};
use replica::metrics::{
    derive_timings, paired_t_test, proportion, render_csv, render_table, student_t_two_sided,
    summarize_study, sus_score, synthetic_cohort, CohortTarget, CommandSource, EventKind, LogEvent,
    Metric, SessionRecord, SusResponse,
};
use replica::orchestrator::{
    latin_plan, Modality, NotificationChannel, SessionConfig, StudyPlan, TaskKind, Which,
    CONDITION_SEQUENCES,
};
use replica::sim::{wrap_angle, BoxId, Pose, RobotId, RouteId, Scene, Vec3, WorldState, ZoneKind};

use super::wire::{inbound, outbound};

pub type Check = Result<String, String>;

fn verdict(failures: Vec<String>, summary: String) -> Check {
    if failures.is_empty() {
        Ok(summary)
    } else {
        let shown: Vec<_> = failures.iter().take(5).cloned().collect();
        Err(format!(
            "{} failures, first: {}",
            failures.len(),
            shown.join("; ")
        ))
    }
}

fn within(limit: Duration, elapsed: Duration, what: &str, failures: &mut Vec<String>) {
    if elapsed > limit {
        failures.push(format!("{what} took {elapsed:?}, limit {limit:?}"));
    }
}

// ---------------------------------------------------------------- oracles

const DRONE_ARROWS: [Arrow; 8] = [
    Arrow::PlusX,
    Arrow::MinusX,
    Arrow::PlusY,
    Arrow::MinusY,
    Arrow::PlusZ,
    Arrow::MinusZ,
    Arrow::YawCw,
    Arrow::YawCcw,
];
const AGV_ARROWS: [Arrow; 4] = [Arrow::Forward, Arrow::Backward, Arrow::YawCw, Arrow::YawCcw];

/// What a panel should expose, written down from the interface description.
#[derive(Debug, Clone, PartialEq)]
pub struct Expected {
    pub arrows: BTreeSet<Arrow>,
    pub buttons: BTreeSet<ButtonId>,
}

impl Expected {
    fn new(arrows: &[Arrow], visible: bool, buttons: impl IntoIterator<Item = ButtonId>) -> Self {
        Self {
            arrows: if visible {
                arrows.iter().copied().collect()
            } else {
                BTreeSet::new()
            },
            buttons: buttons.into_iter().collect(),
        }
    }

    fn matches(&self, set: &AffordanceSet) -> bool {
        set.arrows_visible == !self.arrows.is_empty()
            && set.arrows == self.arrows
            && set.buttons.iter().cloned().collect::<BTreeSet<_>>() == self.buttons
            && set.buttons.len() == self.buttons.len()
    }
}

pub fn oracle_color(state: DroneOpState) -> AvatarColor {
    match state {
        DroneOpState::Freedrive => AvatarColor::DarkGrey,
        DroneOpState::ReadyToPick => AvatarColor::Green,
        DroneOpState::Picking => AvatarColor::Red,
        DroneOpState::ReadyToRelease => AvatarColor::Yellow,
    }
}

pub fn oracle_drone_panel(state: DroneOpState, autonomous: bool, vision: bool) -> Expected {
    match state {
        DroneOpState::Freedrive => Expected::new(&DRONE_ARROWS, true, []),
        DroneOpState::ReadyToPick => Expected::new(&DRONE_ARROWS, true, [ButtonId::Grasp]),
        DroneOpState::Picking => Expected::new(&DRONE_ARROWS, !autonomous, []),
        DroneOpState::ReadyToRelease => {
            let mut b = vec![ButtonId::Release, ButtonId::Rotate90];
            if vision {
                b.push(ButtonId::Align);
            }
            Expected::new(&DRONE_ARROWS, true, b)
        }
    }
}

fn inside(world: &WorldState, p: Vec3, kind: ZoneKind) -> bool {
    world
        .zones
        .values()
        .any(|z| z.kind == kind && (p.x - z.center.x).hypot(p.y - z.center.y) < z.radius)
}

pub fn oracle_drone_state(world: &WorldState, drone: &RobotId) -> DroneOpState {
    let d = &world.drones[drone];
    let p = d.pose.position;
    if d.carried.is_some() {
        return if inside(world, p, ZoneKind::LandingPad) {
            DroneOpState::ReadyToRelease
        } else {
            DroneOpState::Picking
        };
    }
    let gripper = Vec3::new(p.x, p.y, p.z - world.config.grasp_offset);
    let near_box = world.boxes.values().any(|b| {
        let q = b.pose.position;
        b.carried_by.is_none()
            && ((q.x - gripper.x).powi(2) + (q.y - gripper.y).powi(2) + (q.z - gripper.z).powi(2))
                .sqrt()
                <= world.config.grasp_radius
    });
    if near_box && inside(world, p, ZoneKind::TakeoffPad) {
        DroneOpState::ReadyToPick
    } else {
        DroneOpState::Freedrive
    }
}

pub fn oracle_panel(world: &WorldState, robot: &RobotId) -> Option<Expected> {
    if let Some(d) = world.drones.get(robot) {
        let state = oracle_drone_state(world, robot);
        return Some(oracle_drone_panel(
            state,
            d.autonomous_flight,
            world.config.vision_available,
        ));
    }
    let agv = world.agvs.get(robot)?;
    let manual = agv.active_route.is_none() && agv.goto_target.is_none();
    let busy: BTreeSet<&RouteId> = world
        .agvs
        .values()
        .filter_map(|a| a.active_route.as_ref())
        .collect();
    let mut buttons: Vec<ButtonId> = Vec::new();
    if manual {
        buttons.extend(
            world
                .routes
                .keys()
                .filter(|r| !busy.contains(r))
                .cloned()
                .map(ButtonId::Route),
        );
    }
    buttons.push(if agv.fork_raised {
        ButtonId::LowerForks
    } else {
        ButtonId::LiftForks
    });
    buttons.push(ButtonId::GoToCharge);
    Some(Expected::new(&AGV_ARROWS, manual, buttons))
}

/// Arrows and buttons a command needs; motion commands need the arrow panel
/// itself even when they stop the robot.
fn required(cmd: &SimCommand) -> (Vec<Arrow>, Option<ButtonId>, bool) {
    let sign = |v: f64, pos: Arrow, neg: Arrow| {
        if v > 0.0 {
            Some(pos)
        } else if v < 0.0 {
            Some(neg)
        } else {
            None
        }
    };
    match cmd {
        SimCommand::CommandDrone {
            velocity, yaw_rate, ..
        } => (
            [
                sign(velocity.x, Arrow::PlusX, Arrow::MinusX),
                sign(velocity.y, Arrow::PlusY, Arrow::MinusY),
                sign(velocity.z, Arrow::PlusZ, Arrow::MinusZ),
                sign(*yaw_rate, Arrow::YawCcw, Arrow::YawCw),
            ]
            .into_iter()
            .flatten()
            .collect(),
            None,
            true,
        ),
        SimCommand::CommandAgv {
            forward_speed,
            yaw_rate,
            ..
        } => (
            [
                sign(*forward_speed, Arrow::Forward, Arrow::Backward),
                sign(*yaw_rate, Arrow::YawCcw, Arrow::YawCw),
            ]
            .into_iter()
            .flatten()
            .collect(),
            None,
            true,
        ),
        SimCommand::Grasp { .. } => (vec![], Some(ButtonId::Grasp), false),
        SimCommand::Release { .. } => (vec![], Some(ButtonId::Release), false),
        SimCommand::RotateQuarter { .. } => (vec![], Some(ButtonId::Rotate90), false),
        SimCommand::AlignToPad { .. } => (vec![], Some(ButtonId::Align), false),
        SimCommand::AssignRoute { route, .. } => {
            (vec![], Some(ButtonId::Route(route.clone())), false)
        }
        SimCommand::SetForks { raised: true, .. } => (vec![], Some(ButtonId::LiftForks), false),
        SimCommand::SetForks { raised: false, .. } => (vec![], Some(ButtonId::LowerForks), false),
        SimCommand::GoToCharge { .. } => (vec![], Some(ButtonId::GoToCharge), false),
    }
}

pub fn command_kind(cmd: &SimCommand) -> String {
    let json = serde_json::to_value(cmd).unwrap();
    json["command"].as_str().unwrap().to_owned()
}

/// `None` when the command is covered by a live affordance of `robot`.
fn gating_violation(
    world: &WorldState,
    robot: Option<&RobotId>,
    cmd: &SimCommand,
) -> Option<String> {
    let Some(robot) = robot else {
        return Some(format!("{cmd:?} issued with no panel open"));
    };
    if cmd.robot() != robot {
        return Some(format!("{cmd:?} addressed to another robot than {robot}"));
    }
    let Some(live) = oracle_panel(world, robot) else {
        return Some(format!("{cmd:?} for unknown robot"));
    };
    let (arrows, button, motion) = required(cmd);
    if motion && live.arrows.is_empty() {
        return Some(format!("{cmd:?} while arrows are hidden"));
    }
    if let Some(a) = arrows.iter().find(|a| !live.arrows.contains(a)) {
        return Some(format!("{cmd:?} needs {a:?}, live {:?}", live.arrows));
    }
    if let Some(b) = button.filter(|b| !live.buttons.contains(b)) {
        return Some(format!("{cmd:?} needs {b}, live {:?}", live.buttons));
    }
    None
}

// ---------------------------------------------------------------- 1. FSM

fn robot() -> RobotId {
    "robot".into()
}

fn states() -> Vec<ControllerState> {
    vec![
        ControllerState::Hidden,
        ControllerState::PaletteShown,
        ControllerState::DeviceGrabbed { robot: robot() },
        ControllerState::PanelOpen { robot: robot() },
    ]
}

fn gestures() -> Vec<GestureEvent> {
    vec![
        GestureEvent::PalmUp,
        GestureEvent::ThumbUp,
        GestureEvent::GrabDevice { robot: robot() },
        GestureEvent::ReleaseDevice,
        GestureEvent::StowDevice,
        GestureEvent::HandNearRobot {
            robot: robot(),
            near: true,
        },
        GestureEvent::HandNearRobot {
            robot: robot(),
            near: false,
        },
    ]
}

/// Palm up shows the palette, grabbing a replica picks it up, releasing it
/// opens its panel, stowing hides everything. Nothing else moves.
fn oracle_lifecycle(s: &ControllerState, e: &GestureEvent) -> Option<ControllerState> {
    Some(match (s.name(), e.name()) {
        ("hidden", "palm_up") => ControllerState::PaletteShown,
        ("palette_shown", "grab_device") => ControllerState::DeviceGrabbed { robot: robot() },
        ("device_grabbed", "release_device") => ControllerState::PanelOpen { robot: robot() },
        ("panel_open", "stow_device") => ControllerState::Hidden,
        _ => return None,
    })
}

fn drone_world(
    base: &WorldState,
    spot: Vec3,
    cargo: u8,
    autonomous: bool,
    vision: bool,
) -> WorldState {
    let mut w = base.clone();
    w.config.vision_available = vision;
    let drone = RobotId::from("drone");
    let boxes: Vec<BoxId> = w.boxes.keys().cloned().collect();
    let d = w.drones.get_mut(&drone).unwrap();
    d.pose = Pose::new(spot, 0.0);
    d.autonomous_flight = autonomous;
    let gripper = spot - Vec3::new(0.0, 0.0, w.config.grasp_offset);
    for (i, b) in boxes.iter().enumerate() {
        let item = w.boxes.get_mut(b).unwrap();
        item.carried_by = None;
        item.pose.position = Vec3::new(20.0 + i as f64, 20.0, 0.15);
    }
    match cargo {
        // carried
        0 => {
            w.drones.get_mut(&drone).unwrap().carried = Some(boxes[0].clone());
            let item = w.boxes.get_mut(&boxes[0]).unwrap();
            item.carried_by = Some(drone.clone());
            item.pose.position = gripper;
        }
        // within grasp range
        1 => w.boxes.get_mut(&boxes[0]).unwrap().pose.position = gripper + Vec3::new(0.1, 0.0, 0.0),
        // just out of range
        2 => {
            w.boxes.get_mut(&boxes[0]).unwrap().pose.position = gripper + Vec3::new(0.0, 0.0, -0.35)
        }
        _ => {}
    }
    w
}

pub fn fsm_conformance() -> Check {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut cells = 0;

    for s in states() {
        for e in gestures() {
            cells += 1;
            let got = lifecycle_step(&s, &e).ok();
            let want = oracle_lifecycle(&s, &e);
            if got != want {
                failures.push(format!(
                    "{} × {}: got {got:?}, want {want:?}",
                    s.name(),
                    e.name()
                ));
            }
            let toggled = camera_toggle(false, &e);
            if toggled != matches!(e, GestureEvent::ThumbUp) {
                failures.push(format!("camera toggle on {}", e.name()));
            }
        }
    }

    for state in DroneOpState::ALL {
        if avatar_color(state) != oracle_color(state) {
            failures.push(format!("color of {state:?}"));
        }
        for autonomous in [false, true] {
            for vision in [false, true] {
                cells += 1;
                let set = affordances_for(state, autonomous, vision);
                if !oracle_drone_panel(state, autonomous, vision).matches(&set) {
                    failures.push(format!(
                        "panel {state:?} autonomous={autonomous} vision={vision}: {set:?}"
                    ));
                }
            }
        }
    }

    let base = Scene::default_scene().build_world().expect("default scene");
    let takeoff = base
        .zones
        .values()
        .find(|z| z.kind == ZoneKind::TakeoffPad)
        .unwrap()
        .center;
    let landing = base
        .zones
        .values()
        .find(|z| z.kind == ZoneKind::LandingPad)
        .unwrap()
        .center;
    let spots = [
        Vec3::new(takeoff.x, takeoff.y, 0.45),
        Vec3::new(takeoff.x + 0.5, takeoff.y - 0.3, 1.2),
        Vec3::new(landing.x, landing.y, 0.45),
        Vec3::new(landing.x - 0.4, landing.y + 0.4, 2.0),
        Vec3::new(takeoff.x + 3.0, takeoff.y + 3.0, 0.45),
    ];
    let drone = RobotId::from("drone");
    let mut seen = BTreeSet::new();
    for spot in spots {
        for cargo in 0..4u8 {
            for autonomous in [false, true] {
                for vision in [false, true] {
                    cells += 1;
                    let w = drone_world(&base, spot, cargo, autonomous, vision);
                    let want = oracle_drone_state(&w, &drone);
                    seen.insert(want);
                    let got = drone_op_state(&w, &drone).map_err(|e| e.to_string());
                    if got != Ok(want) {
                        failures.push(format!(
                            "state at {spot:?} cargo {cargo}: got {got:?}, want {want:?}"
                        ));
                        continue;
                    }
                    let set = robot_affordances(&w, &drone).unwrap();
                    if !oracle_drone_panel(want, autonomous, vision).matches(&set) {
                        failures.push(format!("live panel at {spot:?} cargo {cargo}: {set:?}"));
                    }
                }
            }
        }
    }
    if seen.len() != 4 {
        failures.push(format!("world sweep reached only {seen:?}"));
    }

    for agv in base.agvs.keys() {
        for on_route in [false, true] {
            for goto in [false, true] {
                for forks in [false, true] {
                    cells += 1;
                    let mut w = base.clone();
                    let a = w.agvs.get_mut(agv).unwrap();
                    a.active_route = on_route.then(|| RouteId::from("R3"));
                    a.goto_target = goto.then_some(Vec3::new(1.0, 1.0, 0.0));
                    a.fork_raised = forks;
                    let set = robot_affordances(&w, agv).unwrap();
                    if !oracle_panel(&w, agv).unwrap().matches(&set) {
                        failures.push(format!(
                            "{agv} route={on_route} goto={goto} forks={forks}: {set:?}"
                        ));
                    }
                }
            }
        }
    }

    match std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/fixtures/conformance.json"
    )) {
        Ok(text) if text == conformance_fixture_json() => {
            let f: ConformanceFixture = serde_json::from_str(&text).unwrap();
            for row in &f.drone {
                let want =
                    oracle_drone_panel(row.state, row.autonomous_flight, row.vision_available);
                let buttons: BTreeSet<String> =
                    want.buttons.iter().map(ButtonId::to_string).collect();
                if row.buttons.iter().cloned().collect::<BTreeSet<_>>() != buttons
                    || row.color != oracle_color(row.state)
                {
                    failures.push(format!("fixture row {row:?}"));
                }
            }
            for row in &f.lifecycle {
                let s = states().into_iter().find(|s| s.name() == row.from).unwrap();
                let e = gestures()
                    .into_iter()
                    .find(|e| e.name() == row.event)
                    .unwrap();
                if oracle_lifecycle(&s, &e).map(|t| t.name().to_owned()) != row.to {
                    failures.push(format!("fixture transition {row:?}"));
                }
            }
        }
        Ok(_) => failures.push(
            "fixtures/conformance.json is stale; regenerate with the conformance_fixture example"
                .into(),
        ),
        Err(e) => failures.push(format!("fixtures/conformance.json: {e}")),
    }

    within(
        Duration::from_secs(1),
        start.elapsed(),
        "conformance",
        &mut failures,
    );
    verdict(
        failures,
        format!("{cells} cells, 0 mismatches in {:?}", start.elapsed()),
    )
}

// ---------------------------------------------------------------- 2. gating

fn random_gesture(rng: &mut ChaCha8Rng, robots: &[RobotId]) -> GestureEvent {
    let r = robots.choose(rng).unwrap().clone();
    match rng.random_range(0..9) {
        0 | 1 => GestureEvent::PalmUp,
        2 | 3 => GestureEvent::GrabDevice { robot: r },
        4 | 5 => GestureEvent::ReleaseDevice,
        6 => GestureEvent::StowDevice,
        7 => GestureEvent::ThumbUp,
        _ => GestureEvent::HandNearRobot {
            robot: r,
            near: rng.random_bool(0.5),
        },
    }
}

fn random_button(rng: &mut ChaCha8Rng) -> ButtonId {
    match rng.random_range(0..9) {
        0 => ButtonId::Grasp,
        1 => ButtonId::Release,
        2 => ButtonId::Rotate90,
        3 => ButtonId::Align,
        4 => ButtonId::Route(RouteId::from(
            *["R1", "R2", "R3", "nowhere"].choose(rng).unwrap(),
        )),
        5 => ButtonId::LiftForks,
        6 => ButtonId::LowerForks,
        _ => ButtonId::GoToCharge,
    }
}

fn random_arrow(rng: &mut ChaCha8Rng) -> Arrow {
    *[DRONE_ARROWS.as_slice(), &[Arrow::Forward, Arrow::Backward]]
        .concat()
        .choose(rng)
        .unwrap()
}

fn random_magnitude(rng: &mut ChaCha8Rng) -> f64 {
    match rng.random_range(0..10) {
        0 => -0.5,
        1 => 1.5,
        2 => 0.0,
        _ => rng.random_range(0.0..=1.0),
    }
}

fn random_axis(rng: &mut ChaCha8Rng) -> f64 {
    match rng.random_range(0..8) {
        0 => 0.0,
        1 => 1.2,
        _ => rng.random_range(-1.0..=1.0),
    }
}

fn random_body(rng: &mut ChaCha8Rng, robots: &[RobotId], modality: Modality) -> InboundBody {
    let r = robots.choose(rng).unwrap().clone();
    // bias towards the session's own input device
    let own = rng.random_bool(0.85);
    let mr = (modality == Modality::MrReplica) == own;
    if rng.random_bool(0.03) {
        return InboundBody::SessionControl {
            control: SessionControl::PrimaryTaskMove { item: rng.random() },
        };
    }
    if mr {
        if rng.random_bool(0.45) {
            InboundBody::Gesture {
                event: random_gesture(rng, robots),
            }
        } else {
            let action = if rng.random_bool(0.6) {
                PanelAction::Arrow(random_arrow(rng))
            } else {
                PanelAction::Button(random_button(rng))
            };
            InboundBody::PanelAction {
                action,
                magnitude: random_magnitude(rng),
            }
        }
    } else {
        let axes = if rng.random_bool(0.2) {
            JoyAxes::default()
        } else {
            JoyAxes {
                left_x: random_axis(rng),
                left_y: random_axis(rng),
                right_x: random_axis(rng),
                right_y: random_axis(rng),
            }
        };
        let pressed = (0..rng.random_range(0..3))
            .map(|_| {
                *[JoyButton::A, JoyButton::B, JoyButton::X, JoyButton::Y]
                    .choose(rng)
                    .unwrap()
            })
            .collect();
        InboundBody::JoypadInput {
            robot: r,
            axes,
            pressed,
        }
    }
}

/// Drives random inbound streams through the engine and checks every
/// command it accepts against the affordances live at that moment.
pub fn gating_streams(streams: usize, seed: u64) -> (usize, Vec<String>, BTreeSet<String>) {
    let scene = Scene::default_scene();
    // AGVs start on their routes in the default scene
    let mut idle = scene.clone();
    for a in &mut idle.agvs {
        a.route = None;
    }
    let plan = StudyPlan::generate(4, seed);
    let cfg = SessionConfig { notify_after: 0.5 };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut robots: Vec<RobotId> =
        vec!["drone".into(), "agv1".into(), "agv2".into(), "ghost".into()];
    robots.push("drone".into());
    let mut checked = 0;
    let mut failures = Vec::new();
    let mut kinds = BTreeSet::new();
    for _ in 0..streams {
        let scene = if rng.random_bool(0.5) { &scene } else { &idle };
        let mut engine = Engine::new(scene.clone(), plan.clone(), cfg.clone()).unwrap();
        let subject = plan.subjects.choose(&mut rng).unwrap();
        let which = if rng.random_bool(0.5) {
            Which::First
        } else {
            Which::Second
        };
        let modality = subject.modality_order[which.index()];
        let start = SessionControl::Start {
            subject: subject.subject_id.clone(),
            session: which,
        };
        engine.handle(Inbound {
            id: 0,
            body: InboundBody::SessionControl { control: start },
        });
        for id in 1..=rng.random_range(5..30u64) {
            for _ in 0..rng.random_range(0..12) {
                engine.advance();
            }
            let body = random_body(&mut rng, &robots, modality);
            let target = match &body {
                InboundBody::JoypadInput { robot, .. } => Some(robot.clone()),
                _ => engine.controller().open_panel().cloned(),
            };
            let mut shadow = engine.world().clone();
            for (_, msg) in engine.handle(Inbound { id, body }) {
                let Outbound::SessionEvent { event } = msg else {
                    continue;
                };
                let EventKind::Command {
                    source,
                    command: Some(cmd),
                    ..
                } = event.kind
                else {
                    continue;
                };
                if source == CommandSource::PrimaryTask {
                    continue;
                }
                checked += 1;
                kinds.insert(command_kind(&cmd));
                if let Some(v) = gating_violation(&shadow, target.as_ref(), &cmd) {
                    failures.push(v);
                }
                let _ = cmd.apply(&mut shadow);
            }
        }
    }
    (checked, failures, kinds)
}

/// Random world configurations and controller states fed straight into
/// `dispatch`, reaching states that random streams rarely visit.
pub fn gating_dispatch(cases: usize, seed: u64) -> (usize, Vec<String>, BTreeSet<String>) {
    let base = Scene::default_scene().build_world().unwrap();
    let takeoff = base
        .zones
        .values()
        .find(|z| z.kind == ZoneKind::TakeoffPad)
        .unwrap()
        .center;
    let landing = base
        .zones
        .values()
        .find(|z| z.kind == ZoneKind::LandingPad)
        .unwrap()
        .center;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let robots: Vec<RobotId> = vec!["drone".into(), "agv1".into(), "agv2".into(), "ghost".into()];
    let mut checked = 0;
    let mut failures = Vec::new();
    let mut kinds = BTreeSet::new();
    for _ in 0..cases {
        let spot = match rng.random_range(0..3) {
            0 => takeoff,
            1 => landing,
            _ => Vec3::new(
                rng.random_range(-10.0..10.0),
                rng.random_range(-10.0..10.0),
                0.0,
            ),
        } + Vec3::new(
            rng.random_range(-0.5..0.5),
            rng.random_range(-0.5..0.5),
            0.45,
        );
        let mut w = drone_world(
            &base,
            spot,
            rng.random_range(0..4),
            rng.random_bool(0.3),
            rng.random_bool(0.5),
        );
        for a in w.agvs.values_mut() {
            if rng.random_bool(0.5) {
                a.active_route = None;
            }
            a.fork_raised = rng.random_bool(0.5);
            if rng.random_bool(0.2) {
                a.goto_target = Some(Vec3::new(0.0, 0.0, 0.0));
            }
        }
        let r = robots.choose(&mut rng).unwrap().clone();
        let ctrl = match rng.random_range(0..5) {
            0 => ControllerState::Hidden,
            1 => ControllerState::PaletteShown,
            2 => ControllerState::DeviceGrabbed { robot: r },
            _ => ControllerState::PanelOpen { robot: r },
        };
        let result = if rng.random_bool(0.7) {
            let action = if rng.random_bool(0.5) {
                PanelAction::Arrow(random_arrow(&mut rng))
            } else {
                PanelAction::Button(random_button(&mut rng))
            };
            dispatch(&ctrl, &w, &action, random_magnitude(&mut rng))
        } else {
            let held: Vec<(Arrow, f64)> = (0..rng.random_range(0..4))
                .map(|_| (random_arrow(&mut rng), random_magnitude(&mut rng)))
                .collect();
            dispatch_arrows(&ctrl, &w, &held)
        };
        if let Ok(cmd) = result {
            checked += 1;
            kinds.insert(command_kind(&cmd));
            if let Some(v) = gating_violation(&w, ctrl.open_panel(), &cmd) {
                failures.push(v);
            }
        }
    }
    (checked, failures, kinds)
}

pub fn affordance_gating(streams: usize) -> Check {
    let start = Instant::now();
    let (n1, mut failures, mut kinds) = gating_streams(streams, 0x5eed);
    let (n2, f2, k2) = gating_dispatch(streams, 0xd15c);
    failures.extend(f2);
    kinds.extend(k2);
    if kinds.len() != 9 {
        failures.push(format!("only {kinds:?} were ever accepted"));
    }
    within(
        Duration::from_secs(10),
        start.elapsed(),
        "gating",
        &mut failures,
    );
    verdict(
        failures,
        format!(
            "{streams} streams ({n1} accepted commands) and {streams} direct dispatches ({n2} accepted), 0 ungated, {:?}",
            start.elapsed()
        ),
    )
}

// ---------------------------------------------------------------- 3. kinematics

fn kin_world() -> WorldState {
    let mut w = Scene::default_scene().build_world().unwrap();
    for a in w.agvs.values_mut() {
        a.active_route = None;
    }
    w
}

pub fn kinematics() -> Check {
    let mut failures = Vec::new();
    let agv = RobotId::from("agv1");
    let mut worst_drift: f64 = 0.0;
    for yaw in [0.0, 0.7, PI / 2.0, -2.3, PI] {
        let mut w = kin_world();
        let a = w.agvs.get_mut(&agv).unwrap();
        a.pose = Pose::new(Vec3::new(1.0, -2.0, 0.0), yaw);
        let origin = a.pose.position;
        w.command_agv(&agv, 0.8, 0.0).unwrap();
        let dt = w.config.dt;
        for _ in 0..10_000 {
            w.step(dt);
        }
        let p = w.agvs[&agv].pose.position;
        let (dx, dy) = (p.x - origin.x, p.y - origin.y);
        let lateral = (-dx * yaw.sin() + dy * yaw.cos()).abs();
        worst_drift = worst_drift.max(lateral);
        if lateral >= 1e-9 {
            failures.push(format!("AGV lateral drift {lateral:e} at yaw {yaw}"));
        }
    }

    // unicycle arc with v = 1, ω = 1 from the origin facing +x
    let mut w = kin_world();
    w.config.dt = 0.01;
    w.agvs.get_mut(&agv).unwrap().pose = Pose::new(Vec3::ZERO, 0.0);
    w.command_agv(&agv, 1.0, 1.0).unwrap();
    w.step(PI);
    let p = w.agvs[&agv].pose.position;
    let arc_err = (p.x - PI.sin()).hypot(p.y - (1.0 - PI.cos()));
    if arc_err >= 0.02 {
        failures.push(format!("arc endpoint error {arc_err}"));
    }

    let drone = RobotId::from("drone");
    let mut w = kin_world();
    let p0 = w.drones[&drone].pose.position;
    w.command_drone(&drone, Vec3::ZERO, 1.3).unwrap();
    let dt = w.config.dt;
    let mut yaw_drift: f64 = 0.0;
    for _ in 0..10_000 {
        w.step(dt);
        yaw_drift = yaw_drift.max(w.drones[&drone].pose.position.distance(p0));
    }
    if yaw_drift >= 1e-9 {
        failures.push(format!("drone pure-yaw drift {yaw_drift:e}"));
    }

    // yaw range under random commands
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut w = kin_world();
    let mut yaw_checks = 0;
    for i in 0..20_000 {
        if i % 50 == 0 {
            let omega = rng.random_range(-1.0..=1.0) * w.config.omega_max;
            let v = Vec3::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            );
            let _ = w.command_drone(&drone, v, omega);
            let _ = w.command_agv(&agv, rng.random_range(-1.0..=1.0), -omega);
            if rng.random_bool(0.1) {
                let _ = w.rotate_quarter(&drone);
            }
        }
        w.step(w.config.dt);
        for yaw in w
            .drones
            .values()
            .map(|d| d.pose.yaw)
            .chain(w.agvs.values().map(|a| a.pose.yaw))
        {
            yaw_checks += 1;
            if !(yaw > -PI && yaw <= PI) {
                failures.push(format!("yaw {yaw} out of range at step {i}"));
            }
        }
    }
    for a in [PI, -PI, 3.0 * PI, -3.0 * PI, 0.0, 7.0, -7.0] {
        let w = wrap_angle(a);
        if !(w > -PI && w <= PI) {
            failures.push(format!("wrap_angle({a}) = {w}"));
        }
    }

    verdict(
        failures,
        format!(
            "AGV drift {worst_drift:.1e} m, arc error {arc_err:.4} m, drone yaw drift {yaw_drift:.1e} m, {yaw_checks} yaw samples in range"
        ),
    )
}

// ---------------------------------------------------------------- 4. determinism

pub fn determinism() -> Check {
    let mut failures = Vec::new();
    let plan = StudyPlan::generate(4, 7);
    let scene = Scene::default_scene();
    let agent = ScriptedAgent::jittered(2.0);
    let mut slowest = Duration::ZERO;
    let mut subjects = 0;
    for subject in [&plan.subjects[0], &plan.subjects[1]] {
        subjects += 1;
        let mut runs = Vec::new();
        for _ in 0..2 {
            let t = Instant::now();
            match run_headless(subject, &scene, &agent, 42) {
                Ok(a) => runs.push(a),
                Err(e) => failures.push(format!("{}: {e}", subject.subject_id)),
            }
            slowest = slowest.max(t.elapsed());
        }
        if runs.len() != 2 {
            continue;
        }
        if runs[0].to_json() != runs[1].to_json() {
            failures.push(format!("{}: archives differ", subject.subject_id));
        }
        let verdicts: Vec<_> = runs
            .iter()
            .map(|a| replay(a).map(|r| r.records).map_err(|e| e.to_string()))
            .collect();
        if verdicts[0] != verdicts[1] {
            failures.push(format!("{}: replay verdicts differ", subject.subject_id));
        }
        if let Err(e) = &verdicts[0] {
            failures.push(format!("{}: replay failed: {e}", subject.subject_id));
        }
    }
    within(
        Duration::from_secs(30),
        slowest,
        "headless run",
        &mut failures,
    );
    verdict(failures, format!("{subjects} subjects run twice, archives byte-identical, replay identical, slowest run {slowest:?}"))
}

// ---------------------------------------------------------------- 5. protocol

fn reframe(bytes: &[u8]) -> Option<Vec<u8>> {
    let mut dec = FrameDecoder::default();
    // feed in two pieces to exercise partial reads
    let mid = bytes.len() / 2;
    dec.push(&bytes[..mid]);
    let early = dec.next_frame();
    dec.push(&bytes[mid..]);
    match early {
        Some(_) => None,
        None => dec.next_frame().and_then(|f| f.ok()),
    }
}

pub fn protocol_roundtrip(cases: u32) -> Check {
    let mut runner = TestRunner::new(Config {
        cases,
        ..Config::default()
    });
    let mut failures = Vec::new();
    let mut n = 0;
    let mut variants = BTreeSet::new();
    for _ in 0..cases {
        let msg = inbound().new_tree(&mut runner).unwrap().current();
        variants.insert(format!("in:{}", msg.body.name()));
        let bytes = encode_frame(&msg);
        let ok = reframe(&bytes)
            .and_then(|p| decode_inbound(&p).ok())
            .is_some_and(|back: Inbound| back == msg && encode_frame(&back) == bytes);
        if !ok {
            failures.push(format!("{msg:?}"));
        }
        let msg = outbound().new_tree(&mut runner).unwrap().current();
        variants.insert(format!("out:{}", msg.name()));
        let bytes = encode_frame(&msg);
        let ok = reframe(&bytes)
            .and_then(|p| decode_payload::<Outbound>(&p).ok())
            .is_some_and(|back| back == msg && encode_frame(&back) == bytes);
        if !ok {
            failures.push(format!("{msg:?}"));
        }
        n += 2;
    }
    if variants.len() != 14 {
        failures.push(format!("only {} variants generated", variants.len()));
    }
    verdict(
        failures,
        format!("{n} messages over {} variants, 0 failures", variants.len()),
    )
}

// ---------------------------------------------------------------- 6. timings

pub struct SyntheticLog {
    pub log: Vec<LogEvent>,
    /// Oracle values in seconds, exact.
    pub total: Ratio<i64>,
    pub robot: [Ratio<i64>; 2],
    pub reaction: [Ratio<i64>; 2],
}

/// Session log with dyadic timestamps (multiples of 1/64 s) so that every
/// difference is exact in binary floating point.
pub fn synthetic_log(rng: &mut ChaCha8Rng) -> SyntheticLog {
    let q = |k: i64| Ratio::new(k, 64);
    let f = |r: Ratio<i64>| *r.numer() as f64 / *r.denom() as f64;
    let kinds = if rng.random_bool(0.5) {
        [TaskKind::AgvRoute, TaskKind::DroneLift]
    } else {
        [TaskKind::DroneLift, TaskKind::AgvRoute]
    };
    let modality = if rng.random_bool(0.5) {
        Modality::MrReplica
    } else {
        Modality::Joypad
    };
    let mut k: i64 = rng.random_range(0..64 * 40);
    let mut log = vec![LogEvent::new(
        f(q(k)),
        EventKind::SessionStart {
            subject: "S01".into(),
            session: Which::First,
            modality,
        },
    )];
    let noise = |log: &mut Vec<LogEvent>, k: i64, rng: &mut ChaCha8Rng| {
        if rng.random_bool(0.5) {
            log.push(LogEvent::new(
                f(q(k)),
                EventKind::Command {
                    source: CommandSource::PrimaryTask,
                    command: None,
                    item: Some(rng.random()),
                },
            ));
        }
    };
    let mut marks = [[Ratio::from_integer(0); 3]; 2];
    for task in 0..2 {
        k += rng.random_range(64..64 * 60);
        marks[task][0] = q(k);
        log.push(LogEvent::new(
            f(q(k)),
            EventKind::TaskNotified {
                task,
                task_kind: kinds[task],
                channel: NotificationChannel::for_modality(modality),
            },
        ));
        noise(&mut log, k, rng);
        k += rng.random_range(0..64 * 20);
        noise(&mut log, k, rng);
        marks[task][1] = q(k);
        log.push(LogEvent::new(
            f(q(k)),
            EventKind::InteractionActivated { task },
        ));
        k += rng.random_range(1..64 * 200);
        noise(&mut log, k, rng);
        marks[task][2] = q(k);
        log.push(LogEvent::new(f(q(k)), EventKind::TaskCompleted { task }));
    }
    log.push(LogEvent::new(f(q(k + 3)), EventKind::SessionEnd));
    SyntheticLog {
        log,
        total: marks[1][2] - marks[0][0],
        robot: [marks[0][2] - marks[0][1], marks[1][2] - marks[1][1]],
        reaction: [marks[0][1] - marks[0][0], marks[1][1] - marks[1][0]],
    }
}

fn exact(x: f64, r: Ratio<i64>) -> bool {
    x * *r.denom() as f64 == *r.numer() as f64
}

pub fn timing_metrics(logs: usize) -> Check {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for i in 0..logs {
        let s = synthetic_log(&mut rng);
        match derive_timings(&s.log) {
            Ok(t) => {
                let ok = exact(t.total_time, s.total)
                    && t.robot_time.len() == 2
                    && t.reaction_time.len() == 2
                    && (0..2).all(|j| {
                        exact(t.robot_time[j], s.robot[j])
                            && exact(t.reaction_time[j], s.reaction[j])
                    });
                if !ok {
                    failures.push(format!("log {i}: {t:?}"));
                }
            }
            Err(e) => failures.push(format!("log {i}: {e}")),
        }
    }

    let plan = StudyPlan::generate(1, 5);
    let agent = ScriptedAgent::reference();
    let dt = Scene::default_scene().config.dt;
    let mut sessions = 0;
    match run_headless(&plan.subjects[0], &Scene::default_scene(), &agent, 5) {
        Err(e) => failures.push(format!("headless run: {e}")),
        Ok(archive) => {
            let replayed = replay(&archive).map(|r| r.records);
            for (s, log) in archive.sessions.iter().zip(archive.logs().unwrap()) {
                sessions += 1;
                let mut marks = [[None; 3]; 2];
                let (mut notified, mut completed) = (0, 0);
                for e in &log {
                    match e.kind {
                        EventKind::TaskNotified { task, .. } => {
                            notified += 1;
                            marks[task][0] = Some(e.t)
                        }
                        EventKind::InteractionActivated { task } => marks[task][1] = Some(e.t),
                        EventKind::TaskCompleted { task } => {
                            completed += 1;
                            marks[task][2] = Some(e.t)
                        }
                        _ => {}
                    }
                }
                if notified != 2 || completed != 2 {
                    failures.push(format!(
                        "{:?}: {notified} notifications, {completed} completions",
                        s.which
                    ));
                    continue;
                }
                let m = marks.map(|t| t.map(|x| x.unwrap()));
                for (j, [n, a, c]) in m.iter().enumerate() {
                    if !(n <= a && a <= c) {
                        failures.push(format!("{:?} task {j}: {n} {a} {c}", s.which));
                    }
                    let delay = agent.reaction_delay(s.modality);
                    if !(a - n >= delay - 1e-9 && a - n <= delay + dt + 1e-9) {
                        failures.push(format!(
                            "{:?} task {j}: reaction {} for delay {delay}",
                            s.which,
                            a - n
                        ));
                    }
                }
                let t = derive_timings(&log).unwrap();
                if t.total_time != m[1][2] - m[0][0] {
                    failures.push(format!("{:?}: total {} != c2 - n1", s.which, t.total_time));
                }
                let same = replayed.as_ref().is_ok_and(|r| {
                    r.iter()
                        .any(|rec| rec.session == s.which && rec.timings == t)
                });
                if !same {
                    failures.push(format!(
                        "{:?}: replay timings differ from the metrics",
                        s.which
                    ));
                }
            }
        }
    }
    verdict(
        failures,
        format!("{logs} synthetic logs exact against rational oracle; {sessions} headless sessions satisfy n <= a <= c and total = c2 - n1"),
    )
}

// ---------------------------------------------------------------- 7. statistics

pub fn t_table() -> Vec<(u32, f64, f64)> {
    include_str!("../data/t_two_sided.csv")
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("df"))
        .map(|l| {
            let v: Vec<&str> = l.split(',').collect();
            (
                v[0].parse().unwrap(),
                v[1].parse().unwrap(),
                v[2].parse().unwrap(),
            )
        })
        .collect()
}

/// Differences with sample mean `t·sd/√n` and sample SD `sd` for n = df+1,
/// so the paired test must report exactly this t.
fn samples_for(t: f64, df: u32, sd: f64) -> (Vec<f64>, Vec<f64>) {
    let n = df as usize + 1;
    // centred pattern with unit sample SD
    let raw: Vec<f64> = (0..n)
        .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 } * (1.0 + i as f64 / n as f64))
        .collect();
    let m = raw.iter().sum::<f64>() / n as f64;
    let s = (raw.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
    let mean = t * sd / (n as f64).sqrt();
    let d: Vec<f64> = raw.iter().map(|x| mean + sd * (x - m) / s).collect();
    let b: Vec<f64> = (0..n).map(|i| 50.0 + i as f64).collect();
    let a = d.iter().zip(&b).map(|(d, b)| b + d).collect();
    (a, b)
}

pub fn statistics() -> Check {
    let mut failures = Vec::new();
    let table = t_table();
    let dfs: BTreeSet<u32> = table.iter().map(|r| r.0).collect();
    if dfs != (1..=50).collect() {
        failures.push(format!("oracle covers df {dfs:?}"));
    }
    let mut worst: f64 = 0.0;
    for &(df, t, p) in &table {
        for sign in [1.0, -1.0] {
            let got = student_t_two_sided(sign * t, df as f64);
            worst = worst.max((got - p).abs());
            if (got - p).abs() >= 1e-8 {
                failures.push(format!("df {df} t {t}: {got} vs {p}"));
            }
        }
        let (a, b) = samples_for(t, df, 3.0);
        match paired_t_test(&a, &b) {
            Ok(r) => {
                let dev = (r.p_two_sided - p).abs();
                worst = worst.max(dev);
                if dev >= 1e-8 || r.df != df {
                    failures.push(format!(
                        "paired df {df} t {t}: p {} t {}",
                        r.p_two_sided, r.t_stat
                    ));
                }
            }
            Err(e) => failures.push(format!("paired df {df}: {e}")),
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..500 {
        let n = rng.random_range(2..30);
        let a: Vec<f64> = (0..n).map(|_| rng.random_range(50.0..300.0)).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.random_range(50.0..300.0)).collect();
        let c = rng.random_range(0.01..100.0);
        let (Ok(ab), Ok(ba)) = (paired_t_test(&a, &b), paired_t_test(&b, &a)) else {
            failures.push("random samples rejected".into());
            continue;
        };
        if (ab.t_stat + ba.t_stat).abs() > 1e-12 * ab.t_stat.abs().max(1.0)
            || (ab.p_two_sided - ba.p_two_sided).abs() > 1e-12
        {
            failures.push(format!("antisymmetry: {ab:?} vs {ba:?}"));
        }
        let sa: Vec<f64> = a.iter().map(|x| x * c).collect();
        let sb: Vec<f64> = b.iter().map(|x| x * c).collect();
        let s = paired_t_test(&sa, &sb).unwrap();
        if (s.t_stat - ab.t_stat).abs() > 1e-12 * ab.t_stat.abs().max(1.0)
            || (s.p_two_sided - ab.p_two_sided).abs() > 1e-12
        {
            failures.push(format!("scale {c}: {s:?} vs {ab:?}"));
        }
    }

    let sus = |items: [u8; 10]| sus_score(&SusResponse::new(items).unwrap());
    for (items, want) in [
        ([3u8; 10], 50.0),
        ([5, 1, 5, 1, 5, 1, 5, 1, 5, 1], 100.0),
        ([1, 5, 1, 5, 1, 5, 1, 5, 1, 5], 0.0),
    ] {
        if sus(items) != want {
            failures.push(format!("SUS {items:?} = {}", sus(items)));
        }
    }
    let p = |c, t| proportion(c, t).unwrap();
    if p(15, 24) != 62.5 {
        failures.push(format!("proportion(15, 24) = {}", p(15, 24)));
    }
    for (c, want) in [(11, "45.8"), (7, "29.2")] {
        if format!("{:.1}", p(c, 24)) != want {
            failures.push(format!("proportion({c}, 24) = {}", p(c, 24)));
        }
    }
    verdict(failures, format!("{} oracle points (±t, direct and paired), max |Δp| {worst:.1e}; symmetry, scaling, SUS and proportions exact", table.len()))
}

// ---------------------------------------------------------------- 8. counterbalancing

pub fn counterbalancing() -> Check {
    let mut failures = Vec::new();
    for seed in [7u64, 1, 2024] {
        let plan = latin_plan(24, seed);
        let mut counts = [0usize; 4];
        for s in &plan {
            counts[s.sequence] += 1;
            let (m, t) = CONDITION_SEQUENCES[s.sequence];
            if s.modality_order != m || s.task_order != t {
                failures.push(format!("{} does not follow its sequence", s.subject_id));
            }
        }
        if counts != [6; 4] {
            failures.push(format!("seed {seed}: 24 subjects split {counts:?}"));
        }
        for n in 1..=100 {
            let plan = latin_plan(n, seed);
            let mut counts = [0usize; 4];
            for s in &plan {
                counts[s.sequence] += 1;
            }
            let spread = counts.iter().max().unwrap() - counts.iter().min().unwrap();
            let ids: BTreeSet<_> = plan.iter().map(|s| &s.subject_id).collect();
            if plan.len() != n || spread > 1 || ids.len() != n {
                failures.push(format!("seed {seed}, {n} subjects: {counts:?}"));
            }
        }
    }
    let orders: BTreeSet<_> = CONDITION_SEQUENCES.iter().collect();
    if orders.len() != 4 {
        failures.push("condition sequences are not distinct".into());
    }
    verdict(
        failures,
        "24 subjects -> 6 per sequence; spread <= 1 for 1..=100 subjects, 3 seeds".into(),
    )
}

// ---------------------------------------------------------------- 9. report

/// Published per-modality means and SDs. The reaction-time pair is
/// illustrative: only its p-value was published.
pub fn published_targets() -> [CohortTarget; 4] {
    [
        CohortTarget {
            mr_replica: (208.7, 58.5),
            joypad: (245.2, 73.7),
        },
        CohortTarget {
            mr_replica: (113.3, 36.5),
            joypad: (78.0, 36.9),
        },
        CohortTarget {
            mr_replica: (42.5, 19.6),
            joypad: (49.7, 24.0),
        },
        CohortTarget {
            mr_replica: (4.0, 1.5),
            joypad: (9.0, 3.0),
        },
    ]
}

pub fn report_fixture() -> Check {
    let mut failures = Vec::new();
    let targets = published_targets();
    let records: Vec<SessionRecord> = synthetic_cohort(&targets, 24, 2024);
    let report = match summarize_study(&records, &[]) {
        Ok(r) => r,
        Err(e) => return Err(e.to_string()),
    };
    let table = render_table(&report);
    let csv = render_csv(&report);
    let mut shown = Vec::new();
    for (m, t) in Metric::TIMINGS.iter().zip(&targets).take(3) {
        let Some(row) = report.metric(*m) else {
            failures.push(format!("{} missing", m.key()));
            continue;
        };
        for (s, (mean, sd), side) in [
            (&row.mr_replica, t.mr_replica, "MR"),
            (&row.joypad, t.joypad, "joypad"),
        ] {
            let text = format!("{mean:.1} ± {sd:.1}");
            if (s.mean - mean).abs() > 0.05
                || (s.sd - sd).abs() > 0.05
                || s.display(1) != text
                || s.n != 24
            {
                failures.push(format!("{} {side}: {}", m.key(), s.display(1)));
            }
            let line = table.lines().find(|l| l.starts_with(m.label()));
            if !line.is_some_and(|l| l.contains(&text)) {
                failures.push(format!("table line for {} lacks {text}", m.label()));
            }
            shown.push(text);
        }
    }
    if !csv.starts_with("metric,mr_mean,mr_sd,joypad_mean,joypad_sd,t,df,p\n") {
        failures.push("CSV header".into());
    }
    verdict(
        failures,
        format!(
            "table reproduces {}; p-values are not replicable from published aggregates (pairing unknown)",
            shown.join(", ")
        ),
    )
}

pub type Criterion = (&'static str, fn() -> Check);

pub fn all() -> BTreeMap<usize, Criterion> {
    let list: [Criterion; 9] = [
        ("FSM conformance", fsm_conformance),
        ("Affordance gating", || affordance_gating(10_000)),
        ("Kinematics", kinematics),
        ("Determinism", determinism),
        ("Protocol", || protocol_roundtrip(1_000)),
        ("Timing metrics", || timing_metrics(24)),
        ("Statistics oracle", statistics),
        ("Counterbalancing", counterbalancing),
        ("Report fixture", report_fixture),
    ];
    list.into_iter()
        .enumerate()
        .map(|(i, c)| (i + 1, c))
        .collect()
}
