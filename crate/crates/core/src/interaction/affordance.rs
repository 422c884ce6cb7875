use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::InteractionError;
use crate::sim::{AgvBody, RobotId, RouteId, WorldState};

/// Operational state of a drone, derived from the world.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DroneOpState {
    Freedrive,
    ReadyToPick,
    Picking,
    ReadyToRelease,
}

impl DroneOpState {
    pub const ALL: [DroneOpState; 4] = [
        DroneOpState::Freedrive,
        DroneOpState::ReadyToPick,
        DroneOpState::Picking,
        DroneOpState::ReadyToRelease,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AvatarColor {
    DarkGrey,
    Green,
    Red,
    Yellow,
}

pub fn avatar_color(state: DroneOpState) -> AvatarColor {
    match state {
        DroneOpState::Freedrive => AvatarColor::DarkGrey,
        DroneOpState::ReadyToPick => AvatarColor::Green,
        DroneOpState::Picking => AvatarColor::Red,
        DroneOpState::ReadyToRelease => AvatarColor::Yellow,
    }
}

/// Classifies a drone from the current world snapshot.
pub fn drone_op_state(
    world: &WorldState,
    drone: &RobotId,
) -> Result<DroneOpState, InteractionError> {
    let body = world
        .drones
        .get(drone)
        .ok_or_else(|| InteractionError::UnknownRobot(drone.clone()))?;
    let pos = body.pose.position;
    let over = |kind| world.zone_containing(pos, kind).is_some();
    use crate::sim::ZoneKind::*;
    Ok(match body.carried {
        Some(_) if over(LandingPad) => DroneOpState::ReadyToRelease,
        Some(_) => DroneOpState::Picking,
        None if over(TakeoffPad) && world.graspable_box(body).is_some() => {
            DroneOpState::ReadyToPick
        }
        None => DroneOpState::Freedrive,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arrow {
    PlusX,
    MinusX,
    PlusY,
    MinusY,
    PlusZ,
    MinusZ,
    YawCw,
    YawCcw,
    Forward,
    Backward,
}

pub const DRONE_ARROWS: [Arrow; 8] = [
    Arrow::PlusX,
    Arrow::MinusX,
    Arrow::PlusY,
    Arrow::MinusY,
    Arrow::PlusZ,
    Arrow::MinusZ,
    Arrow::YawCw,
    Arrow::YawCcw,
];

pub const AGV_ARROWS: [Arrow; 4] = [Arrow::Forward, Arrow::Backward, Arrow::YawCw, Arrow::YawCcw];

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ButtonId {
    Grasp,
    Release,
    Rotate90,
    Align,
    Route(RouteId),
    LiftForks,
    LowerForks,
    GoToCharge,
}

impl fmt::Display for ButtonId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ButtonId::Grasp => f.write_str("Grasp"),
            ButtonId::Release => f.write_str("Release"),
            ButtonId::Rotate90 => f.write_str("Rotate90"),
            ButtonId::Align => f.write_str("Align"),
            ButtonId::Route(r) => write!(f, "Route:{r}"),
            ButtonId::LiftForks => f.write_str("LiftForks"),
            ButtonId::LowerForks => f.write_str("LowerForks"),
            ButtonId::GoToCharge => f.write_str("GoToCharge"),
        }
    }
}

/// Arrows and buttons a panel currently exposes. An arrow set is empty
/// exactly when `arrows_visible` is false.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AffordanceSet {
    pub arrows: BTreeSet<Arrow>,
    pub buttons: Vec<ButtonId>,
    pub arrows_visible: bool,
}

impl AffordanceSet {
    fn with_arrows(arrows: &[Arrow], visible: bool, buttons: Vec<ButtonId>) -> Self {
        Self {
            arrows: if visible {
                arrows.iter().copied().collect()
            } else {
                BTreeSet::new()
            },
            buttons,
            arrows_visible: visible,
        }
    }

    pub fn allows_arrow(&self, arrow: Arrow) -> bool {
        self.arrows_visible && self.arrows.contains(&arrow)
    }

    pub fn allows_button(&self, button: &ButtonId) -> bool {
        self.buttons.contains(button)
    }

    /// Whether the console draws the arrows: they must be enabled and the
    /// operator's hand must be near the replica. Never used for gating.
    pub fn arrows_shown(&self, hand_near: bool) -> bool {
        self.arrows_visible && hand_near
    }
}

pub fn affordances_for(
    state: DroneOpState,
    autonomous_flight: bool,
    vision_available: bool,
) -> AffordanceSet {
    match state {
        DroneOpState::Freedrive => AffordanceSet::with_arrows(&DRONE_ARROWS, true, vec![]),
        DroneOpState::ReadyToPick => {
            AffordanceSet::with_arrows(&DRONE_ARROWS, true, vec![ButtonId::Grasp])
        }
        DroneOpState::Picking => {
            AffordanceSet::with_arrows(&DRONE_ARROWS, !autonomous_flight, vec![])
        }
        DroneOpState::ReadyToRelease => {
            let mut buttons = vec![ButtonId::Release, ButtonId::Rotate90];
            if vision_available {
                buttons.push(ButtonId::Align);
            }
            AffordanceSet::with_arrows(&DRONE_ARROWS, true, buttons)
        }
    }
}

/// AGV panel: forward/backward and yaw arrows only. Route buttons and arrows
/// disappear while the AGV is on autopilot.
pub fn agv_affordances(agv: &AgvBody, routes: &[RouteId]) -> AffordanceSet {
    let manual = !agv.on_autopilot();
    let mut buttons: Vec<ButtonId> = if manual {
        routes.iter().cloned().map(ButtonId::Route).collect()
    } else {
        vec![]
    };
    buttons.push(if agv.fork_raised {
        ButtonId::LowerForks
    } else {
        ButtonId::LiftForks
    });
    buttons.push(ButtonId::GoToCharge);
    AffordanceSet::with_arrows(&AGV_ARROWS, manual, buttons)
}

/// Routes no AGV is currently driving.
pub fn available_routes(world: &WorldState) -> Vec<RouteId> {
    let busy: BTreeSet<&RouteId> = world
        .agvs
        .values()
        .filter_map(|a| a.active_route.as_ref())
        .collect();
    world
        .routes
        .keys()
        .filter(|r| !busy.contains(r))
        .cloned()
        .collect()
}

/// Live affordances of any robot in the world.
pub fn robot_affordances(
    world: &WorldState,
    robot: &RobotId,
) -> Result<AffordanceSet, InteractionError> {
    if let Some(drone) = world.drones.get(robot) {
        let state = drone_op_state(world, robot)?;
        Ok(affordances_for(
            state,
            drone.autonomous_flight,
            world.config.vision_available,
        ))
    } else if let Some(agv) = world.agvs.get(robot) {
        Ok(agv_affordances(agv, &available_routes(world)))
    } else {
        Err(InteractionError::UnknownRobot(robot.clone()))
    }
}
