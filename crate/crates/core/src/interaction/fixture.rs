//! Machine-readable conformance tables shared with the operator console.
//!
//! The JSON produced by [`conformance_fixture`] is checked in at
//! `fixtures/conformance.json`; the test suite regenerates it and fails on
//! any drift, so engine and console always agree on transitions, button sets
//! and avatar colours.

use serde::{Deserialize, Serialize};

use super::affordance::{
    affordances_for, agv_affordances, avatar_color, Arrow, AvatarColor, ButtonId, DroneOpState,
};
use super::lifecycle::{lifecycle_step, ControllerState, GestureEvent};
use crate::sim::{AgvBody, Pose, RobotId, RouteId};

/// Placeholder robot used to instantiate parametric states and events.
pub const FIXTURE_ROBOT: &str = "robot";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConformanceFixture {
    pub lifecycle: Vec<TransitionRow>,
    pub drone: Vec<DroneRow>,
    pub agv: Vec<AgvRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionRow {
    pub from: String,
    pub event: String,
    /// `None` when the pair is rejected.
    pub to: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DroneRow {
    pub state: DroneOpState,
    pub autonomous_flight: bool,
    pub vision_available: bool,
    pub color: AvatarColor,
    pub arrows_visible: bool,
    pub arrows: Vec<Arrow>,
    pub buttons: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgvRow {
    pub on_route: bool,
    pub fork_raised: bool,
    pub available_routes: Vec<String>,
    pub arrows_visible: bool,
    pub arrows: Vec<Arrow>,
    pub buttons: Vec<String>,
}

pub fn all_controller_states() -> Vec<ControllerState> {
    let robot = RobotId::from(FIXTURE_ROBOT);
    vec![
        ControllerState::Hidden,
        ControllerState::PaletteShown,
        ControllerState::DeviceGrabbed {
            robot: robot.clone(),
        },
        ControllerState::PanelOpen { robot },
    ]
}

pub fn all_gestures() -> Vec<GestureEvent> {
    let robot = RobotId::from(FIXTURE_ROBOT);
    vec![
        GestureEvent::PalmUp,
        GestureEvent::ThumbUp,
        GestureEvent::GrabDevice {
            robot: robot.clone(),
        },
        GestureEvent::ReleaseDevice,
        GestureEvent::StowDevice,
        GestureEvent::HandNearRobot { robot, near: true },
    ]
}

pub fn conformance_fixture() -> ConformanceFixture {
    let mut lifecycle = Vec::new();
    for s in all_controller_states() {
        for e in all_gestures() {
            lifecycle.push(TransitionRow {
                from: s.name().into(),
                event: e.name().into(),
                to: lifecycle_step(&s, &e).ok().map(|t| t.name().to_owned()),
            });
        }
    }

    let mut drone = Vec::new();
    for state in DroneOpState::ALL {
        for autonomous_flight in [false, true] {
            for vision_available in [false, true] {
                let set = affordances_for(state, autonomous_flight, vision_available);
                drone.push(DroneRow {
                    state,
                    autonomous_flight,
                    vision_available,
                    color: avatar_color(state),
                    arrows_visible: set.arrows_visible,
                    arrows: set.arrows.into_iter().collect(),
                    buttons: set.buttons.iter().map(ButtonId::to_string).collect(),
                });
            }
        }
    }

    let mut agv = Vec::new();
    let routes = vec![RouteId::from("R3")];
    for on_route in [false, true] {
        for fork_raised in [false, true] {
            let mut body = AgvBody::new(FIXTURE_ROBOT.into(), Pose::default());
            body.fork_raised = fork_raised;
            if on_route {
                body.active_route = Some("R1".into());
            }
            let set = agv_affordances(&body, &routes);
            agv.push(AgvRow {
                on_route,
                fork_raised,
                available_routes: routes.iter().map(|r| r.to_string()).collect(),
                arrows_visible: set.arrows_visible,
                arrows: set.arrows.into_iter().collect(),
                buttons: set.buttons.iter().map(ButtonId::to_string).collect(),
            });
        }
    }

    ConformanceFixture {
        lifecycle,
        drone,
        agv,
    }
}

pub fn conformance_fixture_json() -> String {
    let mut s = serde_json::to_string_pretty(&conformance_fixture()).expect("fixture serializes");
    s.push('\n');
    s
}
