use serde::{Deserialize, Serialize};

use super::InteractionError;
use crate::sim::RobotId;

/// Where the operator's virtual controller is in its lifecycle.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "snake_case")]
pub enum ControllerState {
    /// Stowed away, nothing on screen.
    #[default]
    Hidden,
    /// The palette of device replicas is floating next to the hand.
    PaletteShown,
    /// A replica is held in the hand.
    DeviceGrabbed { robot: RobotId },
    /// The replica was let go and its command panel is open.
    PanelOpen { robot: RobotId },
}

impl ControllerState {
    pub fn open_panel(&self) -> Option<&RobotId> {
        match self {
            ControllerState::PanelOpen { robot } => Some(robot),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ControllerState::Hidden => "hidden",
            ControllerState::PaletteShown => "palette_shown",
            ControllerState::DeviceGrabbed { .. } => "device_grabbed",
            ControllerState::PanelOpen { .. } => "panel_open",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "gesture", rename_all = "snake_case")]
pub enum GestureEvent {
    /// Gateway sign that summons the palette.
    PalmUp,
    /// Toggles the drone camera view.
    ThumbUp,
    GrabDevice {
        robot: RobotId,
    },
    ReleaseDevice,
    StowDevice,
    /// Hand proximity to a replica; only affects how arrows are drawn.
    HandNearRobot {
        robot: RobotId,
        near: bool,
    },
}

impl GestureEvent {
    pub fn name(&self) -> &'static str {
        match self {
            GestureEvent::PalmUp => "palm_up",
            GestureEvent::ThumbUp => "thumb_up",
            GestureEvent::GrabDevice { .. } => "grab_device",
            GestureEvent::ReleaseDevice => "release_device",
            GestureEvent::StowDevice => "stow_device",
            GestureEvent::HandNearRobot { .. } => "hand_near_robot",
        }
    }
}

/// Controller lifecycle transition. Pairs outside the table are rejected and
/// the caller keeps its current state.
pub fn lifecycle_step(
    state: &ControllerState,
    event: &GestureEvent,
) -> Result<ControllerState, InteractionError> {
    use ControllerState::*;
    use GestureEvent::*;
    match (state, event) {
        (Hidden, PalmUp) => Ok(PaletteShown),
        (PaletteShown, GrabDevice { robot }) => Ok(DeviceGrabbed {
            robot: robot.clone(),
        }),
        (DeviceGrabbed { robot }, ReleaseDevice) => Ok(PanelOpen {
            robot: robot.clone(),
        }),
        (PanelOpen { .. }, StowDevice) => Ok(Hidden),
        _ => Err(InteractionError::InvalidTransition {
            state: state.name(),
            event: event.name(),
        }),
    }
}

/// Thumb-up flips the camera view; every other gesture leaves it alone.
pub fn camera_toggle(view: bool, event: &GestureEvent) -> bool {
    match event {
        GestureEvent::ThumbUp => !view,
        _ => view,
    }
}
