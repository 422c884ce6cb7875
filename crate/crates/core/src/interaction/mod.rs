//! Controller lifecycle, drone operational states, affordances and
//! affordance-gated command dispatch.

mod affordance;
mod dispatch;
pub mod fixture;
mod lifecycle;

use thiserror::Error;

use crate::sim::RobotId;

pub use affordance::{
    affordances_for, agv_affordances, available_routes, avatar_color, drone_op_state,
    robot_affordances, AffordanceSet, Arrow, AvatarColor, ButtonId, DroneOpState, AGV_ARROWS,
    DRONE_ARROWS,
};
pub use dispatch::{dispatch, dispatch_arrows, PanelAction, SimCommand};
pub use lifecycle::{camera_toggle, lifecycle_step, ControllerState, GestureEvent};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InteractionError {
    #[error("gesture `{event}` is not valid while the controller is `{state}`")]
    InvalidTransition {
        state: &'static str,
        event: &'static str,
    },
    #[error("no panel is open")]
    PanelNotOpen,
    #[error("`{0}` is not available in the current robot state")]
    AffordanceNotAvailable(String),
    #[error("unknown robot `{0}`")]
    UnknownRobot(RobotId),
    #[error("arrow magnitude {0} outside [0, 1]")]
    InvalidMagnitude(f64),
}
