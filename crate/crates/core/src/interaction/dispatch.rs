use serde::{Deserialize, Serialize};

use super::affordance::{robot_affordances, Arrow, ButtonId};
use super::{ControllerState, InteractionError};
use crate::sim::{RobotId, RouteId, SimError, Vec3, WorldState};

/// What the operator pressed on an open panel.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", content = "id", rename_all = "snake_case")]
pub enum PanelAction {
    Arrow(Arrow),
    Button(ButtonId),
}

/// A validated command for the simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum SimCommand {
    CommandDrone {
        robot: RobotId,
        velocity: Vec3,
        yaw_rate: f64,
    },
    CommandAgv {
        robot: RobotId,
        forward_speed: f64,
        yaw_rate: f64,
    },
    Grasp {
        robot: RobotId,
    },
    Release {
        robot: RobotId,
    },
    RotateQuarter {
        robot: RobotId,
    },
    AlignToPad {
        robot: RobotId,
    },
    AssignRoute {
        robot: RobotId,
        route: RouteId,
    },
    SetForks {
        robot: RobotId,
        raised: bool,
    },
    GoToCharge {
        robot: RobotId,
    },
}

impl SimCommand {
    pub fn robot(&self) -> &RobotId {
        match self {
            SimCommand::CommandDrone { robot, .. }
            | SimCommand::CommandAgv { robot, .. }
            | SimCommand::Grasp { robot }
            | SimCommand::Release { robot }
            | SimCommand::RotateQuarter { robot }
            | SimCommand::AlignToPad { robot }
            | SimCommand::AssignRoute { robot, .. }
            | SimCommand::SetForks { robot, .. }
            | SimCommand::GoToCharge { robot } => robot,
        }
    }

    pub fn apply(&self, world: &mut WorldState) -> Result<(), SimError> {
        match self {
            SimCommand::CommandDrone {
                robot,
                velocity,
                yaw_rate,
            } => world.command_drone(robot, *velocity, *yaw_rate),
            SimCommand::CommandAgv {
                robot,
                forward_speed,
                yaw_rate,
            } => world.command_agv(robot, *forward_speed, *yaw_rate),
            SimCommand::Grasp { robot } => world.grasp(robot).map(drop),
            SimCommand::Release { robot } => world.release(robot).map(drop),
            SimCommand::RotateQuarter { robot } => world.rotate_quarter(robot).map(drop),
            SimCommand::AlignToPad { robot } => world.align_to_pad(robot).map(drop),
            SimCommand::AssignRoute { robot, route } => world.assign_route(robot, route),
            SimCommand::SetForks { robot, raised } => world.set_forks(robot, *raised),
            SimCommand::GoToCharge { robot } => world.go_to_charge(robot).map(drop),
        }
    }
}

fn check_magnitude(m: f64) -> Result<f64, InteractionError> {
    if m.is_finite() && (0.0..=1.0).contains(&m) {
        Ok(m)
    } else {
        Err(InteractionError::InvalidMagnitude(m))
    }
}

/// Validates `action` against the live affordances of the robot whose panel
/// is open and turns it into a simulation command. Arrow magnitudes in
/// [0, 1] scale the robot's maximum speed.
pub fn dispatch(
    ctrl: &ControllerState,
    world: &WorldState,
    action: &PanelAction,
    magnitude: f64,
) -> Result<SimCommand, InteractionError> {
    match action {
        PanelAction::Arrow(arrow) => dispatch_arrows(ctrl, world, &[(*arrow, magnitude)]),
        PanelAction::Button(button) => {
            let robot = ctrl.open_panel().ok_or(InteractionError::PanelNotOpen)?;
            check_magnitude(magnitude)?;
            let set = robot_affordances(world, robot)?;
            if !set.allows_button(button) {
                return Err(InteractionError::AffordanceNotAvailable(button.to_string()));
            }
            let robot = robot.clone();
            Ok(match button {
                ButtonId::Grasp => SimCommand::Grasp { robot },
                ButtonId::Release => SimCommand::Release { robot },
                ButtonId::Rotate90 => SimCommand::RotateQuarter { robot },
                ButtonId::Align => SimCommand::AlignToPad { robot },
                ButtonId::Route(route) => SimCommand::AssignRoute {
                    robot,
                    route: route.clone(),
                },
                ButtonId::LiftForks => SimCommand::SetForks {
                    robot,
                    raised: true,
                },
                ButtonId::LowerForks => SimCommand::SetForks {
                    robot,
                    raised: false,
                },
                ButtonId::GoToCharge => SimCommand::GoToCharge { robot },
            })
        }
    }
}

/// Several arrows held at once (a joypad stick, or an empty list to stop)
/// combined into a single motion command. Every nonzero arrow must be live.
pub fn dispatch_arrows(
    ctrl: &ControllerState,
    world: &WorldState,
    arrows: &[(Arrow, f64)],
) -> Result<SimCommand, InteractionError> {
    let robot = ctrl.open_panel().ok_or(InteractionError::PanelNotOpen)?;
    let set = robot_affordances(world, robot)?;
    if !set.arrows_visible {
        return Err(InteractionError::AffordanceNotAvailable("arrows".into()));
    }
    for (arrow, m) in arrows {
        check_magnitude(*m)?;
        if !set.allows_arrow(*arrow) {
            return Err(InteractionError::AffordanceNotAvailable(format!(
                "{arrow:?}"
            )));
        }
    }
    let cfg = &world.config;
    let yaw_rate: f64 = arrows
        .iter()
        .map(|(a, m)| match a {
            Arrow::YawCcw => m * cfg.omega_max,
            Arrow::YawCw => -m * cfg.omega_max,
            _ => 0.0,
        })
        .sum();
    let robot = robot.clone();
    if world.is_drone(&robot) {
        let velocity = arrows.iter().fold(Vec3::ZERO, |v, (a, m)| {
            let s = m * cfg.v_max_drone;
            v + match a {
                Arrow::PlusX => Vec3::new(s, 0.0, 0.0),
                Arrow::MinusX => Vec3::new(-s, 0.0, 0.0),
                Arrow::PlusY => Vec3::new(0.0, s, 0.0),
                Arrow::MinusY => Vec3::new(0.0, -s, 0.0),
                Arrow::PlusZ => Vec3::new(0.0, 0.0, s),
                Arrow::MinusZ => Vec3::new(0.0, 0.0, -s),
                _ => Vec3::ZERO,
            }
        });
        Ok(SimCommand::CommandDrone {
            robot,
            velocity,
            yaw_rate,
        })
    } else {
        let forward_speed = arrows
            .iter()
            .map(|(a, m)| match a {
                Arrow::Forward => m * cfg.v_max_agv,
                Arrow::Backward => -m * cfg.v_max_agv,
                _ => 0.0,
            })
            .sum();
        Ok(SimCommand::CommandAgv {
            robot,
            forward_speed,
            yaw_rate,
        })
    }
}
