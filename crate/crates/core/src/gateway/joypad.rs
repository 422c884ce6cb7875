//! Joypad axes and buttons mapped onto the same arrows and buttons as the
//! replica panel, so both modalities share one validation path.
//!
//! | input     | drone          | AGV                               |
//! |-----------|----------------|-----------------------------------|
//! | left x    | ±x             | unused                            |
//! | left y    | ±y             | forward / backward                |
//! | right x   | yaw (+ is cw)  | yaw (+ is cw)                     |
//! | right y   | ±z             | unused                            |
//! | A         | Grasp          | route starting at the AGV's entry |
//! | B         | Release        | lift / lower forks                |
//! | X         | Rotate 90°     | go to charge                      |
//! | Y         | Align          | unused                            |

use super::protocol::{JoyAxes, JoyButton};
use crate::interaction::{Arrow, ButtonId};
use crate::sim::{RobotId, WorldState, ZoneKind};

fn axis(value: f64, pos: Arrow, neg: Arrow, out: &mut Vec<(Arrow, f64)>) {
    if value > 0.0 {
        out.push((pos, value));
    } else if value < 0.0 {
        out.push((neg, -value));
    }
}

/// Held arrows for the given stick deflections. Zero deflection holds no
/// arrow.
pub fn joypad_arrows(is_drone: bool, axes: &JoyAxes) -> Result<Vec<(Arrow, f64)>, String> {
    for v in [axes.left_x, axes.left_y, axes.right_x, axes.right_y] {
        if !(v.is_finite() && (-1.0..=1.0).contains(&v)) {
            return Err(format!("axis value {v} outside [-1, 1]"));
        }
    }
    let mut out = Vec::new();
    if is_drone {
        axis(axes.left_x, Arrow::PlusX, Arrow::MinusX, &mut out);
        axis(axes.left_y, Arrow::PlusY, Arrow::MinusY, &mut out);
        axis(axes.right_y, Arrow::PlusZ, Arrow::MinusZ, &mut out);
    } else {
        axis(axes.left_y, Arrow::Forward, Arrow::Backward, &mut out);
    }
    axis(axes.right_x, Arrow::YawCw, Arrow::YawCcw, &mut out);
    Ok(out)
}

/// Panel button a joypad button stands for on `robot`.
pub fn joypad_button(
    world: &WorldState,
    robot: &RobotId,
    button: JoyButton,
) -> Result<ButtonId, String> {
    if world.is_drone(robot) {
        return Ok(match button {
            JoyButton::A => ButtonId::Grasp,
            JoyButton::B => ButtonId::Release,
            JoyButton::X => ButtonId::Rotate90,
            JoyButton::Y => ButtonId::Align,
        });
    }
    let agv = world
        .agvs
        .get(robot)
        .ok_or_else(|| format!("unknown robot `{robot}`"))?;
    match button {
        JoyButton::A => {
            let pos = agv.pose.position;
            let entry = world
                .zone_containing(pos, ZoneKind::RouteEntry)
                .ok_or_else(|| format!("`{robot}` is not at a route entry"))?;
            world
                .routes
                .values()
                .find(|r| r.start().planar_distance(entry.center) < entry.radius)
                .map(|r| ButtonId::Route(r.id.clone()))
                .ok_or_else(|| format!("no route starts at `{}`", entry.id))
        }
        JoyButton::B => Ok(if agv.fork_raised {
            ButtonId::LowerForks
        } else {
            ButtonId::LiftForks
        }),
        JoyButton::X => Ok(ButtonId::GoToCharge),
        JoyButton::Y => Err("button Y has no AGV function".into()),
    }
}
