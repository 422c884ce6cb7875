//! Moves the drone through its four operational states and prints the
//! avatar colour and panel affordances in each.
//!
//! ```bash
//! cargo run -p replica-core --example drone_states
//! ```

use replica::interaction::{avatar_color, drone_op_state, robot_affordances};
use replica::sim::{RobotId, Scene, Vec3, WorldState};

fn show(
    label: &str,
    world: &WorldState,
    drone: &RobotId,
) -> Result<(), Box<dyn std::error::Error>> {
    let state = drone_op_state(world, drone)?;
    let set = robot_affordances(world, drone)?;
    let buttons: Vec<String> = set.buttons.iter().map(|b| b.to_string()).collect();
    println!(
        "{label:<26} {:<16} {:<10} arrows {:<5} buttons [{}]",
        format!("{state:?}"),
        format!("{:?}", avatar_color(state)),
        set.arrows_visible,
        buttons.join(", ")
    );
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut world = Scene::default_scene().build_world()?;
    let drone: RobotId = "drone".into();
    let place = |w: &mut WorldState, p: Vec3| {
        w.drones.get_mut(&drone).unwrap().pose.position = p;
    };

    show("on the takeoff pad", &world, &drone)?;
    place(&mut world, Vec3::new(0.0, 4.0, 2.0));
    show("flying, empty", &world, &drone)?;
    place(&mut world, Vec3::new(2.5, 0.0, 0.45));
    world.grasp(&drone)?;
    place(&mut world, Vec3::new(-1.0, -3.0, 0.45));
    show("carrying a box", &world, &drone)?;
    world.drones.get_mut(&drone).unwrap().autonomous_flight = true;
    show("carrying, autonomous", &world, &drone)?;
    world.drones.get_mut(&drone).unwrap().autonomous_flight = false;
    place(&mut world, Vec3::new(-1.2, 7.1, 0.45));
    show("over the landing pad", &world, &drone)?;
    Ok(())
}
