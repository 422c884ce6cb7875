//! Drives an AGV along a constant-curvature arc and spins the drone, printing
//! poses as the fixed-step integrator advances.
//!
//! ```bash
//! cargo run -p replica-core --example kinematics
//! ```

use replica::sim::{wrap_angle, RobotId, Scene, Vec3};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut world = Scene::default_scene().build_world()?;
    let agv: RobotId = "agv1".into();
    let drone: RobotId = "drone".into();
    world.agvs.get_mut(&agv).unwrap().active_route = None;

    let (v, omega) = (0.5, 0.25);
    world.command_agv(&agv, v, omega)?;
    world.command_drone(&drone, Vec3::new(0.0, 0.0, 0.2), 0.5)?;
    let dt = world.config.dt;
    let start = world.agvs[&agv].pose;
    println!(
        "dt = {dt} s, AGV v = {v} m/s, omega = {omega} rad/s, radius {} m",
        v / omega
    );
    println!(
        "{:>6}  {:>8} {:>8} {:>8}  {:>8} {:>8}",
        "t", "agv x", "agv y", "agv yaw", "drone z", "drone yaw"
    );
    let steps_per_print = (1.0 / dt).round() as usize;
    for second in 0..=8 {
        let a = world.agvs[&agv].pose;
        let d = world.drones[&drone].pose;
        println!(
            "{:>6.1}  {:>8.3} {:>8.3} {:>8.3}  {:>8.3} {:>8.3}",
            second as f64, a.position.x, a.position.y, a.yaw, d.position.z, d.yaw
        );
        for _ in 0..steps_per_print {
            world.step(dt);
        }
    }
    let end = world.agvs[&agv].pose;
    let travelled = wrap_angle(end.yaw - start.yaw);
    println!("AGV heading changed by {travelled:.4} rad; no lateral motion is ever commanded");
    Ok(())
}
