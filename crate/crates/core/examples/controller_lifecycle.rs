//! Steps the virtual controller through a gesture sequence, including a few
//! gestures that are not valid in the current state.
//!
//! ```bash
//! cargo run -p replica-core --example controller_lifecycle
//! ```

use replica::interaction::{camera_toggle, lifecycle_step, ControllerState, GestureEvent};

fn main() {
    let gestures = [
        GestureEvent::ReleaseDevice,
        GestureEvent::PalmUp,
        GestureEvent::ThumbUp,
        GestureEvent::GrabDevice {
            robot: "drone".into(),
        },
        GestureEvent::PalmUp,
        GestureEvent::ReleaseDevice,
        GestureEvent::HandNearRobot {
            robot: "drone".into(),
            near: true,
        },
        GestureEvent::StowDevice,
        GestureEvent::ThumbUp,
    ];
    let mut state = ControllerState::default();
    let mut camera = false;
    println!("start: {}", state.name());
    for g in &gestures {
        camera = camera_toggle(camera, g);
        if matches!(
            g,
            GestureEvent::ThumbUp | GestureEvent::HandNearRobot { .. }
        ) {
            println!(
                "{:<16}    camera {camera}, controller stays {}",
                g.name(),
                state.name()
            );
            continue;
        }
        match lifecycle_step(&state, g) {
            Ok(next) => {
                println!("{:<16} -> {:<15} camera {camera}", g.name(), next.name());
                state = next;
            }
            Err(e) => println!("{:<16} rejected: {e}; stays {}", g.name(), state.name()),
        }
    }
}
