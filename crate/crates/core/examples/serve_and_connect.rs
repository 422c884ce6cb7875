//! Starts the simulation service on a free port, connects a client, shows
//! the palette and prints the first messages the console would receive.
//!
//! ```bash
//! cargo run -p replica-core --example serve_and_connect
//! ```

use std::time::Duration;

use replica::gateway::protocol::{InboundBody, Outbound};
use replica::gateway::{serve, Client, ServeConfig};
use replica::interaction::GestureEvent;
use replica::orchestrator::StudyPlan;
use replica::sim::Scene;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("replica-example");
    let config = ServeConfig {
        port: 0,
        data_dir: dir,
        ..ServeConfig::default()
    };
    let server = serve(&config, Scene::default_scene(), StudyPlan::generate(4, 1))?;
    println!("listening on {}", server.addr());

    let mut client = Client::connect(server.addr())?;
    let wait = Duration::from_secs(2);
    let id = client.send(InboundBody::Hello {
        client: "example".into(),
    })?;
    if let Some(Outbound::Ack { hello: Some(h), .. }) = client.reply(id, wait) {
        println!(
            "protocol {} scene {} ({} drones, {} AGVs)",
            h.protocol_version,
            h.scene.name,
            h.scene.drones.len(),
            h.scene.agvs.len()
        );
    }
    client.send(InboundBody::Gesture {
        event: GestureEvent::PalmUp,
    })?;
    let mut seen = 0;
    while let Some(msg) = client.recv(Duration::from_millis(300)) {
        match &msg {
            Outbound::Snapshot { sim_time, .. } => println!("snapshot at t = {sim_time:.3}"),
            Outbound::AffordanceUpdate { controller, .. } => {
                println!("controller is now {}", controller.name())
            }
            other => println!("{}", other.name()),
        }
        seen += 1;
        if seen == 8 {
            break;
        }
    }
    server.shutdown();
    Ok(())
}
