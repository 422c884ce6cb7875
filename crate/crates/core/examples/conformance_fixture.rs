//! Prints the conformance tables shared with the operator console, or
//! rewrites the checked-in copy.
//!
//! ```bash
//! cargo run -p replica-core --example conformance_fixture
//! cargo run -p replica-core --example conformance_fixture -- fixtures/conformance.json
//! ```

use replica::interaction::fixture::{conformance_fixture, conformance_fixture_json};

fn main() -> std::io::Result<()> {
    match std::env::args().nth(1) {
        Some(path) => {
            std::fs::write(&path, conformance_fixture_json())?;
            let f = conformance_fixture();
            eprintln!(
                "wrote {path}: {} transitions, {} drone rows, {} AGV rows",
                f.lifecycle.len(),
                f.drone.len(),
                f.agv.len()
            );
        }
        None => print!("{}", conformance_fixture_json()),
    }
    Ok(())
}
