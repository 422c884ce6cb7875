//! Warehouse simulation for commanding heterogeneous robots through
//! virtual-replica controllers.
//!
//! The crate is organised in five layers:
//!
//! * [`sim`]: deterministic fixed-step world with a drone, nonholonomic AGVs,
//!   boxes, pads and preprogrammed routes.
//! * [`interaction`]: the controller lifecycle (gateway sign, grab, release,
//!   stow), the drone operational state machine, affordance sets, avatar
//!   colours and affordance-gated command dispatch.
//! * [`orchestrator`]: counterbalanced study plans and the timed session
//!   protocol with secondary-task notifications.
//! * [`metrics`]: event logs, timing metrics, SUS scoring, paired t-tests and
//!   study reports.
//! * [`gateway`]: the wire protocol, the session engine, the headless scripted
//!   agent with archive/replay, and the socket server.
//!
//! Every major capability has a runnable program under `examples/`:
//!
//! ```bash
//! cargo run -p replica-core --example kinematics
//! cargo run -p replica-core --example drone_states
//! cargo run -p replica-core --example controller_lifecycle
//! cargo run -p replica-core --example study_plan
//! cargo run -p replica-core --example headless_study
//! cargo run -p replica-core --example analyze_cohort
//! cargo run -p replica-core --example serve_and_connect
//! cargo run -p replica-core --example conformance_fixture
//! ```

pub mod gateway;
pub mod interaction;
pub mod metrics;
pub mod orchestrator;
pub mod sim;
